#pragma once

#include "satrand/bit_matrix.hpp"
#include "satrand/cnf.hpp"
#include "satrand/error.hpp"
#include "satrand/firewall.hpp"
#include "satrand/formula.hpp"
#include "satrand/linear_system.hpp"
#include "satrand/matrix_randomizer.hpp"
#include "satrand/mincost.hpp"
#include "satrand/objective.hpp"
#include "satrand/oracle.hpp"
#include "satrand/permute_flip.hpp"
#include "satrand/rng.hpp"
#include "satrand/sat_solver.hpp"
#include "satrand/solution_set.hpp"
#include "satrand/orchestrator.hpp"
#include "satrand/record.hpp"
