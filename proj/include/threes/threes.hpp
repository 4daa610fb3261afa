#pragma once

#include "threes/causal_analysis.hpp"
#include "threes/cnf.hpp"
#include "threes/core_model.hpp"
#include "threes/errors.hpp"
#include "threes/instances.hpp"
#include "threes/macro_planner.hpp"
#include "threes/oracle.hpp"
#include "threes/plan_json.hpp"
#include "threes/plan_tools.hpp"
#include "threes/problem_json.hpp"
#include "threes/reductions.hpp"
#include "threes/var_set.hpp"
