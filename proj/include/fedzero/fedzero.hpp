#pragma once

/// @file fedzero.hpp
/// @brief Everything at once.

#include <fedzero/baselines/strategies.hpp>
#include <fedzero/core/client_presets.hpp>
#include <fedzero/core/random.hpp>
#include <fedzero/core/scenario.hpp>
#include <fedzero/core/types.hpp>
#include <fedzero/fairness/ledger.hpp>
#include <fedzero/fairness/utility.hpp>
#include <fedzero/harness/environment.hpp>
#include <fedzero/harness/experiment.hpp>
#include <fedzero/harness/output.hpp>
#include <fedzero/harness/profile.hpp>
#include <fedzero/io/csv.hpp>
#include <fedzero/io/scenario_json.hpp>
#include <fedzero/runtime/round_runtime.hpp>
#include <fedzero/selection/domain_problem.hpp>
#include <fedzero/selection/filters.hpp>
#include <fedzero/selection/selector.hpp>
#include <fedzero/selection/types.hpp>
#include <fedzero/solver/lp.hpp>
#include <fedzero/solver/mip.hpp>
#include <fedzero/traces/forecast_model.hpp>
#include <fedzero/traces/generators.hpp>
#include <fedzero/traces/resources.hpp>
#include <fedzero/traces/trace_series.hpp>
#include <fedzero/training/proxy.hpp>
