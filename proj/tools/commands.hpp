#pragma once

#include "run_config.hpp"

namespace sqsd::cli {

int cmd_plan(const RunConfig& cfg);
int cmd_simulate(const RunConfig& cfg);
int cmd_maps(const RunConfig& cfg);
int cmd_routing(const RunConfig& cfg);
int cmd_bounds(const RunConfig& cfg);
int cmd_scaling(const RunConfig& cfg);

}  // namespace sqsd::cli
