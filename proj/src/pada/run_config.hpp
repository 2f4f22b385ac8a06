#pragma once

#include <string>
#include <vector>

#include "pada/config.hpp"
#include "pada/simulate.hpp"

namespace pada {

// One flat JSON object drives every subcommand; command-line flags override
// file values downstream. Unknown keys are rejected so typos fail loudly.
// grid_size, freq_half and seed apply to both the model and the simulator.
struct RunConfig {
  ModelConfig model;
  SimSpec sim;
  std::string input;   // curve CSV (fit)
  std::string bundle;  // model bundle directory (reconstruct, forecast)
  std::string out = ".";
  int horizon = 10;
  double level = 0.95;
  int reps = 20;
  std::vector<std::string> methods = {"pada", "nonopt", "static"};
};

RunConfig load_run_config(const std::string& path);

// parses one JSON object from text; `origin` labels error messages
void apply_run_config_text(RunConfig& rc, const std::string& text,
                           const std::string& origin);

}  // namespace pada
