#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gridsched::cli {

/// One parsed invocation of the command line tool.
struct RunConfig {
  std::string command;
  std::string config_path;
  std::string forecasts_path;
  std::string input_path;  ///< scenario CSV for reduce-scenarios
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> scenarios;
  std::optional<std::size_t> reduce;
  std::string sweep_param;
  std::vector<double> sweep_values;
};

/// Sweep knobs accepted per problem kind.
const std::vector<std::string>& ev_hvac_knobs();
const std::vector<std::string>& mg_bid_knobs();

/// Parses "PARAM=v1,v2,...". Throws invalid-parameter on malformed input.
void parse_sweep(const std::string& text, RunConfig& config);

/// Executes one command; throws gridsched::Error on failure.
void run(const RunConfig& config);

/// Full entry point: parses argv, runs, prints an error JSON object on
/// stderr and returns a nonzero status on failure.
int main_entry(int argc, char** argv);

}  // namespace gridsched::cli
