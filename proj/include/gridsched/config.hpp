#pragma once

// JSON entity configuration for both problem kinds. Every validation error
// carries a path into the document, e.g. "$.households[0].evs[1]".

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "gridsched/evhvac.hpp"
#include "gridsched/mgbid.hpp"
#include "gridsched/optmodel.hpp"
#include "gridsched/scenario.hpp"

namespace gridsched::config {

inline constexpr int kSchemaVersion = 1;

enum class ProblemKind { EvHvac, MgBid };

const char* to_string(ProblemKind kind);

enum class DistanceUnit { Km, Mile };

struct ScenarioControls {
  std::size_t n = 3000;
  std::size_t k = 15;
  std::uint64_t seed = 1;
  scenario::UncertaintySpec uncertainty;
  std::array<double, scenario::kSeriesCount> distance_weights = {1, 1, 1, 1, 1, 1};
};

/// Parsed entity file. `community` is set for ev-hvac documents and has
/// empty price, ambient and irradiance series until a forecast is attached.
struct EntityConfig {
  ProblemKind kind = ProblemKind::EvHvac;
  std::optional<evhvac::CommunityProblem> community;
  std::optional<mgbid::MicrogridConfig> microgrid;
  DistanceUnit distance_unit = DistanceUnit::Km;
  ScenarioControls scenarios;
  opt::MilpOptions solver;
};

/// Throws load-error naming the document path of the first problem.
EntityConfig parse_entities(const std::string& json_text);
EntityConfig load_entities(const std::string& path);

/// Copies the day-ahead price, ambient temperature and irradiance columns
/// into the community problem.
void attach_forecast(evhvac::CommunityProblem& problem, const scenario::ForecastSeries& forecast);

/// Total forecast wind plus solar energy over the horizon, kWh.
double forecast_renewable_energy(const mgbid::MicrogridConfig& mg,
                                 const scenario::ForecastSeries& forecast);

/// Scales the load series so that total load / total forecast renewable
/// energy equals `lsf`.
void apply_load_scaling(scenario::ForecastSeries& forecast, const mgbid::MicrogridConfig& mg,
                        double lsf);

}  // namespace gridsched::config
