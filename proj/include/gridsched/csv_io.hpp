#pragma once

// CSV readers and writers. Numbers are written in fixed scientific form with
// 12 significant digits; scenario probabilities use 17 so that a set still
// sums to one after a round trip.

#include <string>

#include "gridsched/evhvac.hpp"
#include "gridsched/mgbid.hpp"
#include "gridsched/scenario.hpp"

namespace gridsched::io {

/// "%.11e" formatting.
std::string format_number(double v);

/// Header `slot,price_da,price_rt,ambient_c,irradiance,wind_mps,load_kw` in
/// any column order, slots contiguous from 1. `source` names the input in
/// error messages.
scenario::ForecastSeries parse_forecasts(const std::string& text,
                                         const std::string& source = "forecast");
scenario::ForecastSeries load_forecasts(const std::string& path);
std::string forecasts_to_csv(const scenario::ForecastSeries& forecast);

/// One row per (scenario, slot): scenario_id,prob,slot and the six series.
std::string scenarios_to_csv(const scenario::ScenarioSet& set);
scenario::ScenarioSet parse_scenarios(const std::string& text,
                                      const std::string& source = "scenarios");
scenario::ScenarioSet load_scenarios(const std::string& path);

/// Per-slot schedule: price, grid import, then HVAC power and indoor
/// temperature per household and charge, discharge and end-of-slot SOC per EV.
std::string schedule_to_csv(const evhvac::CommunityProblem& problem,
                            const evhvac::EvHvacSchedule& schedule);

/// First-stage decisions: bid and commitment per slot.
std::string first_stage_to_csv(const mgbid::MicrogridConfig& mg,
                               const mgbid::BiddingSolution& solution);

/// Second-stage decisions, one row per (scenario, slot).
std::string dispatch_to_csv(const mgbid::MicrogridConfig& mg,
                            const mgbid::BiddingSolution& solution);

std::string read_file(const std::string& path);

/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace gridsched::io
