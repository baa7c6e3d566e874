#pragma once

// Joint EV + HVAC day-ahead scheduling for one household or a community
// sharing a grid connection, plus the uncontrolled reference behaviour.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "gridsched/devices.hpp"
#include "gridsched/optmodel.hpp"
#include "gridsched/thermal.hpp"

namespace gridsched::evhvac {

struct ElectricVehicle {
  std::string id;
  devices::EvSpec spec;
  devices::TripPlan trips;
};

struct Household {
  std::string id;
  devices::HvacSpec hvac;
  thermal::ThermalState initial_state;
  std::vector<ElectricVehicle> evs;
};

struct CommunityProblem {
  std::vector<Household> households;
  std::vector<double> prices;      ///< $/kWh per slot
  std::vector<double> ambient;     ///< degC per slot
  std::vector<double> irradiance;  ///< kW/m^2 per slot
  std::vector<double> grid_limit;  ///< kW per slot
  double dt = 1.0;                 ///< hours
  int horizon = 24;
  bool v2g_allowed = false;

  void validate() const;
};

struct EvSchedule {
  std::string id;
  std::vector<double> charge;     ///< kW per slot
  std::vector<double> discharge;  ///< kW per slot
  std::vector<double> soc;        ///< horizon + 1 values, soc[0] initial
};

struct HouseSchedule {
  std::string id;
  std::vector<double> hvac_power;              ///< kW per slot
  std::vector<thermal::ThermalState> states;   ///< horizon + 1 values
  std::vector<EvSchedule> evs;

  std::vector<double> indoor_temperature() const;
};

struct EvHvacSchedule {
  std::vector<double> grid_import;  ///< kW per slot, negative when selling
  std::vector<HouseSchedule> households;
  double j_elec = 0.0;
  double j_discomfort = 0.0;
  double j_tot = 0.0;
  std::size_t simultaneity_fixes = 0;  ///< slots changed by the no-simultaneity post-pass
  std::vector<std::string> warnings;

  /// Largest |T_in - T_desired| over occupied slots.
  double max_comfort_deviation(const CommunityProblem& problem) const;
};

struct EvIndex {
  std::vector<opt::VarId> charge;
  std::vector<opt::VarId> discharge;
  std::vector<opt::VarId> soc;  ///< horizon + 1
};

struct HouseIndex {
  std::vector<opt::VarId> hvac;
  /// states[t] holds (t_in, t_m, t_e) at slot boundary t + 1.
  std::vector<std::array<opt::VarId, 3>> states;
  std::vector<std::optional<opt::VarId>> abs_dev;
  std::vector<EvIndex> evs;
};

struct JointIndex {
  std::vector<HouseIndex> households;
};

/// Requirement groups that can be switched off for infeasibility triage.
struct BuildOptions {
  bool comfort = true;
  bool soc_bounds = true;
  bool grid_limit = true;
};

struct JointModel {
  opt::OptModel model;
  JointIndex index;
};

JointModel build_joint_model(const CommunityProblem& problem, const BuildOptions& options = {});

/// Groups whose relaxation restores feasibility, in triage order; empty when
/// the problem is feasible or no single relaxation helps.
std::vector<std::string> diagnose_infeasibility(const CommunityProblem& problem);

EvHvacSchedule solve_schedule(const CommunityProblem& problem, const opt::LpOptions& lp = {});

/// Thermostat tracking of the desired temperature and charge-on-arrival EVs.
/// target_final_soc holds one value per EV in household order.
EvHvacSchedule uncontrolled_baseline(const CommunityProblem& problem,
                                     const std::vector<double>& target_final_soc);

/// Terminal SOC of every EV in household order.
std::vector<double> terminal_socs(const EvHvacSchedule& schedule);

/// Percentage electricity-cost saving of `optimal` relative to `baseline`.
double cost_saving(const EvHvacSchedule& optimal, const EvHvacSchedule& baseline);

struct IndividualResult {
  std::vector<EvHvacSchedule> schedules;
  double combined_cost = 0.0;  ///< sum of J_tot
};

/// Every household optimizes alone against its own grid connection. The
/// per-house limit defaults to the community limit.
IndividualResult solve_individual(const CommunityProblem& problem,
                                  const std::optional<std::vector<double>>& house_limit = {},
                                  const opt::LpOptions& lp = {});

}  // namespace gridsched::evhvac
