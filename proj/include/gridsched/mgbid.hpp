#pragma once

// Two-stage stochastic day-ahead bidding of a grid-connected microgrid with
// conventional units, wind, solar, batteries and HVAC-controlled buildings.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "gridsched/devices.hpp"
#include "gridsched/optmodel.hpp"
#include "gridsched/scenario.hpp"
#include "gridsched/thermal.hpp"

namespace gridsched::mgbid {

/// A class of identical buildings; `count` scales its HVAC load and
/// discomfort in the aggregate.
struct Building {
  std::string id;
  devices::HvacSpec hvac;
  thermal::ThermalState initial_state;
  int count = 1;
};

/// Per-slot market and penalty parameters; costs in $/kWh.
struct MarketParams {
  std::vector<double> bid_deviation_penalty;   ///< psi_t
  std::vector<double> value_of_lost_load;      ///< V^LL_t
  std::vector<double> wind_curtail_cost;       ///< V^W_t
  std::vector<double> solar_curtail_cost;      ///< V^PV_t
  std::optional<std::vector<double>> line_capacity;  ///< P^{g,max}_t, kW
  std::optional<std::vector<double>> max_shed;       ///< LS^max_t, kW; absent: the scenario load
  std::vector<double> max_loss_of_load_ratio;  ///< LOL^max_t

  /// Same value in every slot.
  static MarketParams uniform(int horizon, double psi, double voll, double v_res, double lol);
  void validate(int horizon) const;
};

struct MicrogridConfig {
  std::vector<devices::ConventionalUnit> units;
  std::vector<devices::WindSpec> wind;
  std::vector<devices::SolarSpec> solar;
  std::vector<devices::BatterySpec> batteries;
  std::vector<Building> buildings;
  MarketParams market;
  double dt = 1.0;
  int horizon = 24;

  void validate() const;
};

struct FirstStageDecision {
  std::vector<std::vector<double>> commitment;     ///< [unit][slot]
  std::vector<std::vector<double>> startup;        ///< y
  std::vector<std::vector<double>> shutdown;       ///< z
  std::vector<std::vector<double>> startup_cost;   ///< SU, $
  std::vector<std::vector<double>> shutdown_cost;  ///< SD, $
  std::vector<double> bid;                         ///< kW, positive sells
};

struct UnitDispatch {
  std::vector<double> power;                  ///< [slot]
  std::vector<std::vector<double>> segments;  ///< [slot][segment]
};

struct BuildingDispatch {
  std::vector<double> hvac_power;             ///< per building of the class
  std::vector<thermal::ThermalState> states;  ///< horizon + 1
};

struct BatteryDispatch {
  std::vector<double> charge;
  std::vector<double> discharge;
  std::vector<double> charge_mode;
  std::vector<double> discharge_mode;
  std::vector<double> energy;  ///< horizon + 1, energy[0] initial
};

struct SecondStageDecision {
  std::size_t scenario_id = 0;
  double probability = 0.0;
  std::vector<UnitDispatch> units;
  std::vector<double> delivery;  ///< kW, positive exports
  std::vector<BuildingDispatch> buildings;
  std::vector<BatteryDispatch> batteries;
  std::vector<double> shed;
  std::vector<std::vector<double>> wind_available;     ///< [turbine][slot]
  std::vector<std::vector<double>> wind_curtailment;
  std::vector<std::vector<double>> solar_available;
  std::vector<std::vector<double>> solar_curtailment;
};

struct ProfitReport {
  /// Day-ahead plus balancing revenue, net of the bid-deviation charge.
  double expected_revenue = 0.0;
  double startup_shutdown_cost = 0.0;
  double expected_generation_cost = 0.0;
  double expected_discomfort_penalty = 0.0;
  double expected_battery_degradation = 0.0;
  double expected_shed_penalty = 0.0;
  double expected_wind_curtailment_penalty = 0.0;
  double expected_solar_curtailment_penalty = 0.0;
  /// Already deducted inside expected_revenue.
  double expected_bid_deviation_charge = 0.0;
  double total_expected_profit = 0.0;
  double total_expected_renewable_curtailment_kwh = 0.0;
};

struct BiddingSolution {
  opt::SolveStatus status = opt::SolveStatus::Infeasible;
  double objective = 0.0;
  std::size_t nodes = 0;
  std::size_t iterations = 0;
  FirstStageDecision first;
  std::vector<SecondStageDecision> second;
  ProfitReport profit;
};

struct UnitIndex {
  std::vector<opt::VarId> commit, startup, shutdown, startup_cost, shutdown_cost;
};

struct ScenarioIndex {
  std::vector<std::vector<opt::VarId>> unit_power;                 ///< [unit][slot]
  std::vector<std::vector<std::vector<opt::VarId>>> unit_segment;  ///< [unit][slot][segment]
  std::vector<opt::VarId> delivery;
  std::vector<opt::VarId> shed;
  std::vector<std::vector<opt::VarId>> wind_curtailment;
  std::vector<std::vector<opt::VarId>> solar_curtailment;
  std::vector<std::vector<opt::VarId>> hvac;                              ///< [building][slot]
  std::vector<std::vector<std::array<opt::VarId, 3>>> states;             ///< slot boundary t+1
  std::vector<std::vector<opt::VarId>> charge, discharge, charge_mode, discharge_mode;
  std::vector<std::vector<opt::VarId>> energy;                            ///< horizon + 1
};

struct BidIndex {
  std::vector<UnitIndex> units;
  std::vector<opt::VarId> bid;
  std::vector<ScenarioIndex> scenarios;
};

/// Constraint families that relaxation probing may switch off.
struct BuildOptions {
  bool shed_limits = true;
  bool comfort = true;
  bool line_capacity = true;
};

struct BidModel {
  opt::OptModel model;
  BidIndex index;
};

BidModel build_two_stage_model(const MicrogridConfig& mg, const scenario::ScenarioSet& scenarios,
                               const BuildOptions& options = {});

/// Recomputes every profit term from primal decisions, independent of the
/// model's auxiliary variables.
ProfitReport profit_breakdown(const MicrogridConfig& mg, const scenario::ScenarioSet& scenarios,
                              const BiddingSolution& solution);

/// Solves the deterministic equivalent, extracts decisions and checks the
/// recomputed profit against the solver objective. Throws infeasible with
/// the first family whose relaxation restores feasibility.
BiddingSolution solve_bidding(const MicrogridConfig& mg, const scenario::ScenarioSet& scenarios,
                              const opt::MilpOptions& options = {});

/// HVAC-only cost minimization of the uncoordinated scheme.
struct HvacOnlyResult {
  std::vector<double> bid;  ///< kW bought day-ahead per slot
  std::vector<std::vector<double>> aggregate;  ///< [scenario][slot] kW
  double expected_trading_cost = 0.0;  ///< day-ahead plus balancing payments
  double expected_deviation_charge = 0.0;
  double expected_discomfort_penalty = 0.0;
  double expected_cost = 0.0;  ///< sum of the three
};

HvacOnlyResult solve_hvac_only(const MicrogridConfig& mg, const scenario::ScenarioSet& scenarios,
                               const opt::LpOptions& options = {});

struct SchemeResult {
  int scheme = 1;
  double profit = 0.0;  ///< expected profit, combined for scheme 3
  ProfitReport report;
  BiddingSolution solution;  ///< scheme 3: the HVAC-free microgrid problem
  std::optional<HvacOnlyResult> hvac_only;
};

SchemeResult run_scheme(const MicrogridConfig& mg, const scenario::ScenarioSet& scenarios,
                        int scheme, const opt::MilpOptions& options = {});

/// Largest |power-balance residual| over scenarios and slots, kW.
double max_balance_residual(const MicrogridConfig& mg, const scenario::ScenarioSet& scenarios,
                            const BiddingSolution& solution);

}  // namespace gridsched::mgbid
