#pragma once

// Device models shared by both schedulers: EV battery and trips, stationary
// battery, conventional generating units and renewable power curves.

#include <cstddef>
#include <string>
#include <vector>

#include "gridsched/thermal.hpp"

namespace gridsched::devices {

struct EvSpec {
  double capacity = 24.0;  ///< kWh
  double eta_c = 0.9;
  double eta_d = 0.9;
  double p_charge_max = 6.0;     ///< kW
  double p_discharge_max = 6.0;  ///< kW
  double soc_min = 0.2;
  double soc_max = 0.9;
  double travel_efficiency = 0.316;  ///< kWh per distance unit declared in the config
  double soc_initial = 0.5;

  void validate() const;
};

/// One round trip. The EV is away during slots [depart_slot, return_slot).
struct Trip {
  int depart_slot = 0;
  int return_slot = 0;
  double distance = 0.0;
};

struct TripPlan {
  std::vector<Trip> trips;

  /// Throws invalid-parameter on unordered, overlapping or out-of-horizon trips.
  void validate(int horizon) const;
  /// b_t for t in [0, horizon): 1 when parked at home.
  std::vector<int> availability(int horizon) const;
};

struct HvacSpec {
  double rated_power = 4.0;  ///< kW electrical
  thermal::BuildingThermalParams thermal;
  std::vector<double> desired_temp;       ///< degC, one per slot
  std::vector<double> max_deviation;      ///< degC, one per slot
  std::vector<int> occupancy;             ///< 0/1, one per slot
  std::vector<double> discomfort_weight;  ///< $/degC, one per slot

  /// Per-slot arrays must all have `horizon` entries.
  void validate(int horizon) const;
};

struct BatterySpec {
  double capacity = 200.0;  ///< kWh
  double e_min = 40.0;
  double e_max = 180.0;
  double p_charge_max = 100.0;
  double p_discharge_max = 100.0;
  double eta_c = 0.95;
  double eta_d = 0.95;
  double degradation_cost = 0.00027;  ///< $/kWh
  double e_initial = 110.0;

  void validate() const;
};

struct CostSegment {
  double marginal_cost = 0.0;  ///< $/kWh
  double width = 0.0;          ///< kW
};

struct ConventionalUnit {
  std::string name;
  double p_min = 0.0;
  double p_max = 0.0;
  std::vector<CostSegment> segments;
  double fixed_cost = 0.0;  ///< $ per committed slot
  double startup_cost = 0.0;
  double shutdown_cost = 0.0;
  double ramp_up = 0.0;    ///< kW per slot
  double ramp_down = 0.0;  ///< kW per slot
  int min_up = 0;          ///< slots
  int min_down = 0;        ///< slots
  int initial_status = -1; ///< >0: slots already ON, <0: slots already OFF

  void validate() const;
  bool initially_on() const { return initial_status > 0; }
  /// Number of leading slots the unit is forced ON (first) or OFF (second)
  /// by its initial status, truncated to the horizon.
  int forced_on_slots(int horizon) const;
  int forced_off_slots(int horizon) const;
};

struct WindSpec {
  double rated_power = 1000.0;  ///< kW
  double v_cut_in = 3.0;
  double v_rated = 12.0;
  double v_cut_out = 30.0;

  void validate() const;
};

struct SolarSpec {
  double efficiency = 0.157;
  double area = 7000.0;  ///< m^2

  void validate() const;
};

double ev_soc_step(const EvSpec& spec, double soc, double p_charge, double p_discharge,
                   double dt);

/// SOC on return from a trip. Throws infeasible-trip when the battery cannot
/// cover the distance.
double ev_apply_trip(const EvSpec& spec, double soc_at_departure, double distance);

double wind_available_power(const WindSpec& spec, double wind_speed);

double solar_available_power(const SolarSpec& spec, double irradiance, double ambient);

double battery_energy_step(const BatterySpec& spec, double energy, double p_charge,
                           double p_discharge, double dt);

/// Fixed cost plus greedy fill of the (convex) cost segments above p_min.
double unit_production_cost(const ConventionalUnit& unit, bool committed, double power,
                            double dt);

enum class ViolationKind {
  GenerationBounds,
  RampUp,
  RampDown,
  MinUp,
  MinDown,
  InitialStatus,
  Indicator,
};

const char* to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  int slot;  ///< 0-based
  std::string detail;
};

/// Independent check of a commitment/dispatch schedule against the unit
/// commitment rules. An empty result means feasible.
std::vector<Violation> validate_unit_schedule(const ConventionalUnit& unit,
                                              const std::vector<double>& commitments,
                                              const std::vector<double>& powers,
                                              double tol = 1e-6);

}  // namespace gridsched::devices
