#include "gridsched/devices.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gridsched/error.hpp"

namespace gridsched::devices {

namespace {

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

void require_efficiency(double eta, const char* name) {
  require(eta > 0.0 && eta <= 1.0, ErrorKind::InvalidParameter,
          std::string(name) + " must lie in (0, 1]");
}

void require_non_negative_powers(double p_charge, double p_discharge) {
  require(p_charge >= 0.0 && p_discharge >= 0.0, ErrorKind::InvalidParameter,
          "charge and discharge powers must be non-negative");
}

}  // namespace

void EvSpec::validate() const {
  require(finite_positive(capacity), ErrorKind::InvalidParameter, "EV capacity must be positive");
  require(finite_positive(p_charge_max), ErrorKind::InvalidParameter,
          "EV charge rating must be positive");
  require(std::isfinite(p_discharge_max) && p_discharge_max >= 0.0, ErrorKind::InvalidParameter,
          "EV discharge rating must be non-negative");
  require_efficiency(eta_c, "EV eta_c");
  require_efficiency(eta_d, "EV eta_d");
  require(soc_min >= 0.0 && soc_min < soc_max && soc_max <= 1.0, ErrorKind::InvalidParameter,
          "EV SOC bounds must satisfy 0 <= soc_min < soc_max <= 1");
  require(soc_initial >= soc_min && soc_initial <= soc_max, ErrorKind::InvalidParameter,
          "EV initial SOC must lie within [soc_min, soc_max]");
  require(std::isfinite(travel_efficiency) && travel_efficiency >= 0.0,
          ErrorKind::InvalidParameter, "EV travel efficiency must be non-negative");
}

void TripPlan::validate(int horizon) const {
  int previous_return = 0;
  for (std::size_t l = 0; l < trips.size(); ++l) {
    const Trip& trip = trips[l];
    std::ostringstream where;
    where << "trip " << l;
    require(trip.depart_slot < trip.return_slot, ErrorKind::InvalidParameter,
            where.str() + ": depart_slot must precede return_slot");
    require(trip.depart_slot >= previous_return, ErrorKind::InvalidParameter,
            where.str() + ": trips must be ordered and non-overlapping");
    require(trip.depart_slot >= 0 && trip.return_slot <= horizon, ErrorKind::InvalidParameter,
            where.str() + ": trip lies outside the horizon");
    require(std::isfinite(trip.distance) && trip.distance >= 0.0, ErrorKind::InvalidParameter,
            where.str() + ": distance must be non-negative");
    previous_return = trip.return_slot;
  }
}

std::vector<int> TripPlan::availability(int horizon) const {
  std::vector<int> home(static_cast<std::size_t>(horizon), 1);
  for (const Trip& trip : trips)
    for (int t = std::max(0, trip.depart_slot); t < std::min(horizon, trip.return_slot); ++t)
      home[static_cast<std::size_t>(t)] = 0;
  return home;
}

void HvacSpec::validate(int horizon) const {
  require(finite_positive(rated_power), ErrorKind::InvalidParameter,
          "HVAC rated power must be positive");
  thermal.validate();
  const auto n = static_cast<std::size_t>(horizon);
  require(desired_temp.size() == n && max_deviation.size() == n && occupancy.size() == n &&
              discomfort_weight.size() == n,
          ErrorKind::InvalidParameter, "HVAC per-slot series must match the horizon");
  for (std::size_t t = 0; t < n; ++t) {
    require(max_deviation[t] >= 0.0, ErrorKind::InvalidParameter,
            "HVAC max deviation must be non-negative");
    require(occupancy[t] == 0 || occupancy[t] == 1, ErrorKind::InvalidParameter,
            "HVAC occupancy must be 0 or 1");
    require(discomfort_weight[t] >= 0.0, ErrorKind::InvalidParameter,
            "HVAC discomfort weight must be non-negative");
  }
}

void BatterySpec::validate() const {
  require(finite_positive(capacity), ErrorKind::InvalidParameter,
          "battery capacity must be positive");
  require(0.0 <= e_min && e_min <= e_initial && e_initial <= e_max && e_max <= capacity,
          ErrorKind::InvalidParameter,
          "battery energies must satisfy 0 <= e_min <= e_initial <= e_max <= capacity");
  require(finite_positive(p_charge_max) && finite_positive(p_discharge_max),
          ErrorKind::InvalidParameter, "battery power ratings must be positive");
  require_efficiency(eta_c, "battery eta_c");
  require_efficiency(eta_d, "battery eta_d");
  require(degradation_cost >= 0.0, ErrorKind::InvalidParameter,
          "battery degradation cost must be non-negative");
}

void ConventionalUnit::validate() const {
  const std::string who = "unit '" + name + "': ";
  require(p_min > 0.0 && p_min <= p_max && std::isfinite(p_max), ErrorKind::InvalidParameter,
          who + "requires 0 < p_min <= p_max");
  double width_sum = 0.0;
  for (std::size_t m = 0; m < segments.size(); ++m) {
    require(segments[m].width >= 0.0, ErrorKind::InvalidParameter,
            who + "segment widths must be non-negative");
    if (m > 0)
      require(segments[m].marginal_cost >= segments[m - 1].marginal_cost,
              ErrorKind::InvalidParameter, who + "marginal costs must be non-decreasing");
    width_sum += segments[m].width;
  }
  require(std::abs(width_sum - (p_max - p_min)) <= 1e-9 * std::max(1.0, p_max),
          ErrorKind::InvalidParameter, who + "segment widths must sum to p_max - p_min");
  require(min_up >= 0 && min_down >= 0, ErrorKind::InvalidParameter,
          who + "minimum up/down times must be non-negative");
  require(ramp_up > 0.0 && ramp_down > 0.0, ErrorKind::InvalidParameter,
          who + "ramp limits must be positive");
  require(fixed_cost >= 0.0 && startup_cost >= 0.0 && shutdown_cost >= 0.0,
          ErrorKind::InvalidParameter, who + "costs must be non-negative");
  require(initial_status != 0, ErrorKind::InvalidParameter,
          who + "initial_status must be non-zero (signed ON/OFF duration)");
}

int ConventionalUnit::forced_on_slots(int horizon) const {
  if (initial_status <= 0) return 0;
  return std::clamp(min_up - initial_status, 0, horizon);
}

int ConventionalUnit::forced_off_slots(int horizon) const {
  if (initial_status >= 0) return 0;
  return std::clamp(min_down + initial_status, 0, horizon);
}

void WindSpec::validate() const {
  require(finite_positive(rated_power), ErrorKind::InvalidParameter,
          "wind rated power must be positive");
  require(0.0 <= v_cut_in && v_cut_in < v_rated && v_rated < v_cut_out,
          ErrorKind::InvalidParameter, "wind speeds must satisfy 0 <= cut-in < rated < cut-out");
}

void SolarSpec::validate() const {
  require(efficiency > 0.0 && efficiency < 1.0, ErrorKind::InvalidParameter,
          "solar efficiency must lie in (0, 1)");
  require(finite_positive(area), ErrorKind::InvalidParameter, "solar area must be positive");
}

double ev_soc_step(const EvSpec& spec, double soc, double p_charge, double p_discharge,
                   double dt) {
  require_non_negative_powers(p_charge, p_discharge);
  return soc + spec.eta_c * p_charge * dt / spec.capacity -
         p_discharge * dt / (spec.eta_d * spec.capacity);
}

double ev_apply_trip(const EvSpec& spec, double soc_at_departure, double distance) {
  require(distance >= 0.0, ErrorKind::InvalidParameter, "trip distance must be non-negative");
  const double soc = soc_at_departure - distance * spec.travel_efficiency / spec.capacity;
  if (soc < 0.0) {
    std::ostringstream msg;
    msg << "trip of " << distance << " needs " << distance * spec.travel_efficiency
        << " kWh but only " << soc_at_departure * spec.capacity << " kWh is stored";
    fail(ErrorKind::InfeasibleTrip, msg.str());
  }
  return soc;
}

double wind_available_power(const WindSpec& spec, double v) {
  if (v < spec.v_cut_in || v >= spec.v_cut_out) return 0.0;
  if (v <= spec.v_rated)
    return spec.rated_power * (v - spec.v_cut_in) / (spec.v_rated - spec.v_cut_in);
  return spec.rated_power;
}

double solar_available_power(const SolarSpec& spec, double irradiance, double ambient) {
  const double p = spec.efficiency * spec.area * irradiance * (1.0 - 0.005 * (ambient - 25.0));
  return std::max(0.0, p);
}

double battery_energy_step(const BatterySpec& spec, double energy, double p_charge,
                           double p_discharge, double dt) {
  require_non_negative_powers(p_charge, p_discharge);
  return energy + spec.eta_c * p_charge * dt - p_discharge * dt / spec.eta_d;
}

double unit_production_cost(const ConventionalUnit& unit, bool committed, double power,
                            double dt) {
  if (!committed) {
    require(std::abs(power) <= 1e-9 * std::max(1.0, unit.p_max), ErrorKind::InvalidDispatch,
            "unit '" + unit.name + "' produces power while uncommitted");
    return 0.0;
  }
  const double slack = 1e-9 * std::max(1.0, unit.p_max);
  if (power < unit.p_min - slack || power > unit.p_max + slack) {
    std::ostringstream msg;
    msg << "unit '" << unit.name << "' dispatch " << power << " kW outside [" << unit.p_min
        << ", " << unit.p_max << "]";
    fail(ErrorKind::InvalidDispatch, msg.str());
  }
  double remaining = std::clamp(power, unit.p_min, unit.p_max) - unit.p_min;
  double variable = 0.0;
  for (const CostSegment& seg : unit.segments) {
    const double fill = std::min(remaining, seg.width);
    variable += seg.marginal_cost * fill;
    remaining -= fill;
    if (remaining <= 0.0) break;
  }
  return unit.fixed_cost + dt * variable;
}

const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::GenerationBounds: return "generation-bounds";
    case ViolationKind::RampUp: return "ramp-up";
    case ViolationKind::RampDown: return "ramp-down";
    case ViolationKind::MinUp: return "min-up";
    case ViolationKind::MinDown: return "min-down";
    case ViolationKind::InitialStatus: return "initial-status";
    case ViolationKind::Indicator: return "indicator";
  }
  return "unknown";
}

std::vector<Violation> validate_unit_schedule(const ConventionalUnit& unit,
                                              const std::vector<double>& commitments,
                                              const std::vector<double>& powers, double tol) {
  require(commitments.size() == powers.size(), ErrorKind::InvalidParameter,
          "commitment and power sequences differ in length");
  const int horizon = static_cast<int>(commitments.size());
  std::vector<Violation> out;
  auto report = [&](ViolationKind kind, int t, const std::string& detail) {
    out.push_back({kind, t, detail});
  };

  std::vector<int> on(commitments.size());
  for (int t = 0; t < horizon; ++t) {
    const double c = commitments[static_cast<std::size_t>(t)];
    const double r = std::round(c);
    if (std::abs(c - r) > tol || (r != 0.0 && r != 1.0))
      report(ViolationKind::Indicator, t, "commitment is not binary");
    on[static_cast<std::size_t>(t)] = r >= 1.0 ? 1 : 0;
  }

  // Start-up / shut-down indicators implied by the transitions.
  std::vector<int> start(on.size()), stop(on.size());
  for (int t = 0; t < horizon; ++t) {
    const int prev = t == 0 ? (unit.initially_on() ? 1 : 0) : on[static_cast<std::size_t>(t - 1)];
    const int cur = on[static_cast<std::size_t>(t)];
    start[static_cast<std::size_t>(t)] = cur > prev ? 1 : 0;
    stop[static_cast<std::size_t>(t)] = cur < prev ? 1 : 0;
  }

  for (int t = 0; t < horizon; ++t) {
    const auto i = static_cast<std::size_t>(t);
    const double p = powers[i];
    if (p < on[i] * unit.p_min - tol || p > on[i] * unit.p_max + tol) {
      std::ostringstream msg;
      msg << "power " << p << " outside [" << on[i] * unit.p_min << ", " << on[i] * unit.p_max
          << "]";
      report(ViolationKind::GenerationBounds, t, msg.str());
    }

    // Previous output is only known when the unit starts the horizon OFF.
    if (t > 0 || !unit.initially_on()) {
      const double prev = t == 0 ? 0.0 : powers[i - 1];
      const double up_limit = unit.ramp_up * (1 - start[i]) + unit.p_min * start[i];
      const double down_limit = unit.ramp_down * (1 - stop[i]) + unit.p_min * stop[i];
      if (p - prev > up_limit + tol) {
        std::ostringstream msg;
        msg << "ramp up " << p - prev << " exceeds " << up_limit;
        report(ViolationKind::RampUp, t, msg.str());
      }
      if (prev - p > down_limit + tol) {
        std::ostringstream msg;
        msg << "ramp down " << prev - p << " exceeds " << down_limit;
        report(ViolationKind::RampDown, t, msg.str());
      }
    }

    if (start[i]) {
      const int last = std::min(t + unit.min_up - 1, horizon - 1);
      for (int h = t; h <= last; ++h)
        if (!on[static_cast<std::size_t>(h)]) {
          report(ViolationKind::MinUp, t, "started unit turned off before its minimum up time");
          break;
        }
    }
    if (stop[i]) {
      const int last = std::min(t + unit.min_down - 1, horizon - 1);
      for (int h = t; h <= last; ++h)
        if (on[static_cast<std::size_t>(h)]) {
          report(ViolationKind::MinDown, t,
                 "stopped unit restarted before its minimum down time");
          break;
        }
    }
  }

  for (int t = 0; t < unit.forced_on_slots(horizon); ++t)
    if (!on[static_cast<std::size_t>(t)])
      report(ViolationKind::InitialStatus, t, "unit must remain ON to finish its minimum up time");
  for (int t = 0; t < unit.forced_off_slots(horizon); ++t)
    if (on[static_cast<std::size_t>(t)])
      report(ViolationKind::InitialStatus, t,
             "unit must remain OFF to finish its minimum down time");
  return out;
}

}  // namespace gridsched::devices
