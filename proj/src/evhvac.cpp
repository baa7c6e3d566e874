#include "gridsched/evhvac.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "gridsched/error.hpp"
#include "gridsched/parallel.hpp"

namespace gridsched::evhvac {

using opt::LinearExpr;
using opt::Relation;
using opt::VarId;

namespace {

std::string tag(const char* base, std::size_t j, int t) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s_h%zu_t%d", base, j, t);
  return buf;
}

std::string tag(const char* base, std::size_t j, std::size_t e, int t) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s_h%zu_e%zu_t%d", base, j, e, t);
  return buf;
}

std::string slot_tag(const char* base, int t) { return std::string(base) + "_t" + std::to_string(t); }

void require_length(const std::vector<double>& v, int horizon, const char* what) {
  require(static_cast<int>(v.size()) == horizon, ErrorKind::InvalidParameter,
          std::string(what) + " must have one value per slot");
}

double discomfort_of(const CommunityProblem& p, std::size_t j, const std::vector<double>& t_in) {
  const devices::HvacSpec& h = p.households[j].hvac;
  double cost = 0.0;
  for (int t = 0; t < p.horizon; ++t)
    if (h.occupancy[t]) cost += h.discomfort_weight[t] * std::abs(t_in[t + 1] - h.desired_temp[t]);
  return cost;
}

/// Fills grid import and the cost terms from the household profiles.
void settle_costs(const CommunityProblem& p, EvHvacSchedule& s) {
  s.grid_import.assign(p.horizon, 0.0);
  for (const HouseSchedule& h : s.households) {
    for (int t = 0; t < p.horizon; ++t) {
      s.grid_import[t] += h.hvac_power[t];
      for (const EvSchedule& ev : h.evs) s.grid_import[t] += ev.charge[t] - ev.discharge[t];
    }
  }
  s.j_elec = 0.0;
  for (int t = 0; t < p.horizon; ++t) s.j_elec += s.grid_import[t] * p.prices[t] * p.dt;
  s.j_discomfort = 0.0;
  for (std::size_t j = 0; j < s.households.size(); ++j)
    s.j_discomfort += discomfort_of(p, j, s.households[j].indoor_temperature());
  s.j_tot = s.j_elec + s.j_discomfort;
}

}  // namespace

void CommunityProblem::validate() const {
  require(horizon >= 1, ErrorKind::InvalidParameter, "horizon must be at least one slot");
  require(dt > 0.0, ErrorKind::InvalidParameter, "dt must be positive");
  require_length(prices, horizon, "prices");
  require_length(ambient, horizon, "ambient");
  require_length(irradiance, horizon, "irradiance");
  require_length(grid_limit, horizon, "grid_limit");
  for (int t = 0; t < horizon; ++t) {
    require(grid_limit[t] >= 0.0, ErrorKind::InvalidParameter, "grid_limit must be non-negative");
    require(irradiance[t] >= 0.0, ErrorKind::InvalidParameter, "irradiance must be non-negative");
  }
  for (const Household& h : households) {
    h.hvac.validate(horizon);
    for (const ElectricVehicle& ev : h.evs) {
      ev.spec.validate();
      ev.trips.validate(horizon);
    }
  }
}

std::vector<double> HouseSchedule::indoor_temperature() const {
  std::vector<double> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(s.t_in);
  return out;
}

double EvHvacSchedule::max_comfort_deviation(const CommunityProblem& problem) const {
  double worst = 0.0;
  for (std::size_t j = 0; j < households.size(); ++j) {
    const devices::HvacSpec& h = problem.households[j].hvac;
    for (int t = 0; t < problem.horizon; ++t)
      if (h.occupancy[t])
        worst = std::max(worst, std::abs(households[j].states[t + 1].t_in - h.desired_temp[t]));
  }
  return worst;
}

JointModel build_joint_model(const CommunityProblem& p, const BuildOptions& options) {
  p.validate();
  JointModel jm;
  opt::OptModel& m = jm.model;
  const int nh = p.horizon;
  std::vector<LinearExpr> net(nh);

  for (std::size_t j = 0; j < p.households.size(); ++j) {
    const Household& house = p.households[j];
    const devices::HvacSpec& hvac = house.hvac;
    const thermal::BuildingThermalParams& tp = hvac.thermal;
    const thermal::DiscreteThermalModel dm = thermal::discretize(tp, p.dt);
    const double gain = thermal::sign_of(tp.mode) * tp.cop;
    HouseIndex hx;

    for (int t = 0; t < nh; ++t) {
      hx.hvac.push_back(m.add_variable(tag("p_hvac", j, t), 0.0, hvac.rated_power));
      net[t].add(hx.hvac.back(), 1.0);
      hx.states.push_back({m.add_variable(tag("t_in", j, t + 1), -opt::kInf, opt::kInf),
                           m.add_variable(tag("t_m", j, t + 1), -opt::kInf, opt::kInf),
                           m.add_variable(tag("t_e", j, t + 1), -opt::kInf, opt::kInf)});
    }

    const Eigen::Vector3d x0 = house.initial_state.vec();
    static const char* kDyn[3] = {"dyn_in", "dyn_m", "dyn_e"};
    for (int t = 0; t < nh; ++t) {
      for (int r = 0; r < 3; ++r) {
        LinearExpr row(hx.states[t][r], 1.0);
        double rhs = dm.b_d(r, 0) * p.ambient[t] + dm.b_d(r, 1) * p.irradiance[t];
        for (int c = 0; c < 3; ++c) {
          if (t == 0)
            rhs += dm.a_d(r, c) * x0(c);
          else
            row.add(hx.states[t - 1][c], -dm.a_d(r, c));
        }
        row.add(hx.hvac[t], -dm.b_d(r, 2) * gain);
        m.add_constraint(tag(kDyn[r], j, t), row, Relation::Equal, rhs);
      }
    }

    hx.abs_dev.assign(nh, std::nullopt);
    for (int t = 0; t < nh; ++t) {
      if (!hvac.occupancy[t]) continue;
      const VarId tin = hx.states[t][0];
      if (options.comfort) {
        m.add_constraint(tag("comfort_lo", j, t), tin, Relation::GreaterEqual,
                         hvac.desired_temp[t] - hvac.max_deviation[t]);
        m.add_constraint(tag("comfort_hi", j, t), tin, Relation::LessEqual,
                         hvac.desired_temp[t] + hvac.max_deviation[t]);
      }
      const double w = hvac.discomfort_weight[t];
      if (w > 0.0)
        hx.abs_dev[t] = opt::add_abs_term(m, LinearExpr(tin) - hvac.desired_temp[t], w,
                                          tag("dev", j, t));
    }

    for (std::size_t e = 0; e < house.evs.size(); ++e) {
      const ElectricVehicle& ev = house.evs[e];
      const devices::EvSpec& s = ev.spec;
      const std::vector<int> home = ev.trips.availability(nh);
      EvIndex ex;
      const double lo = options.soc_bounds ? s.soc_min : -opt::kInf;
      const double hi = options.soc_bounds ? s.soc_max : opt::kInf;
      ex.soc.push_back(m.add_variable(tag("soc", j, e, 0), s.soc_initial, s.soc_initial));
      for (int t = 0; t < nh; ++t) {
        ex.charge.push_back(m.add_variable(tag("p_ch", j, e, t), 0.0, home[t] * s.p_charge_max));
        ex.discharge.push_back(
            m.add_variable(tag("p_dis", j, e, t), 0.0, home[t] * s.p_discharge_max));
        ex.soc.push_back(m.add_variable(tag("soc", j, e, t + 1), lo, hi));
        net[t].add(ex.charge[t], 1.0);
        net[t].add(ex.discharge[t], -1.0);
      }
      for (int t = 0; t < nh; ++t) {
        if (!home[t]) continue;
        LinearExpr row(ex.soc[t + 1], 1.0);
        row.add(ex.soc[t], -1.0);
        row.add(ex.charge[t], -s.eta_c * p.dt / s.capacity);
        row.add(ex.discharge[t], p.dt / (s.eta_d * s.capacity));
        m.add_constraint(tag("soc_dyn", j, e, t), row, Relation::Equal, 0.0);
      }
      for (std::size_t l = 0; l < ev.trips.trips.size(); ++l) {
        const devices::Trip& trip = ev.trips.trips[l];
        try {
          devices::ev_apply_trip(s, s.soc_max, trip.distance);
        } catch (const Error&) {
          fail(ErrorKind::BuildError, "EV '" + ev.id + "' of household '" + house.id +
                                          "' cannot cover trip " + std::to_string(l) +
                                          " even from a full battery");
        }
        const double drop = trip.distance * s.travel_efficiency / s.capacity;
        LinearExpr jump(ex.soc[trip.return_slot], 1.0);
        jump.add(ex.soc[trip.depart_slot], -1.0);
        m.add_constraint(tag("trip", j, e, trip.depart_slot), jump, Relation::Equal, -drop);
        for (int t = trip.depart_slot; t < trip.return_slot; ++t) {
          LinearExpr mono(ex.soc[t + 1], 1.0);
          mono.add(ex.soc[t], -1.0);
          m.add_constraint(tag("travel", j, e, t), mono, Relation::LessEqual, 0.0);
        }
      }
      hx.evs.push_back(std::move(ex));
    }
    jm.index.households.push_back(std::move(hx));
  }

  LinearExpr cost;
  for (int t = 0; t < nh; ++t) cost += p.prices[t] * p.dt * net[t];
  m.add_objective(cost);

  if (options.grid_limit) {
    for (int t = 0; t < nh; ++t) {
      const double floor = p.v2g_allowed ? -p.grid_limit[t] : 0.0;
      m.add_constraint(slot_tag("grid_lo", t), net[t], Relation::GreaterEqual, floor);
      m.add_constraint(slot_tag("grid_hi", t), net[t], Relation::LessEqual, p.grid_limit[t]);
    }
  }
  return jm;
}

std::vector<std::string> diagnose_infeasibility(const CommunityProblem& problem) {
  BuildOptions o;
  std::vector<std::string> groups;
  if (opt::solve_lp(build_joint_model(problem, o).model).status != opt::SolveStatus::Infeasible)
    return groups;
  const char* names[3] = {"comfort", "soc", "grid"};
  bool* flags[3] = {&o.comfort, &o.soc_bounds, &o.grid_limit};
  for (int k = 0; k < 3; ++k) {
    *flags[k] = false;
    groups.emplace_back(names[k]);
    const auto st = opt::solve_lp(build_joint_model(problem, o).model).status;
    if (st != opt::SolveStatus::Infeasible) return groups;
  }
  return {};
}

EvHvacSchedule solve_schedule(const CommunityProblem& p, const opt::LpOptions& lp) {
  const JointModel jm = build_joint_model(p);
  const opt::Solution sol = opt::solve_lp(jm.model, lp);
  if (sol.status == opt::SolveStatus::Infeasible) {
    const auto groups = diagnose_infeasibility(p);
    std::string msg = "schedule is infeasible";
    if (groups.empty()) {
      msg += "; relaxing comfort, SOC and grid requirements does not restore feasibility";
    } else {
      msg += "; feasibility returns after relaxing:";
      for (const auto& g : groups) msg += " " + g;
    }
    fail(ErrorKind::Infeasible, msg);
  }
  require(sol.optimal(), ErrorKind::Infeasible,
          std::string("LP solve ended with status ") + opt::to_string(sol.status));

  EvHvacSchedule out;
  for (std::size_t j = 0; j < p.households.size(); ++j) {
    const Household& house = p.households[j];
    const HouseIndex& hx = jm.index.households[j];
    HouseSchedule hs;
    hs.id = house.id;
    hs.states.push_back(house.initial_state);
    for (int t = 0; t < p.horizon; ++t) {
      hs.hvac_power.push_back(sol.value(hx.hvac[t]));
      hs.states.push_back({sol.value(hx.states[t][0]), sol.value(hx.states[t][1]),
                           sol.value(hx.states[t][2])});
    }
    for (std::size_t e = 0; e < house.evs.size(); ++e) {
      const EvIndex& ex = hx.evs[e];
      const devices::EvSpec& s = house.evs[e].spec;
      EvSchedule es;
      es.id = house.evs[e].id;
      for (VarId v : ex.soc) es.soc.push_back(sol.value(v));
      for (int t = 0; t < p.horizon; ++t) {
        double c = sol.value(ex.charge[t]);
        double d = sol.value(ex.discharge[t]);
        if (c > 0.0 && d > 0.0) {
          // Replace the pair by the single flow with the same SOC change.
          const double flow = s.eta_c * c - d / s.eta_d;
          c = flow > 0.0 ? flow / s.eta_c : 0.0;
          d = flow < 0.0 ? -flow * s.eta_d : 0.0;
          ++out.simultaneity_fixes;
        }
        es.charge.push_back(c);
        es.discharge.push_back(d);
      }
      hs.evs.push_back(std::move(es));
    }
    out.households.push_back(std::move(hs));
  }
  settle_costs(p, out);
  if (out.simultaneity_fixes > 0) {
    for (int t = 0; t < p.horizon; ++t) {
      const double floor = p.v2g_allowed ? -p.grid_limit[t] : 0.0;
      if (out.grid_import[t] < floor - 1e-6)
        out.warnings.push_back("slot " + std::to_string(t) +
                               ": grid import below its limit after removing simultaneous "
                               "charge and discharge");
    }
  }
  return out;
}

EvHvacSchedule uncontrolled_baseline(const CommunityProblem& p,
                                     const std::vector<double>& target_final_soc) {
  p.validate();
  std::size_t ev_total = 0;
  for (const Household& h : p.households) ev_total += h.evs.size();
  require(target_final_soc.size() == ev_total, ErrorKind::InvalidParameter,
          "one target SOC per EV is required");

  EvHvacSchedule out;
  std::size_t ev_counter = 0;
  for (const Household& house : p.households) {
    const devices::HvacSpec& hvac = house.hvac;
    const thermal::BuildingThermalParams& tp = hvac.thermal;
    const thermal::DiscreteThermalModel dm = thermal::discretize(tp, p.dt);
    const double gain = thermal::sign_of(tp.mode) * tp.cop;
    HouseSchedule hs;
    hs.id = house.id;
    hs.states.push_back(house.initial_state);
    for (int t = 0; t < p.horizon; ++t) {
      const thermal::ThermalState& now = hs.states.back();
      const Eigen::Vector3d rest = dm.a_d * now.vec() + dm.b_d.col(0) * p.ambient[t] +
                                   dm.b_d.col(1) * p.irradiance[t];
      const double per_kw = dm.b_d(0, 2) * gain;
      const double exact = (hvac.desired_temp[t] - rest(0)) / per_kw;
      const double power = std::clamp(exact, 0.0, hvac.rated_power);
      if (std::abs(power - exact) > 1e-9) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "household '%s' slot %d: thermostat needs %.4g kW, clamped to %.4g kW",
                      house.id.c_str(), t, exact, power);
        out.warnings.push_back(buf);
      }
      hs.hvac_power.push_back(power);
      hs.states.push_back(thermal::step(dm, tp.mode, tp.cop, now,
                                        {p.ambient[t], p.irradiance[t], power}));
    }

    for (const ElectricVehicle& ev : house.evs) {
      const devices::EvSpec& s = ev.spec;
      const std::vector<int> home = ev.trips.availability(p.horizon);
      const double target = target_final_soc[ev_counter++];
      // Depletion still ahead of each slot boundary.
      std::vector<double> ahead(p.horizon + 1, 0.0);
      for (const devices::Trip& trip : ev.trips.trips)
        for (int t = 0; t <= trip.depart_slot; ++t)
          ahead[t] += trip.distance * s.travel_efficiency / s.capacity;

      EvSchedule es;
      es.id = ev.id;
      es.soc.push_back(s.soc_initial);
      for (int t = 0; t < p.horizon; ++t) {
        double soc = es.soc.back();
        double charge = 0.0;
        if (home[t]) {
          const double deficit = target - (soc - ahead[t]);
          if (deficit > 1e-12)
            charge = std::min(s.p_charge_max, deficit * s.capacity / (s.eta_c * p.dt));
          soc = devices::ev_soc_step(s, soc, charge, 0.0, p.dt);
        }
        for (const devices::Trip& trip : ev.trips.trips) {
          if (trip.return_slot == t + 1) {
            const double at_departure = es.soc[trip.depart_slot];
            soc = devices::ev_apply_trip(s, at_departure, trip.distance);
          }
        }
        es.charge.push_back(charge);
        es.discharge.push_back(0.0);
        es.soc.push_back(soc);
      }
      if (es.soc.back() < target - 1e-9)
        out.warnings.push_back("EV '" + ev.id + "' cannot reach its target SOC by charging on arrival");
      hs.evs.push_back(std::move(es));
    }
    out.households.push_back(std::move(hs));
  }
  settle_costs(p, out);
  return out;
}

std::vector<double> terminal_socs(const EvHvacSchedule& schedule) {
  std::vector<double> out;
  for (const HouseSchedule& h : schedule.households)
    for (const EvSchedule& ev : h.evs) out.push_back(ev.soc.back());
  return out;
}

double cost_saving(const EvHvacSchedule& optimal, const EvHvacSchedule& baseline) {
  require(baseline.j_elec > 0.0, ErrorKind::UndefinedMetric,
          "cost saving is undefined when the baseline electricity cost is not positive");
  return 100.0 * (baseline.j_elec - optimal.j_elec) / baseline.j_elec;
}

IndividualResult solve_individual(const CommunityProblem& problem,
                                  const std::optional<std::vector<double>>& house_limit,
                                  const opt::LpOptions& lp) {
  problem.validate();
  if (house_limit) require_length(*house_limit, problem.horizon, "house_limit");
  IndividualResult out;
  out.schedules.resize(problem.households.size());
  detail::parallel_for(problem.households.size(), [&](std::size_t j) {
    CommunityProblem single = problem;
    single.households = {problem.households[j]};
    if (house_limit) single.grid_limit = *house_limit;
    out.schedules[j] = solve_schedule(single, lp);
  });
  for (const EvHvacSchedule& s : out.schedules) out.combined_cost += s.j_tot;
  return out;
}

}  // namespace gridsched::evhvac
