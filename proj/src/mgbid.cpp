#include "gridsched/mgbid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>

#include "gridsched/error.hpp"

namespace gridsched::mgbid {

using opt::kInf;
using opt::LinearExpr;
using opt::Relation;
using opt::VarId;
using scenario::Series;

namespace {

std::string name(const char* format, ...) {
  char buf[128];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

void require_slots(const std::vector<double>& v, int horizon, const char* what) {
  require(static_cast<int>(v.size()) == horizon, ErrorKind::InvalidParameter,
          std::string("market parameter ") + what + " must have one value per slot");
}

double wind_available(const devices::WindSpec& w, const scenario::Scenario& sc, int t) {
  return devices::wind_available_power(w, sc.values.at(Series::WindSpeed, t));
}

double solar_available(const devices::SolarSpec& p, const scenario::Scenario& sc, int t) {
  return devices::solar_available_power(p, sc.values.at(Series::Irradiance, t),
                                        sc.values.at(Series::Ambient, t));
}

double shed_cap(const MicrogridConfig& mg, const scenario::Scenario& sc, int t) {
  if (mg.market.max_shed) return (*mg.market.max_shed)[t];
  return sc.values.at(Series::Load, t);
}

/// Thermal variables, dynamics and comfort for one building in one scenario.
/// Returns the per-slot HVAC variables; states are written to `states`.
std::vector<VarId> add_building(opt::OptModel& m, const Building& b, std::size_t j,
                                std::size_t s, const scenario::Scenario& sc, double dt,
                                int nh, bool comfort, double discomfort_scale,
                                std::vector<std::array<VarId, 3>>& states) {
  const devices::HvacSpec& hvac = b.hvac;
  const thermal::BuildingThermalParams& tp = hvac.thermal;
  const thermal::DiscreteThermalModel dm = thermal::discretize(tp, dt);
  const double gain = thermal::sign_of(tp.mode) * tp.cop;
  std::vector<VarId> power;
  states.clear();
  for (int t = 0; t < nh; ++t) {
    power.push_back(m.add_variable(name("hvac_b%zu_s%zu_t%d", j, s, t), 0.0, hvac.rated_power));
    double lo = -kInf, hi = kInf;
    if (comfort && hvac.occupancy[t]) {
      lo = hvac.desired_temp[t] - hvac.max_deviation[t];
      hi = hvac.desired_temp[t] + hvac.max_deviation[t];
    }
    states.push_back({m.add_variable(name("tin_b%zu_s%zu_t%d", j, s, t + 1), lo, hi),
                      m.add_variable(name("tm_b%zu_s%zu_t%d", j, s, t + 1), -kInf, kInf),
                      m.add_variable(name("te_b%zu_s%zu_t%d", j, s, t + 1), -kInf, kInf)});
  }
  const Eigen::Vector3d x0 = b.initial_state.vec();
  for (int t = 0; t < nh; ++t) {
    const double ambient = sc.values.at(Series::Ambient, t);
    const double irradiance = sc.values.at(Series::Irradiance, t);
    for (int r = 0; r < 3; ++r) {
      LinearExpr row(states[t][r], 1.0);
      double rhs = dm.b_d(r, 0) * ambient + dm.b_d(r, 1) * irradiance;
      for (int c = 0; c < 3; ++c) {
        if (t == 0)
          rhs += dm.a_d(r, c) * x0(c);
        else
          row.add(states[t - 1][c], -dm.a_d(r, c));
      }
      row.add(power[t], -dm.b_d(r, 2) * gain);
      m.add_constraint(name("dyn%d_b%zu_s%zu_t%d", r, j, s, t), row, Relation::Equal, rhs);
    }
    const double weight = discomfort_scale * hvac.discomfort_weight[t] * b.count;
    if (hvac.occupancy[t] && weight > 0.0)
      opt::add_abs_term(m, LinearExpr(states[t][0]) - hvac.desired_temp[t], weight,
                        name("disc_b%zu_s%zu_t%d", j, s, t));
  }
  return power;
}

BiddingSolution extract(const MicrogridConfig& mg, const scenario::ScenarioSet& scenarios,
                        const BidIndex& ix, const opt::Solution& sol) {
  BiddingSolution out;
  out.status = sol.status;
  out.objective = sol.objective;
  out.nodes = sol.nodes;
  out.iterations = sol.iterations;
  const int nh = mg.horizon;
  auto values = [&](const std::vector<VarId>& vars) {
    std::vector<double> v;
    v.reserve(vars.size());
    for (VarId id : vars) v.push_back(sol.value(id));
    return v;
  };
  for (const UnitIndex& u : ix.units) {
    out.first.commitment.push_back(values(u.commit));
    out.first.startup.push_back(values(u.startup));
    out.first.shutdown.push_back(values(u.shutdown));
    out.first.startup_cost.push_back(values(u.startup_cost));
    out.first.shutdown_cost.push_back(values(u.shutdown_cost));
  }
  out.first.bid = values(ix.bid);

  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    const scenario::Scenario& sc = scenarios.scenarios[s];
    const ScenarioIndex& sx = ix.scenarios[s];
    SecondStageDecision d;
    d.scenario_id = sc.id;
    d.probability = sc.probability;
    for (std::size_t i = 0; i < mg.units.size(); ++i) {
      UnitDispatch u;
      u.power = values(sx.unit_power[i]);
      for (int t = 0; t < nh; ++t) u.segments.push_back(values(sx.unit_segment[i][t]));
      d.units.push_back(std::move(u));
    }
    d.delivery = values(sx.delivery);
    d.shed = values(sx.shed);
    for (std::size_t j = 0; j < mg.buildings.size(); ++j) {
      BuildingDispatch b;
      b.hvac_power = values(sx.hvac[j]);
      b.states.push_back(mg.buildings[j].initial_state);
      for (const auto& st : sx.states[j])
        b.states.push_back({sol.value(st[0]), sol.value(st[1]), sol.value(st[2])});
      d.buildings.push_back(std::move(b));
    }
    for (std::size_t k = 0; k < mg.batteries.size(); ++k) {
      BatteryDispatch b;
      b.charge = values(sx.charge[k]);
      b.discharge = values(sx.discharge[k]);
      b.charge_mode = values(sx.charge_mode[k]);
      b.discharge_mode = values(sx.discharge_mode[k]);
      b.energy = values(sx.energy[k]);
      d.batteries.push_back(std::move(b));
    }
    for (std::size_t w = 0; w < mg.wind.size(); ++w) {
      std::vector<double> avail;
      for (int t = 0; t < nh; ++t) avail.push_back(wind_available(mg.wind[w], sc, t));
      d.wind_available.push_back(std::move(avail));
      d.wind_curtailment.push_back(values(sx.wind_curtailment[w]));
    }
    for (std::size_t p = 0; p < mg.solar.size(); ++p) {
      std::vector<double> avail;
      for (int t = 0; t < nh; ++t) avail.push_back(solar_available(mg.solar[p], sc, t));
      d.solar_available.push_back(std::move(avail));
      d.solar_curtailment.push_back(values(sx.solar_curtailment[p]));
    }
    out.second.push_back(std::move(d));
  }
  return out;
}

}  // namespace

MarketParams MarketParams::uniform(int horizon, double psi, double voll, double v_res,
                                   double lol) {
  MarketParams m;
  const auto n = static_cast<std::size_t>(horizon);
  m.bid_deviation_penalty.assign(n, psi);
  m.value_of_lost_load.assign(n, voll);
  m.wind_curtail_cost.assign(n, v_res);
  m.solar_curtail_cost.assign(n, v_res);
  m.max_loss_of_load_ratio.assign(n, lol);
  return m;
}

void MarketParams::validate(int horizon) const {
  require_slots(bid_deviation_penalty, horizon, "bid_deviation_penalty");
  require_slots(value_of_lost_load, horizon, "value_of_lost_load");
  require_slots(wind_curtail_cost, horizon, "wind_curtail_cost");
  require_slots(solar_curtail_cost, horizon, "solar_curtail_cost");
  require_slots(max_loss_of_load_ratio, horizon, "max_loss_of_load_ratio");
  if (line_capacity) require_slots(*line_capacity, horizon, "line_capacity");
  if (max_shed) require_slots(*max_shed, horizon, "max_shed");
  for (int t = 0; t < horizon; ++t) {
    require(bid_deviation_penalty[t] >= 0.0 && value_of_lost_load[t] >= 0.0 &&
                wind_curtail_cost[t] >= 0.0 && solar_curtail_cost[t] >= 0.0,
            ErrorKind::InvalidParameter, "market costs must be non-negative");
    require(max_loss_of_load_ratio[t] >= 0.0 && max_loss_of_load_ratio[t] <= 1.0,
            ErrorKind::InvalidParameter, "loss-of-load ratio must lie in [0, 1]");
    if (line_capacity)
      require((*line_capacity)[t] >= 0.0, ErrorKind::InvalidParameter,
              "line capacity must be non-negative");
    if (max_shed)
      require((*max_shed)[t] >= 0.0, ErrorKind::InvalidParameter,
              "maximum shed must be non-negative");
  }
}

void MicrogridConfig::validate() const {
  require(horizon >= 1, ErrorKind::InvalidParameter, "horizon must be at least one slot");
  require(dt > 0.0, ErrorKind::InvalidParameter, "dt must be positive");
  market.validate(horizon);
  for (const auto& u : units) u.validate();
  for (const auto& w : wind) w.validate();
  for (const auto& p : solar) p.validate();
  for (const auto& k : batteries) k.validate();
  for (const auto& b : buildings) {
    require(b.count >= 1, ErrorKind::InvalidParameter,
            "building '" + b.id + "' count must be at least 1");
    b.hvac.validate(horizon);
  }
}

BidModel build_two_stage_model(const MicrogridConfig& mg, const scenario::ScenarioSet& scenarios,
                               const BuildOptions& options) {
  mg.validate();
  scenarios.validate(1e-9);
  require(static_cast<int>(scenarios.slots()) == mg.horizon, ErrorKind::BuildError,
          "scenario slot count " + std::to_string(scenarios.slots()) +
              " does not match the horizon " + std::to_string(mg.horizon));
  const MarketParams& mk = mg.market;
  const bool line = options.line_capacity && mk.line_capacity.has_value();
  if (!mk.line_capacity)
    for (int t = 0; t < mg.horizon; ++t)
      require(mk.bid_deviation_penalty[t] > 0.0, ErrorKind::BuildError,
              "without a line capacity the bid-deviation penalty must be positive");

  BidModel bm;
  opt::OptModel& m = bm.model;
  m.set_sense(opt::Sense::Maximize);
  BidIndex& ix = bm.index;
  const int nh = mg.horizon;
  const double dt = mg.dt;
  LinearExpr obj;

  for (std::size_t i = 0; i < mg.units.size(); ++i) {
    const devices::ConventionalUnit& u = mg.units[i];
    UnitIndex ux;
    const int forced_on = u.forced_on_slots(nh);
    const int forced_off = u.forced_off_slots(nh);
    for (int t = 0; t < nh; ++t) {
      ux.commit.push_back(m.add_binary(name("I_u%zu_t%d", i, t)));
      if (t < forced_on) m.set_bounds(ux.commit.back(), 1.0, 1.0);
      if (t < forced_off) m.set_bounds(ux.commit.back(), 0.0, 0.0);
      ux.startup.push_back(m.add_binary(name("y_u%zu_t%d", i, t)));
      ux.shutdown.push_back(m.add_binary(name("z_u%zu_t%d", i, t)));
      ux.startup_cost.push_back(m.add_variable(name("SU_u%zu_t%d", i, t), 0.0, kInf));
      ux.shutdown_cost.push_back(m.add_variable(name("SD_u%zu_t%d", i, t), 0.0, kInf));
      obj.add(ux.startup_cost[t], -1.0);
      obj.add(ux.shutdown_cost[t], -1.0);
      obj.add(ux.commit[t], -u.fixed_cost);
    }
    const double prev_on = u.initially_on() ? 1.0 : 0.0;
    for (int t = 0; t < nh; ++t) {
      // y - z = I_t - I_{t-1}
      LinearExpr tr(ux.startup[t], 1.0);
      tr.add(ux.shutdown[t], -1.0);
      tr.add(ux.commit[t], -1.0);
      double rhs = 0.0;
      if (t == 0)
        rhs = -prev_on;
      else
        tr.add(ux.commit[t - 1], 1.0);
      m.add_constraint(name("trans_u%zu_t%d", i, t), tr, Relation::Equal, rhs);
      m.add_constraint(name("yz_u%zu_t%d", i, t),
                       LinearExpr(ux.startup[t]) + LinearExpr(ux.shutdown[t]),
                       Relation::LessEqual, 1.0);

      LinearExpr su(ux.startup_cost[t], 1.0);
      su.add(ux.commit[t], -u.startup_cost);
      LinearExpr sd(ux.shutdown_cost[t], 1.0);
      sd.add(ux.commit[t], u.shutdown_cost);
      double su_rhs = 0.0, sd_rhs = 0.0;
      if (t == 0) {
        su_rhs = -u.startup_cost * prev_on;
        sd_rhs = u.shutdown_cost * prev_on;
      } else {
        su.add(ux.commit[t - 1], u.startup_cost);
        sd.add(ux.commit[t - 1], -u.shutdown_cost);
      }
      m.add_constraint(name("SUdef_u%zu_t%d", i, t), su, Relation::GreaterEqual, su_rhs);
      m.add_constraint(name("SDdef_u%zu_t%d", i, t), sd, Relation::GreaterEqual, sd_rhs);

      if (u.min_up > 1) {
        const int last = std::min(t + u.min_up - 1, nh - 1);
        LinearExpr row;
        for (int h = t; h <= last; ++h) row.add(ux.commit[h], 1.0);
        row.add(ux.startup[t], -(last - t + 1));
        m.add_constraint(name("minup_u%zu_t%d", i, t), row, Relation::GreaterEqual, 0.0);
      }
      if (u.min_down > 1) {
        const int last = std::min(t + u.min_down - 1, nh - 1);
        LinearExpr row;
        for (int h = t; h <= last; ++h) row.add(ux.commit[h], 1.0);
        row.add(ux.shutdown[t], last - t + 1);
        m.add_constraint(name("mindown_u%zu_t%d", i, t), row, Relation::LessEqual,
                         last - t + 1);
      }
    }
    ix.units.push_back(std::move(ux));
  }

  for (int t = 0; t < nh; ++t) {
    const double cap = line ? (*mk.line_capacity)[t] : kInf;
    ix.bid.push_back(m.add_variable(name("bid_t%d", t), -cap, cap));
  }

  std::vector<LinearExpr> expected_shed(nh);
  std::vector<double> expected_load(nh, 0.0);

  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    const scenario::Scenario& sc = scenarios.scenarios[s];
    const double rho = sc.probability;
    ScenarioIndex sx;
    std::vector<LinearExpr> supply(nh);  // generation - consumption - delivery
    std::vector<double> rhs(nh, 0.0);    // load minus available renewables

    for (std::size_t i = 0; i < mg.units.size(); ++i) {
      const devices::ConventionalUnit& u = mg.units[i];
      const UnitIndex& ux = ix.units[i];
      std::vector<VarId> power;
      std::vector<std::vector<VarId>> segs;
      for (int t = 0; t < nh; ++t) {
        power.push_back(m.add_variable(name("P_u%zu_s%zu_t%d", i, s, t), 0.0, u.p_max));
        std::vector<VarId> seg;
        LinearExpr def(power[t], 1.0);
        def.add(ux.commit[t], -u.p_min);
        for (std::size_t k = 0; k < u.segments.size(); ++k) {
          seg.push_back(m.add_variable(name("seg%zu_u%zu_s%zu_t%d", k, i, s, t), 0.0,
                                       u.segments[k].width));
          def.add(seg[k], -1.0);
          obj.add(seg[k], -rho * dt * u.segments[k].marginal_cost);
        }
        m.add_constraint(name("Pdef_u%zu_s%zu_t%d", i, s, t), def, Relation::Equal, 0.0);
        LinearExpr upper(power[t], 1.0);
        upper.add(ux.commit[t], -u.p_max);
        m.add_constraint(name("Pmax_u%zu_s%zu_t%d", i, s, t), upper, Relation::LessEqual, 0.0);
        supply[t].add(power[t], 1.0);
        segs.push_back(std::move(seg));
      }
      for (int t = 0; t < nh; ++t) {
        // Ramp limits; the slot-0 rows need the previous output, known only
        // for a unit that starts the horizon OFF.
        if (t == 0 && u.initially_on()) continue;
        LinearExpr up(power[t], 1.0);
        up.add(ux.startup[t], -(u.p_min - u.ramp_up));
        LinearExpr down(power[t], -1.0);
        down.add(ux.shutdown[t], -(u.p_min - u.ramp_down));
        if (t > 0) {
          up.add(power[t - 1], -1.0);
          down.add(power[t - 1], 1.0);
        }
        m.add_constraint(name("rampup_u%zu_s%zu_t%d", i, s, t), up, Relation::LessEqual,
                         u.ramp_up);
        m.add_constraint(name("rampdn_u%zu_s%zu_t%d", i, s, t), down, Relation::LessEqual,
                         u.ramp_down);
      }
      sx.unit_power.push_back(std::move(power));
      sx.unit_segment.push_back(std::move(segs));
    }

    for (int t = 0; t < nh; ++t) {
      const double cap = line ? (*mk.line_capacity)[t] : kInf;
      sx.delivery.push_back(m.add_variable(name("Pdel_s%zu_t%d", s, t), -cap, cap));
      supply[t].add(sx.delivery[t], -1.0);
      const double rt = sc.values.at(Series::PriceRt, t);
      const double da = sc.values.at(Series::PriceDa, t);
      obj.add(ix.bid[t], rho * dt * (da - rt));
      obj.add(sx.delivery[t], rho * dt * rt);
      const double psi = mk.bid_deviation_penalty[t];
      if (psi > 0.0)
        opt::add_abs_term(m, LinearExpr(sx.delivery[t]) - LinearExpr(ix.bid[t]), rho * dt * psi,
                          name("dev_s%zu_t%d", s, t));

      const double load = sc.values.at(Series::Load, t);
      const double shed_hi = options.shed_limits ? shed_cap(mg, sc, t) : kInf;
      sx.shed.push_back(m.add_variable(name("LS_s%zu_t%d", s, t), 0.0, shed_hi));
      supply[t].add(sx.shed[t], 1.0);
      obj.add(sx.shed[t], -rho * dt * mk.value_of_lost_load[t]);
      expected_shed[t].add(sx.shed[t], rho);
      expected_load[t] += rho * load;
      rhs[t] += load;
    }

    for (std::size_t w = 0; w < mg.wind.size(); ++w) {
      std::vector<VarId> curt;
      for (int t = 0; t < nh; ++t) {
        const double avail = wind_available(mg.wind[w], sc, t);
        curt.push_back(m.add_variable(name("ws_w%zu_s%zu_t%d", w, s, t), 0.0, avail));
        supply[t].add(curt[t], -1.0);
        rhs[t] -= avail;
        obj.add(curt[t], -rho * dt * mk.wind_curtail_cost[t]);
      }
      sx.wind_curtailment.push_back(std::move(curt));
    }
    for (std::size_t p = 0; p < mg.solar.size(); ++p) {
      std::vector<VarId> curt;
      for (int t = 0; t < nh; ++t) {
        const double avail = solar_available(mg.solar[p], sc, t);
        curt.push_back(m.add_variable(name("pvs_p%zu_s%zu_t%d", p, s, t), 0.0, avail));
        supply[t].add(curt[t], -1.0);
        rhs[t] -= avail;
        obj.add(curt[t], -rho * dt * mk.solar_curtail_cost[t]);
      }
      sx.solar_curtailment.push_back(std::move(curt));
    }

    for (std::size_t k = 0; k < mg.batteries.size(); ++k) {
      const devices::BatterySpec& bat = mg.batteries[k];
      std::vector<VarId> c, d, bc, bd, e;
      e.push_back(m.add_variable(name("E_k%zu_s%zu_t0", k, s), bat.e_initial, bat.e_initial));
      for (int t = 0; t < nh; ++t) {
        c.push_back(m.add_variable(name("Pc_k%zu_s%zu_t%d", k, s, t), 0.0, bat.p_charge_max));
        d.push_back(
            m.add_variable(name("Pd_k%zu_s%zu_t%d", k, s, t), 0.0, bat.p_discharge_max));
        bc.push_back(m.add_binary(name("bc_k%zu_s%zu_t%d", k, s, t)));
        bd.push_back(m.add_binary(name("bd_k%zu_s%zu_t%d", k, s, t)));
        const bool last = t == nh - 1;
        e.push_back(m.add_variable(name("E_k%zu_s%zu_t%d", k, s, t + 1),
                                   last ? bat.e_initial : bat.e_min,
                                   last ? bat.e_initial : bat.e_max));
        m.add_constraint(name("cmode_k%zu_s%zu_t%d", k, s, t),
                         LinearExpr(c[t]) - bat.p_charge_max * LinearExpr(bc[t]),
                         Relation::LessEqual, 0.0);
        m.add_constraint(name("dmode_k%zu_s%zu_t%d", k, s, t),
                         LinearExpr(d[t]) - bat.p_discharge_max * LinearExpr(bd[t]),
                         Relation::LessEqual, 0.0);
        m.add_constraint(name("mode_k%zu_s%zu_t%d", k, s, t),
                         LinearExpr(bc[t]) + LinearExpr(bd[t]), Relation::Equal, 1.0);
        LinearExpr dyn(e[t + 1], 1.0);
        dyn.add(e[t], -1.0);
        dyn.add(c[t], -bat.eta_c * dt);
        dyn.add(d[t], dt / bat.eta_d);
        m.add_constraint(name("Edyn_k%zu_s%zu_t%d", k, s, t), dyn, Relation::Equal, 0.0);
        supply[t].add(d[t], 1.0);
        supply[t].add(c[t], -1.0);
        obj.add(c[t], -rho * dt * bat.degradation_cost * bat.eta_c);
        obj.add(d[t], -rho * dt * bat.degradation_cost / bat.eta_d);
      }
      sx.charge.push_back(std::move(c));
      sx.discharge.push_back(std::move(d));
      sx.charge_mode.push_back(std::move(bc));
      sx.discharge_mode.push_back(std::move(bd));
      sx.energy.push_back(std::move(e));
    }

    for (std::size_t j = 0; j < mg.buildings.size(); ++j) {
      std::vector<std::array<VarId, 3>> states;
      std::vector<VarId> power = add_building(m, mg.buildings[j], j, s, sc, dt, nh,
                                              options.comfort, rho, states);
      for (int t = 0; t < nh; ++t) supply[t].add(power[t], -mg.buildings[j].count);
      sx.hvac.push_back(std::move(power));
      sx.states.push_back(std::move(states));
    }

    for (int t = 0; t < nh; ++t)
      m.add_constraint(name("balance_s%zu_t%d", s, t), supply[t], Relation::Equal, rhs[t]);
    ix.scenarios.push_back(std::move(sx));
  }

  if (options.shed_limits) {
    for (int t = 0; t < nh; ++t) {
      require(expected_load[t] > 0.0, ErrorKind::BuildError,
              "expected non-HVAC load must be positive in slot " + std::to_string(t));
      m.add_constraint(name("lol_t%d", t), expected_shed[t], Relation::LessEqual,
                       mk.max_loss_of_load_ratio[t] * expected_load[t]);
    }
  }
  m.add_objective(obj);
  return bm;
}

ProfitReport profit_breakdown(const MicrogridConfig& mg, const scenario::ScenarioSet& scenarios,
                              const BiddingSolution& sol) {
  require(sol.status == opt::SolveStatus::Optimal ||
              (sol.status == opt::SolveStatus::IterationLimit && !sol.second.empty()),
          ErrorKind::InvalidState, "profit breakdown needs a solved bidding problem");
  require(sol.second.size() == scenarios.size(), ErrorKind::InvalidState,
          "solution and scenario set differ in size");
  const MarketParams& mk = mg.market;
  const int nh = mg.horizon;
  const double dt = mg.dt;
  ProfitReport r;

  for (std::size_t i = 0; i < mg.units.size(); ++i) {
    const devices::ConventionalUnit& u = mg.units[i];
    int prev = u.initially_on() ? 1 : 0;
    for (int t = 0; t < nh; ++t) {
      const int on = sol.first.commitment[i][t] > 0.5 ? 1 : 0;
      if (on > prev) r.startup_shutdown_cost += u.startup_cost;
      if (on < prev) r.startup_shutdown_cost += u.shutdown_cost;
      prev = on;
    }
  }

  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    const scenario::Scenario& sc = scenarios.scenarios[s];
    const SecondStageDecision& d = sol.second[s];
    const double rho = sc.probability;
    for (int t = 0; t < nh; ++t) {
      const double bid = sol.first.bid[t];
      const double dev = d.delivery[t] - bid;
      const double charge = mk.bid_deviation_penalty[t] * dt * std::abs(dev);
      r.expected_revenue += rho * (dt * bid * sc.values.at(Series::PriceDa, t) +
                                   dt * dev * sc.values.at(Series::PriceRt, t) - charge);
      r.expected_bid_deviation_charge += rho * charge;
      for (std::size_t i = 0; i < mg.units.size(); ++i)
        r.expected_generation_cost +=
            rho * devices::unit_production_cost(mg.units[i], sol.first.commitment[i][t] > 0.5,
                                                d.units[i].power[t], dt);
      for (std::size_t j = 0; j < mg.buildings.size(); ++j) {
        const Building& b = mg.buildings[j];
        if (!b.hvac.occupancy[t]) continue;
        r.expected_discomfort_penalty +=
            rho * b.hvac.discomfort_weight[t] * b.count *
            std::abs(d.buildings[j].states[t + 1].t_in - b.hvac.desired_temp[t]);
      }
      for (std::size_t k = 0; k < mg.batteries.size(); ++k) {
        const devices::BatterySpec& bat = mg.batteries[k];
        r.expected_battery_degradation +=
            rho * dt * bat.degradation_cost *
            (d.batteries[k].discharge[t] / bat.eta_d + bat.eta_c * d.batteries[k].charge[t]);
      }
      r.expected_shed_penalty += rho * dt * mk.value_of_lost_load[t] * d.shed[t];
      for (const auto& w : d.wind_curtailment) {
        r.expected_wind_curtailment_penalty += rho * dt * mk.wind_curtail_cost[t] * w[t];
        r.total_expected_renewable_curtailment_kwh += rho * dt * w[t];
      }
      for (const auto& p : d.solar_curtailment) {
        r.expected_solar_curtailment_penalty += rho * dt * mk.solar_curtail_cost[t] * p[t];
        r.total_expected_renewable_curtailment_kwh += rho * dt * p[t];
      }
    }
  }
  r.total_expected_profit =
      r.expected_revenue -
      (r.startup_shutdown_cost + r.expected_generation_cost + r.expected_discomfort_penalty +
       r.expected_battery_degradation + r.expected_shed_penalty +
       r.expected_wind_curtailment_penalty + r.expected_solar_curtailment_penalty);
  return r;
}

double max_balance_residual(const MicrogridConfig& mg, const scenario::ScenarioSet& scenarios,
                            const BiddingSolution& sol) {
  double worst = 0.0;
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    const scenario::Scenario& sc = scenarios.scenarios[s];
    const SecondStageDecision& d = sol.second[s];
    for (int t = 0; t < mg.horizon; ++t) {
      double lhs = d.shed[t];
      for (const auto& u : d.units) lhs += u.power[t];
      for (std::size_t w = 0; w < mg.wind.size(); ++w)
        lhs += wind_available(mg.wind[w], sc, t) - d.wind_curtailment[w][t];
      for (std::size_t p = 0; p < mg.solar.size(); ++p)
        lhs += solar_available(mg.solar[p], sc, t) - d.solar_curtailment[p][t];
      for (const auto& b : d.batteries) lhs += b.discharge[t] - b.charge[t];
      double rhs = d.delivery[t] + sc.values.at(Series::Load, t);
      for (std::size_t j = 0; j < mg.buildings.size(); ++j)
        rhs += mg.buildings[j].count * d.buildings[j].hvac_power[t];
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  return worst;
}

BiddingSolution solve_bidding(const MicrogridConfig& mg, const scenario::ScenarioSet& scenarios,
                              const opt::MilpOptions& options) {
  BidModel bm = build_two_stage_model(mg, scenarios);
  const opt::Solution sol = opt::solve_milp(bm.model, options);
  if (sol.status == opt::SolveStatus::Infeasible) {
    BuildOptions relax;
    const char* names[3] = {"shed limits", "comfort band", "line capacity"};
    bool* flags[3] = {&relax.shed_limits, &relax.comfort, &relax.line_capacity};
    for (int k = 0; k < 3; ++k) {
      *flags[k] = false;
      const auto probe = opt::solve_milp(build_two_stage_model(mg, scenarios, relax).model,
                                         options);
      if (probe.status != opt::SolveStatus::Infeasible)
        fail(ErrorKind::Infeasible,
             std::string("bidding problem is infeasible; first violated family: ") + names[k]);
    }
    fail(ErrorKind::Infeasible,
         "bidding problem is infeasible even with shed, comfort and line limits relaxed");
  }
  require(sol.status != opt::SolveStatus::Unbounded, ErrorKind::Infeasible,
          "bidding problem is unbounded; raise the deviation penalty or set a line capacity");
  require(!sol.values.empty(), ErrorKind::Infeasible,
          "node limit reached before any integer-feasible solution was found");

  BiddingSolution out = extract(mg, scenarios, bm.index, sol);
  out.profit = profit_breakdown(mg, scenarios, out);
  const double tol = 1e-6 * (1.0 + std::abs(out.objective));
  if (std::abs(out.profit.total_expected_profit - out.objective) > tol) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "recomputed profit %.10g differs from the solver objective %.10g",
                  out.profit.total_expected_profit, out.objective);
    fail(ErrorKind::InvalidState, buf);
  }
  return out;
}

HvacOnlyResult solve_hvac_only(const MicrogridConfig& mg, const scenario::ScenarioSet& scenarios,
                               const opt::LpOptions& options) {
  mg.validate();
  scenarios.validate(1e-9);
  require(static_cast<int>(scenarios.slots()) == mg.horizon, ErrorKind::BuildError,
          "scenario slot count does not match the horizon");
  const int nh = mg.horizon;
  const double dt = mg.dt;
  opt::OptModel m(opt::Sense::Minimize);
  std::vector<VarId> bid;
  for (int t = 0; t < nh; ++t) bid.push_back(m.add_variable(name("hbid_t%d", t), 0.0, kInf));

  std::vector<std::vector<LinearExpr>> aggregate(scenarios.size(), std::vector<LinearExpr>(nh));
  std::vector<std::vector<std::vector<std::array<VarId, 3>>>> states(scenarios.size());
  LinearExpr trading;
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    const scenario::Scenario& sc = scenarios.scenarios[s];
    const double rho = sc.probability;
    for (std::size_t j = 0; j < mg.buildings.size(); ++j) {
      std::vector<std::array<VarId, 3>> st;
      const std::vector<VarId> power =
          add_building(m, mg.buildings[j], j, s, sc, dt, nh, true, rho, st);
      for (int t = 0; t < nh; ++t) aggregate[s][t].add(power[t], mg.buildings[j].count);
      states[s].push_back(std::move(st));
    }
    for (int t = 0; t < nh; ++t) {
      const double da = sc.values.at(Series::PriceDa, t);
      const double rt = sc.values.at(Series::PriceRt, t);
      trading.add(bid[t], rho * dt * (da - rt));
      trading += rho * dt * rt * aggregate[s][t];
      const double w = rho * dt * mg.market.bid_deviation_penalty[t];
      if (w > 0.0)
        opt::add_abs_term(m, aggregate[s][t] - LinearExpr(bid[t]), w, name("hdev_s%zu_t%d", s, t));
    }
  }
  m.add_objective(trading);
  const opt::Solution sol = opt::solve_lp(m, options);
  require(sol.status != opt::SolveStatus::Unbounded, ErrorKind::Infeasible,
          "HVAC-only problem is unbounded; raise the deviation penalty");
  require(sol.optimal(), ErrorKind::Infeasible,
          std::string("HVAC-only problem ended with status ") + opt::to_string(sol.status));

  HvacOnlyResult out;
  for (VarId v : bid) out.bid.push_back(sol.value(v));
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    std::vector<double> agg;
    for (int t = 0; t < nh; ++t) agg.push_back(aggregate[s][t].evaluate(sol.values));
    out.aggregate.push_back(std::move(agg));
  }
  out.expected_trading_cost = trading.evaluate(sol.values);
  // Deviation and discomfort are recomputed from the decisions.
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    const double rho = scenarios.scenarios[s].probability;
    for (int t = 0; t < nh; ++t) {
      out.expected_deviation_charge += rho * dt * mg.market.bid_deviation_penalty[t] *
                                       std::abs(out.aggregate[s][t] - out.bid[t]);
      for (std::size_t j = 0; j < mg.buildings.size(); ++j) {
        const Building& b = mg.buildings[j];
        if (!b.hvac.occupancy[t]) continue;
        const double tin = sol.value(states[s][j][t][0]);
        out.expected_discomfort_penalty += rho * b.hvac.discomfort_weight[t] * b.count *
                                           std::abs(tin - b.hvac.desired_temp[t]);
      }
    }
  }
  out.expected_cost =
      out.expected_trading_cost + out.expected_deviation_charge + out.expected_discomfort_penalty;
  return out;
}

SchemeResult run_scheme(const MicrogridConfig& mg, const scenario::ScenarioSet& scenarios,
                        int scheme, const opt::MilpOptions& options) {
  require(scheme >= 1 && scheme <= 3, ErrorKind::InvalidParameter, "scheme must be 1, 2 or 3");
  SchemeResult r;
  r.scheme = scheme;
  if (scheme == 1 || scheme == 2) {
    MicrogridConfig cfg = mg;
    if (scheme == 2)
      for (Building& b : cfg.buildings)
        std::fill(b.hvac.max_deviation.begin(), b.hvac.max_deviation.end(), 0.0);
    r.solution = solve_bidding(cfg, scenarios, options);
    r.report = r.solution.profit;
    r.profit = r.report.total_expected_profit;
    return r;
  }

  MicrogridConfig rest = mg;
  rest.buildings.clear();
  r.solution = solve_bidding(rest, scenarios, options);
  r.report = r.solution.profit;
  if (!mg.buildings.empty()) {
    HvacOnlyResult h = solve_hvac_only(mg, scenarios, options.lp);
    r.report.expected_revenue -= h.expected_trading_cost + h.expected_deviation_charge;
    r.report.expected_bid_deviation_charge += h.expected_deviation_charge;
    r.report.expected_discomfort_penalty += h.expected_discomfort_penalty;
    r.report.total_expected_profit -= h.expected_cost;
    r.hvac_only = std::move(h);
  }
  r.profit = r.report.total_expected_profit;
  return r;
}

}  // namespace gridsched::mgbid
