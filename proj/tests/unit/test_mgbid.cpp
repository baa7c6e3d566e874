#include <algorithm>
#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "gridsched/config.hpp"
#include "gridsched/csv_io.hpp"
#include "gridsched/error.hpp"
#include "gridsched/mgbid.hpp"
#include "oracles.hpp"

using namespace gridsched;
using namespace gridsched::mgbid;
using scenario::Series;

namespace {

scenario::ForecastSeries flat_forecast(int horizon, double da, double rt, double load,
                                       double wind = 0.0, double irr = 0.0, double amb = 30.0) {
  return scenario::HourlySeries::filled(horizon, {da, rt, amb, irr, wind, load});
}

MicrogridConfig bare(int horizon, double psi = 0.05) {
  MicrogridConfig mg;
  mg.horizon = horizon;
  mg.market = MarketParams::uniform(horizon, psi, 1.0, 0.0, 0.1);
  return mg;
}

/// Small fixture: the first configured scenarios of the repository's
/// mg-bid example, reduced to `k` scenarios.
struct Fixture {
  MicrogridConfig mg;
  scenario::ScenarioSet set;
};

Fixture repo_fixture(const std::string& file, std::size_t n, std::size_t k) {
  const auto cfg = config::load_entities(oracle::data_path(file));
  const auto f = io::load_forecasts(oracle::data_path("forecast_24h.csv"));
  const auto full = scenario::sample_scenarios(f, cfg.scenarios.uncertainty, n, cfg.scenarios.seed);
  const auto metric = scenario::DistanceMetric::from_forecast(f, cfg.scenarios.distance_weights);
  return {*cfg.microgrid, scenario::reduce_fast_forward(full, k, metric)};
}

void expect_feasible(const MicrogridConfig& mg, const scenario::ScenarioSet& set,
                     const BiddingSolution& sol) {
  EXPECT_LE(max_balance_residual(mg, set, sol), 1e-6);
  for (std::size_t s = 0; s < set.size(); ++s) {
    const auto& d = sol.second[s];
    for (std::size_t i = 0; i < mg.units.size(); ++i)
      EXPECT_TRUE(devices::validate_unit_schedule(mg.units[i], sol.first.commitment[i],
                                                  d.units[i].power)
                      .empty());
    for (std::size_t k = 0; k < mg.batteries.size(); ++k) {
      const auto& b = d.batteries[k];
      const auto& spec = mg.batteries[k];
      for (int t = 0; t < mg.horizon; ++t) {
        EXPECT_NEAR(b.charge_mode[t] + b.discharge_mode[t], 1.0, 1e-9);
        EXPECT_LE(b.charge[t] * b.discharge[t], 1e-9);
      }
      for (double e : b.energy) {
        EXPECT_GE(e, spec.e_min - 1e-8);
        EXPECT_LE(e, spec.e_max + 1e-8);
      }
      EXPECT_NEAR(b.energy.back(), spec.e_initial, 1e-8);
    }
    for (std::size_t j = 0; j < mg.buildings.size(); ++j) {
      const auto& hv = mg.buildings[j].hvac;
      for (int t = 0; t < mg.horizon; ++t)
        if (hv.occupancy[t])
          EXPECT_LE(std::abs(d.buildings[j].states[t + 1].t_in - hv.desired_temp[t]),
                    hv.max_deviation[t] + 1e-6);
    }
    for (std::size_t w = 0; w < d.wind_curtailment.size(); ++w)
      for (int t = 0; t < mg.horizon; ++t) {
        EXPECT_GE(d.wind_curtailment[w][t], -1e-9);
        EXPECT_LE(d.wind_curtailment[w][t], d.wind_available[w][t] + 1e-9);
      }
    for (std::size_t p = 0; p < d.solar_curtailment.size(); ++p)
      for (int t = 0; t < mg.horizon; ++t) {
        EXPECT_GE(d.solar_curtailment[p][t], -1e-9);
        EXPECT_LE(d.solar_curtailment[p][t], d.solar_available[p][t] + 1e-9);
      }
  }
  for (int t = 0; t < mg.horizon; ++t) {
    double shed = 0.0, load = 0.0;
    for (std::size_t s = 0; s < set.size(); ++s) {
      shed += set.scenarios[s].probability * sol.second[s].shed[t];
      load += set.scenarios[s].probability * set.scenarios[s].values.at(Series::Load, t);
    }
    EXPECT_LE(shed, mg.market.max_loss_of_load_ratio[t] * load + 1e-6);
  }
  EXPECT_LE(std::abs(sol.profit.total_expected_profit - sol.objective),
            1e-6 * (1 + std::abs(sol.objective)));
}

}  // namespace

TEST(BidModel, OneUnitTwoSlotCensus) {
  auto mg = bare(2);
  mg.units.push_back(oracle::linear_unit("g", 10, 50, 1.0, 0.1));
  const auto set = oracle::single_scenario(flat_forecast(2, 0.2, 0.2, 20));
  const auto bm = build_two_stage_model(mg, set);
  EXPECT_EQ(bm.model.num_integral(), 6u);
  // First stage: 5 per slot (I, y, z, SU, SD) + bid. Second stage per slot:
  // power, one segment, delivery, deviation auxiliary, shed.
  EXPECT_EQ(bm.model.num_variables(), 2u * 5 + 2 + 2 * 5);
  // First stage: transition, y+z, SU, SD per slot. Second stage per slot:
  // segment definition, Pmax, two ramp rows, two deviation rows, balance
  // and loss of load.
  EXPECT_EQ(bm.model.num_constraints(), 2u * 4 + 2 * 8);
}

TEST(BidModel, HorizonMismatchIsBuildError) {
  auto mg = bare(3);
  const auto set = oracle::single_scenario(flat_forecast(2, 0.1, 0.1, 5));
  try {
    build_two_stage_model(mg, set);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BuildError);
  }
}

TEST(BidModel, NoLineLimitNeedsPositivePenalty) {
  auto mg = bare(2, 0.0);
  const auto set = oracle::single_scenario(flat_forecast(2, 0.1, 0.1, 5));
  try {
    build_two_stage_model(mg, set);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BuildError);
  }
}

TEST(BidModel, NoBuildingsNoBatteriesPlainBalance) {
  auto mg = bare(3);
  mg.units.push_back(oracle::linear_unit("g", 10, 50, 1.0, 0.1));
  mg.wind.push_back({});
  const auto set = oracle::single_scenario(flat_forecast(3, 0.2, 0.2, 20, 7.5));
  const auto bm = build_two_stage_model(mg, set);
  for (const auto& v : bm.model.variables()) {
    EXPECT_EQ(v.name.rfind("tin", 0), std::string::npos);
    EXPECT_EQ(v.name.rfind("E_", 0), std::string::npos);
  }
  const auto& row = bm.model.constraint(bm.model.find_constraint("balance_s0_t1"));
  EXPECT_EQ(row.relation, opt::Relation::Equal);
  EXPECT_NEAR(row.rhs, 20.0 - 500.0, 1e-9);  // load minus available wind
  EXPECT_EQ(row.row.size(), 4u);             // unit, delivery, shed, curtailment
}

TEST(Bidding, CertainScenarioDeliversTheBid) {
  auto mg = bare(4, 0.02);
  mg.units.push_back(oracle::linear_unit("g", 10, 80, 1.0, 0.05));
  auto f = flat_forecast(4, 0.0, 0.0, 30);
  f[Series::PriceDa] = {0.02, 0.2, 0.2, 0.03};
  f[Series::PriceRt] = f[Series::PriceDa];
  const auto set = oracle::single_scenario(f);
  const auto sol = solve_bidding(mg, set);
  for (int t = 0; t < 4; ++t) EXPECT_NEAR(sol.second[0].delivery[t], sol.first.bid[t], 1e-7);
  expect_feasible(mg, set, sol);
}

TEST(Bidding, FreeDeviationEqualsPinnedDelivery) {
  auto mg = bare(3, 0.0);
  mg.market.line_capacity = std::vector<double>(3, 100.0);
  mg.units.push_back(oracle::linear_unit("g", 10, 80, 0.5, 0.05));
  auto f = flat_forecast(3, 0.1, 0.1, 30);
  f[Series::PriceRt] = {0.1, 0.2, 0.05};
  f[Series::PriceDa] = {0.1, 0.2, 0.05};
  const auto set = oracle::single_scenario(f);
  const auto free_sol = solve_bidding(mg, set);

  auto bm = build_two_stage_model(mg, set);
  for (int t = 0; t < 3; ++t)
    bm.model.add_constraint("pin" + std::to_string(t),
                            opt::LinearExpr(bm.index.scenarios[0].delivery[t]) -
                                opt::LinearExpr(bm.index.bid[t]),
                            opt::Relation::Equal, 0.0);
  const auto pinned = opt::solve_milp(bm.model);
  ASSERT_TRUE(pinned.optimal());
  EXPECT_NEAR(free_sol.objective, pinned.objective, 1e-7);
}

TEST(Bidding, ExpensiveUnitsStayOffAtLowPrices) {
  const auto fx = repo_fixture("mg_bid.json", 60, 3);
  const auto sol = solve_bidding(fx.mg, fx.set);
  double max_price = 0.0, min_marginal = 1e9;
  for (const auto& sc : fx.set.scenarios)
    for (Series s : {Series::PriceDa, Series::PriceRt})
      for (double p : sc.values[s]) max_price = std::max(max_price, p);
  for (const auto& u : fx.mg.units)
    for (const auto& seg : u.segments) min_marginal = std::min(min_marginal, seg.marginal_cost);
  ASSERT_LT(max_price, min_marginal);
  for (std::size_t i = 0; i < fx.mg.units.size(); ++i)
    for (double c : sol.first.commitment[i]) EXPECT_EQ(c, 0.0) << fx.mg.units[i].name;
  expect_feasible(fx.mg, fx.set, sol);
}

TEST(Bidding, StressedFixtureCommitsUnitsFeasibly) {
  auto fx = repo_fixture("mg_bid.json", 60, 3);
  for (auto& sc : fx.set.scenarios) {
    for (double& p : sc.values[Series::PriceDa]) p += 0.2;
    for (double& p : sc.values[Series::PriceRt]) p += 0.2;
  }
  const auto sol = solve_bidding(fx.mg, fx.set);
  double on = 0.0;
  for (const auto& row : sol.first.commitment)
    for (double c : row) on += c;
  EXPECT_GT(on, 0.0);
  expect_feasible(fx.mg, fx.set, sol);
}

TEST(Bidding, BatteryArbitrage) {
  auto mg = bare(2, 0.0);
  mg.market.line_capacity = std::vector<double>(2, 500.0);
  mg.batteries.push_back({});
  auto f = flat_forecast(2, 0.0, 0.0, 1.0);
  f[Series::PriceDa] = {0.05, 0.3};
  f[Series::PriceRt] = {0.05, 0.3};
  auto set = oracle::single_scenario(f);
  auto sol = solve_bidding(mg, set);
  const auto& b = sol.second[0].batteries[0];
  const auto& spec = mg.batteries[0];
  // Fill to e_max in the cheap slot, return to the initial level in the dear one.
  const double headroom = spec.e_max - spec.e_initial;
  EXPECT_NEAR(b.charge[0], headroom / spec.eta_c, 1e-7);
  EXPECT_NEAR(b.discharge[1], headroom * spec.eta_d, 1e-7);
  expect_feasible(mg, set, sol);

  // Reversed spread: sell first down to e_min, buy back later.
  std::swap(set.scenarios[0].values[Series::PriceDa][0], set.scenarios[0].values[Series::PriceDa][1]);
  std::swap(set.scenarios[0].values[Series::PriceRt][0], set.scenarios[0].values[Series::PriceRt][1]);
  sol = solve_bidding(mg, set);
  const double depth = spec.e_initial - spec.e_min;
  EXPECT_NEAR(sol.second[0].batteries[0].discharge[0], depth * spec.eta_d, 1e-7);
  EXPECT_NEAR(sol.second[0].batteries[0].charge[1], depth / spec.eta_c, 1e-7);

  // Flat prices: cycling only costs degradation.
  for (Series s : {Series::PriceDa, Series::PriceRt}) set.scenarios[0].values[s] = {0.1, 0.1};
  sol = solve_bidding(mg, set);
  for (int t = 0; t < 2; ++t) {
    EXPECT_NEAR(sol.second[0].batteries[0].charge[t], 0.0, 1e-9);
    EXPECT_NEAR(sol.second[0].batteries[0].discharge[t], 0.0, 1e-9);
  }
}

TEST(Bidding, InfeasibilityNamesShedLimits) {
  auto mg = bare(2, 0.0);
  mg.market.line_capacity = std::vector<double>(2, 0.0);
  mg.market.max_shed = std::vector<double>(2, 1.0);
  const auto set = oracle::single_scenario(flat_forecast(2, 0.1, 0.1, 10));
  try {
    solve_bidding(mg, set);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Infeasible);
    EXPECT_NE(std::string(e.what()).find("shed"), std::string::npos) << e.what();
  }
}

TEST(Profit, ZeroActivityIsZero) {
  auto mg = bare(2);
  mg.units.push_back(oracle::linear_unit("g", 10, 50, 1.0, 0.1));
  const auto set = oracle::single_scenario(flat_forecast(2, 0.2, 0.2, 20));
  auto sol = solve_bidding(mg, set);
  for (auto& row : sol.first.commitment) std::fill(row.begin(), row.end(), 0.0);
  std::fill(sol.first.bid.begin(), sol.first.bid.end(), 0.0);
  for (auto& d : sol.second) {
    for (auto& u : d.units) std::fill(u.power.begin(), u.power.end(), 0.0);
    std::fill(d.delivery.begin(), d.delivery.end(), 0.0);
    std::fill(d.shed.begin(), d.shed.end(), 0.0);
  }
  const auto r = profit_breakdown(mg, set, sol);
  EXPECT_EQ(r.total_expected_profit, 0.0);
  EXPECT_EQ(r.expected_revenue, 0.0);
  EXPECT_EQ(r.expected_generation_cost, 0.0);
}

TEST(Profit, DoublingEveryPriceAndCostDoublesProfit) {
  auto fx = repo_fixture("mg_bid.json", 40, 2);
  for (auto& b : fx.mg.buildings) b.hvac.discomfort_weight.assign(fx.mg.horizon, 0.01);
  const auto base = solve_bidding(fx.mg, fx.set);

  auto mg2 = fx.mg;
  auto set2 = fx.set;
  for (auto& sc : set2.scenarios) {
    for (double& p : sc.values[Series::PriceDa]) p *= 2;
    for (double& p : sc.values[Series::PriceRt]) p *= 2;
  }
  for (auto& u : mg2.units) {
    u.fixed_cost *= 2;
    u.startup_cost *= 2;
    u.shutdown_cost *= 2;
    for (auto& s : u.segments) s.marginal_cost *= 2;
  }
  for (auto& b : mg2.batteries) b.degradation_cost *= 2;
  for (auto& b : mg2.buildings)
    for (double& w : b.hvac.discomfort_weight) w *= 2;
  for (auto* v : {&mg2.market.bid_deviation_penalty, &mg2.market.value_of_lost_load,
                  &mg2.market.wind_curtail_cost, &mg2.market.solar_curtail_cost})
    for (double& x : *v) x *= 2;

  const auto same_decisions = profit_breakdown(mg2, set2, base);
  EXPECT_NEAR(same_decisions.expected_revenue, 2 * base.profit.expected_revenue, 1e-9);
  EXPECT_NEAR(same_decisions.total_expected_profit, 2 * base.profit.total_expected_profit, 1e-9);
  const auto resolved = solve_bidding(mg2, set2);
  EXPECT_NEAR(resolved.objective, 2 * base.objective, 1e-5 * (1 + std::abs(base.objective)));
}

TEST(Schemes, OrderingOnSmallFixture) {
  const auto fx = repo_fixture("mg_bid.json", 40, 2);
  const double s1 = run_scheme(fx.mg, fx.set, 1).profit;
  const double s2 = run_scheme(fx.mg, fx.set, 2).profit;
  const double s3 = run_scheme(fx.mg, fx.set, 3).profit;
  const double tol = 1e-6 * (1 + std::abs(s1));
  EXPECT_GE(s1, s2 - tol);
  EXPECT_GE(s1, s3 - tol);
}

TEST(Schemes, WithoutBuildingsSchemeThreeIsSchemeOne) {
  auto fx = repo_fixture("mg_bid.json", 40, 2);
  fx.mg.buildings.clear();
  const auto a = run_scheme(fx.mg, fx.set, 1);
  const auto c = run_scheme(fx.mg, fx.set, 3);
  EXPECT_NEAR(a.profit, c.profit, 1e-9);
  EXPECT_FALSE(c.hvac_only.has_value());
}

TEST(Schemes, InvalidSchemeNumber) {
  auto mg = bare(2);
  const auto set = oracle::single_scenario(flat_forecast(2, 0.1, 0.1, 5));
  EXPECT_THROW(run_scheme(mg, set, 4), Error);
}

TEST(Sensitivity, CurtailmentFallsAsPenaltyRises) {
  auto mg = bare(4);
  mg.market.line_capacity = std::vector<double>(4, 300.0);
  mg.wind.push_back({});
  mg.solar.push_back({0.157, 2000.0});
  auto f = flat_forecast(4, 0.02, 0.02, 50, 14.0, 0.6);
  const auto set = oracle::single_scenario(f);
  double prev = std::numeric_limits<double>::infinity();
  for (double v : {0.0, 0.01, 0.05, 0.1}) {
    mg.market.wind_curtail_cost.assign(4, v);
    mg.market.solar_curtail_cost.assign(4, v);
    const auto sol = solve_bidding(mg, set);
    const double c = sol.profit.total_expected_renewable_curtailment_kwh;
    EXPECT_LE(c, prev + 1e-6);
    prev = c;
  }
}

TEST(Sensitivity, LineCapacityGrowthNeverHurts) {
  auto mg = bare(3);
  mg.wind.push_back({});
  mg.units.push_back(oracle::linear_unit("g", 10, 300, 1.0, 0.02));
  auto f = flat_forecast(3, 0.1, 0.09, 50, 13.0);
  const auto set = oracle::single_scenario(f);
  double prev = -std::numeric_limits<double>::infinity();
  for (double cap : {0.0, 200.0, 600.0, 2000.0}) {
    mg.market.line_capacity = std::vector<double>(3, cap);
    const double p = solve_bidding(mg, set).objective;
    EXPECT_GE(p, prev - 1e-7);
    prev = p;
  }
}
