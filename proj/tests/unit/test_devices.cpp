#include <algorithm>
#include <functional>
#include <random>

#include <gtest/gtest.h>

#include "gridsched/devices.hpp"
#include "gridsched/error.hpp"
#include "oracles.hpp"

using namespace gridsched;
using namespace gridsched::devices;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorKind::InvalidState;
}

ConventionalUnit table_unit1() {
  ConventionalUnit u = oracle::linear_unit("MT1", 100, 2000, 30, 0.13);
  u.startup_cost = 150;
  u.shutdown_cost = 15;
  u.min_up = 2;
  u.min_down = 2;
  u.initial_status = -2;
  return u;
}

bool has(const std::vector<Violation>& v, ViolationKind k, int slot) {
  return std::any_of(v.begin(), v.end(),
                     [&](const Violation& x) { return x.kind == k && x.slot == slot; });
}

}  // namespace

TEST(EvSoc, ChargeOneHour) {
  EvSpec s;
  EXPECT_NEAR(ev_soc_step(s, 0.5, 6.0, 0.0, 1.0), 0.725, 1e-15);
}

TEST(EvSoc, DischargeOneHour) {
  EvSpec s;
  EXPECT_NEAR(ev_soc_step(s, 0.725, 0.0, 6.0, 1.0), 0.725 - 6.0 / (0.9 * 24.0), 1e-15);
  EXPECT_NEAR(ev_soc_step(s, 0.725, 0.0, 6.0, 1.0), 0.44722, 1e-5);
}

TEST(EvSoc, IdleKeepsSoc) {
  EvSpec s;
  EXPECT_EQ(ev_soc_step(s, 0.61, 0.0, 0.0, 1.0), 0.61);
}

TEST(EvSoc, AffineInPowerAndTime) {
  EvSpec s;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int k = 0; k < 100; ++k) {
    const double p1 = u(rng), p2 = u(rng), soc = 0.3 + 0.1 * u(rng);
    const double once = ev_soc_step(s, soc, p1 + p2, 0.0, 0.5);
    const double twice = ev_soc_step(s, ev_soc_step(s, soc, p1, 0.0, 0.5), p2, 0.0, 0.5);
    EXPECT_NEAR(once, twice, 1e-12);
  }
}

TEST(EvSoc, NegativePowerRejected) {
  EvSpec s;
  EXPECT_EQ(kind_of([&] { ev_soc_step(s, 0.5, -1.0, 0.0, 1.0); }), ErrorKind::InvalidParameter);
}

TEST(EvTrip, CommuteDepletion) {
  EvSpec s;
  EXPECT_NEAR(ev_apply_trip(s, 0.9, 32.0), 0.9 - 10.112 / 24.0, 1e-15);
  EXPECT_NEAR(ev_apply_trip(s, 0.9, 32.0), 0.47867, 1e-5);
  EXPECT_EQ(ev_apply_trip(s, 0.4, 0.0), 0.4);
}

TEST(EvTrip, TripLongerThanBattery) {
  EvSpec s;
  EXPECT_EQ(kind_of([&] { ev_apply_trip(s, 0.2, 32.0); }), ErrorKind::InfeasibleTrip);
}

TEST(EvSpecCheck, SocBoundsOrdered) {
  EvSpec s;
  s.soc_min = 0.95;
  EXPECT_EQ(kind_of([&] { s.validate(); }), ErrorKind::InvalidParameter);
}

TEST(TripPlanCheck, AvailabilityAndOverlap) {
  TripPlan plan{{{8, 17, 32.0}}};
  const auto home = plan.availability(24);
  for (int t = 0; t < 24; ++t) EXPECT_EQ(home[t], (t >= 8 && t < 17) ? 0 : 1) << t;
  TripPlan bad{{{8, 17, 10.0}, {12, 20, 5.0}}};
  EXPECT_THROW(bad.validate(24), Error);
  TripPlan late{{{20, 26, 5.0}}};
  EXPECT_THROW(late.validate(24), Error);
}

TEST(Wind, PowerCurvePoints) {
  WindSpec w;
  EXPECT_EQ(wind_available_power(w, 2.0), 0.0);
  EXPECT_NEAR(wind_available_power(w, 7.5), 500.0, 1e-9);
  EXPECT_NEAR(wind_available_power(w, 20.0), 1000.0, 1e-9);
  EXPECT_EQ(wind_available_power(w, 31.0), 0.0);
}

TEST(Wind, BoundaryConvention) {
  WindSpec w;
  EXPECT_EQ(wind_available_power(w, 30.0), 0.0);
  EXPECT_NEAR(wind_available_power(w, 12.0), 1000.0, 1e-12);
  EXPECT_NEAR(wind_available_power(w, 3.0), 0.0, 1e-12);
}

TEST(Wind, ContinuousAndNonDecreasingBelowRated) {
  WindSpec w;
  double prev = 0.0;
  for (int k = 0; k <= 1200; ++k) {
    const double v = 12.0 * k / 1200.0;
    const double p = wind_available_power(w, v);
    EXPECT_GE(p, prev - 1e-12);
    EXPECT_LE(p - prev, 1000.0 / 9.0 * 0.01 + 1e-9);  // Lipschitz on the ramp
    prev = p;
  }
}

TEST(Solar, RatedOutputNearTheQuotedFigure) {
  SolarSpec s;
  const double rated = solar_available_power(s, 1.0, 25.0);
  EXPECT_NEAR(rated, 1099.0, 1e-9);
  EXPECT_LE(std::abs(rated - 1100.0) / 1100.0, 0.002);
}

TEST(Solar, DarkAndHot) {
  SolarSpec s;
  EXPECT_EQ(solar_available_power(s, 0.0, 30.0), 0.0);
  EXPECT_NEAR(solar_available_power(s, 1.0, 35.0), 1099.0 * 0.95, 1e-9);
  EXPECT_EQ(solar_available_power(s, 1.0, 300.0), 0.0);
}

TEST(Battery, EnergyStep) {
  BatterySpec b;
  EXPECT_NEAR(battery_energy_step(b, 100.0, 100.0, 0.0, 1.0), 195.0, 1e-12);
  EXPECT_EQ(battery_energy_step(b, 120.0, 0.0, 0.0, 1.0), 120.0);
}

TEST(Battery, RoundTripLosesEnergy) {
  BatterySpec b;
  const double full = battery_energy_step(b, 100.0, 50.0, 0.0, 1.0);
  const double back = battery_energy_step(b, full, 0.0, 50.0 * b.eta_c * b.eta_d, 1.0);
  EXPECT_NEAR(back, 100.0, 1e-12);
  const double naive = battery_energy_step(b, full, 0.0, 50.0, 1.0);
  EXPECT_LT(naive, 100.0);
}

TEST(UnitCost, TableUnitFullAndMinimumOutput) {
  const auto u = table_unit1();
  EXPECT_NEAR(unit_production_cost(u, true, 2000.0, 1.0), 277.0, 1e-9);
  EXPECT_NEAR(unit_production_cost(u, true, 100.0, 1.0), 30.0, 1e-9);
  EXPECT_EQ(unit_production_cost(u, false, 0.0, 1.0), 0.0);
}

TEST(UnitCost, OutOfRangeDispatchRejected) {
  const auto u = table_unit1();
  EXPECT_EQ(kind_of([&] { unit_production_cost(u, true, 50.0, 1.0); }),
            ErrorKind::InvalidDispatch);
  EXPECT_EQ(kind_of([&] { unit_production_cost(u, false, 10.0, 1.0); }),
            ErrorKind::InvalidDispatch);
}

TEST(UnitCost, ConvexAndNonDecreasingOnRandomUnits) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    ConventionalUnit unit;
    unit.name = "r";
    unit.p_min = 10 + 90 * u(rng);
    const int segs = 1 + static_cast<int>(4 * u(rng));
    std::vector<double> costs, widths;
    double total = 0.0;
    for (int m = 0; m < segs; ++m) {
      costs.push_back(0.5 * u(rng));
      widths.push_back(50 + 500 * u(rng));
      total += widths.back();
    }
    std::sort(costs.begin(), costs.end());
    for (int m = 0; m < segs; ++m) unit.segments.push_back({costs[m], widths[m]});
    unit.p_max = unit.p_min + total;
    unit.fixed_cost = 20 * u(rng);
    unit.ramp_up = unit.ramp_down = unit.p_max;
    unit.validate();

    auto f = [&](double p) { return unit_production_cost(unit, true, p, 1.0); };
    double prev = f(unit.p_min);
    for (int i = 1; i <= 50; ++i) {
      const double p = unit.p_min + (unit.p_max - unit.p_min) * i / 50.0;
      EXPECT_GE(f(p), prev - 1e-9);
      prev = f(p);
    }
    for (int i = 0; i < 20; ++i) {
      const double a = unit.p_min + (unit.p_max - unit.p_min) * u(rng);
      const double b = unit.p_min + (unit.p_max - unit.p_min) * u(rng);
      EXPECT_LE(f(0.5 * (a + b)), 0.5 * (f(a) + f(b)) + 1e-9);
    }
  }
}

TEST(UnitSpec, RejectsDecreasingMarginalCosts) {
  auto u = oracle::linear_unit("x", 100, 300, 0, 0.2);
  u.segments = {{0.3, 100}, {0.1, 100}};
  EXPECT_EQ(kind_of([&] { u.validate(); }), ErrorKind::InvalidParameter);
}

TEST(UnitSpec, InitialStatusCarryIn) {
  auto u = table_unit1();
  u.initial_status = -1;
  u.min_down = 3;
  EXPECT_EQ(u.forced_off_slots(24), 2);
  EXPECT_EQ(u.forced_on_slots(24), 0);
  u.initial_status = 1;
  u.min_up = 4;
  EXPECT_EQ(u.forced_on_slots(24), 3);
  EXPECT_EQ(u.forced_on_slots(2), 2);
}

TEST(UnitSchedule, AllOffIsFeasible) {
  auto u = table_unit1();
  EXPECT_TRUE(validate_unit_schedule(u, std::vector<double>(6, 0.0), std::vector<double>(6, 0.0))
                  .empty());
}

TEST(UnitSchedule, MinimumUpTime) {
  auto u = table_unit1();
  const auto v = validate_unit_schedule(u, {1, 0, 0}, {100, 0, 0});
  EXPECT_TRUE(has(v, ViolationKind::MinUp, 0));
}

TEST(UnitSchedule, RampLimitWithoutStartup) {
  auto u = table_unit1();
  u.ramp_up = 500;
  u.ramp_down = 500;
  u.min_up = 1;
  const auto v = validate_unit_schedule(u, {1, 1, 1}, {100, 100, 2000});
  EXPECT_TRUE(has(v, ViolationKind::RampUp, 2));
}

TEST(UnitSchedule, StartupLimitedToMinimumOutput) {
  auto u = table_unit1();
  u.ramp_up = 500;
  const auto v = validate_unit_schedule(u, {1, 1}, {400, 400});
  EXPECT_TRUE(has(v, ViolationKind::RampUp, 0));
  EXPECT_TRUE(validate_unit_schedule(u, {1, 1}, {100, 600}).empty());
}

TEST(UnitSchedule, InitialOffStatusMustBeHonoured) {
  auto u = table_unit1();
  u.initial_status = -1;
  u.min_down = 3;
  u.min_up = 1;
  const auto v = validate_unit_schedule(u, {0, 1, 1}, {0, 100, 100});
  EXPECT_TRUE(has(v, ViolationKind::InitialStatus, 1));
}

TEST(UnitSchedule, LengthMismatch) {
  EXPECT_EQ(kind_of([&] { validate_unit_schedule(table_unit1(), {0, 0}, {0}); }),
            ErrorKind::InvalidParameter);
}
