#include "gridsched/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gridsched/devices.hpp"
#include "gridsched/error.hpp"

namespace gridsched::config {

using nlohmann::json;

namespace {

[[noreturn]] void load_fail(const std::string& path, const std::string& message) {
  fail(ErrorKind::LoadError, "at " + path + ": " + message);
}

/// Runs a domain validator and re-raises its message at a document path.
template <class F>
void checked(const std::string& path, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    load_fail(path, e.what());
  }
}

struct Node {
  const json& j;
  std::string path;

  Node at(const std::string& key) const {
    if (!j.is_object() || !j.contains(key)) load_fail(path, "missing field '" + key + "'");
    return {j.at(key), path + "." + key};
  }
  Node at(std::size_t i) const { return {j.at(i), path + "[" + std::to_string(i) + "]"}; }
  bool has(const std::string& key) const { return j.is_object() && j.contains(key); }

  double number() const {
    if (!j.is_number()) load_fail(path, "expected a number");
    return j.get<double>();
  }
  long long integer() const {
    if (!j.is_number_integer() && !j.is_number_unsigned())
      load_fail(path, "expected an integer");
    return j.get<long long>();
  }
  bool boolean() const {
    if (!j.is_boolean()) load_fail(path, "expected true or false");
    return j.get<bool>();
  }
  std::string string() const {
    if (!j.is_string()) load_fail(path, "expected a string");
    return j.get<std::string>();
  }
  std::size_t array_size() const {
    if (!j.is_array()) load_fail(path, "expected an array");
    return j.size();
  }

  double number(const std::string& key, double fallback) const {
    return has(key) ? at(key).number() : fallback;
  }
  int integer(const std::string& key, int fallback) const {
    return has(key) ? static_cast<int>(at(key).integer()) : fallback;
  }

  /// A scalar applied to every slot or an array with one value per slot.
  std::vector<double> slots(const std::string& key, int horizon,
                            std::optional<double> fallback = std::nullopt) const {
    const auto n = static_cast<std::size_t>(horizon);
    if (!has(key)) {
      if (!fallback) load_fail(path, "missing field '" + key + "'");
      return std::vector<double>(n, *fallback);
    }
    const Node v = at(key);
    if (v.j.is_number()) return std::vector<double>(n, v.number());
    if (v.array_size() != n)
      load_fail(v.path, "expected " + std::to_string(n) + " values, got " +
                            std::to_string(v.j.size()));
    std::vector<double> out;
    for (std::size_t t = 0; t < n; ++t) out.push_back(v.at(t).number());
    return out;
  }
};

thermal::BuildingThermalParams parse_thermal(const Node& hvac) {
  thermal::BuildingThermalParams p = thermal::BuildingThermalParams::synthetic_default();
  if (hvac.has("thermal")) {
    const Node t = hvac.at("thermal");
    p.r_a = t.number("r_a", p.r_a);
    p.r_m = t.number("r_m", p.r_m);
    p.r_e = t.number("r_e", p.r_e);
    p.r_ea = t.number("r_ea", p.r_ea);
    p.c_air = t.number("c_air", p.c_air);
    p.c_m = t.number("c_m", p.c_m);
    p.c_e = t.number("c_e", p.c_e);
    p.window_area = t.number("window_area", p.window_area);
    p.solar_fraction_walls = t.number("solar_fraction_walls", p.solar_fraction_walls);
  }
  p.cop = hvac.number("cop", p.cop);
  if (hvac.has("mode")) {
    const Node m = hvac.at("mode");
    const std::string mode = m.string();
    if (mode == "cooling")
      p.mode = thermal::HvacMode::Cooling;
    else if (mode == "heating")
      p.mode = thermal::HvacMode::Heating;
    else
      load_fail(m.path, "mode must be 'cooling' or 'heating'");
  }
  return p;
}

devices::HvacSpec parse_hvac(const Node& n, int horizon) {
  devices::HvacSpec h;
  h.rated_power = n.number("rated_power", h.rated_power);
  h.thermal = parse_thermal(n);
  h.desired_temp = n.slots("desired_temp", horizon);
  h.max_deviation = n.slots("max_deviation", horizon);
  for (double v : n.slots("occupancy", horizon, 1.0)) {
    if (v != 0.0 && v != 1.0) load_fail(n.path + ".occupancy", "occupancy must be 0 or 1");
    h.occupancy.push_back(static_cast<int>(v));
  }
  h.discomfort_weight = n.slots("discomfort_weight", horizon, 0.0);
  checked(n.path, [&] { h.validate(horizon); });
  return h;
}

thermal::ThermalState parse_initial_state(const Node& n) {
  if (n.has("initial_state")) {
    const Node s = n.at("initial_state");
    if (s.array_size() != 3) load_fail(s.path, "expected [t_in, t_m, t_e]");
    return {s.at(0).number(), s.at(1).number(), s.at(2).number()};
  }
  return thermal::ThermalState::uniform(n.at("initial_temp").number());
}

evhvac::ElectricVehicle parse_ev(const Node& n, int horizon) {
  evhvac::ElectricVehicle ev;
  ev.id = n.at("id").string();
  devices::EvSpec& s = ev.spec;
  s.capacity = n.number("capacity", s.capacity);
  s.eta_c = n.number("eta_c", s.eta_c);
  s.eta_d = n.number("eta_d", s.eta_d);
  s.p_charge_max = n.number("p_charge_max", s.p_charge_max);
  s.p_discharge_max = n.number("p_discharge_max", s.p_discharge_max);
  s.soc_min = n.number("soc_min", s.soc_min);
  s.soc_max = n.number("soc_max", s.soc_max);
  s.travel_efficiency = n.number("travel_efficiency", s.travel_efficiency);
  s.soc_initial = n.number("soc_initial", s.soc_initial);
  checked(n.path, [&] { s.validate(); });
  if (n.has("trips")) {
    const Node trips = n.at("trips");
    for (std::size_t l = 0; l < trips.array_size(); ++l) {
      const Node t = trips.at(l);
      ev.trips.trips.push_back({static_cast<int>(t.at("depart_slot").integer()),
                                static_cast<int>(t.at("return_slot").integer()),
                                t.at("distance").number()});
    }
    checked(trips.path, [&] { ev.trips.validate(horizon); });
  }
  return ev;
}

devices::ConventionalUnit parse_unit(const Node& n) {
  devices::ConventionalUnit u;
  u.name = n.at("name").string();
  u.p_min = n.at("p_min").number();
  u.p_max = n.at("p_max").number();
  u.fixed_cost = n.number("fixed_cost", 0.0);
  if (n.has("segments")) {
    const Node segs = n.at("segments");
    for (std::size_t m = 0; m < segs.array_size(); ++m) {
      const Node s = segs.at(m);
      u.segments.push_back({s.at("marginal_cost").number(), s.at("width").number()});
    }
  } else {
    u.segments.push_back({n.at("marginal_cost").number(), u.p_max - u.p_min});
  }
  u.startup_cost = n.number("startup_cost", 0.0);
  u.shutdown_cost = n.number("shutdown_cost", 0.0);
  u.ramp_up = n.number("ramp_up", u.p_max);
  u.ramp_down = n.number("ramp_down", u.p_max);
  u.min_up = n.integer("min_up", 0);
  u.min_down = n.integer("min_down", 0);
  u.initial_status = static_cast<int>(n.at("initial_status").integer());
  checked(n.path, [&] { u.validate(); });
  return u;
}

devices::BatterySpec parse_battery(const Node& n) {
  devices::BatterySpec b;
  b.capacity = n.number("capacity", b.capacity);
  b.e_min = n.number("e_min", b.e_min);
  b.e_max = n.number("e_max", b.e_max);
  b.p_charge_max = n.number("p_charge_max", b.p_charge_max);
  b.p_discharge_max = n.number("p_discharge_max", b.p_discharge_max);
  b.eta_c = n.number("eta_c", b.eta_c);
  b.eta_d = n.number("eta_d", b.eta_d);
  b.degradation_cost = n.number("degradation_cost", b.degradation_cost);
  b.e_initial = n.number("e_initial", b.e_initial);
  checked(n.path, [&] { b.validate(); });
  return b;
}

void parse_scenario_controls(const Node& n, ScenarioControls& c) {
  if (n.has("n")) c.n = static_cast<std::size_t>(n.at("n").integer());
  if (n.has("k")) c.k = static_cast<std::size_t>(n.at("k").integer());
  if (n.has("seed")) c.seed = static_cast<std::uint64_t>(n.at("seed").integer());
  for (scenario::Series s : scenario::kAllSeries) {
    const std::string key(scenario::series_name(s));
    if (n.has("uncertainty")) c.uncertainty[s] = n.at("uncertainty").number(key, c.uncertainty[s]);
    if (n.has("distance_weights"))
      c.distance_weights[static_cast<std::size_t>(s)] =
          n.at("distance_weights").number(key, c.distance_weights[static_cast<std::size_t>(s)]);
  }
  checked(n.path, [&] { c.uncertainty.validate(); });
}

void parse_solver(const Node& n, opt::MilpOptions& o) {
  o.int_tol = n.number("int_tol", o.int_tol);
  o.gap_tol = n.number("gap_tol", o.gap_tol);
  if (n.has("node_limit")) o.node_limit = static_cast<std::size_t>(n.at("node_limit").integer());
  o.lp.feas_tol = n.number("feas_tol", o.lp.feas_tol);
  o.lp.opt_tol = n.number("opt_tol", o.lp.opt_tol);
  if (n.has("max_iterations"))
    o.lp.max_iterations = static_cast<std::size_t>(n.at("max_iterations").integer());
  if (!(o.int_tol > 0.0 && o.gap_tol >= 0.0 && o.lp.feas_tol > 0.0 && o.lp.opt_tol > 0.0 &&
        o.node_limit > 0))
    load_fail(n.path, "solver tolerances must be positive and node_limit at least 1");
}

evhvac::CommunityProblem parse_community(const Node& root, int horizon, double dt) {
  evhvac::CommunityProblem p;
  p.horizon = horizon;
  p.dt = dt;
  p.v2g_allowed = root.has("v2g_allowed") && root.at("v2g_allowed").boolean();
  p.grid_limit = root.slots("grid_limit", horizon);
  for (double g : p.grid_limit)
    if (!(g >= 0.0)) load_fail(root.path + ".grid_limit", "grid limit must be non-negative");
  const Node houses = root.at("households");
  for (std::size_t j = 0; j < houses.array_size(); ++j) {
    const Node h = houses.at(j);
    evhvac::Household house;
    house.id = h.at("id").string();
    house.hvac = parse_hvac(h.at("hvac"), horizon);
    house.initial_state = parse_initial_state(h);
    if (h.has("evs")) {
      const Node evs = h.at("evs");
      for (std::size_t e = 0; e < evs.array_size(); ++e)
        house.evs.push_back(parse_ev(evs.at(e), horizon));
    }
    p.households.push_back(std::move(house));
  }
  return p;
}

mgbid::MicrogridConfig parse_microgrid(const Node& root, int horizon, double dt) {
  mgbid::MicrogridConfig mg;
  mg.horizon = horizon;
  mg.dt = dt;
  if (root.has("units")) {
    const Node units = root.at("units");
    for (std::size_t i = 0; i < units.array_size(); ++i) mg.units.push_back(parse_unit(units.at(i)));
  }
  if (root.has("wind")) {
    const Node wind = root.at("wind");
    for (std::size_t w = 0; w < wind.array_size(); ++w) {
      const Node n = wind.at(w);
      devices::WindSpec s;
      s.rated_power = n.number("rated_power", s.rated_power);
      s.v_cut_in = n.number("v_cut_in", s.v_cut_in);
      s.v_rated = n.number("v_rated", s.v_rated);
      s.v_cut_out = n.number("v_cut_out", s.v_cut_out);
      checked(n.path, [&] { s.validate(); });
      mg.wind.push_back(s);
    }
  }
  if (root.has("solar")) {
    const Node solar = root.at("solar");
    for (std::size_t p = 0; p < solar.array_size(); ++p) {
      const Node n = solar.at(p);
      devices::SolarSpec s;
      s.efficiency = n.number("efficiency", s.efficiency);
      s.area = n.number("area", s.area);
      checked(n.path, [&] { s.validate(); });
      mg.solar.push_back(s);
    }
  }
  if (root.has("batteries")) {
    const Node bats = root.at("batteries");
    for (std::size_t k = 0; k < bats.array_size(); ++k) mg.batteries.push_back(parse_battery(bats.at(k)));
  }
  if (root.has("buildings")) {
    const Node bs = root.at("buildings");
    for (std::size_t j = 0; j < bs.array_size(); ++j) {
      const Node n = bs.at(j);
      mgbid::Building b;
      b.id = n.at("id").string();
      b.count = n.integer("count", 1);
      if (b.count < 1) load_fail(n.path + ".count", "count must be at least 1");
      b.hvac = parse_hvac(n.at("hvac"), horizon);
      b.initial_state = parse_initial_state(n);
      mg.buildings.push_back(std::move(b));
    }
  }
  const Node m = root.at("market");
  mgbid::MarketParams& mk = mg.market;
  mk.bid_deviation_penalty = m.slots("bid_deviation_penalty", horizon);
  mk.value_of_lost_load = m.slots("value_of_lost_load", horizon);
  mk.wind_curtail_cost = m.slots("wind_curtail_cost", horizon, 0.0);
  mk.solar_curtail_cost = m.slots("solar_curtail_cost", horizon, 0.0);
  mk.max_loss_of_load_ratio = m.slots("max_loss_of_load_ratio", horizon);
  if (m.has("line_capacity")) mk.line_capacity = m.slots("line_capacity", horizon);
  if (m.has("max_shed")) mk.max_shed = m.slots("max_shed", horizon);
  checked(m.path, [&] { mk.validate(horizon); });
  checked(root.path, [&] { mg.validate(); });
  return mg;
}

}  // namespace

const char* to_string(ProblemKind kind) {
  return kind == ProblemKind::EvHvac ? "ev-hvac" : "mg-bid";
}

EntityConfig parse_entities(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::LoadError, std::string("malformed JSON: ") + e.what());
  }
  const Node root{doc, "$"};
  if (!doc.is_object()) load_fail("$", "expected an object");
  const long long version = root.at("schema_version").integer();
  if (version != kSchemaVersion)
    load_fail("$.schema_version", "unsupported schema version " + std::to_string(version));

  EntityConfig cfg;
  const Node kind = root.at("kind");
  const std::string k = kind.string();
  if (k == "ev-hvac")
    cfg.kind = ProblemKind::EvHvac;
  else if (k == "mg-bid")
    cfg.kind = ProblemKind::MgBid;
  else
    load_fail(kind.path, "kind must be 'ev-hvac' or 'mg-bid'");

  const int horizon = static_cast<int>(root.at("horizon").integer());
  if (horizon < 1) load_fail("$.horizon", "horizon must be at least 1");
  const double dt = root.number("dt", 1.0);
  if (!(dt > 0.0)) load_fail("$.dt", "dt must be positive");
  if (root.has("scenarios")) parse_scenario_controls(root.at("scenarios"), cfg.scenarios);
  if (root.has("solver")) parse_solver(root.at("solver"), cfg.solver);

  if (cfg.kind == ProblemKind::EvHvac) {
    const Node unit = root.at("distance_unit");
    const std::string u = unit.string();
    if (u == "km")
      cfg.distance_unit = DistanceUnit::Km;
    else if (u == "mile")
      cfg.distance_unit = DistanceUnit::Mile;
    else
      load_fail(unit.path, "distance_unit must be 'km' or 'mile'");
    cfg.community = parse_community(root, horizon, dt);
  } else {
    cfg.microgrid = parse_microgrid(root, horizon, dt);
  }
  return cfg;
}

EntityConfig load_entities(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::LoadError, "cannot open config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_entities(text.str());
}

void attach_forecast(evhvac::CommunityProblem& problem, const scenario::ForecastSeries& forecast) {
  require(static_cast<int>(forecast.slots()) == problem.horizon, ErrorKind::LoadError,
          "forecast has " + std::to_string(forecast.slots()) + " slots but the horizon is " +
              std::to_string(problem.horizon));
  problem.prices = forecast[scenario::Series::PriceDa];
  problem.ambient = forecast[scenario::Series::Ambient];
  problem.irradiance = forecast[scenario::Series::Irradiance];
}

double forecast_renewable_energy(const mgbid::MicrogridConfig& mg,
                                 const scenario::ForecastSeries& forecast) {
  using scenario::Series;
  double total = 0.0;
  for (std::size_t t = 0; t < forecast.slots(); ++t) {
    for (const auto& w : mg.wind)
      total += mg.dt * devices::wind_available_power(w, forecast.at(Series::WindSpeed, t));
    for (const auto& p : mg.solar)
      total += mg.dt * devices::solar_available_power(p, forecast.at(Series::Irradiance, t),
                                                      forecast.at(Series::Ambient, t));
  }
  return total;
}

void apply_load_scaling(scenario::ForecastSeries& forecast, const mgbid::MicrogridConfig& mg,
                        double lsf) {
  require(lsf > 0.0, ErrorKind::InvalidParameter, "load scaling factor must be positive");
  const double renewable = forecast_renewable_energy(mg, forecast);
  double load = 0.0;
  for (double v : forecast[scenario::Series::Load]) load += mg.dt * v;
  require(renewable > 0.0 && load > 0.0, ErrorKind::UndefinedMetric,
          "load scaling needs positive forecast load and renewable energy");
  const double factor = lsf * renewable / load;
  for (double& v : forecast[scenario::Series::Load]) v *= factor;
}

}  // namespace gridsched::config
