#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "gridsched/config.hpp"
#include "gridsched/csv_io.hpp"
#include "gridsched/error.hpp"
#include "gridsched/evhvac.hpp"
#include "gridsched/mgbid.hpp"
#include "gridsched/parallel.hpp"
#include "gridsched/scenario.hpp"

#ifndef GRIDSCHED_VERSION
#define GRIDSCHED_VERSION "0.0.0"
#endif

namespace gridsched::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string sha256_file(const std::string& path) {
  const std::string data = io::read_file(path);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  require(EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) == 1,
          ErrorKind::InvalidState, "SHA-256 digest failed for " + path);
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

/// Flat JSON object whose numbers use the fixed scientific CSV format.
class FlatJson {
 public:
  FlatJson& num(const std::string& key, double v) {
    items_.emplace_back(key, io::format_number(v));
    return *this;
  }
  FlatJson& integer(const std::string& key, long long v) {
    items_.emplace_back(key, std::to_string(v));
    return *this;
  }
  FlatJson& str(const std::string& key, const std::string& v) {
    items_.emplace_back(key, json(v).dump());
    return *this;
  }
  std::string dump() const {
    std::string out = "{\n";
    for (std::size_t i = 0; i < items_.size(); ++i) {
      out += "  " + json(items_[i].first).dump() + ": " + items_[i].second;
      out += i + 1 < items_.size() ? ",\n" : "\n";
    }
    return out + "}\n";
  }

 private:
  std::vector<std::pair<std::string, std::string>> items_;
};

FlatJson profit_json(const mgbid::ProfitReport& r) {
  FlatJson j;
  j.num("expected_revenue", r.expected_revenue)
      .num("startup_shutdown_cost", r.startup_shutdown_cost)
      .num("expected_generation_cost", r.expected_generation_cost)
      .num("expected_discomfort_penalty", r.expected_discomfort_penalty)
      .num("expected_battery_degradation", r.expected_battery_degradation)
      .num("expected_shed_penalty", r.expected_shed_penalty)
      .num("expected_wind_curtailment_penalty", r.expected_wind_curtailment_penalty)
      .num("expected_solar_curtailment_penalty", r.expected_solar_curtailment_penalty)
      .num("expected_bid_deviation_charge", r.expected_bid_deviation_charge)
      .num("total_expected_profit", r.total_expected_profit)
      .num("total_expected_renewable_curtailment_kwh", r.total_expected_renewable_curtailment_kwh);
  return j;
}

/// Collects written files and the inputs that produced them, then writes
/// the manifest last.
class Output {
 public:
  explicit Output(const RunConfig& rc) : rc_(rc), dir_(rc.out_dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    require(!ec, ErrorKind::LoadError, "cannot create output directory " + rc.out_dir);
  }

  std::string path(const std::string& name) const { return (fs::path(dir_) / name).string(); }

  void write(const std::string& name, const std::string& content) {
    const fs::path p = fs::path(dir_) / name;
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
    io::write_file_atomic(p.string(), content);
    files_.push_back(name);
  }

  /// Registers a file already written by a worker.
  void record(const std::string& name) { files_.push_back(name); }

  void input(const std::string& role, const std::string& path) {
    if (!path.empty()) inputs_[role] = {path, sha256_file(path)};
  }

  void finish(const config::EntityConfig* cfg, std::optional<std::uint64_t> seed,
              std::optional<std::size_t> n, std::optional<std::size_t> k) {
    json m;
    m["tool"] = "gridsched";
    m["version"] = GRIDSCHED_VERSION;
    m["command"] = rc_.command;
    if (cfg) m["kind"] = config::to_string(cfg->kind);
    if (seed) m["seed"] = *seed;
    if (n) m["scenarios_sampled"] = *n;
    if (k) m["scenarios_kept"] = *k;
    if (cfg) {
      const opt::MilpOptions& s = cfg->solver;
      m["tolerances"] = {{"feas_tol", s.lp.feas_tol}, {"opt_tol", s.lp.opt_tol},
                         {"int_tol", s.int_tol},       {"gap_tol", s.gap_tol},
                         {"node_limit", s.node_limit}, {"max_iterations", s.lp.max_iterations}};
    }
    if (!rc_.sweep_param.empty())
      m["sweep"] = {{"param", rc_.sweep_param}, {"values", rc_.sweep_values}};
    json inputs = json::object();
    for (const auto& [role, entry] : inputs_)
      inputs[role] = {{"path", entry.first}, {"sha256", entry.second}};
    m["inputs"] = inputs;
    json outputs = json::object();
    std::sort(files_.begin(), files_.end());
    for (const auto& f : files_) outputs[f] = sha256_file(path(f));
    m["outputs"] = outputs;
    io::write_file_atomic(path("manifest.json"), m.dump(2) + "\n");
  }

 private:
  const RunConfig& rc_;
  std::string dir_;
  std::vector<std::string> files_;
  std::map<std::string, std::pair<std::string, std::string>> inputs_;
};

void require_path(const std::string& path, const char* flag) {
  require(!path.empty(), ErrorKind::InvalidParameter, std::string("missing required ") + flag);
  require(fs::exists(path), ErrorKind::LoadError, std::string(flag) + " file not found: " + path);
}

config::EntityConfig load_config(const RunConfig& rc, Output& out) {
  require_path(rc.config_path, "--config");
  out.input("config", rc.config_path);
  return config::load_entities(rc.config_path);
}

scenario::ForecastSeries load_forecast(const RunConfig& rc, Output& out) {
  require_path(rc.forecasts_path, "--forecasts");
  out.input("forecasts", rc.forecasts_path);
  return io::load_forecasts(rc.forecasts_path);
}

struct Pipeline {
  std::uint64_t seed;
  std::size_t n;
  std::size_t k;
};

Pipeline pipeline_of(const RunConfig& rc, const config::EntityConfig& cfg) {
  Pipeline p{rc.seed.value_or(cfg.scenarios.seed), rc.scenarios.value_or(cfg.scenarios.n),
             rc.reduce.value_or(cfg.scenarios.k)};
  require(p.n >= 1 && p.k >= 1 && p.k <= p.n, ErrorKind::InvalidParameter,
          "scenario counts must satisfy 1 <= K <= N");
  return p;
}

scenario::ScenarioSet make_scenarios(const scenario::ForecastSeries& forecast,
                                     const scenario::UncertaintySpec& spec,
                                     const config::EntityConfig& cfg, const Pipeline& p) {
  const scenario::ScenarioSet full = scenario::sample_scenarios(forecast, spec, p.n, p.seed);
  return scenario::reduce_fast_forward(
      full, p.k, scenario::DistanceMetric::from_forecast(forecast, cfg.scenarios.distance_weights));
}

evhvac::CommunityProblem community_of(const config::EntityConfig& cfg,
                                      const scenario::ForecastSeries& forecast) {
  require(cfg.kind == config::ProblemKind::EvHvac, ErrorKind::InvalidParameter,
          "this command needs an ev-hvac configuration");
  evhvac::CommunityProblem p = *cfg.community;
  config::attach_forecast(p, forecast);
  return p;
}

const mgbid::MicrogridConfig& microgrid_of(const config::EntityConfig& cfg) {
  require(cfg.kind == config::ProblemKind::MgBid, ErrorKind::InvalidParameter,
          "this command needs an mg-bid configuration");
  return *cfg.microgrid;
}

void cmd_schedule(const RunConfig& rc) {
  Output out(rc);
  const auto cfg = load_config(rc, out);
  const auto forecast = load_forecast(rc, out);
  const evhvac::CommunityProblem p = community_of(cfg, forecast);
  const evhvac::EvHvacSchedule opt = evhvac::solve_schedule(p, cfg.solver.lp);
  const evhvac::EvHvacSchedule base = evhvac::uncontrolled_baseline(p, evhvac::terminal_socs(opt));
  out.write("schedule.csv", io::schedule_to_csv(p, opt));
  out.write("baseline.csv", io::schedule_to_csv(p, base));
  FlatJson m;
  m.num("j_elec", opt.j_elec)
      .num("j_discomfort", opt.j_discomfort)
      .num("j_tot", opt.j_tot)
      .num("max_dev_c", opt.max_comfort_deviation(p))
      .num("baseline_j_elec", base.j_elec)
      .num("baseline_j_tot", base.j_tot)
      .integer("simultaneity_fixes", static_cast<long long>(opt.simultaneity_fixes));
  try {
    m.num("cost_saving_pct", evhvac::cost_saving(opt, base));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::UndefinedMetric) throw;
    m.str("cost_saving_pct", "undefined");
  }
  out.write("metrics.json", m.dump());
  if (!opt.warnings.empty() || !base.warnings.empty()) {
    std::string w;
    for (const auto& s : opt.warnings) w += "optimal: " + s + "\n";
    for (const auto& s : base.warnings) w += "baseline: " + s + "\n";
    out.write("warnings.txt", w);
  }
  out.finish(&cfg, std::nullopt, std::nullopt, std::nullopt);
}

void cmd_bid(const RunConfig& rc) {
  Output out(rc);
  const auto cfg = load_config(rc, out);
  const auto forecast = load_forecast(rc, out);
  const mgbid::MicrogridConfig& mg = microgrid_of(cfg);
  const Pipeline pl = pipeline_of(rc, cfg);
  const scenario::ScenarioSet set = make_scenarios(forecast, cfg.scenarios.uncertainty, cfg, pl);
  const mgbid::BiddingSolution sol = mgbid::solve_bidding(mg, set, cfg.solver);
  out.write("scenarios.csv", io::scenarios_to_csv(set));
  out.write("first_stage.csv", io::first_stage_to_csv(mg, sol));
  out.write("dispatch.csv", io::dispatch_to_csv(mg, sol));
  out.write("profit.json", profit_json(sol.profit).dump());
  out.finish(&cfg, pl.seed, pl.n, pl.k);
}

void cmd_compare(const RunConfig& rc) {
  Output out(rc);
  const auto cfg = load_config(rc, out);
  const auto forecast = load_forecast(rc, out);
  const mgbid::MicrogridConfig& mg = microgrid_of(cfg);
  const Pipeline pl = pipeline_of(rc, cfg);
  const scenario::ScenarioSet set = make_scenarios(forecast, cfg.scenarios.uncertainty, cfg, pl);
  std::vector<mgbid::SchemeResult> results(3);
  detail::parallel_for(3, [&](std::size_t i) {
    results[i] = mgbid::run_scheme(mg, set, static_cast<int>(i) + 1, cfg.solver);
  });
  std::string csv = "scheme,profit,renewable_curtailment_kwh,discomfort_penalty,"
                    "bid_deviation_charge,shed_penalty\n";
  for (const auto& r : results) {
    csv += std::to_string(r.scheme) + "," + io::format_number(r.profit) + "," +
           io::format_number(r.report.total_expected_renewable_curtailment_kwh) + "," +
           io::format_number(r.report.expected_discomfort_penalty) + "," +
           io::format_number(r.report.expected_bid_deviation_charge) + "," +
           io::format_number(r.report.expected_shed_penalty) + "\n";
    out.write("profit_scheme" + std::to_string(r.scheme) + ".json", profit_json(r.report).dump());
  }
  out.write("scenarios.csv", io::scenarios_to_csv(set));
  out.write("schemes.csv", csv);
  out.finish(&cfg, pl.seed, pl.n, pl.k);
}

void check_knob(const std::string& param, const std::vector<std::string>& knobs,
                const char* kind) {
  require(std::find(knobs.begin(), knobs.end(), param) != knobs.end(),
          ErrorKind::InvalidParameter,
          "sweep parameter '" + param + "' is not a documented " + kind + " knob");
}

void cmd_sweep(const RunConfig& rc) {
  require(!rc.sweep_param.empty() && !rc.sweep_values.empty(), ErrorKind::InvalidParameter,
          "sweep needs --sweep PARAM=v1,v2,...");
  Output out(rc);
  const auto cfg = load_config(rc, out);
  const auto forecast = load_forecast(rc, out);
  const std::string& param = rc.sweep_param;
  const std::size_t n = rc.sweep_values.size();
  std::vector<std::string> rows(n);
  std::error_code ec;
  fs::create_directories(out.path("points"), ec);

  if (cfg.kind == config::ProblemKind::EvHvac) {
    check_knob(param, ev_hvac_knobs(), "ev-hvac");
    const evhvac::CommunityProblem base = community_of(cfg, forecast);
    detail::parallel_for(n, [&](std::size_t i) {
      const double v = rc.sweep_values[i];
      evhvac::CommunityProblem p = base;
      for (auto& h : p.households) {
        if (param == "w") std::fill(h.hvac.discomfort_weight.begin(), h.hvac.discomfort_weight.end(), v);
        if (param == "delta") std::fill(h.hvac.max_deviation.begin(), h.hvac.max_deviation.end(), v);
      }
      if (param == "p_gmax") std::fill(p.grid_limit.begin(), p.grid_limit.end(), v);
      const evhvac::EvHvacSchedule s = evhvac::solve_schedule(p, cfg.solver.lp);
      rows[i] = io::format_number(v) + "," + io::format_number(s.j_elec) + "," +
                io::format_number(s.j_discomfort) + "," +
                io::format_number(s.max_comfort_deviation(p)) + "\n";
      io::write_file_atomic(out.path("points/" + param + "_" + std::to_string(i) + ".csv"),
                            rows[i]);
    });
    std::string csv = param + ",j_elec,j_discomfort,max_dev_c\n";
    for (const auto& r : rows) csv += r;
    for (std::size_t i = 0; i < n; ++i) out.record("points/" + param + "_" + std::to_string(i) + ".csv");
    out.write("sweep_" + param + ".csv", csv);
    out.finish(&cfg, std::nullopt, std::nullopt, std::nullopt);
    return;
  }

  check_knob(param, mg_bid_knobs(), "mg-bid");
  const mgbid::MicrogridConfig& base = microgrid_of(cfg);
  const Pipeline pl = pipeline_of(rc, cfg);
  const bool shared_set = param != "lsf" && param != "usf";
  scenario::ScenarioSet common;
  if (shared_set) common = make_scenarios(forecast, cfg.scenarios.uncertainty, cfg, pl);
  detail::parallel_for(n, [&](std::size_t i) {
    const double v = rc.sweep_values[i];
    mgbid::MicrogridConfig mg = base;
    for (auto& b : mg.buildings) {
      if (param == "delta") std::fill(b.hvac.max_deviation.begin(), b.hvac.max_deviation.end(), v);
      if (param == "pi") std::fill(b.hvac.discomfort_weight.begin(), b.hvac.discomfort_weight.end(), v);
    }
    auto& mk = mg.market;
    if (param == "psi") std::fill(mk.bid_deviation_penalty.begin(), mk.bid_deviation_penalty.end(), v);
    if (param == "v_res") {
      std::fill(mk.wind_curtail_cost.begin(), mk.wind_curtail_cost.end(), v);
      std::fill(mk.solar_curtail_cost.begin(), mk.solar_curtail_cost.end(), v);
    }
    if (param == "p_gmax") mk.line_capacity = std::vector<double>(mg.horizon, v);
    scenario::ScenarioSet local;
    if (param == "lsf") {
      scenario::ForecastSeries f = forecast;
      config::apply_load_scaling(f, mg, v);
      local = make_scenarios(f, cfg.scenarios.uncertainty, cfg, pl);
    }
    if (param == "usf") {
      require(v >= 0.0, ErrorKind::InvalidParameter, "usf must be non-negative");
      local = make_scenarios(forecast, cfg.scenarios.uncertainty.scaled(v), cfg, pl);
    }
    const scenario::ScenarioSet& set = shared_set ? common : local;
    const mgbid::BiddingSolution sol = mgbid::solve_bidding(mg, set, cfg.solver);
    const mgbid::ProfitReport& r = sol.profit;
    rows[i] = io::format_number(v) + "," + io::format_number(r.total_expected_profit) + "," +
              io::format_number(r.total_expected_renewable_curtailment_kwh) + "," +
              io::format_number(r.expected_revenue) + "," +
              io::format_number(r.expected_discomfort_penalty) + "," +
              io::format_number(r.expected_bid_deviation_charge) + "," +
              io::format_number(r.expected_shed_penalty) + "\n";
    io::write_file_atomic(out.path("points/" + param + "_" + std::to_string(i) + ".csv"), rows[i]);
  });
  std::string csv = param +
                    ",profit,renewable_curtailment_kwh,expected_revenue,discomfort_penalty,"
                    "bid_deviation_charge,shed_penalty\n";
  for (const auto& r : rows) csv += r;
  for (std::size_t i = 0; i < n; ++i) out.record("points/" + param + "_" + std::to_string(i) + ".csv");
  out.write("sweep_" + param + ".csv", csv);
  out.finish(&cfg, pl.seed, pl.n, pl.k);
}

void cmd_gen_scenarios(const RunConfig& rc) {
  Output out(rc);
  const auto forecast = load_forecast(rc, out);
  config::EntityConfig cfg;
  if (!rc.config_path.empty()) cfg = load_config(rc, out);
  const std::uint64_t seed = rc.seed.value_or(cfg.scenarios.seed);
  const std::size_t n = rc.scenarios.value_or(cfg.scenarios.n);
  const scenario::ScenarioSet set =
      scenario::sample_scenarios(forecast, cfg.scenarios.uncertainty, n, seed);
  out.write("scenarios.csv", io::scenarios_to_csv(set));
  out.finish(rc.config_path.empty() ? nullptr : &cfg, seed, n, std::nullopt);
}

void cmd_reduce_scenarios(const RunConfig& rc) {
  Output out(rc);
  require_path(rc.input_path, "--input");
  out.input("scenarios", rc.input_path);
  const scenario::ScenarioSet set = io::load_scenarios(rc.input_path);
  config::EntityConfig cfg;
  if (!rc.config_path.empty()) cfg = load_config(rc, out);
  const std::size_t k = rc.reduce.value_or(cfg.scenarios.k);
  require(k >= 1 && k <= set.size(), ErrorKind::InvalidParameter,
          "--reduce must lie between 1 and the number of input scenarios");
  const scenario::DistanceMetric metric =
      rc.forecasts_path.empty()
          ? scenario::DistanceMetric::from_set(set, cfg.scenarios.distance_weights)
          : scenario::DistanceMetric::from_forecast(load_forecast(rc, out),
                                                    cfg.scenarios.distance_weights);
  const scenario::FastForwardResult r = scenario::fast_forward(set, k, metric);
  out.write("reduced.csv", io::scenarios_to_csv(r.reduced));
  FlatJson m;
  m.integer("kept", static_cast<long long>(r.reduced.size()))
      .num("kantorovich_distance", scenario::kantorovich_distance(set, r.reduced, metric));
  std::string order;
  for (std::size_t i = 0; i < r.selection_order.size(); ++i)
    order += (i ? "," : "") + std::to_string(set.scenarios[r.selection_order[i]].id);
  m.str("selection_order", order);
  out.write("reduction.json", m.dump());
  out.finish(rc.config_path.empty() ? nullptr : &cfg, std::nullopt, set.size(), k);
}

void cmd_export_model(const RunConfig& rc) {
  Output out(rc);
  const auto cfg = load_config(rc, out);
  const auto forecast = load_forecast(rc, out);
  if (cfg.kind == config::ProblemKind::EvHvac) {
    const evhvac::CommunityProblem p = community_of(cfg, forecast);
    out.write("model.lp", opt::export_lp_text(evhvac::build_joint_model(p).model));
    out.finish(&cfg, std::nullopt, std::nullopt, std::nullopt);
    return;
  }
  const Pipeline pl = pipeline_of(rc, cfg);
  const scenario::ScenarioSet set = make_scenarios(forecast, cfg.scenarios.uncertainty, cfg, pl);
  out.write("model.lp",
            opt::export_lp_text(mgbid::build_two_stage_model(*cfg.microgrid, set).model));
  out.write("scenarios.csv", io::scenarios_to_csv(set));
  out.finish(&cfg, pl.seed, pl.n, pl.k);
}

std::string error_json(const std::string& kind, const std::string& message) {
  return json{{"error", {{"kind", kind}, {"message", message}}}}.dump();
}

}  // namespace

const std::vector<std::string>& ev_hvac_knobs() {
  static const std::vector<std::string> k = {"w", "delta", "p_gmax"};
  return k;
}

const std::vector<std::string>& mg_bid_knobs() {
  static const std::vector<std::string> k = {"delta", "pi", "psi", "v_res", "p_gmax", "lsf", "usf"};
  return k;
}

void parse_sweep(const std::string& text, RunConfig& config) {
  const auto eq = text.find('=');
  require(eq != std::string::npos && eq > 0 && eq + 1 < text.size(),
          ErrorKind::InvalidParameter, "--sweep expects PARAM=v1,v2,...");
  config.sweep_param = text.substr(0, eq);
  config.sweep_values.clear();
  std::size_t pos = eq + 1;
  while (pos <= text.size()) {
    const auto comma = std::min(text.find(',', pos), text.size());
    const std::string cell = text.substr(pos, comma - pos);
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    require(!cell.empty() && end == cell.c_str() + cell.size() && std::isfinite(v),
            ErrorKind::InvalidParameter, "--sweep value '" + cell + "' is not a number");
    config.sweep_values.push_back(v);
    pos = comma + 1;
  }
}

void run(const RunConfig& rc) {
  if (rc.command == "schedule") return cmd_schedule(rc);
  if (rc.command == "bid") return cmd_bid(rc);
  if (rc.command == "compare-schemes") return cmd_compare(rc);
  if (rc.command == "sweep") return cmd_sweep(rc);
  if (rc.command == "gen-scenarios") return cmd_gen_scenarios(rc);
  if (rc.command == "reduce-scenarios") return cmd_reduce_scenarios(rc);
  if (rc.command == "export-model") return cmd_export_model(rc);
  fail(ErrorKind::InvalidParameter, "unknown command '" + rc.command + "'");
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Day-ahead EV/HVAC scheduling and microgrid bidding"};
  app.set_version_flag("--version", GRIDSCHED_VERSION);
  app.require_subcommand(1);
  RunConfig rc;
  std::string sweep;
  std::uint64_t seed = 0;
  std::size_t n = 0, k = 0;

  const std::vector<std::pair<const char*, const char*>> commands = {
      {"schedule", "Joint EV/HVAC schedule, uncontrolled baseline and cost saving"},
      {"bid", "Sample and reduce scenarios, then solve the coordinated bidding problem"},
      {"compare-schemes", "Coordinated, fixed-setpoint and uncoordinated schemes on one scenario set"},
      {"sweep", "Re-solve across a parameter list and emit one metrics row per value"},
      {"gen-scenarios", "Latin hypercube scenarios around a forecast"},
      {"reduce-scenarios", "Fast-forward reduction of a scenario CSV"},
      {"export-model", "Write the optimization model in LP format without solving"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    CLI::App* s = app.add_subcommand(name, help);
    s->add_option("--config", rc.config_path, "Entity configuration JSON");
    s->add_option("--forecasts", rc.forecasts_path, "Forecast CSV");
    s->add_option("--out", rc.out_dir, "Output directory")->capture_default_str();
    s->add_option("--seed", seed, "Scenario sampling seed");
    s->add_option("--scenarios", n, "Number of sampled scenarios N");
    s->add_option("--reduce", k, "Number of kept scenarios K");
    if (std::string(name) == "sweep")
      s->add_option("--sweep", sweep, "PARAM=v1,v2,...")->required();
    if (std::string(name) == "reduce-scenarios")
      s->add_option("--input", rc.input_path, "Scenario CSV to reduce")->required();
    subs.push_back(s);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << error_json("usage", e.what()) << "\n";
    return 2;
  }

  try {
    for (CLI::App* s : subs) {
      if (!s->parsed()) continue;
      rc.command = s->get_name();
      if (s->count("--seed")) rc.seed = seed;
      if (s->count("--scenarios")) rc.scenarios = n;
      if (s->count("--reduce")) rc.reduce = k;
    }
    if (!sweep.empty()) parse_sweep(sweep, rc);
    run(rc);
  } catch (const Error& e) {
    std::cerr << error_json(to_string(e.kind()), e.what()) << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << error_json("internal", e.what()) << "\n";
    return 1;
  }
  return 0;
}

}  // namespace gridsched::cli
