#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gridsched/config.hpp"
#include "gridsched/csv_io.hpp"
#include "gridsched/devices.hpp"
#include "gridsched/error.hpp"
#include "gridsched/evhvac.hpp"
#include "gridsched/mgbid.hpp"
#include "gridsched/optmodel.hpp"
#include "gridsched/scenario.hpp"
#include "gridsched/thermal.hpp"

namespace py = pybind11;
using namespace gridsched;

namespace {

struct Loaded {
  config::EntityConfig cfg;
  scenario::ForecastSeries forecast;
};

Loaded load(const std::string& config_path, const std::string& forecasts_path) {
  return {config::load_entities(config_path), io::load_forecasts(forecasts_path)};
}

scenario::ScenarioSet reduced_set(const Loaded& in, std::optional<std::size_t> n,
                                  std::optional<std::size_t> k,
                                  std::optional<std::uint64_t> seed) {
  const auto& sc = in.cfg.scenarios;
  const auto full = scenario::sample_scenarios(in.forecast, sc.uncertainty, n.value_or(sc.n),
                                               seed.value_or(sc.seed));
  return scenario::reduce_fast_forward(
      full, k.value_or(sc.k),
      scenario::DistanceMetric::from_forecast(in.forecast, sc.distance_weights));
}

py::dict profit_dict(const mgbid::ProfitReport& r) {
  py::dict d;
  d["expected_revenue"] = r.expected_revenue;
  d["startup_shutdown_cost"] = r.startup_shutdown_cost;
  d["expected_generation_cost"] = r.expected_generation_cost;
  d["expected_discomfort_penalty"] = r.expected_discomfort_penalty;
  d["expected_battery_degradation"] = r.expected_battery_degradation;
  d["expected_shed_penalty"] = r.expected_shed_penalty;
  d["expected_wind_curtailment_penalty"] = r.expected_wind_curtailment_penalty;
  d["expected_solar_curtailment_penalty"] = r.expected_solar_curtailment_penalty;
  d["expected_bid_deviation_charge"] = r.expected_bid_deviation_charge;
  d["total_expected_profit"] = r.total_expected_profit;
  d["total_expected_renewable_curtailment_kwh"] = r.total_expected_renewable_curtailment_kwh;
  return d;
}

evhvac::CommunityProblem community(const Loaded& in) {
  if (in.cfg.kind != config::ProblemKind::EvHvac)
    throw Error(ErrorKind::InvalidParameter, "expected an ev-hvac configuration");
  auto p = *in.cfg.community;
  config::attach_forecast(p, in.forecast);
  return p;
}

const mgbid::MicrogridConfig& microgrid(const Loaded& in) {
  if (in.cfg.kind != config::ProblemKind::MgBid)
    throw Error(ErrorKind::InvalidParameter, "expected an mg-bid configuration");
  return *in.cfg.microgrid;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Day-ahead EV/HVAC scheduling and microgrid bidding";

  static py::exception<Error> error(m, "GridschedError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object cls = py::reinterpret_borrow<py::object>(error.ptr());
      py::object exc = cls(std::string(to_string(e.kind())) + ": " + e.what());
      exc.attr("kind") = to_string(e.kind());
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  py::enum_<thermal::HvacMode>(m, "HvacMode")
      .value("Heating", thermal::HvacMode::Heating)
      .value("Cooling", thermal::HvacMode::Cooling);

  py::class_<thermal::BuildingThermalParams>(m, "BuildingThermalParams")
      .def(py::init<>())
      .def_static("synthetic_default", &thermal::BuildingThermalParams::synthetic_default)
      .def_readwrite("r_a", &thermal::BuildingThermalParams::r_a)
      .def_readwrite("r_m", &thermal::BuildingThermalParams::r_m)
      .def_readwrite("r_e", &thermal::BuildingThermalParams::r_e)
      .def_readwrite("r_ea", &thermal::BuildingThermalParams::r_ea)
      .def_readwrite("c_air", &thermal::BuildingThermalParams::c_air)
      .def_readwrite("c_m", &thermal::BuildingThermalParams::c_m)
      .def_readwrite("c_e", &thermal::BuildingThermalParams::c_e)
      .def_readwrite("window_area", &thermal::BuildingThermalParams::window_area)
      .def_readwrite("solar_fraction_walls", &thermal::BuildingThermalParams::solar_fraction_walls)
      .def_readwrite("cop", &thermal::BuildingThermalParams::cop)
      .def_readwrite("mode", &thermal::BuildingThermalParams::mode);

  m.def(
      "simulate_indoor",
      [](const thermal::BuildingThermalParams& p, std::array<double, 3> x0,
         const std::vector<double>& ambient, const std::vector<double>& irradiance,
         const std::vector<double>& hvac_power, double t_s) {
        if (ambient.size() != irradiance.size() || ambient.size() != hvac_power.size())
          throw Error(ErrorKind::InvalidParameter, "input series differ in length");
        std::vector<thermal::ThermalInput> in;
        for (std::size_t t = 0; t < ambient.size(); ++t)
          in.push_back({ambient[t], irradiance[t], hvac_power[t]});
        const auto traj = thermal::simulate(thermal::discretize(p, t_s), p.mode, p.cop,
                                            {x0[0], x0[1], x0[2]}, in);
        std::vector<double> t_in;
        for (const auto& s : traj) t_in.push_back(s.t_in);
        return t_in;
      },
      py::arg("params"), py::arg("initial_state"), py::arg("ambient"), py::arg("irradiance"),
      py::arg("hvac_power"), py::arg("t_s") = 1.0,
      "Indoor temperature at every slot boundary, initial value first.");

  m.def(
      "wind_power",
      [](double v, double rated, double v_in, double v_rated, double v_out) {
        return devices::wind_available_power({rated, v_in, v_rated, v_out}, v);
      },
      py::arg("wind_speed"), py::arg("rated_power") = 1000.0, py::arg("v_cut_in") = 3.0,
      py::arg("v_rated") = 12.0, py::arg("v_cut_out") = 30.0);
  m.def(
      "solar_power",
      [](double irradiance, double ambient, double efficiency, double area) {
        return devices::solar_available_power({efficiency, area}, irradiance, ambient);
      },
      py::arg("irradiance"), py::arg("ambient"), py::arg("efficiency") = 0.157,
      py::arg("area") = 7000.0);

  m.def(
      "lhs_sample",
      [](std::size_t n, std::size_t dims, std::uint64_t seed) {
        return scenario::lhs_sample(n, dims, seed);
      },
      py::arg("n"), py::arg("dims"), py::arg("seed"), "Row-major n x dims sample in [0, 1).");

  m.def(
      "reduced_scenarios_csv",
      [](const std::string& config_path, const std::string& forecasts_path,
         std::optional<std::size_t> n, std::optional<std::size_t> k,
         std::optional<std::uint64_t> seed) {
        return io::scenarios_to_csv(reduced_set(load(config_path, forecasts_path), n, k, seed));
      },
      py::arg("config"), py::arg("forecasts"), py::arg("n") = py::none(),
      py::arg("k") = py::none(), py::arg("seed") = py::none());

  m.def(
      "schedule",
      [](const std::string& config_path, const std::string& forecasts_path) {
        const auto p = community(load(config_path, forecasts_path));
        const auto s = evhvac::solve_schedule(p);
        const auto base = evhvac::uncontrolled_baseline(p, evhvac::terminal_socs(s));
        py::dict d;
        d["j_elec"] = s.j_elec;
        d["j_discomfort"] = s.j_discomfort;
        d["j_tot"] = s.j_tot;
        d["max_dev_c"] = s.max_comfort_deviation(p);
        d["grid_import"] = s.grid_import;
        d["baseline_j_elec"] = base.j_elec;
        d["cost_saving_pct"] = evhvac::cost_saving(s, base);
        return d;
      },
      py::arg("config"), py::arg("forecasts"));

  m.def(
      "bid",
      [](const std::string& config_path, const std::string& forecasts_path,
         std::optional<std::size_t> n, std::optional<std::size_t> k,
         std::optional<std::uint64_t> seed) {
        const Loaded in = load(config_path, forecasts_path);
        const auto set = reduced_set(in, n, k, seed);
        const auto sol = mgbid::solve_bidding(microgrid(in), set, in.cfg.solver);
        py::dict d;
        d["status"] = opt::to_string(sol.status);
        d["objective"] = sol.objective;
        d["bid"] = sol.first.bid;
        d["commitment"] = sol.first.commitment;
        d["profit"] = profit_dict(sol.profit);
        return d;
      },
      py::arg("config"), py::arg("forecasts"), py::arg("n") = py::none(),
      py::arg("k") = py::none(), py::arg("seed") = py::none());

  m.def(
      "export_model",
      [](const std::string& config_path, const std::string& forecasts_path,
         std::optional<std::size_t> n, std::optional<std::size_t> k,
         std::optional<std::uint64_t> seed) {
        const Loaded in = load(config_path, forecasts_path);
        if (in.cfg.kind == config::ProblemKind::EvHvac)
          return opt::export_lp_text(evhvac::build_joint_model(community(in)).model);
        const auto set = reduced_set(in, n, k, seed);
        return opt::export_lp_text(mgbid::build_two_stage_model(microgrid(in), set).model);
      },
      py::arg("config"), py::arg("forecasts"), py::arg("n") = py::none(),
      py::arg("k") = py::none(), py::arg("seed") = py::none(),
      "LP-format text of the model the solver would see.");
}
