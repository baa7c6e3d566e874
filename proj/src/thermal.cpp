#include "gridsched/thermal.hpp"

#include <cmath>
#include <string>

#include "gridsched/error.hpp"

namespace gridsched::thermal {

namespace {

void require_positive(double v, const char* name) {
  require(std::isfinite(v) && v > 0.0, ErrorKind::InvalidParameter,
          std::string("thermal parameter ") + name + " must be positive and finite");
}

}  // namespace

void BuildingThermalParams::validate() const {
  require_positive(r_a, "r_a");
  require_positive(r_m, "r_m");
  require_positive(r_e, "r_e");
  require_positive(r_ea, "r_ea");
  require_positive(c_air, "c_air");
  require_positive(c_m, "c_m");
  require_positive(c_e, "c_e");
  require_positive(cop, "cop");
  require(std::isfinite(window_area) && window_area >= 0.0, ErrorKind::InvalidParameter,
          "window_area must be non-negative");
  require(solar_fraction_walls >= 0.0 && solar_fraction_walls <= 1.0,
          ErrorKind::InvalidParameter, "solar_fraction_walls must lie in [0, 1]");
  require(mode == HvacMode::Heating || mode == HvacMode::Cooling,
          ErrorKind::InvalidParameter, "mode must be heating (+1) or cooling (-1)");
}

BuildingThermalParams BuildingThermalParams::synthetic_default() {
  BuildingThermalParams p;
  p.r_a = 8.0;
  p.r_m = 1.5;
  p.r_e = 2.0;
  p.r_ea = 3.0;
  p.c_air = 2.0;
  p.c_m = 12.0;
  p.c_e = 8.0;
  p.window_area = 4.0;
  p.solar_fraction_walls = 0.6;
  p.cop = 3.0;
  p.mode = HvacMode::Cooling;
  return p;
}

ContinuousThermalModel build_continuous_model(const BuildingThermalParams& p) {
  p.validate();
  ContinuousThermalModel m;
  m.a.setZero();
  m.b.setZero();

  m.a(0, 0) = -(1.0 / p.r_a + 1.0 / p.r_m + 1.0 / p.r_e) / p.c_air;
  m.a(0, 1) = 1.0 / (p.r_m * p.c_air);
  m.a(0, 2) = 1.0 / (p.r_e * p.c_air);
  m.a(1, 0) = 1.0 / (p.r_m * p.c_m);
  m.a(1, 1) = -1.0 / (p.r_m * p.c_m);
  m.a(2, 0) = 1.0 / (p.r_e * p.c_e);
  m.a(2, 2) = -(1.0 / p.r_ea + 1.0 / p.r_e) / p.c_e;

  // Window gain A*Phi splits between room air and the wall layer.
  m.b(0, 0) = 1.0 / (p.r_a * p.c_air);
  m.b(0, 1) = p.window_area * (1.0 - p.solar_fraction_walls) / p.c_air;
  m.b(0, 2) = 1.0 / p.c_air;
  m.b(1, 1) = p.window_area * p.solar_fraction_walls / p.c_m;
  m.b(2, 0) = 1.0 / (p.r_ea * p.c_e);

  m.c << 1.0, 0.0, 0.0;
  return m;
}

Eigen::MatrixXd expm(const Eigen::MatrixXd& m) {
  require(m.rows() == m.cols(), ErrorKind::InvalidParameter, "expm needs a square matrix");
  const Eigen::Index n = m.rows();
  const double norm = m.cwiseAbs().colwise().sum().maxCoeff();
  require(std::isfinite(norm), ErrorKind::InvalidParameter, "expm input is not finite");

  // ||m / 2^s||_1 <= 0.5 keeps the [6/6] Pade truncation error below 1e-16.
  int s = 0;
  if (norm > 0.5) s = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Eigen::MatrixXd x = m / std::ldexp(1.0, s);

  // Pade [6/6] coefficients c_k = (12-k)! 6! / (12! k! (6-k)!).
  constexpr double c[] = {1.0,
                          1.0 / 2.0,
                          5.0 / 44.0,
                          1.0 / 66.0,
                          1.0 / 792.0,
                          1.0 / 15840.0,
                          1.0 / 665280.0};
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd power = id;
  Eigen::MatrixXd num = c[0] * id;
  Eigen::MatrixXd den = c[0] * id;
  for (int k = 1; k <= 6; ++k) {
    power = power * x;
    num += c[k] * power;
    den += ((k % 2 == 0) ? c[k] : -c[k]) * power;
  }
  Eigen::MatrixXd result = den.partialPivLu().solve(num);
  for (int i = 0; i < s; ++i) result = result * result;
  return result;
}

DiscreteThermalModel discretize(const ContinuousThermalModel& cont, double t_s) {
  require(std::isfinite(t_s) && t_s > 0.0, ErrorKind::InvalidParameter,
          "sampling interval must be positive");
  // exp([[a, b], [0, 0]] t_s) = [[a_d, b_d], [0, I]]
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(6, 6);
  aug.topLeftCorner(3, 3) = cont.a * t_s;
  aug.topRightCorner(3, 3) = cont.b * t_s;
  const Eigen::MatrixXd e = expm(aug);

  DiscreteThermalModel d;
  d.a_d = e.topLeftCorner(3, 3);
  d.b_d = e.topRightCorner(3, 3);
  d.c_d = cont.c;
  d.t_s = t_s;
  require(d.a_d.allFinite() && d.b_d.allFinite(), ErrorKind::InvalidParameter,
          "discretized thermal model is not finite");
  return d;
}

DiscreteThermalModel discretize(const BuildingThermalParams& params, double t_s) {
  return discretize(build_continuous_model(params), t_s);
}

ThermalState step(const DiscreteThermalModel& model, HvacMode mode, double cop,
                  const ThermalState& state, const ThermalInput& input) {
  const Eigen::Vector3d u(input.ambient, input.irradiance,
                          sign_of(mode) * cop * input.hvac_input_power);
  return ThermalState::from(model.a_d * state.vec() + model.b_d * u);
}

std::vector<ThermalState> simulate(const DiscreteThermalModel& model, HvacMode mode,
                                   double cop, const ThermalState& initial,
                                   const std::vector<ThermalInput>& inputs) {
  require(!inputs.empty(), ErrorKind::InvalidParameter, "simulate needs at least one input");
  std::vector<ThermalState> out;
  out.reserve(inputs.size() + 1);
  out.push_back(initial);
  for (const auto& in : inputs) out.push_back(step(model, mode, cop, out.back(), in));
  return out;
}

}  // namespace gridsched::thermal
