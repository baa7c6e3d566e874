#pragma once

// Third-order RC thermal model of a building: indoor air, inner wall mass
// and envelope, driven by ambient temperature, solar irradiance and HVAC
// heat flow.

#include <vector>

#include <Eigen/Dense>

namespace gridsched::thermal {

/// Sign applied to the HVAC heat flow: +1 heats the air, -1 cools it.
enum class HvacMode : int { Heating = 1, Cooling = -1 };

inline double sign_of(HvacMode mode) { return static_cast<int>(mode); }

/// Lumped thermal parameters. Resistances in degC/kW, capacitances in
/// kWh/degC, window area in m^2.
struct BuildingThermalParams {
  double r_a = 0.0;   ///< air <-> ambient
  double r_m = 0.0;   ///< air <-> inner walls and floor
  double r_e = 0.0;   ///< air <-> envelope
  double r_ea = 0.0;  ///< envelope <-> ambient
  double c_air = 0.0;
  double c_m = 0.0;
  double c_e = 0.0;
  double window_area = 0.0;
  double solar_fraction_walls = 0.0;  ///< share of window solar gain absorbed by walls
  double cop = 1.0;
  HvacMode mode = HvacMode::Cooling;

  /// Throws invalid-parameter if any physical invariant is violated.
  void validate() const;

  /// Synthetic single-family-house parameters with realistic magnitudes.
  /// They are not measured data; override them from configuration.
  static BuildingThermalParams synthetic_default();
};

struct ContinuousThermalModel {
  Eigen::Matrix3d a;
  Eigen::Matrix3d b;
  Eigen::RowVector3d c;
};

struct DiscreteThermalModel {
  Eigen::Matrix3d a_d;
  Eigen::Matrix3d b_d;
  Eigen::RowVector3d c_d;
  double t_s = 0.0;  ///< hours
};

struct ThermalState {
  double t_in = 0.0;
  double t_m = 0.0;
  double t_e = 0.0;

  Eigen::Vector3d vec() const { return {t_in, t_m, t_e}; }
  static ThermalState from(const Eigen::Vector3d& v) { return {v(0), v(1), v(2)}; }
  static ThermalState uniform(double t) { return {t, t, t}; }
};

/// Inputs held constant over one sampling interval. hvac_input_power is the
/// electrical power; the mode sign and COP are applied in step().
struct ThermalInput {
  double ambient = 0.0;
  double irradiance = 0.0;
  double hvac_input_power = 0.0;
};

ContinuousThermalModel build_continuous_model(const BuildingThermalParams& params);

/// Zero-order-hold discretization: a_d = exp(a t_s), b_d = int_0^t_s exp(a s) ds b.
DiscreteThermalModel discretize(const ContinuousThermalModel& cont, double t_s);

/// Convenience: build_continuous_model followed by discretize.
DiscreteThermalModel discretize(const BuildingThermalParams& params, double t_s);

ThermalState step(const DiscreteThermalModel& model, HvacMode mode, double cop,
                  const ThermalState& state, const ThermalInput& input);

/// Returns inputs.size() + 1 states, the first being `initial`.
std::vector<ThermalState> simulate(const DiscreteThermalModel& model, HvacMode mode,
                                   double cop, const ThermalState& initial,
                                   const std::vector<ThermalInput>& inputs);

/// Matrix exponential by scaling and squaring with a [6/6] Pade approximant.
Eigen::MatrixXd expm(const Eigen::MatrixXd& m);

}  // namespace gridsched::thermal
