#pragma once

// Internal bounded revised simplex used by solve_lp, solve_milp and the
// enumeration oracle.

#include <cstdint>
#include <vector>

#include "gridsched/optmodel.hpp"

namespace gridsched::opt::detail {

/// Model in internal minimization form. Row i reads a_i x - r_i = 0 with the
/// logical variable r_i carrying the row bounds.
struct LpData {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<int> col_start;  ///< CSC, cols + 1 entries
  std::vector<int> row_index;
  std::vector<double> value;
  std::vector<double> cost;  ///< structural costs, already sign-adjusted
  std::vector<double> lower;  ///< structural bounds
  std::vector<double> upper;
  std::vector<double> row_lower;
  std::vector<double> row_upper;
  double sign = 1.0;  ///< +1 minimize, -1 maximize
  double constant = 0.0;

  static LpData from_model(const OptModel& model);
};

enum class VarStatus : std::uint8_t { Basic, AtLower, AtUpper, Free };

struct Basis {
  std::vector<int> head;            ///< basic variable per row position
  std::vector<VarStatus> status;    ///< per variable, structurals then logicals
  bool empty() const { return head.empty(); }
};

struct LpResult {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<double> x;  ///< structural values
  std::vector<double> y;  ///< row multipliers of the internal minimization
  double objective = 0.0;  ///< internal minimization objective, without constant
  Basis basis;
  std::size_t iterations = 0;
};

/// Solves with the given structural bounds (overriding lp.lower/upper),
/// optionally starting from a previous basis.
LpResult solve_bounded(const LpData& lp, const std::vector<double>& lower,
                       const std::vector<double>& upper, const Basis* warm,
                       const LpOptions& options);

}  // namespace gridsched::opt::detail
