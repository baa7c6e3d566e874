#pragma once

// Sparse LP / MILP model, an embedded bounded revised simplex, best-bound
// branch and bound, an exhaustive enumeration oracle and an LP-format writer.

#include <cstddef>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

namespace gridsched::opt {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { Minimize, Maximize };
enum class Relation { LessEqual, Equal, GreaterEqual };

struct VarId {
  std::size_t index = 0;
  friend bool operator==(VarId a, VarId b) { return a.index == b.index; }
};

struct RowId {
  std::size_t index = 0;
};

struct Term {
  VarId var;
  double coef = 0.0;
};

/// Sparse affine expression sum(coef * var) + constant. Duplicate variables
/// are allowed and summed when the expression is added to a model.
class LinearExpr {
 public:
  LinearExpr() = default;
  LinearExpr(double constant) : constant_(constant) {}  // NOLINT: implicit by design of the DSL
  LinearExpr(VarId v, double coef = 1.0) { terms_.push_back({v, coef}); }  // NOLINT

  LinearExpr& add(VarId v, double coef) {
    if (coef != 0.0) terms_.push_back({v, coef});
    return *this;
  }
  LinearExpr& add_constant(double c) {
    constant_ += c;
    return *this;
  }
  LinearExpr& operator+=(const LinearExpr& other);
  LinearExpr& operator-=(const LinearExpr& other);
  LinearExpr& operator*=(double k);

  const std::vector<Term>& terms() const { return terms_; }
  double constant() const { return constant_; }
  /// Evaluates the expression at a primal point.
  double evaluate(const std::vector<double>& x) const;

 private:
  std::vector<Term> terms_;
  double constant_ = 0.0;
};

LinearExpr operator+(LinearExpr a, const LinearExpr& b);
LinearExpr operator-(LinearExpr a, const LinearExpr& b);
LinearExpr operator*(double k, LinearExpr a);

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInf;
  bool integral = false;
};

struct Constraint {
  std::string name;
  std::vector<Term> row;  ///< merged: one entry per variable, no zeros
  Relation relation = Relation::LessEqual;
  double rhs = 0.0;
};

class OptModel {
 public:
  explicit OptModel(Sense sense = Sense::Minimize) : sense_(sense) {}

  VarId add_variable(const std::string& name, double lower = 0.0, double upper = kInf,
                     bool integral = false);
  VarId add_binary(const std::string& name) { return add_variable(name, 0.0, 1.0, true); }

  /// lhs (relation) rhs; the expression's constant is moved to the right.
  RowId add_constraint(const std::string& name, const LinearExpr& lhs, Relation relation,
                       double rhs);

  void set_bounds(VarId v, double lower, double upper);
  void set_integral(VarId v, bool integral);
  void add_objective(const LinearExpr& expr);
  void set_objective_coef(VarId v, double coef);
  void set_sense(Sense s) { sense_ = s; }

  Sense sense() const { return sense_; }
  std::size_t num_variables() const { return variables_.size(); }
  std::size_t num_constraints() const { return constraints_.size(); }
  std::size_t num_integral() const;
  const Variable& variable(VarId v) const { return variables_.at(v.index); }
  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const Constraint& constraint(RowId r) const { return constraints_.at(r.index); }
  const std::vector<double>& objective() const { return objective_; }
  double objective_constant() const { return objective_constant_; }
  /// Lookup by name; throws invalid-parameter if absent.
  VarId find_variable(const std::string& name) const;
  bool has_constraint(const std::string& name) const { return row_names_.count(name) > 0; }
  RowId find_constraint(const std::string& name) const;

  double objective_value(const std::vector<double>& x) const;
  /// Largest absolute violation of bounds and constraints at x.
  double max_violation(const std::vector<double>& x) const;

 private:
  Sense sense_;
  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  std::vector<double> objective_;
  double objective_constant_ = 0.0;
  std::unordered_map<std::string, std::size_t> var_names_;
  std::unordered_map<std::string, std::size_t> row_names_;
};

/// Epigraph reformulation of weight * |expr|: adds t >= expr, t >= -expr and
/// puts weight * t in the objective with the sign that penalizes it.
VarId add_abs_term(OptModel& model, const LinearExpr& expr, double weight,
                   const std::string& name);

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(SolveStatus s);

struct Solution {
  SolveStatus status = SolveStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> values;  ///< one per variable
  std::vector<double> duals;   ///< LP only: d objective / d rhs, one per constraint
  std::size_t iterations = 0;  ///< simplex pivots (summed over nodes for MILP)
  std::size_t nodes = 0;       ///< branch-and-bound nodes explored
  double best_bound = 0.0;     ///< MILP: proven bound on the optimum

  bool optimal() const { return status == SolveStatus::Optimal; }
  double value(VarId v) const { return values.at(v.index); }
};

struct LpOptions {
  double feas_tol = 1e-9;
  double opt_tol = 1e-9;
  std::size_t max_iterations = 0;  ///< 0 selects a size-dependent default
  std::size_t bland_after = 1000;  ///< consecutive degenerate pivots before Bland's rule
};

struct MilpOptions {
  double int_tol = 1e-6;
  double gap_tol = 1e-6;  ///< absolute or relative, whichever is larger
  std::size_t node_limit = 200000;
  LpOptions lp;
};

/// Solves a model without integral variables. Throws wrong-solver otherwise.
Solution solve_lp(const OptModel& model, const LpOptions& options = {});

/// Branch and bound over LP relaxations: most-fractional branching (lowest
/// index on ties), best-bound node selection, warm-started child LPs.
Solution solve_milp(const OptModel& model, const MilpOptions& options = {});

/// Exhaustive enumeration of every integral assignment (at most 20 integral
/// variables with finite bounds), solving the continuous restriction of each.
Solution enumerate_oracle(const OptModel& model, const LpOptions& options = {});

/// CPLEX LP text format with 12 significant digits and declaration order.
std::string export_lp_text(const OptModel& model);

/// Name as written by export_lp_text.
std::string sanitize_name(const std::string& name);

}  // namespace gridsched::opt
