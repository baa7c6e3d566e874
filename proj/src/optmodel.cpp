#include "gridsched/optmodel.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "gridsched/error.hpp"

namespace gridsched::opt {

LinearExpr& LinearExpr::operator+=(const LinearExpr& other) {
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  constant_ += other.constant_;
  return *this;
}

LinearExpr& LinearExpr::operator-=(const LinearExpr& other) {
  for (const Term& t : other.terms_) terms_.push_back({t.var, -t.coef});
  constant_ -= other.constant_;
  return *this;
}

LinearExpr& LinearExpr::operator*=(double k) {
  for (Term& t : terms_) t.coef *= k;
  constant_ *= k;
  return *this;
}

double LinearExpr::evaluate(const std::vector<double>& x) const {
  double v = constant_;
  for (const Term& t : terms_) v += t.coef * x.at(t.var.index);
  return v;
}

LinearExpr operator+(LinearExpr a, const LinearExpr& b) { return a += b; }
LinearExpr operator-(LinearExpr a, const LinearExpr& b) { return a -= b; }
LinearExpr operator*(double k, LinearExpr a) { return a *= k; }

VarId OptModel::add_variable(const std::string& name, double lower, double upper,
                             bool integral) {
  require(!std::isnan(lower) && !std::isnan(upper) && lower <= upper,
          ErrorKind::InvalidModel, "variable '" + name + "' has lower > upper");
  require(lower < kInf && upper > -kInf, ErrorKind::InvalidModel,
          "variable '" + name + "' has an empty domain");
  require(var_names_.emplace(name, variables_.size()).second, ErrorKind::InvalidModel,
          "duplicate variable name '" + name + "'");
  variables_.push_back({name, lower, upper, integral});
  objective_.push_back(0.0);
  return VarId{variables_.size() - 1};
}

RowId OptModel::add_constraint(const std::string& name, const LinearExpr& lhs,
                               Relation relation, double rhs) {
  require(row_names_.emplace(name, constraints_.size()).second, ErrorKind::InvalidModel,
          "duplicate constraint name '" + name + "'");
  std::map<std::size_t, double> merged;
  for (const Term& t : lhs.terms()) {
    require(t.var.index < variables_.size(), ErrorKind::InvalidModel,
            "constraint '" + name + "' references an unknown variable");
    merged[t.var.index] += t.coef;
  }
  Constraint c;
  c.name = name;
  c.relation = relation;
  c.rhs = rhs - lhs.constant();
  c.row.reserve(merged.size());
  for (const auto& [index, coef] : merged)
    if (coef != 0.0) c.row.push_back({VarId{index}, coef});
  constraints_.push_back(std::move(c));
  return RowId{constraints_.size() - 1};
}

void OptModel::set_bounds(VarId v, double lower, double upper) {
  require(v.index < variables_.size(), ErrorKind::InvalidModel, "unknown variable");
  require(!std::isnan(lower) && !std::isnan(upper) && lower <= upper, ErrorKind::InvalidModel,
          "variable '" + variables_[v.index].name + "' has lower > upper");
  variables_[v.index].lower = lower;
  variables_[v.index].upper = upper;
}

void OptModel::set_integral(VarId v, bool integral) {
  require(v.index < variables_.size(), ErrorKind::InvalidModel, "unknown variable");
  variables_[v.index].integral = integral;
}

void OptModel::add_objective(const LinearExpr& expr) {
  for (const Term& t : expr.terms()) {
    require(t.var.index < variables_.size(), ErrorKind::InvalidModel,
            "objective references an unknown variable");
    objective_[t.var.index] += t.coef;
  }
  objective_constant_ += expr.constant();
}

void OptModel::set_objective_coef(VarId v, double coef) {
  require(v.index < variables_.size(), ErrorKind::InvalidModel, "unknown variable");
  objective_[v.index] = coef;
}

std::size_t OptModel::num_integral() const {
  return static_cast<std::size_t>(std::count_if(variables_.begin(), variables_.end(),
                                                [](const Variable& v) { return v.integral; }));
}

VarId OptModel::find_variable(const std::string& name) const {
  const auto it = var_names_.find(name);
  require(it != var_names_.end(), ErrorKind::InvalidParameter, "no variable named '" + name + "'");
  return VarId{it->second};
}

RowId OptModel::find_constraint(const std::string& name) const {
  const auto it = row_names_.find(name);
  require(it != row_names_.end(), ErrorKind::InvalidParameter,
          "no constraint named '" + name + "'");
  return RowId{it->second};
}

double OptModel::objective_value(const std::vector<double>& x) const {
  double v = objective_constant_;
  for (std::size_t j = 0; j < objective_.size(); ++j) v += objective_[j] * x.at(j);
  return v;
}

double OptModel::max_violation(const std::vector<double>& x) const {
  double worst = 0.0;
  for (std::size_t j = 0; j < variables_.size(); ++j) {
    worst = std::max(worst, variables_[j].lower - x.at(j));
    worst = std::max(worst, x.at(j) - variables_[j].upper);
  }
  for (const Constraint& c : constraints_) {
    double lhs = 0.0;
    for (const Term& t : c.row) lhs += t.coef * x.at(t.var.index);
    switch (c.relation) {
      case Relation::LessEqual: worst = std::max(worst, lhs - c.rhs); break;
      case Relation::GreaterEqual: worst = std::max(worst, c.rhs - lhs); break;
      case Relation::Equal: worst = std::max(worst, std::abs(lhs - c.rhs)); break;
    }
  }
  return worst;
}

VarId add_abs_term(OptModel& model, const LinearExpr& expr, double weight,
                   const std::string& name) {
  require(weight >= 0.0 && std::isfinite(weight), ErrorKind::InvalidParameter,
          "absolute-value penalty weight must be non-negative");
  const VarId t = model.add_variable(name, 0.0, kInf);
  LinearExpr upper = expr;
  upper.add(t, -1.0);
  model.add_constraint(name + "_pos", upper, Relation::LessEqual, 0.0);
  LinearExpr lower = -1.0 * expr;
  lower.add(t, -1.0);
  model.add_constraint(name + "_neg", lower, Relation::LessEqual, 0.0);
  const double sign = model.sense() == Sense::Minimize ? 1.0 : -1.0;
  model.add_objective(LinearExpr(t, sign * weight));
  return t;
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::IterationLimit: return "iteration-limit";
  }
  return "unknown";
}

}  // namespace gridsched::opt
