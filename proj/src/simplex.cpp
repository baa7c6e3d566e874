#include "simplex.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "gridsched/error.hpp"

namespace gridsched::opt::detail {

LpData LpData::from_model(const OptModel& model) {
  LpData lp;
  lp.rows = model.num_constraints();
  lp.cols = model.num_variables();
  lp.sign = model.sense() == Sense::Minimize ? 1.0 : -1.0;
  lp.constant = model.objective_constant();

  std::vector<int> count(lp.cols, 0);
  for (const Constraint& c : model.constraints())
    for (const Term& t : c.row) ++count[t.var.index];
  lp.col_start.assign(lp.cols + 1, 0);
  for (std::size_t j = 0; j < lp.cols; ++j) lp.col_start[j + 1] = lp.col_start[j] + count[j];
  lp.row_index.resize(static_cast<std::size_t>(lp.col_start.back()));
  lp.value.resize(lp.row_index.size());
  std::vector<int> fill(lp.col_start.begin(), lp.col_start.end() - 1);
  for (std::size_t i = 0; i < lp.rows; ++i) {
    const Constraint& c = model.constraints()[i];
    for (const Term& t : c.row) {
      const int at = fill[t.var.index]++;
      lp.row_index[static_cast<std::size_t>(at)] = static_cast<int>(i);
      lp.value[static_cast<std::size_t>(at)] = t.coef;
    }
    switch (c.relation) {
      case Relation::LessEqual:
        lp.row_lower.push_back(-kInf);
        lp.row_upper.push_back(c.rhs);
        break;
      case Relation::GreaterEqual:
        lp.row_lower.push_back(c.rhs);
        lp.row_upper.push_back(kInf);
        break;
      case Relation::Equal:
        lp.row_lower.push_back(c.rhs);
        lp.row_upper.push_back(c.rhs);
        break;
    }
  }
  lp.cost.resize(lp.cols);
  for (std::size_t j = 0; j < lp.cols; ++j) {
    lp.cost[j] = lp.sign * model.objective()[j];
    lp.lower.push_back(model.variables()[j].lower);
    lp.upper.push_back(model.variables()[j].upper);
  }
  return lp;
}

namespace {

constexpr std::size_t kRefactorInterval = 100;
constexpr double kPivotTol = 1e-9;
constexpr double kDropTol = 1e-14;

using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

/// LU of the basis matrix plus a product-form eta file for the pivots taken
/// since the last factorization.
class BasisFactor {
 public:
  bool factorize(const LpData& lp, const std::vector<int>& head) {
    const auto m = static_cast<Eigen::Index>(lp.rows);
    etas_.clear();
    if (m == 0) return true;
    std::vector<Eigen::Triplet<double, int>> triplets;
    for (Eigen::Index pos = 0; pos < m; ++pos) {
      const int var = head[static_cast<std::size_t>(pos)];
      if (static_cast<std::size_t>(var) < lp.cols) {
        for (int k = lp.col_start[var]; k < lp.col_start[var + 1]; ++k)
          triplets.emplace_back(lp.row_index[static_cast<std::size_t>(k)], static_cast<int>(pos),
                                lp.value[static_cast<std::size_t>(k)]);
      } else {
        triplets.emplace_back(var - static_cast<int>(lp.cols), static_cast<int>(pos), -1.0);
      }
    }
    SpMat b(m, m);
    b.setFromTriplets(triplets.begin(), triplets.end());
    b.makeCompressed();
    lu_.analyzePattern(b);
    lu_.factorize(b);
    return lu_.info() == Eigen::Success;
  }

  void ftran(Eigen::VectorXd& v) const {
    if (v.size() == 0) return;
    v = lu_.solve(v).eval();
    for (const Eta& e : etas_) {
      const double vr = v(e.row);
      if (vr == 0.0) continue;
      v(e.row) = e.pivot * vr;
      for (std::size_t k = 0; k < e.index.size(); ++k) v(e.index[k]) += e.value[k] * vr;
    }
  }

  void btran(Eigen::VectorXd& v) const {
    if (v.size() == 0) return;
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double s = it->pivot * v(it->row);
      for (std::size_t k = 0; k < it->index.size(); ++k) s += it->value[k] * v(it->index[k]);
      v(it->row) = s;
    }
    v = lu_.transpose().solve(v).eval();
  }

  void add_eta(int row, const Eigen::VectorXd& alpha) {
    Eta e;
    e.row = row;
    e.pivot = 1.0 / alpha(row);
    for (Eigen::Index i = 0; i < alpha.size(); ++i) {
      if (i == row || std::abs(alpha(i)) <= kDropTol) continue;
      e.index.push_back(static_cast<int>(i));
      e.value.push_back(-alpha(i) * e.pivot);
    }
    etas_.push_back(std::move(e));
  }

  std::size_t eta_count() const { return etas_.size(); }

 private:
  struct Eta {
    int row = 0;
    double pivot = 1.0;
    std::vector<int> index;
    std::vector<double> value;
  };
  mutable Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu_;
  std::vector<Eta> etas_;
};

class Simplex {
 public:
  Simplex(const LpData& lp, const std::vector<double>& lower, const std::vector<double>& upper,
          const LpOptions& options)
      : lp_(lp), m_(lp.rows), n_(lp.cols), total_(lp.rows + lp.cols), opt_(options) {
    lo_.resize(total_);
    up_.resize(total_);
    cost_.assign(total_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      lo_[j] = lower[j];
      up_[j] = upper[j];
      cost_[j] = lp.cost[j];
    }
    for (std::size_t i = 0; i < m_; ++i) {
      lo_[n_ + i] = lp.row_lower[i];
      up_[n_ + i] = lp.row_upper[i];
    }
    max_iter_ = opt_.max_iterations ? opt_.max_iterations : 20 * (m_ + n_) + 5000;
  }

  LpResult run(const Basis* warm) {
    LpResult result;
    for (std::size_t j = 0; j < n_; ++j)
      if (lo_[j] > up_[j]) {
        result.status = SolveStatus::Infeasible;
        return result;
      }

    if (!(warm && install(*warm))) install_slack();

    bool confirmed = false;
    int trouble = 0;
    while (true) {
      if (iterations_ >= max_iter_) {
        result.status = SolveStatus::IterationLimit;
        break;
      }
      if (factor_.eta_count() >= kRefactorInterval) refactor();

      const bool phase1 = compute_basic_costs();
      y_ = cb_;
      factor_.btran(y_);

      int dir = 0;
      const int q = choose_entering(phase1, dir);
      if (q < 0) {
        if (!confirmed && factor_.eta_count() > 0) {
          refactor();
          confirmed = true;
          continue;
        }
        result.status = phase1 ? SolveStatus::Infeasible : SolveStatus::Optimal;
        break;
      }
      confirmed = false;

      load_column(q, alpha_);
      factor_.ftran(alpha_);

      const Step step = ratio_test(q, dir, phase1);
      if (!step.bounded) {
        if (!phase1) {
          result.status = SolveStatus::Unbounded;
          break;
        }
        if (++trouble > 3) {
          result.status = SolveStatus::IterationLimit;
          break;
        }
        refactor();
        continue;
      }
      apply(q, dir, step);
      ++iterations_;
    }

    result.iterations = iterations_;
    result.x.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
    if (result.status == SolveStatus::Optimal) {
      result.y.assign(y_.data(), y_.data() + m_);
      double obj = 0.0;
      for (std::size_t j = 0; j < n_; ++j) obj += cost_[j] * x_[j];
      result.objective = obj;
    }
    result.basis.head = head_;
    result.basis.status = status_;
    return result;
  }

 private:
  struct Step {
    bool bounded = false;
    bool flip = false;
    int row = -1;
    double theta = 0.0;
    double target = 0.0;
  };

  void place_nonbasic(std::size_t j, VarStatus preferred) {
    VarStatus s = preferred;
    if (s == VarStatus::AtLower && !std::isfinite(lo_[j])) s = VarStatus::AtUpper;
    if (s == VarStatus::AtUpper && !std::isfinite(up_[j]))
      s = std::isfinite(lo_[j]) ? VarStatus::AtLower : VarStatus::Free;
    if (s == VarStatus::Free && std::isfinite(lo_[j])) s = VarStatus::AtLower;
    if (s == VarStatus::Free && std::isfinite(up_[j])) s = VarStatus::AtUpper;
    status_[j] = s;
    x_[j] = s == VarStatus::AtLower ? lo_[j] : s == VarStatus::AtUpper ? up_[j] : 0.0;
  }

  void install_slack() {
    head_.resize(m_);
    status_.assign(total_, VarStatus::AtLower);
    x_.assign(total_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) place_nonbasic(j, VarStatus::AtLower);
    for (std::size_t i = 0; i < m_; ++i) {
      head_[i] = static_cast<int>(n_ + i);
      status_[n_ + i] = VarStatus::Basic;
    }
    factor_.factorize(lp_, head_);
    compute_xb();
  }

  bool install(const Basis& warm) {
    if (warm.head.size() != m_ || warm.status.size() != total_) return false;
    head_ = warm.head;
    status_ = warm.status;
    x_.assign(total_, 0.0);
    std::size_t basic = 0;
    for (std::size_t j = 0; j < total_; ++j) {
      if (status_[j] == VarStatus::Basic) {
        ++basic;
        continue;
      }
      place_nonbasic(j, status_[j]);
    }
    if (basic != m_) return false;
    if (!factor_.factorize(lp_, head_)) return false;
    compute_xb();
    return true;
  }

  void refactor() {
    if (!factor_.factorize(lp_, head_)) {
      // Numerically singular basis: restart from the slack basis.
      install_slack();
      return;
    }
    compute_xb();
  }

  void compute_xb() {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_));
    for (std::size_t j = 0; j < n_; ++j) {
      if (status_[j] == VarStatus::Basic || x_[j] == 0.0) continue;
      for (int k = lp_.col_start[j]; k < lp_.col_start[j + 1]; ++k)
        rhs(lp_.row_index[static_cast<std::size_t>(k)]) -= lp_.value[static_cast<std::size_t>(k)] * x_[j];
    }
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t j = n_ + i;
      if (status_[j] != VarStatus::Basic) rhs(static_cast<Eigen::Index>(i)) += x_[j];
    }
    factor_.ftran(rhs);
    for (std::size_t i = 0; i < m_; ++i) x_[static_cast<std::size_t>(head_[i])] = rhs(static_cast<Eigen::Index>(i));
  }

  /// Fills cb_ with phase-1 infeasibility costs when any basic variable is
  /// out of bounds, else with the true costs. Returns true in phase 1.
  bool compute_basic_costs() {
    cb_.resize(static_cast<Eigen::Index>(m_));
    bool phase1 = false;
    const double tol = opt_.feas_tol;
    for (std::size_t i = 0; i < m_; ++i) {
      const auto j = static_cast<std::size_t>(head_[i]);
      if (x_[j] < lo_[j] - tol) {
        cb_(static_cast<Eigen::Index>(i)) = -1.0;
        phase1 = true;
      } else if (x_[j] > up_[j] + tol) {
        cb_(static_cast<Eigen::Index>(i)) = 1.0;
        phase1 = true;
      } else {
        cb_(static_cast<Eigen::Index>(i)) = 0.0;
      }
    }
    if (!phase1)
      for (std::size_t i = 0; i < m_; ++i)
        cb_(static_cast<Eigen::Index>(i)) = cost_[static_cast<std::size_t>(head_[i])];
    return phase1;
  }

  double reduced_cost(std::size_t j, bool phase1) const {
    double d = phase1 ? 0.0 : cost_[j];
    if (j < n_) {
      for (int k = lp_.col_start[j]; k < lp_.col_start[j + 1]; ++k)
        d -= y_(lp_.row_index[static_cast<std::size_t>(k)]) * lp_.value[static_cast<std::size_t>(k)];
    } else {
      d += y_(static_cast<Eigen::Index>(j - n_));
    }
    return d;
  }

  int choose_entering(bool phase1, int& dir) {
    const double tol = opt_.opt_tol;
    int best = -1;
    double best_score = 0.0;
    for (std::size_t j = 0; j < total_; ++j) {
      const VarStatus s = status_[j];
      if (s == VarStatus::Basic || lo_[j] == up_[j]) continue;
      const double d = reduced_cost(j, phase1);
      int candidate_dir = 0;
      if (d < -tol && (s == VarStatus::AtLower || s == VarStatus::Free)) candidate_dir = 1;
      if (d > tol && (s == VarStatus::AtUpper || s == VarStatus::Free)) candidate_dir = -1;
      if (candidate_dir == 0) continue;
      if (bland_) {
        dir = candidate_dir;
        return static_cast<int>(j);
      }
      if (std::abs(d) > best_score) {
        best_score = std::abs(d);
        best = static_cast<int>(j);
        dir = candidate_dir;
      }
    }
    return best;
  }

  void load_column(int q, Eigen::VectorXd& out) const {
    out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_));
    const auto j = static_cast<std::size_t>(q);
    if (j < n_) {
      for (int k = lp_.col_start[j]; k < lp_.col_start[j + 1]; ++k)
        out(lp_.row_index[static_cast<std::size_t>(k)]) = lp_.value[static_cast<std::size_t>(k)];
    } else {
      out(static_cast<Eigen::Index>(j - n_)) = -1.0;
    }
  }

  /// Bound a basic variable heads for when moving with rate `delta`.
  bool blocking_target(std::size_t var, double delta, bool phase1, double& target) const {
    const double x = x_[var];
    const double tol = opt_.feas_tol;
    if (delta < 0.0) {
      if (phase1 && x > up_[var] + tol) {
        target = up_[var];
        return true;
      }
      if (x >= lo_[var] - tol && std::isfinite(lo_[var])) {
        target = lo_[var];
        return true;
      }
      return false;
    }
    if (phase1 && x < lo_[var] - tol) {
      target = lo_[var];
      return true;
    }
    if (x <= up_[var] + tol && std::isfinite(up_[var])) {
      target = up_[var];
      return true;
    }
    return false;
  }

  Step ratio_test(int q, int dir, bool phase1) const {
    const double tol = opt_.feas_tol;
    Step step;
    const auto jq = static_cast<std::size_t>(q);
    const double range = up_[jq] - lo_[jq];

    // Harris pass 1: largest step keeping every blocking variable within
    // its bound relaxed by the feasibility tolerance.
    double theta_max = kInf;
    for (std::size_t i = 0; i < m_; ++i) {
      const double delta = -dir * alpha_(static_cast<Eigen::Index>(i));
      if (std::abs(delta) <= kPivotTol) continue;
      const auto var = static_cast<std::size_t>(head_[i]);
      double target;
      if (!blocking_target(var, delta, phase1, target)) continue;
      const double gap = delta < 0.0 ? x_[var] - target : target - x_[var];
      theta_max = std::min(theta_max, (gap + tol) / std::abs(delta));
    }

    if (std::isfinite(range) && range <= theta_max) {
      step.bounded = true;
      step.flip = true;
      step.theta = range;
      return step;
    }
    if (!std::isfinite(theta_max)) return step;

    // Pass 2: among ratios within theta_max take the largest pivot (Bland:
    // the smallest ratio, lowest variable index on ties).
    double best_pivot = 0.0;
    double best_ratio = kInf;
    int best_var = -1;
    for (std::size_t i = 0; i < m_; ++i) {
      const double delta = -dir * alpha_(static_cast<Eigen::Index>(i));
      if (std::abs(delta) <= kPivotTol) continue;
      const auto var = static_cast<std::size_t>(head_[i]);
      double target;
      if (!blocking_target(var, delta, phase1, target)) continue;
      const double gap = delta < 0.0 ? x_[var] - target : target - x_[var];
      const double ratio = std::max(0.0, gap / std::abs(delta));
      if (ratio > theta_max) continue;
      bool take;
      if (bland_) {
        take = ratio < best_ratio - 1e-12 ||
               (ratio <= best_ratio + 1e-12 && (best_var < 0 || head_[i] < best_var));
      } else {
        take = std::abs(delta) > best_pivot;
      }
      if (take) {
        best_pivot = std::abs(delta);
        best_ratio = ratio;
        best_var = head_[i];
        step.row = static_cast<int>(i);
        step.theta = ratio;
        step.target = target;
      }
    }
    step.bounded = step.row >= 0;
    return step;
  }

  void apply(int q, int dir, const Step& step) {
    const auto jq = static_cast<std::size_t>(q);
    const double theta = step.theta;
    if (theta > 1e-12) {
      degenerate_ = 0;
      bland_ = false;
    } else if (++degenerate_ > opt_.bland_after) {
      bland_ = true;
    }

    if (theta != 0.0) {
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = alpha_(static_cast<Eigen::Index>(i));
        if (a != 0.0) x_[static_cast<std::size_t>(head_[i])] -= theta * dir * a;
      }
    }

    if (step.flip) {
      status_[jq] = dir > 0 ? VarStatus::AtUpper : VarStatus::AtLower;
      x_[jq] = dir > 0 ? up_[jq] : lo_[jq];
      return;
    }

    x_[jq] += dir * theta;
    const auto r = static_cast<std::size_t>(step.row);
    const auto leaving = static_cast<std::size_t>(head_[r]);
    x_[leaving] = step.target;
    status_[leaving] = step.target == lo_[leaving] ? VarStatus::AtLower : VarStatus::AtUpper;
    head_[r] = q;
    status_[jq] = VarStatus::Basic;
    factor_.add_eta(step.row, alpha_);
  }

  const LpData& lp_;
  std::size_t m_, n_, total_;
  LpOptions opt_;
  std::size_t max_iter_ = 0;
  std::vector<double> lo_, up_, cost_, x_;
  std::vector<int> head_;
  std::vector<VarStatus> status_;
  BasisFactor factor_;
  Eigen::VectorXd cb_, y_, alpha_;
  std::size_t iterations_ = 0;
  std::size_t degenerate_ = 0;
  bool bland_ = false;
};

}  // namespace

LpResult solve_bounded(const LpData& lp, const std::vector<double>& lower,
                       const std::vector<double>& upper, const Basis* warm,
                       const LpOptions& options) {
  Simplex simplex(lp, lower, upper, options);
  return simplex.run(warm);
}

}  // namespace gridsched::opt::detail
