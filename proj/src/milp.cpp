#include <algorithm>
#include <cmath>
#include <memory>
#include <queue>

#include "gridsched/error.hpp"
#include "gridsched/optmodel.hpp"
#include "simplex.hpp"

namespace gridsched::opt {

using detail::Basis;
using detail::LpData;
using detail::LpResult;

namespace {

Solution to_solution(const LpData& lp, const LpResult& r) {
  Solution s;
  s.status = r.status;
  s.iterations = r.iterations;
  if (r.status == SolveStatus::Optimal) {
    s.values = r.x;
    s.objective = lp.sign * r.objective + lp.constant;
    s.duals.resize(r.y.size());
    for (std::size_t i = 0; i < r.y.size(); ++i) s.duals[i] = lp.sign * r.y[i];
    s.best_bound = s.objective;
  }
  return s;
}

struct BoundChange {
  std::size_t var;
  double lower;
  double upper;
};

struct Node {
  double bound;  ///< parent LP objective in internal minimization form
  std::size_t depth;
  std::size_t seq;
  std::vector<BoundChange> changes;
  std::shared_ptr<const Basis> basis;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.seq > b.seq;
  }
};

}  // namespace

Solution solve_lp(const OptModel& model, const LpOptions& options) {
  require(model.num_integral() == 0, ErrorKind::WrongSolver,
          "solve_lp called on a model with integral variables; use solve_milp");
  const LpData lp = LpData::from_model(model);
  const LpResult r = detail::solve_bounded(lp, lp.lower, lp.upper, nullptr, options);
  return to_solution(lp, r);
}

Solution solve_milp(const OptModel& model, const MilpOptions& options) {
  require(options.node_limit > 0, ErrorKind::InvalidParameter, "node_limit must be positive");
  const LpData lp = LpData::from_model(model);
  std::vector<std::size_t> integral;
  for (std::size_t j = 0; j < model.num_variables(); ++j)
    if (model.variables()[j].integral) integral.push_back(j);

  std::vector<double> root_lower = lp.lower;
  std::vector<double> root_upper = lp.upper;
  for (std::size_t j : integral) {
    root_lower[j] = std::ceil(root_lower[j] - options.int_tol);
    root_upper[j] = std::floor(root_upper[j] + options.int_tol);
  }

  double incumbent = kInf;  // internal minimization form
  std::vector<double> incumbent_x;
  std::size_t iterations = 0;
  std::size_t nodes = 0;
  std::size_t seq = 0;
  bool unbounded = false;
  bool limit_hit = false;
  double open_bound = kInf;

  auto prune_level = [&]() {
    return incumbent - std::max(options.gap_tol, options.gap_tol * std::abs(incumbent));
  };

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  open.push(Node{-kInf, 0, seq++, {}, nullptr});
  std::vector<double> lower, upper;

  while (!open.empty()) {
    if (nodes >= options.node_limit) {
      limit_hit = true;
      break;
    }
    Node node = open.top();
    open.pop();
    if (std::isfinite(incumbent) && node.bound >= prune_level()) continue;

    lower = root_lower;
    upper = root_upper;
    bool empty_box = false;
    for (const BoundChange& c : node.changes) {
      lower[c.var] = std::max(lower[c.var], c.lower);
      upper[c.var] = std::min(upper[c.var], c.upper);
      if (lower[c.var] > upper[c.var]) empty_box = true;
    }
    ++nodes;
    if (empty_box) continue;

    LpResult r = detail::solve_bounded(lp, lower, upper, node.basis.get(), options.lp);
    iterations += r.iterations;
    if (r.status == SolveStatus::Infeasible) continue;
    if (r.status == SolveStatus::Unbounded) {
      unbounded = true;
      break;
    }
    if (r.status == SolveStatus::IterationLimit) {
      limit_hit = true;
      open_bound = std::min(open_bound, node.bound);
      continue;
    }
    if (std::isfinite(incumbent) && r.objective >= prune_level()) continue;

    std::size_t branch = 0;
    double best_frac = -1.0;
    for (std::size_t j : integral) {
      const double v = r.x[j];
      const double frac = std::abs(v - std::round(v));
      if (frac <= options.int_tol) continue;
      const double score = std::min(v - std::floor(v), std::ceil(v) - v);
      if (score > best_frac) {
        best_frac = score;
        branch = j;
      }
    }
    if (best_frac < 0.0) {
      if (r.objective < incumbent) {
        incumbent = r.objective;
        incumbent_x = r.x;
        for (std::size_t j : integral) incumbent_x[j] = std::round(incumbent_x[j]);
      }
      continue;
    }

    auto basis = std::make_shared<const Basis>(std::move(r.basis));
    // The child on the side of the nearer integer is explored first.
    const double v = r.x[branch];
    const bool up_first = v - std::floor(v) > 0.5;
    Node down{r.objective, node.depth + 1, 0, node.changes, basis};
    down.changes.push_back({branch, -kInf, std::floor(v)});
    Node up{r.objective, node.depth + 1, 0, std::move(node.changes), basis};
    up.changes.push_back({branch, std::ceil(v), kInf});
    if (up_first) {
      up.seq = seq++;
      down.seq = seq++;
    } else {
      down.seq = seq++;
      up.seq = seq++;
    }
    open.push(std::move(down));
    open.push(std::move(up));
  }

  Solution s;
  s.iterations = iterations;
  s.nodes = nodes;
  if (unbounded) {
    s.status = SolveStatus::Unbounded;
    return s;
  }
  if (!open.empty()) open_bound = std::min(open_bound, open.top().bound);
  if (!std::isfinite(incumbent)) {
    s.status = limit_hit ? SolveStatus::IterationLimit : SolveStatus::Infeasible;
    return s;
  }
  s.status = limit_hit ? SolveStatus::IterationLimit : SolveStatus::Optimal;
  s.values = incumbent_x;
  s.objective = lp.sign * incumbent + lp.constant;
  const double bound = limit_hit ? std::min(open_bound, incumbent) : incumbent;
  s.best_bound = lp.sign * bound + lp.constant;
  return s;
}

Solution enumerate_oracle(const OptModel& model, const LpOptions& options) {
  std::vector<std::size_t> integral;
  for (std::size_t j = 0; j < model.num_variables(); ++j)
    if (model.variables()[j].integral) integral.push_back(j);
  require(integral.size() <= 20, ErrorKind::InvalidModel,
          "enumeration oracle refuses more than 20 integral variables");

  OptModel relaxed = model;
  std::vector<std::vector<double>> domains;
  std::size_t combos = 1;
  for (std::size_t j : integral) {
    const Variable& v = model.variables()[j];
    require(std::isfinite(v.lower) && std::isfinite(v.upper), ErrorKind::InvalidModel,
            "enumeration oracle needs finite bounds on '" + v.name + "'");
    std::vector<double> values;
    for (double x = std::ceil(v.lower - 1e-9); x <= std::floor(v.upper + 1e-9); x += 1.0)
      values.push_back(x);
    combos *= std::max<std::size_t>(values.size(), 1);
    require(combos <= (std::size_t{1} << 20), ErrorKind::InvalidModel,
            "enumeration oracle refuses more than 2^20 assignments");
    domains.push_back(std::move(values));
    relaxed.set_integral(VarId{j}, false);
  }

  const double sign = model.sense() == Sense::Minimize ? 1.0 : -1.0;
  Solution best;
  best.status = SolveStatus::Infeasible;
  for (const auto& d : domains)
    if (d.empty()) return best;

  std::vector<std::size_t> pick(integral.size(), 0);
  std::size_t iterations = 0;
  while (true) {
    for (std::size_t k = 0; k < integral.size(); ++k) {
      const double x = domains[k][pick[k]];
      relaxed.set_bounds(VarId{integral[k]}, x, x);
    }
    Solution s = solve_lp(relaxed, options);
    iterations += s.iterations;
    if (s.status == SolveStatus::Unbounded) {
      best = s;
      break;
    }
    if (s.optimal() && (!best.optimal() || sign * s.objective < sign * best.objective)) best = s;

    std::size_t k = 0;
    while (k < pick.size() && ++pick[k] == domains[k].size()) pick[k++] = 0;
    if (k == pick.size()) break;
  }
  best.iterations = iterations;
  if (best.optimal()) {
    best.best_bound = best.objective;
    if (!integral.empty()) best.duals.clear();
  }
  return best;
}

}  // namespace gridsched::opt
