#include "gridsched/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gridsched/error.hpp"

namespace gridsched::scenario {

std::string_view series_name(Series s) {
  switch (s) {
    case Series::PriceDa: return "price_da";
    case Series::PriceRt: return "price_rt";
    case Series::Ambient: return "ambient_c";
    case Series::Irradiance: return "irradiance";
    case Series::WindSpeed: return "wind_mps";
    case Series::Load: return "load_kw";
  }
  return "";
}

bool is_non_negative(Series s) {
  return s == Series::Irradiance || s == Series::WindSpeed || s == Series::Load;
}

void HourlySeries::validate() const {
  const std::size_t n = slots();
  for (Series s : kAllSeries) {
    const auto& v = (*this)[s];
    require(v.size() == n, ErrorKind::InvalidParameter,
            std::string("series ") + std::string(series_name(s)) + " has the wrong length");
    for (double x : v) {
      require(std::isfinite(x), ErrorKind::InvalidParameter,
              std::string("series ") + std::string(series_name(s)) + " has a non-finite value");
      if (is_non_negative(s))
        require(x >= 0.0, ErrorKind::InvalidParameter,
                std::string("series ") + std::string(series_name(s)) + " must be non-negative");
    }
  }
}

HourlySeries HourlySeries::filled(std::size_t slots,
                                  const std::array<double, kSeriesCount>& values) {
  HourlySeries h;
  for (std::size_t i = 0; i < kSeriesCount; ++i) h.data[i].assign(slots, values[i]);
  return h;
}

UncertaintySpec UncertaintySpec::scaled(double factor) const {
  UncertaintySpec out = *this;
  for (double& v : out.rel_std) v *= factor;
  return out;
}

void UncertaintySpec::validate() const {
  for (double v : rel_std)
    require(std::isfinite(v) && v >= 0.0, ErrorKind::InvalidParameter,
            "relative standard deviations must be non-negative");
}

double ScenarioSet::total_probability() const {
  double total = 0.0;
  for (const auto& s : scenarios) total += s.probability;
  return total;
}

void ScenarioSet::validate(double tol) const {
  require(!scenarios.empty(), ErrorKind::InvalidParameter, "scenario set is empty");
  const std::size_t n = slots();
  for (const auto& s : scenarios) {
    require(s.values.slots() == n, ErrorKind::InvalidParameter,
            "scenarios have different slot counts");
    require(s.probability > 0.0 && s.probability <= 1.0, ErrorKind::InvalidParameter,
            "scenario probability must lie in (0, 1]");
  }
  require(std::abs(total_probability() - 1.0) <= tol, ErrorKind::InvalidParameter,
          "scenario probabilities must sum to 1");
}

double ScenarioSet::expected(Series s, std::size_t slot) const {
  double e = 0.0;
  for (const auto& sc : scenarios) e += sc.probability * sc.values.at(s, slot);
  return e;
}

namespace {

std::array<double, kSeriesCount> scales_from(const std::array<double, kSeriesCount>& sums,
                                             double count) {
  std::array<double, kSeriesCount> scales{};
  for (std::size_t i = 0; i < kSeriesCount; ++i) {
    const double mean = count > 0 ? sums[i] / count : 0.0;
    scales[i] = mean > 0.0 ? mean : 1.0;
  }
  return scales;
}

}  // namespace

DistanceMetric DistanceMetric::from_forecast(const ForecastSeries& forecast,
                                             const std::array<double, kSeriesCount>& weights) {
  std::array<double, kSeriesCount> sums{};
  for (std::size_t i = 0; i < kSeriesCount; ++i)
    for (double v : forecast.data[i]) sums[i] += std::abs(v);
  DistanceMetric m;
  m.weights = weights;
  m.scales = scales_from(sums, static_cast<double>(forecast.slots()));
  return m;
}

DistanceMetric DistanceMetric::from_set(const ScenarioSet& set,
                                        const std::array<double, kSeriesCount>& weights) {
  std::array<double, kSeriesCount> sums{};
  for (const auto& sc : set.scenarios)
    for (std::size_t i = 0; i < kSeriesCount; ++i)
      for (double v : sc.values.data[i]) sums[i] += sc.probability * std::abs(v);
  DistanceMetric m;
  m.weights = weights;
  m.scales = scales_from(sums, static_cast<double>(set.slots()));
  return m;
}

std::uint64_t Rng::below(std::uint64_t n) {
  require(n > 0, ErrorKind::InvalidParameter, "Rng::below needs n > 0");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % n;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double inverse_normal_cdf(double p) {
  require(p > 0.0 && p < 1.0, ErrorKind::InvalidParameter,
          "inverse_normal_cdf needs p in (0, 1)");
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement.
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

std::vector<double> lhs_sample(std::size_t n, std::size_t dims, std::uint64_t seed) {
  require(n >= 1 && dims >= 1, ErrorKind::InvalidParameter, "lhs_sample needs n, dims >= 1");
  std::vector<double> out(n * dims);
  std::vector<std::size_t> perm(n);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t d = 0; d < dims; ++d) {
    Rng rng(mix_seed(seed, d));
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = (static_cast<double>(perm[i]) + rng.uniform_open()) * inv_n;
      out[i * dims + d] = std::min(u, std::nextafter(1.0, 0.0));
    }
  }
  return out;
}

ScenarioSet sample_scenarios(const ForecastSeries& forecast, const UncertaintySpec& spec,
                             std::size_t n, std::uint64_t seed) {
  require(n >= 1, ErrorKind::InvalidParameter, "sample_scenarios needs n >= 1");
  forecast.validate();
  spec.validate();
  const std::size_t slots = forecast.slots();
  require(slots >= 1, ErrorKind::InvalidParameter, "forecast has no slots");
  const std::size_t dims = kSeriesCount * slots;
  const std::vector<double> u = lhs_sample(n, dims, seed);

  ScenarioSet set;
  set.seed = seed;
  set.scenarios.resize(n);
  const double prob = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    Scenario& sc = set.scenarios[i];
    sc.id = i;
    sc.probability = prob;
    for (std::size_t k = 0; k < kSeriesCount; ++k) {
      const Series s = kAllSeries[k];
      auto& values = sc.values[s];
      values.resize(slots);
      for (std::size_t t = 0; t < slots; ++t) {
        const double mean = forecast.at(s, t);
        const double rel = spec[s];
        double v = mean;
        if (rel != 0.0) v = mean * (1.0 + rel * inverse_normal_cdf(u[i * dims + k * slots + t]));
        if (is_non_negative(s)) v = std::max(0.0, v);
        values[t] = v;
      }
    }
  }
  return set;
}

double scenario_distance(const Scenario& a, const Scenario& b, const DistanceMetric& metric) {
  require(a.values.slots() == b.values.slots(), ErrorKind::InvalidParameter,
          "scenario slot counts differ");
  double sum = 0.0;
  for (std::size_t k = 0; k < kSeriesCount; ++k) {
    const auto& x = a.values.data[k];
    const auto& y = b.values.data[k];
    double part = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
      const double diff = (x[t] - y[t]) / metric.scales[k];
      part += diff * diff;
    }
    sum += metric.weights[k] * part;
  }
  return std::sqrt(sum);
}

namespace {

std::vector<double> distance_matrix(const ScenarioSet& set, const DistanceMetric& metric) {
  const std::size_t n = set.size();
  const std::size_t slots = set.slots();
  const std::size_t width = kSeriesCount * slots;
  // Same arithmetic as scenario_distance, on one contiguous row per scenario.
  std::vector<double> flat(n * width);
  for (std::size_t i = 0; i < n; ++i) {
    require(set.scenarios[i].values.slots() == slots, ErrorKind::InvalidParameter,
            "scenario slot counts differ");
    for (std::size_t k = 0; k < kSeriesCount; ++k)
      std::copy(set.scenarios[i].values.data[k].begin(), set.scenarios[i].values.data[k].end(),
                flat.begin() + static_cast<std::ptrdiff_t>(i * width + k * slots));
  }
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* a = &flat[i * width];
    for (std::size_t j = i + 1; j < n; ++j) {
      const double* b = &flat[j * width];
      double sum = 0.0;
      for (std::size_t k = 0; k < kSeriesCount; ++k) {
        const double scale = metric.scales[k];
        double part = 0.0;
        for (std::size_t t = k * slots; t < (k + 1) * slots; ++t) {
          const double diff = (a[t] - b[t]) / scale;
          part += diff * diff;
        }
        sum += metric.weights[k] * part;
      }
      const double v = std::sqrt(sum);
      d[i * n + j] = v;
      d[j * n + i] = v;
    }
  }
  return d;
}

}  // namespace

FastForwardResult fast_forward(const ScenarioSet& set, std::size_t k,
                               const DistanceMetric& metric) {
  set.validate(1e-9);
  const std::size_t n = set.size();
  require(k >= 1 && k <= n, ErrorKind::InvalidParameter,
          "reduction target must satisfy 1 <= k <= |set|");

  // c[j * n + u]: distance from j to the nearest of (selected + {u}).
  std::vector<double> c = distance_matrix(set, metric);
  const std::vector<double> dist = c;
  std::vector<char> selected(n, 0);
  std::vector<std::size_t> order;
  order.reserve(k);

  // z[u]: probability-weighted cost of adding u, summed over unselected
  // rows in index order. Rows are walked contiguously; each round's min
  // update also accumulates the next round's sums.
  std::vector<double> z(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double p = set.scenarios[j].probability;
    const double* row = &c[j * n];
    for (std::size_t u = 0; u < n; ++u) z[u] += p * row[u];
  }
  for (std::size_t step = 0; step < k; ++step) {
    std::size_t best = n;
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t u = 0; u < n; ++u)
      if (!selected[u] && z[u] < best_value) {
        best_value = z[u];
        best = u;
      }
    selected[best] = 1;
    order.push_back(best);
    if (step + 1 == k) break;
    std::fill(z.begin(), z.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (selected[j]) continue;
      const double p = set.scenarios[j].probability;
      double* row = &c[j * n];
      const double via_best = row[best];
      for (std::size_t u = 0; u < n; ++u) {
        row[u] = std::min(row[u], via_best);
        z[u] += p * row[u];
      }
    }
  }

  std::vector<std::size_t> kept(order);
  std::sort(kept.begin(), kept.end());
  std::vector<double> prob(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    if (selected[j]) {
      prob[j] += set.scenarios[j].probability;
      continue;
    }
    std::size_t nearest = kept.front();
    for (std::size_t i : kept)
      if (dist[j * n + i] < dist[j * n + nearest]) nearest = i;
    prob[nearest] += set.scenarios[j].probability;
  }

  FastForwardResult result;
  result.selection_order = std::move(order);
  result.reduced.seed = set.seed;
  double total = 0.0;
  for (std::size_t i : kept) total += prob[i];
  for (std::size_t i : kept) {
    Scenario sc = set.scenarios[i];
    sc.probability = prob[i] / total;
    result.reduced.scenarios.push_back(std::move(sc));
  }
  return result;
}

ScenarioSet reduce_fast_forward(const ScenarioSet& set, std::size_t k,
                                const DistanceMetric& metric) {
  return fast_forward(set, k, metric).reduced;
}

double kantorovich_distance(const ScenarioSet& full, const ScenarioSet& reduced,
                            const DistanceMetric& metric) {
  require(!reduced.scenarios.empty(), ErrorKind::InvalidParameter, "reduced set is empty");
  double total = 0.0;
  for (const auto& j : full.scenarios) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& i : reduced.scenarios) best = std::min(best, scenario_distance(j, i, metric));
    total += j.probability * best;
  }
  return total;
}

}  // namespace gridsched::scenario
