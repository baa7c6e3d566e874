#pragma once

// Monte-Carlo scenarios for the six uncertain hourly series and greedy
// fast-forward reduction under a transport (Kantorovich) distance.

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace gridsched::scenario {

enum class Series : std::size_t {
  PriceDa = 0,
  PriceRt = 1,
  Ambient = 2,
  Irradiance = 3,
  WindSpeed = 4,
  Load = 5,
};

inline constexpr std::size_t kSeriesCount = 6;

inline constexpr std::array<Series, kSeriesCount> kAllSeries = {
    Series::PriceDa, Series::PriceRt, Series::Ambient,
    Series::Irradiance, Series::WindSpeed, Series::Load};

/// Column name used in CSV files.
std::string_view series_name(Series s);

/// Irradiance, wind speed and load cannot be negative.
bool is_non_negative(Series s);

/// Six equally long hourly series. Units: $/kWh, $/kWh, degC, kW/m^2, m/s, kW.
struct HourlySeries {
  std::array<std::vector<double>, kSeriesCount> data;

  std::size_t slots() const { return data[0].size(); }
  std::vector<double>& operator[](Series s) { return data[static_cast<std::size_t>(s)]; }
  const std::vector<double>& operator[](Series s) const {
    return data[static_cast<std::size_t>(s)];
  }
  double at(Series s, std::size_t slot) const { return (*this)[s][slot]; }

  /// Equal lengths and non-negativity of physical series.
  void validate() const;
  static HourlySeries filled(std::size_t slots, const std::array<double, kSeriesCount>& values);
};

using ForecastSeries = HourlySeries;

/// Relative standard deviation per series, indexed by Series.
struct UncertaintySpec {
  std::array<double, kSeriesCount> rel_std = {0.05, 0.15, 0.05, 0.10, 0.10, 0.03};

  double& operator[](Series s) { return rel_std[static_cast<std::size_t>(s)]; }
  double operator[](Series s) const { return rel_std[static_cast<std::size_t>(s)]; }
  UncertaintySpec scaled(double factor) const;
  void validate() const;
};

struct Scenario {
  std::size_t id = 0;  ///< index in the originally generated set
  HourlySeries values;
  double probability = 0.0;
};

struct ScenarioSet {
  std::vector<Scenario> scenarios;
  std::uint64_t seed = 0;

  std::size_t size() const { return scenarios.size(); }
  std::size_t slots() const { return scenarios.empty() ? 0 : scenarios.front().values.slots(); }
  double total_probability() const;
  /// Non-empty, consistent slot counts, probabilities in (0, 1] summing to 1.
  void validate(double tol = 1e-12) const;
  /// Probability-weighted mean of one series at one slot.
  double expected(Series s, std::size_t slot) const;
};

/// Scenario distance: weighted Euclidean norm over all (series, slot)
/// differences, each series divided by its scale first.
struct DistanceMetric {
  std::array<double, kSeriesCount> weights = {1, 1, 1, 1, 1, 1};
  std::array<double, kSeriesCount> scales = {1, 1, 1, 1, 1, 1};

  /// Scales are the mean absolute forecast value of each series (1 if zero).
  static DistanceMetric from_forecast(const ForecastSeries& forecast,
                                      const std::array<double, kSeriesCount>& weights = {
                                          1, 1, 1, 1, 1, 1});
  /// Same, using the probability-weighted mean of a scenario set.
  static DistanceMetric from_set(const ScenarioSet& set,
                                 const std::array<double, kSeriesCount>& weights = {
                                     1, 1, 1, 1, 1, 1});
};

/// 64-bit Mersenne Twister (std::mt19937_64, whose output sequence is fixed
/// by the C++ standard). Floating point and integer draws are derived by
/// hand so results do not depend on the standard library's distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  /// Uniform in (0, 1): the 53-bit grid shifted by half a step.
  double uniform_open() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }
  /// Uniform integer in [0, n) by rejection sampling.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; derives independent substream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Standard normal quantile: Acklam's rational approximation refined by one
/// Halley step against std::erfc (absolute error well below 1e-12).
double inverse_normal_cdf(double p);

/// Latin hypercube sample, row-major n x dims. Column d is drawn from the
/// substream mix_seed(seed, d): a Fisher-Yates permutation of the strata
/// followed by one uniform offset per row.
std::vector<double> lhs_sample(std::size_t n, std::size_t dims, std::uint64_t seed);

/// value = forecast * (1 + rel_std * z), z the normal quantile of an LHS
/// coordinate. Column index of (series, slot) is series * slots + slot.
ScenarioSet sample_scenarios(const ForecastSeries& forecast, const UncertaintySpec& spec,
                             std::size_t n, std::uint64_t seed);

double scenario_distance(const Scenario& a, const Scenario& b, const DistanceMetric& metric);

struct FastForwardResult {
  ScenarioSet reduced;                        ///< kept scenarios, ascending id
  std::vector<std::size_t> selection_order;   ///< positions in the input set
};

/// Greedy forward selection followed by redistribution of every removed
/// scenario's probability to its nearest kept scenario. Ties resolve to the
/// lowest position.
FastForwardResult fast_forward(const ScenarioSet& set, std::size_t k,
                               const DistanceMetric& metric);

ScenarioSet reduce_fast_forward(const ScenarioSet& set, std::size_t k,
                                const DistanceMetric& metric);

/// sum_j p_j min_i d(full_j, reduced_i).
double kantorovich_distance(const ScenarioSet& full, const ScenarioSet& reduced,
                            const DistanceMetric& metric);

}  // namespace gridsched::scenario
