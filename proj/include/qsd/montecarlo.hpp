#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "qsd/grid.hpp"
#include "qsd/logistic_kernel.hpp"

namespace qsd {

/// Stateless 64-bit hash of (seed, path, step, lane).
[[nodiscard]] std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t path,
                                         std::uint64_t step, std::uint64_t lane = 0);
/// Uniform double in [0,1) from the top 53 bits of counter_hash.
[[nodiscard]] double counter_uniform(std::uint64_t seed, std::uint64_t path,
                                     std::uint64_t step, std::uint64_t lane = 0);

using StartSpec = std::variant<double, Density>;

struct SimConfig {
  LogisticParams params;
  std::uint64_t n_paths = 1;
  int horizon = 1;
  std::uint64_t seed = 0;
  StartSpec start = 0.5;
  std::size_t n_bins = 100;
  /// Draw the multiplier from this range instead of [a,b]; allows b <= 4 probes.
  std::optional<std::pair<double, double>> noise_override;
};

struct SurvivalStats {
  std::uint64_t n_paths = 0;
  int horizon = 0;
  std::vector<std::uint64_t> survivors_by_step;  // index n = paths with X_1..X_n in [0,1]
  std::vector<std::uint64_t> terminal_counts;    // bins of X_horizon among survivors
  std::vector<double> conditional_histogram;     // terminal_counts / survivors
  double time_average_mean = 0.0;  // mean over survivors of (1/horizon) sum_{i<horizon} h(X_i)
  double time_average_stderr = 0.0;
};

/// Deterministic for fixed config regardless of thread count: paths are processed in
/// fixed-size chunks whose partial sums are combined in chunk order.
[[nodiscard]] SurvivalStats simulate(const SimConfig& config, const RealFunction& observable);

struct RateEstimate {
  double lambda_hat = 0.0;
  double stderr = 0.0;
};

/// Geometric mean of S_{k+1}/S_k for k in [first, last), with delta-method standard error
/// lambda_hat * sqrt(sum_k (1 - r_k) / S_{k+1}) / (last - first).
[[nodiscard]] RateEstimate estimate_survival_rate(const SurvivalStats& stats, int first,
                                                  int last);

/// Total-variation distance between the conditional histogram and the reference density
/// aggregated over the same bins. The grid size must be a multiple of the bin count.
[[nodiscard]] double yaglom_distance(const SurvivalStats& stats, const Density& reference);

/// survivors.csv (n, survivors), histogram.csv (bin_lo, bin_hi, mass).
void write_stats(const SurvivalStats& stats, const std::filesystem::path& survivors_csv,
                 const std::filesystem::path& histogram_csv);

}  // namespace qsd
