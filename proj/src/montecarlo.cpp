#include "qsd/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qsd/errors.hpp"
#include "qsd/io.hpp"

namespace qsd {

namespace {

constexpr std::uint64_t kChunk = 4096;
constexpr std::uint64_t kStartLane = 1;

std::uint64_t mix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct Partial {
  std::vector<std::uint64_t> survivors;
  std::vector<std::uint64_t> bins;
  double sum = 0.0;
  double sumsq = 0.0;
};

double draw_start(const SimConfig& c, const std::vector<double>& cdf, std::uint64_t path) {
  if (const double* x = std::get_if<double>(&c.start)) return *x;
  const Density& d = std::get<Density>(c.start);
  const double u = counter_uniform(c.seed, path, 0, kStartLane);
  const auto k = static_cast<std::size_t>(
      std::min<std::ptrdiff_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin(),
                               static_cast<std::ptrdiff_t>(cdf.size()) - 1));
  const double v = counter_uniform(c.seed, path, 1, kStartLane);
  return d.grid().edge(k) + v * d.grid().weight();
}

}  // namespace

std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t path, std::uint64_t step,
                           std::uint64_t lane) {
  return mix(mix(mix(mix(seed) ^ path) ^ step) ^ lane);
}

double counter_uniform(std::uint64_t seed, std::uint64_t path, std::uint64_t step,
                       std::uint64_t lane) {
  return static_cast<double>(counter_hash(seed, path, step, lane) >> 11) * 0x1.0p-53;
}

SurvivalStats simulate(const SimConfig& c, const RealFunction& observable) {
  if (c.n_paths < 1) throw ArgumentError("need at least one path");
  if (c.horizon < 1) throw ArgumentError("horizon must be at least 1");
  if (c.n_bins < 1) throw ArgumentError("need at least one histogram bin");
  double lo = c.params.a();
  double hi = c.params.b();
  if (c.noise_override) {
    std::tie(lo, hi) = *c.noise_override;
    if (!(lo > 0.0 && hi > lo && std::isfinite(hi))) throw ArgumentError("invalid noise range");
  }
  std::vector<double> cdf;
  if (const double* x = std::get_if<double>(&c.start)) {
    if (!(*x > 0.0 && *x < 1.0)) throw ArgumentError("start point must lie in (0,1)");
  } else {
    const Density d = std::get<Density>(c.start).normalized();
    cdf = cumulative(d);
  }

  const int horizon = c.horizon;
  const std::size_t nb = c.n_bins;
  const std::uint64_t chunks = (c.n_paths + kChunk - 1) / kChunk;
  std::vector<Partial> parts(chunks);
  const auto nchunks = static_cast<std::int64_t>(chunks);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t ci = 0; ci < nchunks; ++ci) {
    Partial& part = parts[static_cast<std::size_t>(ci)];
    part.survivors.assign(static_cast<std::size_t>(horizon) + 1, 0);
    part.bins.assign(nb, 0);
    const std::uint64_t begin = static_cast<std::uint64_t>(ci) * kChunk;
    const std::uint64_t end = std::min(c.n_paths, begin + kChunk);
    for (std::uint64_t path = begin; path < end; ++path) {
      double x = draw_start(c, cdf, path);
      double acc = 0.0;
      ++part.survivors[0];
      bool alive = true;
      for (int n = 0; n < horizon; ++n) {
        acc += observable(x);
        const double w = lo + (hi - lo) * counter_uniform(c.seed, path, static_cast<std::uint64_t>(n));
        x = w * (x * (1.0 - x));
        if (!(x >= 0.0 && x <= 1.0)) {
          alive = false;
          break;
        }
        ++part.survivors[static_cast<std::size_t>(n) + 1];
      }
      if (!alive) continue;
      const double avg = acc / horizon;
      part.sum += avg;
      part.sumsq += avg * avg;
      ++part.bins[std::min(static_cast<std::size_t>(x * static_cast<double>(nb)), nb - 1)];
    }
  }

  SurvivalStats s;
  s.n_paths = c.n_paths;
  s.horizon = horizon;
  s.survivors_by_step.assign(static_cast<std::size_t>(horizon) + 1, 0);
  s.terminal_counts.assign(nb, 0);
  double sum = 0.0;
  double sumsq = 0.0;
  for (const Partial& p : parts) {
    for (std::size_t n = 0; n < p.survivors.size(); ++n) s.survivors_by_step[n] += p.survivors[n];
    for (std::size_t b = 0; b < nb; ++b) s.terminal_counts[b] += p.bins[b];
    sum += p.sum;
    sumsq += p.sumsq;
  }
  const std::uint64_t alive = s.survivors_by_step.back();
  s.conditional_histogram.assign(nb, 0.0);
  if (alive > 0) {
    const auto na = static_cast<double>(alive);
    for (std::size_t b = 0; b < nb; ++b) s.conditional_histogram[b] = s.terminal_counts[b] / na;
    s.time_average_mean = sum / na;
    const double var = alive > 1 ? std::max(0.0, (sumsq - sum * sum / na) / (na - 1)) : 0.0;
    s.time_average_stderr = std::sqrt(var / na);
  } else {
    s.time_average_mean = std::nan("");
    s.time_average_stderr = std::nan("");
  }
  return s;
}

RateEstimate estimate_survival_rate(const SurvivalStats& s, int first, int last) {
  if (first < 0 || last <= first || last > s.horizon) {
    throw ArgumentError("window must satisfy 0 <= first < last <= horizon");
  }
  double var = 0.0;
  for (int k = first; k < last; ++k) {
    const auto sk = s.survivors_by_step[static_cast<std::size_t>(k)];
    const auto sk1 = s.survivors_by_step[static_cast<std::size_t>(k) + 1];
    if (sk == 0 || sk1 == 0) throw InsufficientSurvivorsError("no survivors inside the window");
    const double r = static_cast<double>(sk1) / static_cast<double>(sk);
    var += (1.0 - r) / static_cast<double>(sk1);
  }
  const double len = last - first;
  const double ratio = static_cast<double>(s.survivors_by_step[static_cast<std::size_t>(last)]) /
                       static_cast<double>(s.survivors_by_step[static_cast<std::size_t>(first)]);
  const double lambda = std::pow(ratio, 1.0 / len);
  return {lambda, lambda * std::sqrt(var) / len};
}

double yaglom_distance(const SurvivalStats& s, const Density& reference) {
  const std::size_t nb = s.conditional_histogram.size();
  if (nb == 0 || s.survivors_by_step.empty() || s.survivors_by_step.back() == 0) {
    throw InsufficientSurvivorsError("histogram is empty");
  }
  const std::size_t n = reference.size();
  if (n % nb != 0) throw ArgumentError("grid cells must refine the histogram bins");
  const Density ref = reference.normalized();
  const std::size_t per = n / nb;
  double tv = 0.0;
  for (std::size_t b = 0; b < nb; ++b) {
    double mass = 0.0;
    for (std::size_t k = b * per; k < (b + 1) * per; ++k) mass += ref[k];
    tv += std::abs(s.conditional_histogram[b] - mass * ref.grid().weight());
  }
  return 0.5 * tv;
}

void write_stats(const SurvivalStats& s, const std::filesystem::path& survivors_csv,
                 const std::filesystem::path& histogram_csv) {
  std::string a = "n,survivors\n";
  for (std::size_t n = 0; n < s.survivors_by_step.size(); ++n) {
    a += std::to_string(n) + ',' + std::to_string(s.survivors_by_step[n]) + '\n';
  }
  write_text(survivors_csv, a);
  std::string h = "bin_lo,bin_hi,count,mass\n";
  const std::size_t nb = s.conditional_histogram.size();
  for (std::size_t b = 0; b < nb; ++b) {
    h += format_double(static_cast<double>(b) / nb) + ',' + format_double(static_cast<double>(b + 1) / nb) +
         ',' + std::to_string(s.terminal_counts[b]) + ',' + format_double(s.conditional_histogram[b]) + '\n';
  }
  write_text(histogram_csv, h);
}

}  // namespace qsd
