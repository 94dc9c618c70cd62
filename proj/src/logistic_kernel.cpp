#include "qsd/logistic_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qsd/errors.hpp"

namespace qsd {

namespace {

constexpr unsigned kQuadDepth = 15;
constexpr double kQuadTol = 1e-12;

void require_unit(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) throw ArgumentError(std::string(what) + " outside [0,1]");
}

double checked(double v) {
  if (!std::isfinite(v)) throw NumericError("non-finite integrand value");
  return v;
}

template <class F>
double integrate(F&& f, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, kQuadDepth,
                                                                        kQuadTol);
}

double logistic(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double logit(UnitPoint p) { return std::log(p.value / p.complement); }

const UnitPoint& lower_max(const UnitPoint& l, const UnitPoint& r) {
  return l.value >= r.value ? l : r;
}
const UnitPoint& upper_min(const UnitPoint& l, const UnitPoint& r) {
  return l.value <= r.value ? l : r;
}

// atanh(sqrt(1 - r)) = this - ln(r)/2.
double atanh_sqrt_regular(double r) { return std::log1p(std::sqrt(std::max(0.0, 1.0 - r))); }

void add_band(const Grid& grid, UnitPoint lo, UnitPoint hi, const UnitInterval& clip,
              double scale, std::span<double> out) {
  lo = lower_max(lo, clip.lo);
  hi = upper_min(hi, clip.hi);
  if (!(hi.value > lo.value)) return;
  const std::size_t k0 = grid.cell_of(lo.value);
  const std::size_t k1 = grid.cell_of(hi.value);
  for (std::size_t k = k0; k <= k1; ++k) {
    const UnitPoint left = grid.edge_point(k);
    const UnitPoint right = grid.edge_point(k + 1);
    out[k] += scale * log_weight(lower_max(lo, left), upper_min(hi, right));
  }
}

}  // namespace

LogisticParams::LogisticParams(double a, double b) : a_(a), b_(b) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(a > 0.0) || !(a < 4.0) || !(b > 4.0)) {
    throw ArgumentError("logistic parameters need 0 < a < 4 < b");
  }
}

BoundaryMaps boundary_maps(const LogisticParams& p, double x) {
  require_unit(x, "x");
  const double s = std::sqrt(1.0 - 4.0 * x / p.b());
  const double am = 2.0 * x / (p.b() * (1.0 + s));
  const double ap = 0.5 * (1.0 + s);
  const double xm = std::min(x, p.kink());
  const double t = std::sqrt(std::max(0.0, 1.0 - 4.0 * xm / p.a()));
  const double bm = 2.0 * xm / (p.a() * (1.0 + t));
  const double bp = 0.5 * (1.0 + t);
  return {{am, ap}, {ap, am}, {bm, bp}, {bp, bm}};
}

double log_weight(UnitPoint lo, UnitPoint hi) {
  if (!(hi.value > lo.value)) return 0.0;
  if (lo.value <= 0.0 || hi.complement <= 0.0) return HUGE_VAL;
  return std::log1p((hi.value - lo.value) / lo.value) +
         std::log1p((lo.complement - hi.complement) / hi.complement);
}

double kernel_density(const LogisticParams& p, double x, double y) {
  require_unit(x, "x");
  require_unit(y, "y");
  if (x == 0.0 || x == 1.0) {
    throw DomainError("kernel density is singular at x in {0,1}; the chain sits at 0 there");
  }
  const double u = x * (1.0 - x);
  if (y < p.a() * u || y > p.b() * u) return 0.0;
  return 1.0 / (p.width() * u);
}

double survival_probability(const LogisticParams& p, double x) {
  require_unit(x, "x");
  if (x == 0.0 || x == 1.0) return 1.0;
  const double u = x * (1.0 - x);
  if (p.b() * u <= 1.0) return 1.0;
  return (1.0 - p.a() * u) / (p.width() * u);
}

double apply_forward(const LogisticParams& p, const RealFunction& f, double x) {
  require_unit(x, "x");
  if (x == 0.0 || x == 1.0) return checked(f(0.0));
  const double u = x * (1.0 - x);
  const double lo = p.a() * u;
  const double hi = std::min(p.b() * u, 1.0);
  const double s = integrate([&](double y) { return checked(f(y)); }, lo, hi);
  return s / (p.width() * u);
}

double apply_forward(const LogisticParams& p, const Density& f, double x) {
  require_unit(x, "x");
  if (x == 0.0 || x == 1.0) return f[0];
  std::vector<double> row(f.size(), 0.0);
  forward_cell_weights(p, f.grid(), x, UnitInterval{}, row);
  double s = 0.0;
  for (std::size_t k = 0; k < row.size(); ++k) s += row[k] * f[k];
  return s;
}

double apply_transfer(const LogisticParams& p, const RealFunction& g, double x) {
  require_unit(x, "x");
  if (x == 0.0) {
    return std::log(p.b() / p.a()) / p.width() * (checked(g(0.0)) + checked(g(1.0)));
  }
  const BoundaryMaps m = boundary_maps(p, x);
  auto h = [&](double t) { return checked(g(logistic(t))); };
  const double s = integrate(h, logit(m.alpha_minus), logit(m.beta_minus)) +
                   integrate(h, logit(m.beta_plus), logit(m.alpha_plus));
  return s / p.width();
}

double apply_transfer(const LogisticParams& p, const Density& g, double x) {
  require_unit(x, "x");
  if (x == 0.0) return std::log(p.b() / p.a()) / p.width() * (g[0] + g[g.size() - 1]);
  std::vector<double> row(g.size(), 0.0);
  transfer_cell_weights(p, g.grid(), x, UnitInterval{}, row);
  double s = 0.0;
  for (std::size_t k = 0; k < row.size(); ++k) s += row[k] * g[k];
  return s;
}

double transfer_of_one(const LogisticParams& p, double x) {
  require_unit(x, "x");
  const double c = 4.0 / p.width();
  if (x == 0.0) return 2.0 * std::log(p.b() / p.a()) / p.width();
  const double rb = 4.0 * x / p.b();
  if (x < p.kink()) {
    const double ra = 4.0 * x / p.a();
    return c * (atanh_sqrt_regular(rb) - atanh_sqrt_regular(ra) + 0.5 * std::log(p.b() / p.a()));
  }
  return c * (atanh_sqrt_regular(rb) - 0.5 * std::log(rb));
}

double transfer_sup(const LogisticParams& p) {
  return 4.0 / p.width() * std::atanh(std::sqrt(1.0 - p.a() / p.b()));
}

void forward_cell_weights(const LogisticParams& p, const Grid& grid, double x,
                          const UnitInterval& clip, std::span<double> out) {
  if (!(x > 0.0 && x < 1.0)) throw DomainError("forward row needs x in (0,1)");
  if (out.size() != grid.size()) throw ArgumentError("row buffer size does not match grid");
  std::fill(out.begin(), out.end(), 0.0);
  const double u = x * (1.0 - x);
  const double lo = std::max(p.a() * u, clip.lo.value);
  const double hi = std::min({p.b() * u, 1.0, clip.hi.value});
  if (!(hi > lo)) return;
  const double norm = p.width() * u;
  const std::size_t k0 = grid.cell_of(lo);
  const std::size_t k1 = grid.cell_of(hi);
  for (std::size_t k = k0; k <= k1; ++k) {
    const double w = std::min(grid.edge(k + 1), hi) - std::max(grid.edge(k), lo);
    if (w > 0.0) out[k] = w / norm;
  }
}

void transfer_cell_weights(const LogisticParams& p, const Grid& grid, double x,
                           const UnitInterval& clip, std::span<double> out) {
  if (!(x > 0.0 && x <= 1.0)) throw DomainError("transfer row needs x in (0,1]");
  if (out.size() != grid.size()) throw ArgumentError("row buffer size does not match grid");
  std::fill(out.begin(), out.end(), 0.0);
  const BoundaryMaps m = boundary_maps(p, x);
  const double scale = 1.0 / p.width();
  add_band(grid, m.alpha_minus, m.beta_minus, clip, scale, out);
  add_band(grid, m.beta_plus, m.alpha_plus, clip, scale, out);
}

}  // namespace qsd
