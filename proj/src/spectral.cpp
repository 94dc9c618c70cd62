#include "qsd/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <string>

#include "qsd/errors.hpp"
#include "qsd/io.hpp"

namespace qsd {

namespace {

double l1(const Grid& grid, std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s * grid.weight();
}

double l1_diff(const Grid& grid, std::span<const double> u, std::span<const double> v,
               double c) {
  double s = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) s += std::abs(u[j] - c * v[j]);
  return s * grid.weight();
}

void require_forward(const DiscreteOperator& op) {
  if (op.kind() != OperatorKind::forward) throw ArgumentError("a forward operator is required");
}

void require_size(const DiscreteOperator& op, std::span<const double> h) {
  if (h.size() != op.size()) throw ArgumentError("observable size does not match grid");
}

std::size_t probe_cell(const Grid& grid, double x) {
  if (!(x > 0.0 && x < 1.0)) throw ArgumentError("probe point must lie in (0,1)");
  return grid.cell_of(x);
}

// Strongly connected components (iterative Tarjan). Returns component id per node.
std::vector<int> scc(const std::vector<std::vector<int>>& adj, int& count) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1), stack;
  std::vector<bool> on_stack(n, false);
  std::vector<std::pair<int, std::size_t>> call;
  int next = 0;
  count = 0;
  for (int root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    call.emplace_back(root, 0);
    index[root] = low[root] = next++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      auto& [v, it] = call.back();
      if (it < adj[v].size()) {
        const int w = adj[v][it++];
        if (index[w] < 0) {
          index[w] = low[w] = next++;
          stack.push_back(w);
          on_stack[w] = true;
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const int done = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
      if (low[done] == index[done]) {
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = count;
        } while (w != done);
        ++count;
      }
    }
  }
  return comp;
}

int mod(int a, int m) { return ((a % m) + m) % m; }

}  // namespace

double weighted_l1(const Density& g, std::span<const double> v) {
  if (v.size() != g.size()) throw ArgumentError("weighted norm: size mismatch");
  double s = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) s += std::abs(v[j]) * g[j];
  return s * g.grid().weight();
}

double monotone_structure_violation(const Density& g, const LogisticParams& p) {
  const Grid& grid = g.grid();
  double top = 0.0;
  for (double v : g.values()) top = std::max(top, v);
  if (!(top > 0.0)) throw ArgumentError("structure check needs a nonzero density");
  double worst = 0.0;
  for (std::size_t j = 0; j + 1 < g.size(); ++j) {
    const double x0 = grid.node(j);
    const double x1 = grid.node(j + 1);
    if (x1 <= p.monotone_breakpoint()) worst = std::max(worst, g[j] - g[j + 1]);
    if (x0 >= p.kink()) worst = std::max(worst, g[j + 1] - g[j]);
  }
  return worst / top;
}

EigenPair leading_eigenpair(const DiscreteOperator& op, double tol, int max_iter,
                            std::optional<std::span<const double>> init) {
  if (!(tol > 0.0) || max_iter < 1) throw ArgumentError("tol and max_iter must be positive");
  const Grid& grid = op.grid();
  std::vector<double> v(op.size(), 1.0);
  if (init) {
    require_size(op, *init);
    v.assign(init->begin(), init->end());
  }
  double mass = l1(grid, v);
  if (!(mass > 0.0)) throw ArgumentError("initial vector must have positive mass");
  for (double& x : v) x /= mass;
  std::vector<double> w(op.size());
  double residual = HUGE_VAL;
  for (int it = 1; it <= max_iter; ++it) {
    op.apply(v, w);
    const double lambda = l1(grid, w);
    if (!(lambda > 0.0)) throw DegenerateOperatorError("operator annihilates the iterate");
    residual = l1_diff(grid, w, v, lambda);
    if (residual < tol && residual / lambda < tol) {
      return {lambda, Density(grid, v), it, residual};
    }
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = w[j] / lambda;
  }
  throw ConvergenceError("power iteration did not converge", residual, max_iter);
}

EtaResult compute_eta(const DiscreteOperator& forward, double lambda, const Density& g,
                      double tol, int max_iter) {
  require_forward(forward);
  if (!(g.grid() == forward.grid())) throw ArgumentError("compute_eta: grid mismatch");
  if (!(lambda > 0.0)) throw ArgumentError("compute_eta: lambda must be positive");
  std::vector<double> v(forward.size(), 1.0);
  double norm = weighted_l1(g, v);
  for (double& x : v) x /= norm;
  std::vector<double> w(v.size());
  double residual = HUGE_VAL;
  for (int it = 1; it <= max_iter; ++it) {
    forward.apply(v, w);
    double r = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) r += std::abs(w[j] - lambda * v[j]) * g[j];
    residual = r * g.grid().weight();
    norm = weighted_l1(g, w);
    if (!(norm > 0.0)) throw DegenerateOperatorError("forward operator annihilates the iterate");
    if (residual < tol && residual / lambda < tol) {
      for (double x : v) {
        if (!(x > 0.0)) throw PositivityError("eigenfunction has a nonpositive entry");
      }
      return {Density(g.grid(), v), it, residual};
    }
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = w[j] / norm;
  }
  throw ConvergenceError("eigenfunction iteration did not converge", residual, max_iter);
}

CyclicDecomposition period_and_classes(const DiscreteOperator& op, double support_threshold) {
  const int n = static_cast<int>(op.size());
  std::vector<std::vector<int>> adj(n), radj(n);
  bool any = false;
  for (int j = 0; j < n; ++j) {
    const auto row = op.row(j);
    for (int k = 0; k < n; ++k) {
      if (row[k] > support_threshold) {
        adj[j].push_back(k);
        radj[k].push_back(j);
        any = true;
      }
    }
  }
  if (!any) throw DegenerateOperatorError("support graph is empty");
  int count = 0;
  const auto comp = scc(adj, count);
  std::vector<int> size(count, 0);
  for (int c : comp) ++size[c];
  const int core = static_cast<int>(std::max_element(size.begin(), size.end()) - size.begin());

  CyclicDecomposition out;
  out.in_core.assign(n, false);
  int root = -1;
  for (int j = 0; j < n; ++j) {
    if (comp[j] == core) {
      out.in_core[j] = true;
      if (root < 0) root = j;
    }
  }
  std::vector<int> level(n, -1);
  std::deque<int> queue{root};
  level[root] = 0;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (int v : adj[u]) {
      if (out.in_core[v] && level[v] < 0) {
        level[v] = level[u] + 1;
        queue.push_back(v);
      }
    }
  }
  int m = 0;
  bool internal_edge = false;
  for (int u = 0; u < n; ++u) {
    if (!out.in_core[u]) continue;
    for (int v : adj[u]) {
      if (!out.in_core[v]) continue;
      internal_edge = true;
      m = std::gcd(m, std::abs(level[u] + 1 - level[v]));
    }
  }
  if (!internal_edge) throw DegenerateOperatorError("support graph has no cycle");
  out.period = m;

  out.class_of.assign(n, -1);
  for (int j = 0; j < n; ++j) {
    if (out.in_core[j]) out.class_of[j] = level[j] % m;
  }
  // multi-source BFS outward from the core along reversed edges: u reaches the core in d steps
  auto spread = [&](const std::vector<std::vector<int>>& edges, int sign) {
    std::vector<int> dist(n, -1);
    std::vector<int> source_class(n, 0);
    std::deque<int> q;
    for (int j = 0; j < n; ++j) {
      if (out.in_core[j]) {
        dist[j] = 0;
        source_class[j] = out.class_of[j];
        q.push_back(j);
      }
    }
    while (!q.empty()) {
      const int u = q.front();
      q.pop_front();
      for (int v : edges[u]) {
        if (dist[v] >= 0) continue;
        dist[v] = dist[u] + 1;
        source_class[v] = source_class[u];
        q.push_back(v);
        if (out.class_of[v] < 0) out.class_of[v] = mod(source_class[v] + sign * dist[v], m);
      }
    }
  };
  spread(radj, -1);
  spread(adj, +1);
  for (int& c : out.class_of) {
    if (c < 0) c = 0;
  }
  return out;
}

SpectralResult solve(const DiscreteOperator& forward, const DiscreteOperator& transfer,
                     const SolveOptions& opt) {
  require_forward(forward);
  if (transfer.kind() != OperatorKind::transfer) throw ArgumentError("a transfer operator is required");
  if (!(forward.grid() == transfer.grid())) throw ArgumentError("solve: grid mismatch");
  const auto cyc = period_and_classes(forward, opt.support_threshold);
  const EigenPair lg = leading_eigenpair(transfer, opt.tol, opt.max_iter);
  const EigenPair lp = leading_eigenpair(forward, opt.tol, opt.max_iter);
  const EtaResult eta = compute_eta(forward, lp.lambda, lg.vector, opt.tol, opt.max_iter);

  std::vector<double> nu(forward.size());
  for (std::size_t j = 0; j < nu.size(); ++j) nu[j] = eta.eta[j] * lg.vector[j];
  const Density nu_d = Density(forward.grid(), std::move(nu)).normalized();

  // contraction rate of the transfer iteration from a perturbed start: geometric mean of
  // successive residual ratios until the residual nears the solver tolerance
  double gap = 0.0;
  {
    const Grid& grid = transfer.grid();
    std::vector<double> v(transfer.size());
    for (std::size_t j = 0; j < v.size(); ++j) {
      v[j] = lg.vector[j] * (1.0 + 0.5 * std::cos(3.0 * grid.node(j)));
    }
    std::vector<double> w(v.size());
    double first = 0.0;
    for (int it = 0; it < 200; ++it) {
      const double m = l1(grid, v);
      for (double& x : v) x /= m;
      transfer.apply(v, w);
      const double r = l1_diff(grid, w, v, lg.lambda) / lg.lambda;
      if (it == 1) first = r;
      if (it > 1 && first > 0.0) {
        if (r < 1e3 * opt.tol) break;
        gap = std::pow(r / first, 1.0 / (it - 1));
      }
      v.swap(w);
    }
  }

  return SpectralResult{lg.lambda,
                        lp.lambda,
                        lg.vector,
                        eta.eta,
                        nu_d,
                        lg.iterations + lp.iterations + eta.iterations,
                        std::max(lg.residual, eta.residual),
                        lg.residual,
                        eta.residual,
                        gap,
                        cyc.period};
}

SpectralResult solve(const LogisticParams& p, const Grid& grid, const SolveOptions& opt) {
  return solve(assemble_forward(p, grid), assemble_transfer(p, grid), opt);
}

double conditioned_time_average(const DiscreteOperator& forward, double lambda,
                                std::span<const double> h, int n, double x) {
  require_forward(forward);
  require_size(forward, h);
  if (n < 1) throw ArgumentError("horizon must be at least 1");
  if (!(lambda > 0.0)) throw ArgumentError("lambda must be positive");
  const std::size_t j = probe_cell(forward.grid(), x);
  const std::size_t size = forward.size();
  std::vector<double> r(size), acc(size), tmp(size);
  forward.apply(std::vector<double>(size, 1.0), r);
  for (double& v : r) v /= lambda;
  for (std::size_t k = 0; k < size; ++k) acc[k] = h[k] * r[k];
  for (int step = 2; step <= n; ++step) {
    forward.apply(r, tmp);
    for (std::size_t k = 0; k < size; ++k) r[k] = tmp[k] / lambda;
    forward.apply(acc, tmp);
    for (std::size_t k = 0; k < size; ++k) acc[k] = tmp[k] / lambda + h[k] * r[k];
  }
  if (!(r[j] > 0.0) || !std::isfinite(r[j])) {
    throw UnderflowError("survival weight underflowed at the probe cell");
  }
  return acc[j] / (static_cast<double>(n) * r[j]);
}

double yaglom_ratio(const DiscreteOperator& forward, std::span<const double> h, int n, double x) {
  require_forward(forward);
  require_size(forward, h);
  if (n < 0) throw ArgumentError("horizon must be nonnegative");
  const std::size_t j = probe_cell(forward.grid(), x);
  if (n == 0) return h[j];
  const std::size_t size = forward.size();
  std::vector<double> v(h.begin(), h.end()), r(size, 1.0), tv(size), tr(size);
  for (int step = 0; step < n; ++step) {
    forward.apply(v, tv);
    forward.apply(r, tr);
    const double scale = l1(forward.grid(), tr);
    if (!(scale > 0.0)) throw UnderflowError("survival weight vanished");
    for (std::size_t k = 0; k < size; ++k) {
      v[k] = tv[k] / scale;
      r[k] = tr[k] / scale;
    }
  }
  if (!(r[j] > 0.0)) throw UnderflowError("survival weight underflowed at the probe cell");
  return v[j] / r[j];
}

namespace {

template <class Step>
std::vector<double> profile(const DiscreteOperator& forward, const SpectralResult& s,
                            std::span<const double> h, std::span<const int> n_list, Step step) {
  require_forward(forward);
  require_size(forward, h);
  if (s.period != 1) throw ArgumentError("convergence profiles need period 1");
  if (!(s.g.grid() == forward.grid())) throw ArgumentError("profile: grid mismatch");
  const double mean = grid_inner(forward.grid(), h, s.g.values());
  std::vector<int> order(n_list.begin(), n_list.end());
  for (int n : order) {
    if (n < 0) throw ArgumentError("profile horizons must be nonnegative");
  }
  std::sort(order.begin(), order.end());
  std::vector<double> at_sorted;
  std::vector<double> diff(forward.size());
  step.reset(h);
  int done = 0;
  for (int n : order) {
    while (done < n) {
      step.advance();
      ++done;
    }
    const auto& cur = step.value(done);
    for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = cur[k] - mean * s.eta[k];
    at_sorted.push_back(weighted_l1(s.g, diff));
  }
  std::vector<double> out;
  for (int n : n_list) {
    const auto pos = std::lower_bound(order.begin(), order.end(), n) - order.begin();
    out.push_back(at_sorted[static_cast<std::size_t>(pos)]);
  }
  return out;
}

struct PowerStep {
  const DiscreteOperator& op;
  double lambda;
  std::vector<double> v, tmp;
  void reset(std::span<const double> h) {
    v.assign(h.begin(), h.end());
    tmp.resize(v.size());
  }
  void advance() {
    op.apply(v, tmp);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = tmp[k] / lambda;
  }
  const std::vector<double>& value(int) { return v; }
};

struct CesaroStep {
  const DiscreteOperator& op;
  double lambda;
  std::vector<double> term, sum, mean, tmp;
  void reset(std::span<const double> h) {
    term.assign(h.begin(), h.end());
    sum.assign(term.size(), 0.0);
    mean = sum;
    tmp.resize(term.size());
  }
  // after k advances, sum holds sum_{i<k} lambda^-i P^i h
  void advance() {
    for (std::size_t k = 0; k < term.size(); ++k) sum[k] += term[k];
    op.apply(term, tmp);
    for (std::size_t k = 0; k < term.size(); ++k) term[k] = tmp[k] / lambda;
  }
  const std::vector<double>& value(int n) {
    if (n == 0) throw ArgumentError("Cesaro mean needs n >= 1");
    for (std::size_t k = 0; k < sum.size(); ++k) mean[k] = sum[k] / n;
    return mean;
  }
};

}  // namespace

std::vector<double> power_convergence_profile(const DiscreteOperator& forward,
                                              const SpectralResult& s,
                                              std::span<const double> h,
                                              std::span<const int> n_list) {
  return profile(forward, s, h, n_list, PowerStep{forward, s.lambda_forward, {}, {}});
}

std::vector<double> cesaro_profile(const DiscreteOperator& forward, const SpectralResult& s,
                                   std::span<const double> h, std::span<const int> n_list) {
  return profile(forward, s, h, n_list, CesaroStep{forward, s.lambda_forward, {}, {}, {}, {}});
}

void write_spectral(const SpectralResult& s, const LogisticParams& p,
                    const std::filesystem::path& csv, const std::filesystem::path& json) {
  const Grid& grid = s.g.grid();
  auto col = [](const Density& d) { return std::vector<double>(d.values().begin(), d.values().end()); };
  write_csv(csv, {"node", "weight", "g", "eta", "nu"},
            {grid.nodes(), std::vector<double>(grid.size(), grid.weight()), col(s.g), col(s.eta),
             col(s.nu)});
  JsonWriter()
      .add("a", p.a())
      .add("b", p.b())
      .add("n", grid.size())
      .add("lambda", s.lambda)
      .add("lambda_forward", s.lambda_forward)
      .add("residual", s.residual)
      .add("residual_g", s.residual_g)
      .add("residual_eta", s.residual_eta)
      .add("iterations", s.iterations)
      .add("gap_ratio", s.gap_ratio)
      .add("m", s.period)
      .write(json);
}

}  // namespace qsd
