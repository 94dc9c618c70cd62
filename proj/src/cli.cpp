#include "qsd/cli.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "qsd/admissibility.hpp"
#include "qsd/errors.hpp"
#include "qsd/io.hpp"
#include "qsd/montecarlo.hpp"
#include "qsd/parallel.hpp"
#include "qsd/spectral.hpp"
#include "qsd/truncated.hpp"

namespace qsd {

namespace {

double parse_number(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw ArgumentError("not a number: '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

Observable eta_from_file(const std::string& spec, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot read observable file " + path);
  std::string line;
  std::getline(in, line);
  const auto header = split(line, ',');
  const auto col = std::find(header.begin(), header.end(), "eta") - header.begin();
  if (col == static_cast<std::ptrdiff_t>(header.size())) {
    throw ArgumentError("observable file has no eta column");
  }
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (static_cast<std::ptrdiff_t>(cells.size()) <= col) throw ArgumentError("short row in " + path);
    values.push_back(parse_number(cells[static_cast<std::size_t>(col)]));
  }
  const Grid grid(values.size());
  return {spec, [grid, values](double y) { return values[grid.cell_of(y)]; }};
}

struct Common {
  int threads = 0;
  std::string out = ".";
};

std::filesystem::path out_path(const Common& c, const std::string& name) {
  return std::filesystem::path(c.out) / name;
}

void print_line(const std::string& s) { std::printf("%s\n", s.c_str()); }

}  // namespace

std::vector<double> Observable::sample(const Grid& grid) const {
  std::vector<double> v(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) v[j] = fn(grid.node(j));
  return v;
}

Observable parse_observable(const std::string& spec) {
  if (spec == "1") return {spec, [](double) { return 1.0; }};
  if (spec == "y") return {spec, [](double y) { return y; }};
  if (spec == "y2") return {spec, [](double y) { return y * y; }};
  const std::string ind = "indicator:";
  if (spec.rfind(ind, 0) == 0) {
    const auto parts = split(spec.substr(ind.size()), ':');
    if (parts.size() != 2) throw ArgumentError("indicator needs the form indicator:L:R");
    const double l = parse_number(parts[0]);
    const double r = parse_number(parts[1]);
    if (!(l < r)) throw ArgumentError("indicator needs L < R");
    return {spec, [l, r](double y) { return y >= l && y <= r ? 1.0 : 0.0; }};
  }
  const std::string eta = "eta-from-file:";
  if (spec.rfind(eta, 0) == 0) return eta_from_file(spec, spec.substr(eta.size()));
  throw ArgumentError("unknown observable '" + spec + "' (menu: 1, y, y2, indicator:L:R, eta-from-file:PATH)");
}

int run(int argc, char** argv) {
  CLI::App app{"Quasi-stationary measures of the absorbed random logistic map"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--threads", common.threads, "Cap on worker threads (0 = runtime default)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--out", common.out, "Output directory");
  app.fallthrough();

  double a = 1.0;
  double b = 5.0;
  auto add_params = [&](CLI::App* sub) {
    sub->set_help_flag("--help", "Print this help message and exit");
    sub->add_option("--a", a, "Lower end of the noise range")->required();
    sub->add_option("--b", b, "Upper end of the noise range")->required();
  };

  // qsm
  std::size_t n_cells = 2000;
  double tol = 1e-10;
  int max_iter = 100000;
  auto* qsm = app.add_subcommand("qsm", "Quasi-stationary density, eigenfunction and survival rate");
  add_params(qsm);
  qsm->add_option("--n", n_cells, "Grid cells");
  qsm->add_option("--tol", tol, "Eigen-residual tolerance");
  qsm->add_option("--max-iter", max_iter, "Power iteration cap");

  // admissible
  int probes = 512;
  double margin_tol = 1e-12;
  auto* adm = app.add_subcommand("admissible", "Check the admissible-pair inequalities");
  add_params(adm);
  adm->add_option("--probes", probes, "Probe points on the interval");
  adm->add_option("--tol", margin_tol, "Margin tolerance");

  // sweep
  std::vector<double> eps_list{0.2, 0.1, 0.05, 0.02, 0.01};
  std::size_t sweep_n = 2000;
  auto* sweep = app.add_subcommand("sweep", "Spectral data of truncated chains");
  add_params(sweep);
  sweep->add_option("--n", sweep_n, "Grid cells");
  sweep->add_option("--eps", eps_list, "Strictly decreasing truncation levels")->delimiter(',');
  sweep->add_option("--tol", tol, "Eigen-residual tolerance");

  // simulate
  std::uint64_t paths = 1000000;
  int horizon = 30;
  std::uint64_t seed = 0;
  double x0 = 0.3;
  std::size_t bins = 100;
  std::string h_spec = "y";
  std::size_t ref_n = 2000;
  int window_first = -1;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo paths conditioned on survival");
  add_params(sim);
  sim->add_option("--paths", paths, "Number of paths");
  sim->add_option("--horizon", horizon, "Steps per path");
  sim->add_option("--seed", seed, "Random seed");
  sim->add_option("--x0", x0, "Start point in (0,1)");
  sim->add_option("--bins", bins, "Histogram bins");
  sim->add_option("--h", h_spec, "Observable for the time average");
  sim->add_option("--window-start", window_first, "First step of the survival-rate window (default horizon/2)");
  sim->add_option("--reference-n", ref_n, "Grid for the spectral reference (0 = skip)");

  // limits
  std::size_t lim_n = 200;
  std::vector<double> xs{0.1, 0.3, 0.5, 0.7, 0.9};
  int yaglom_n = 200;
  int average_n = 400;
  auto* lim = app.add_subcommand("limits", "Exact Yaglom ratios and conditioned time averages");
  add_params(lim);
  lim->add_option("--n", lim_n, "Grid cells");
  lim->add_option("--x", xs, "Start points")->delimiter(',');
  lim->add_option("--h", h_spec, "Observable");
  lim->add_option("--yaglom-horizon", yaglom_n, "Steps for the Yaglom ratio");
  lim->add_option("--average-horizon", average_n, "Steps for the time average");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    set_thread_limit(common.threads);
    const LogisticParams p(a, b);

    if (qsm->parsed()) {
      const Grid grid = build_grid(n_cells);
      SolveOptions opt;
      opt.tol = tol;
      opt.max_iter = max_iter;
      const auto s = solve(p, grid, opt);
      write_spectral(s, p, out_path(common, "qsm.csv"), out_path(common, "qsm.json"));
      print_line("lambda=" + format_double(s.lambda) + " m=" + std::to_string(s.period) +
                 " residual=" + format_double(s.residual));
    } else if (adm->parsed()) {
      const auto r = is_admissible(p, probes, margin_tol);
      write_admissibility(r, out_path(common, "admissible.json"));
      print_line(to_string(r.verdict) + (r.theorem_range ? " theorem-range" : "") +
                 " worst_margin_ineq1=" + format_double(r.worst_margin_ineq1) +
                 " worst_margin_ineq2=" + format_double(r.worst_margin_ineq2));
    } else if (sweep->parsed()) {
      const Grid grid = build_grid(sweep_n);
      SolveOptions opt;
      opt.tol = tol;
      const auto s = epsilon_sweep(p, grid, eps_list, opt);
      write_sweep(s, out_path(common, "sweep.csv"));
      JsonWriter().add("a", p.a()).add("b", p.b()).add("n", grid.size())
          .add("lambda_full", s.lambda_full).write(out_path(common, "sweep.json"));
      for (const auto& e : s.entries) {
        print_line("eps=" + format_double(e.epsilon) +
                   (e.ok ? " lambda=" + format_double(e.lambda) + " cdf_to_full=" + format_double(e.cdf_to_full)
                         : " error: " + e.error));
      }
    } else if (sim->parsed()) {
      const Observable h = parse_observable(h_spec);
      SimConfig c{p, paths, horizon, seed, x0, bins, std::nullopt};
      const auto s = simulate(c, h.fn);
      write_stats(s, out_path(common, "survivors.csv"), out_path(common, "histogram.csv"));
      const int first = window_first >= 0 ? window_first : horizon / 2;
      const auto rate = estimate_survival_rate(s, first, horizon);
      JsonWriter j;
      j.add("a", p.a()).add("b", p.b()).add("paths", static_cast<std::int64_t>(paths))
          .add("horizon", horizon).add("seed", static_cast<std::int64_t>(seed)).add("x0", x0)
          .add("h", h.spec).add("survivors", static_cast<std::int64_t>(s.survivors_by_step.back()))
          .add("window_first", first).add("window_last", horizon)
          .add("lambda_hat", rate.lambda_hat).add("stderr", rate.stderr)
          .add("time_average_mean", s.time_average_mean)
          .add("time_average_stderr", s.time_average_stderr);
      if (ref_n > 0) {
        const auto ref = solve(p, build_grid(ref_n));
        j.add("reference_n", ref_n).add("reference_lambda", ref.lambda)
            .add("tv_distance", yaglom_distance(s, ref.g));
      }
      j.write(out_path(common, "simulate.json"));
      print_line("lambda_hat=" + format_double(rate.lambda_hat) + " stderr=" + format_double(rate.stderr));
    } else if (lim->parsed()) {
      const Observable h = parse_observable(h_spec);
      const Grid grid = build_grid(lim_n);
      const auto P = assemble_forward(p, grid);
      const auto s = solve(P, assemble_transfer(p, grid));
      const auto hv = h.sample(grid);
      std::vector<double> yag, avg;
      for (double x : xs) {
        yag.push_back(yaglom_ratio(P, hv, yaglom_n, x));
        avg.push_back(conditioned_time_average(P, s.lambda_forward, hv, average_n, x));
      }
      write_csv(out_path(common, "limits.csv"), {"x", "yaglom_ratio", "time_average"}, {xs, yag, avg});
      const double target_g = grid_inner(grid, hv, s.g.values());
      const double target_nu = grid_inner(grid, hv, s.nu.values());
      JsonWriter().add("a", p.a()).add("b", p.b()).add("n", grid.size()).add("h", h.spec)
          .add("yaglom_horizon", yaglom_n).add("average_horizon", average_n)
          .add("target_yaglom", target_g).add("target_time_average", target_nu)
          .add("lambda", s.lambda).add("m", s.period)
          .write(out_path(common, "limits.json"));
      for (std::size_t i = 0; i < xs.size(); ++i) {
        print_line("x=" + format_double(xs[i]) + " yaglom=" + format_double(yag[i]) +
                   " time_average=" + format_double(avg[i]));
      }
      print_line("target_yaglom=" + format_double(target_g) +
                 " target_time_average=" + format_double(target_nu));
    }
    return 0;
  } catch (const ConvergenceError& e) {
    std::fprintf(stderr, "error: %s (residual %s after %d iterations)\n", e.what(),
                 format_double(e.residual()).c_str(), e.iterations());
    return 2;
  } catch (const InsufficientSurvivorsError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const UnderflowError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const ArgumentError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

}  // namespace qsd
