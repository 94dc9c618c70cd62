#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qsd/grid.hpp"
#include "qsd/logistic_kernel.hpp"

namespace qsd {

/// Observable chosen from the fixed menu: "1", "y", "y2", "indicator:L:R",
/// "eta-from-file:PATH" (a qsm CSV; evaluated piecewise-constant on its grid).
struct Observable {
  std::string spec;
  RealFunction fn;

  [[nodiscard]] std::vector<double> sample(const Grid& grid) const;
};

/// Throws ArgumentError on an unknown or malformed spec.
[[nodiscard]] Observable parse_observable(const std::string& spec);

/// Entry point of the command-line tool. Exit codes: 0 success, 1 configuration error,
/// 2 numerical failure (non-convergence and similar), 3 insufficient survivors.
int run(int argc, char** argv);

}  // namespace qsd
