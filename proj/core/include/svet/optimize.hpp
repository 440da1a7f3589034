#pragma once

// Small dense minimizers used by the angle search and the tomography fit.

#include <functional>
#include <span>
#include <vector>

namespace svet::optim {

using Objective = std::function<double(std::span<const double> x)>;
/// Returns f(x) and writes the gradient into grad (same length as x).
using GradientObjective = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct NelderMeadOptions {
  int max_evaluations = 20000;
  double f_tolerance = 1e-14;  // spread of simplex values
  double x_tolerance = 1e-10;  // simplex diameter
  double initial_step = 0.5;
};

struct MinimizeResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Downhill simplex with the standard reflection / expansion / contraction /
/// shrink coefficients (1, 2, 1/2, 1/2).
MinimizeResult nelder_mead(const Objective& f, std::vector<double> x0,
                           const NelderMeadOptions& opts = {});

struct BfgsOptions {
  int max_iterations = 5000;
  /// An iteration counts as stalled when it lowers f by less than this.
  double improvement_tolerance = 1e-9;
  /// Converged after this many consecutive stalled iterations.
  int patience = 10;
  double gradient_tolerance = 1e-10;
};

struct BfgsResult : MinimizeResult {
  /// f after every accepted iteration, starting with f(x0). Non-increasing.
  std::vector<double> trace;
  /// True when the line search failed even along steepest descent.
  bool line_search_failed = false;
};

/// Quasi-Newton minimization with a dense inverse-Hessian update and Armijo
/// backtracking.
BfgsResult bfgs(const GradientObjective& f, std::vector<double> x0, const BfgsOptions& opts = {});

}  // namespace svet::optim
