#include "svet/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

namespace svet::optim {

namespace {

std::span<const double> view(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace

MinimizeResult nelder_mead(const Objective& f, std::vector<double> x0, const NelderMeadOptions& opts) {
  const std::size_t n = x0.size();
  if (n == 0) throw std::invalid_argument("nelder_mead needs at least one parameter");

  MinimizeResult result;
  std::vector<std::vector<double>> simplex(n + 1, x0);
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += opts.initial_step;

  auto eval = [&](const std::vector<double>& x) {
    ++result.evaluations;
    return f(x);
  };
  for (std::size_t i = 0; i <= n; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);

  auto affine = [&](const std::vector<double>& from, double t, std::vector<double>& out) {
    // out = centroid + t * (from - centroid)
    for (std::size_t k = 0; k < n; ++k) out[k] = centroid[k] + t * (from[k] - centroid[k]);
  };

  while (result.evaluations < opts.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return values[l] < values[r]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[n - 1];

    double diameter = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      double d = 0.0;
      for (std::size_t k = 0; k < n; ++k) d = std::max(d, std::abs(simplex[i][k] - simplex[best][k]));
      diameter = std::max(diameter, d);
    }
    if (values[worst] - values[best] <= opts.f_tolerance && diameter <= opts.x_tolerance) {
      result.converged = true;
      break;
    }
    ++result.iterations;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / static_cast<double>(n);
    }

    affine(simplex[worst], -1.0, trial);
    const double f_reflect = eval(trial);
    if (f_reflect < values[best]) {
      affine(simplex[worst], -2.0, trial2);
      const double f_expand = eval(trial2);
      if (f_expand < f_reflect) {
        simplex[worst] = trial2;
        values[worst] = f_expand;
      } else {
        simplex[worst] = trial;
        values[worst] = f_reflect;
      }
      continue;
    }
    if (f_reflect < values[second_worst]) {
      simplex[worst] = trial;
      values[worst] = f_reflect;
      continue;
    }
    const bool outside = f_reflect < values[worst];
    affine(outside ? trial : simplex[worst], 0.5, trial2);
    const double f_contract = eval(trial2);
    if (f_contract < (outside ? f_reflect : values[worst])) {
      simplex[worst] = trial2;
      values[worst] = f_contract;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t k = 0; k < n; ++k) simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
      values[i] = eval(simplex[i]);
    }
  }

  const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  result.x = simplex[best];
  result.value = values[best];
  return result;
}

BfgsResult bfgs(const GradientObjective& f, std::vector<double> x0, const BfgsOptions& opts) {
  const auto n = static_cast<Eigen::Index>(x0.size());
  if (n == 0) throw std::invalid_argument("bfgs needs at least one parameter");

  BfgsResult result;
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(x0.data(), n);
  Eigen::VectorXd g(n), g_new(n), x_new(n);
  auto eval = [&](const Eigen::VectorXd& at, Eigen::VectorXd& grad) {
    ++result.evaluations;
    return f(view(at), {grad.data(), static_cast<std::size_t>(n)});
  };

  double fx = eval(x, g);
  result.trace.push_back(fx);
  Eigen::MatrixXd inv_hessian = Eigen::MatrixXd::Identity(n, n);
  bool fresh_hessian = true;
  int stalled = 0;

  constexpr double kArmijo = 1e-4;
  constexpr int kMaxBacktracks = 60;

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    if (g.lpNorm<Eigen::Infinity>() <= opts.gradient_tolerance) {
      result.converged = true;
      break;
    }
    Eigen::VectorXd direction = -inv_hessian * g;
    double slope = direction.dot(g);
    if (!(slope < 0.0)) {
      inv_hessian.setIdentity();
      fresh_hessian = true;
      direction = -g;
      slope = -g.squaredNorm();
    }
    double step = 1.0;
    if (fresh_hessian) step = std::min(1.0, 1.0 / std::max(1.0, g.norm()));

    bool accepted = false;
    double f_new = fx;
    for (int bt = 0; bt < kMaxBacktracks; ++bt) {
      x_new = x + step * direction;
      f_new = eval(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= fx + kArmijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    ++result.iterations;

    if (!accepted) {
      if (fresh_hessian) {
        result.line_search_failed = true;
        break;
      }
      inv_hessian.setIdentity();
      fresh_hessian = true;
      if (++stalled >= opts.patience) {
        result.converged = true;
        break;
      }
      continue;
    }

    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = g_new - g;
    const double improvement = fx - f_new;
    x = x_new;
    g = g_new;
    fx = f_new;
    result.trace.push_back(fx);

    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (fresh_hessian) {
        inv_hessian *= sy / y.squaredNorm();
        fresh_hessian = false;
      }
      const double rho = 1.0 / sy;
      const Eigen::VectorXd hy = inv_hessian * y;
      inv_hessian += (rho * rho * y.dot(hy) + rho) * (s * s.transpose()) - rho * (hy * s.transpose() + s * hy.transpose());
    }

    stalled = improvement < opts.improvement_tolerance ? stalled + 1 : 0;
    if (stalled >= opts.patience) {
      result.converged = true;
      break;
    }
  }

  result.x.assign(x.data(), x.data() + n);
  result.value = fx;
  return result;
}

}  // namespace svet::optim
