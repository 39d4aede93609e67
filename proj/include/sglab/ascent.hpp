#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "sglab/spaces.hpp"

namespace sglab {

/// Result of a scale-invariant ratio search.
template <class Field>
struct AscentResult {
  double value = 0.0;
  Field argbest;
  bool converged = true;
  int iterations = 0;
};

/// Objective evaluated at a field: returns the ratio and, when `grad` is not
/// null, writes its real gradient (for complex fields packed as a + ib).
template <class Field>
using RatioObjective = std::function<double(const Field& f, Field* grad)>;

namespace detail {

template <class Field>
void fill_gaussian(Field& f, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  using Scalar = typename Field::Scalar;
  for (Eigen::Index j = 0; j < f.cols(); ++j)
    for (Eigen::Index i = 0; i < f.rows(); ++i) {
      if constexpr (std::is_same_v<Scalar, double>) {
        f(i, j) = normal(rng);
      } else {
        const double re = normal(rng);
        const double im = normal(rng);
        f(i, j) = Scalar(re, im);
      }
    }
}

}  // namespace detail

/// Projected gradient search over the Euclidean unit sphere for a
/// 0-homogeneous objective, maximizing (or minimizing when `minimize`).
///
/// Each restart starts from a seeded Gaussian field (or from `initial(r)` when
/// it returns true), takes steps f + s g/|g| followed by renormalization, and
/// doubles s after an accepted step and halves it after a rejected one. A
/// restart ends when no step down to 1e-16 improves the value, or after
/// `opts.patience` consecutive steps of relative gain below `opts.tol`.
template <class Field>
AscentResult<Field> optimize_ratio(const RatioObjective<Field>& objective, Eigen::Index rows,
                                   Eigen::Index cols, const AscentOptions& opts, bool minimize,
                                   const std::function<void(Field&)>& project = {},
                                   const std::function<bool(int, Field&)>& initial = {}) {
  AscentResult<Field> best;
  best.value = minimize ? std::numeric_limits<double>::infinity() : -1.0;
  const auto better = [minimize](double a, double b) { return minimize ? a < b : a > b; };
  const double sign = minimize ? -1.0 : 1.0;

  for (int r = 0; r < std::max(opts.restarts, 1); ++r) {
    std::mt19937_64 rng(opts.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(r));
    Field f(rows, cols);
    if (!(initial && initial(r, f))) detail::fill_gaussian(f, rng);
    if (project) project(f);
    double fnorm = f.norm();
    if (fnorm == 0.0) {
      detail::fill_gaussian(f, rng);
      if (project) project(f);
      fnorm = f.norm();
      if (fnorm == 0.0) continue;
    }
    f /= fnorm;

    Field grad(rows, cols), cand_grad(rows, cols);
    double value = objective(f, &grad);
    double step = 0.25;
    int stagnant = 0;
    bool converged = false;
    int it = 0;
    for (; it < opts.max_iterations; ++it) {
      const double gnorm = grad.norm();
      if (!(gnorm > 0.0) || !std::isfinite(gnorm)) {
        converged = true;
        break;
      }
      bool accepted = false;
      double cand_value = value;
      Field cand;
      while (step > 1e-16) {
        cand = f + (sign * step / gnorm) * grad;
        if (project) project(cand);
        const double cn = cand.norm();
        if (cn > 0.0) {
          cand /= cn;
          cand_value = objective(cand, &cand_grad);
          if (std::isfinite(cand_value) && better(cand_value, value)) {
            accepted = true;
            break;
          }
        }
        step *= 0.5;
      }
      if (!accepted) {
        converged = true;
        break;
      }
      const double gain = std::abs(cand_value - value) /
                          std::max(std::abs(value), std::numeric_limits<double>::min());
      f = std::move(cand);
      grad = cand_grad;
      value = cand_value;
      step = std::min(2.0 * step, 1.0);
      stagnant = gain < opts.tol ? stagnant + 1 : 0;
      if (stagnant >= opts.patience) {
        converged = true;
        break;
      }
    }
    best.iterations += it;
    best.converged = best.converged && converged;
    if (better(value, best.value)) {
      best.value = value;
      best.argbest = f;
    }
  }
  if (best.value < 0.0) best.value = 0.0;
  return best;
}

}  // namespace sglab
