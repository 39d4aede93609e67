#pragma once

#include <functional>

#include "sglab/markov.hpp"
#include "sglab/spaces.hpp"

namespace sglab {

/// Quadrature for int_0^inf (.) dt/t: composite Gauss-Legendre in u = log t
/// on [log t_min, log t_max]. Contributions outside [t_min, t_max] are
/// bounded analytically by each functional and added to its error budget.
struct TimeGrid {
  std::vector<double> nodes;
  /// Weights for dt/t (that is, du).
  std::vector<double> weights;
  double t_min = 0.0;
  double t_max = 0.0;
  int panels = 0;
  int order = 0;

  std::size_t size() const { return nodes.size(); }
  /// Same interval with twice as many panels.
  TimeGrid refined() const;
};

TimeGrid make_time_grid(double t_min, double t_max, int panels, int order = 16);

/// t_min = 1e-6 / (spectral radius), t_max = 50 / gap, two panels per unit of log t.
TimeGrid default_time_grid_lps(const DiffusionSemigroup& G, int order = 16);

struct GFunctionResult {
  /// G f(omega_i), one entry per atom.
  Vector per_point;
  /// ||G f||_{L_p(Omega)}.
  double lp_norm = 0.0;
  /// Bound on |lp_norm - exact|: last node-doubling change plus both tails.
  double quad_error = 0.0;
  /// Panels of the grid actually used.
  int panels = 0;
};

/// G f(omega) = (int_0^inf ||t^k A^k e^{tA} f(omega)||_{l_q^d}^{q_time} dt/t)^{1/q_time}.
///
/// The grid is doubled until the per-point integrals change by less than
/// 1e-8 relative to their maximum.
GFunctionResult g_function(const DiffusionSemigroup& G, const FunctionField& f,
                           const MixedNormConfig& cfg, double q_time, int k, const TimeGrid& grid);

struct LpsRatioResult {
  double value = 0.0;
  FunctionField argbest;
  bool converged = true;
};

/// Lower bound for sup_f ||G f||_{L_p} / ||f||_{L_p(l_q^d)} by ratio ascent
/// over f. The kernel of A is projected out of every iterate.
LpsRatioResult lps_ratio(const DiffusionSemigroup& G, const MixedNormConfig& cfg, double q_time,
                         int k, const TimeGrid& grid, const AscentOptions& opts = {});

struct FunctionalValue {
  double value = 0.0;
  double quad_error = 0.0;
};

/// (int_0^inf ||(T_t - T_{alpha t}) f||^{q_time} dt/t)^{1/q_time}, the norm
/// being that of `cfg` (take p = q for the L_q(Omega; X) setting).
FunctionalValue semigroup_difference_functional(const DiffusionSemigroup& G, const FunctionField& f,
                                                const MixedNormConfig& cfg, double alpha_ratio,
                                                double q_time, const TimeGrid& grid);

struct FractionalOptions {
  int order = 24;
  /// Geometric grading levels towards each endpoint singularity.
  int levels = 40;
};

/// Spectral factor of t^k d^k/dt^k M^alpha_t at an eigenvalue lambda = -x/t:
///   (1/Gamma(alpha)) int_0^1 v^{alpha-1} (-x(1-v))^k e^{-x(1-v)} dv   (Re alpha > 0),
/// continued to Re alpha <= 0 through
///   D(k, alpha - 1) = (k + alpha) D(k, alpha) + D(k + 1, alpha)
/// starting from alpha + ceil(-Re alpha) + 1.
complex fractional_factor(complex alpha, int k, double x, const FractionalOptions& opts = {});

/// t^k d^k/dt^k M^alpha_t f, with M^alpha_t f = t^{-alpha} I^alpha (s -> T_s f)(t).
ComplexField fractional_average(const DiffusionSemigroup& G, const FunctionField& f, complex alpha,
                                double t, int k = 0, const FractionalOptions& opts = {});

/// Riemann-Liouville integral (1/Gamma(alpha)) int_0^t (t-s)^{alpha-1} phi(s) ds
/// of a vector-valued function, Re alpha > 0.
Eigen::VectorXcd fractional_integral(const std::function<Eigen::VectorXcd(double)>& phi,
                                     complex alpha, double t, const FractionalOptions& opts = {});

/// Empirical lower bound for sup{||T_z|| : |arg z| <= beta0} over a grid of
/// `angles` angles per half-sector and `radii` log-spaced radii.
double analyticity_constant(const DiffusionSemigroup& G, const MixedNormConfig& cfg, double beta0,
                            const AscentOptions& opts = {}, int angles = 24, int radii = 40);

}  // namespace sglab
