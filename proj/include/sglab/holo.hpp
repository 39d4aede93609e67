#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sglab/markov.hpp"
#include "sglab/quadrature.hpp"
#include "sglab/spaces.hpp"

namespace sglab {

/// (lambda - A)^{-1} by LU. Throws SingularityError when lambda lies within
/// 1e-12 of an eigenvalue of the generator.
CMatrix resolvent(const DiffusionSemigroup& G, complex lambda);

struct ResolventSample {
  complex lambda;
  /// Estimated ||R(lambda, A)|| on L_p(Omega; l_q^d).
  double norm_bound = 0.0;
  /// max_k 1 / |lambda - lambda_k|, filled only when p = q = 2.
  std::optional<double> exact_l2;
};

ResolventSample resolvent_sample(const DiffusionSemigroup& G, const MixedNormConfig& cfg,
                                 complex lambda, const AscentOptions& opts = {});

struct HilleYosidaReport {
  /// max over the grid and 1 <= n <= n_max of ||R(lambda)^n|| (Re lambda)^n.
  double max_value = 0.0;
  complex argmax_lambda;
  int argmax_n = 0;
  double tol = 0.0;
  bool passed = false;
  bool converged = true;
};

/// Hille-Yosida check with M = 1 and growth rate 0.
HilleYosidaReport hille_yosida_check(const DiffusionSemigroup& G, const MixedNormConfig& cfg,
                                     const std::vector<complex>& lambda_grid, int n_max,
                                     double tol = 1e-9, const AscentOptions& opts = {});

/// Empirical sector constant: sup over the grid of |s| ||R(r + is, A)||.
/// Only a lower bound for the constant over the whole half-plane.
double sector_constant(const DiffusionSemigroup& G, const MixedNormConfig& cfg,
                       const std::vector<double>& r_grid, const std::vector<double>& s_grid,
                       const AscentOptions& opts = {});

/// Path for the Cauchy integral of e^{mu z} R(mu, A): an arc of radius 1/|z|
/// through the positive axis and two rays at angles +-theta, truncated at r_max.
struct Contour {
  complex z;
  double q_param = 0.0;
  double C = 0.0;
  /// pi/2 + arctan(q_param / C).
  double theta = 0.0;
  /// sin(arctan(q_param / C) - |arg z|): decay rate of the ray integrands.
  double eps_prime = 0.0;
  double r_max = 0.0;
  /// Bound on the discarded ray tails (both rays together).
  double tail_bound = 0.0;
  /// Gauss-Legendre rule in the angle on [-theta, theta].
  quad::Rule arc;
  /// Gauss-Legendre rule in u = log(r |z|) on [0, log(r_max |z|)].
  quad::Rule ray;
};

/// Builds the contour for tolerance `tol` with `nodes` nodes per piece.
Contour make_contour(complex z, double C, double q_param, double tol, int nodes);

struct ContourOptions {
  double tol = 1e-10;
  int initial_nodes = 64;
  int max_nodes = 4096;
};

struct ContourResult {
  CMatrix matrix;
  /// Last node-doubling change (relative) plus the tail bound.
  double achieved = 0.0;
  int nodes = 0;
  Contour contour;
};

/// e^{zA} by contour quadrature of (1/2 pi i) int e^{mu z} R(mu, A) d mu.
/// Requires z != 0 and |arg z| < arctan(q_param / C).
ContourResult contour_exp(const DiffusionSemigroup& G, complex z, double C, double q_param,
                          const ContourOptions& opts = {});
/// Same, with q_param = (1 + C u) / (1 + C) where u = C tan|arg z| (needs u < 1).
ContourResult contour_exp(const DiffusionSemigroup& G, complex z, double C,
                          const ContourOptions& opts = {});

/// 400 log-spaced times on [1e-4 / gap, 1e2 / gap] (gap 1 when the generator vanishes).
std::vector<double> default_time_grid(const DiffusionSemigroup& G, int points = 400);

struct KatoResult {
  /// 2 - sup_t ||I - T_t||, clamped to [0, 2].
  double epsilon = 0.0;
  double sup_value = 0.0;
  /// Maximizing time; +infinity when the t -> infinity limit attains the sup.
  double argmax_t = 0.0;
  bool converged = true;
  std::vector<std::string> warnings;
};

/// Kato deficiency from a time grid plus the limit ||I - Pi|| (Pi the
/// projection onto ker A). A non-ergodic chain triggers a warning and the
/// limit is skipped.
KatoResult kato_epsilon(const DiffusionSemigroup& G, const MixedNormConfig& cfg,
                        const std::vector<double>& t_grid, const AscentOptions& opts = {});

/// 1 / inf_{||x|| = 1} ||(zeta I - T) x||, or +infinity when the infimum is
/// below 1e-12. Requires |zeta| = 1.
double kato_criterion_check(const CMatrix& T, const FiniteMeasureSpace& space, complex zeta,
                            const MixedNormConfig& cfg, const AscentOptions& opts = {});
double kato_criterion_check(const MarkovOperator& T, complex zeta, const MixedNormConfig& cfg,
                            const AscentOptions& opts = {});

struct DerivativeSup {
  double sup_value = 0.0;
  double argmax_t = 0.0;
  bool converged = true;
};

/// sup_t ||t A e^{tA}|| over the grid, refined by a Brent search between the
/// neighbours of the best grid point.
DerivativeSup max_t_derivative(const DiffusionSemigroup& G, const MixedNormConfig& cfg,
                               const std::vector<double>& t_grid, const AscentOptions& opts = {});

/// Errors max|S_N - R(lambda)| of the partial sums
/// S_N = sum_{n <= N} (mu - lambda)^n R(mu)^{n+1}, N = 0 .. terms - 1.
std::vector<double> neumann_partial_errors(const DiffusionSemigroup& G, complex lambda,
                                           complex mu, int terms);

}  // namespace sglab
