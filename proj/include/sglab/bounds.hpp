#pragma once

#include <complex>

namespace sglab {

// Closed-form constants. Every evaluator validates its inputs and throws
// DomainError outside the stated range unless `unchecked` is set. Bounds
// that hold only up to an absolute constant are evaluated with constant 1.
// Logarithms are natural.

/// sqrt(C^2 + M^2) / (1 - q) for C >= 1, M >= 1, q in (0, 1).
double resolvent_sector_bound(double C, double M, double q, bool unchecked = false);

/// sqrt(C^2 + M^2) / (1 - u) * (1 + log(C / (1 - u))) for C >= 1, M >= 1, u in (0, 1).
double holo_semigroup_bound(double C, double M, double u, bool unchecked = false);

struct KatoBounds {
  /// Half-angle eps / M^2 of the holomorphy sector.
  double theta = 0.0;
  /// (M^2 / eps)(1 + log(M / eps)).
  double Tz_bound = 0.0;
  /// (M^4 / eps^2)(1 + log(M / eps)).
  double tTprime_bound = 0.0;
};

/// Bounds implied by ||I - T_t|| <= 2 - eps, for M >= 1, eps in (0, 2].
KatoBounds kato_bounds(double M, double eps, bool unchecked = false);

/// 2 delta / ((1 + 2 delta) q) for delta in (0, 1], q >= 2.
double epsilon_from_delta(double delta, double q, bool unchecked = false);

struct ElemIneqResult {
  /// min of (2 - eps - x) over grid points satisfying the hypothesis.
  double margin = 0.0;
  int violations = 0;
  int satisfied = 0;
};

/// Checks x^q + delta 2^q (x - 1)_+^q <= 2^q  =>  x <= 2 - eps on a uniform
/// grid of [0, 2]. Accepts any q > 1 and delta in (0, 1]; grid_size >= 1000.
ElemIneqResult elem_ineq_bruteforce(double q, double delta, int grid_size);

/// q^2 m^{2q+1} (1 + log q + q log m) for q >= 2, m >= 1.
double B_constant(double q, double m, bool unchecked = false);

struct SectorBound {
  double angle = 0.0;
  double Tz_bound = 0.0;
};

/// (1 / (q m^q), q m^{q+1} (1 + log q + q log m)).
SectorBound analytic_sector_bound_cotype(double q, double m, bool unchecked = false);

/// k^{k-1} B^2 m, or B m in the sharp case p = q, k = 1.
double theorem_heat_constant(int k, double p, double q, double m, bool sharp_case,
                             bool unchecked = false);

/// beta_q^{-3} T^{r} max(p^{2/q}, p'^{1 + 1/q'}) m with r = min(p/q, p'/q')
/// and beta_q = beta0 r, for beta0 in (0, pi/2], T_beta0 >= 1.
double xu_constant(double p, double q, double beta0, double T_beta0, double m,
                   bool unchecked = false);

/// (q m^q)^2 B m: the previous estimate at p = q, beta0 = 1/(q m^q),
/// T = beta0 B, without the max(...) factor.
double xu_specialized(double q, double m, bool unchecked = false);

/// Smallest integer n >= 0 with n > -Re alpha.
int N_alpha(double re_alpha);

}  // namespace sglab
