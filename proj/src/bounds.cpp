#include "sglab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "sglab/errors.hpp"

namespace sglab {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw DomainError(what);
}

}  // namespace

double resolvent_sector_bound(double C, double M, double q, bool unchecked) {
  require(q < 1.0, "resolvent_sector_bound: q must be below 1");
  if (!unchecked) {
    require(C >= 1.0, "resolvent_sector_bound: C must be >= 1");
    require(M >= 1.0, "resolvent_sector_bound: M must be >= 1");
    require(q > 0.0, "resolvent_sector_bound: q must be positive");
  }
  return std::hypot(C, M) / (1.0 - q);
}

double holo_semigroup_bound(double C, double M, double u, bool unchecked) {
  require(u < 1.0, "holo_semigroup_bound: u must be below 1");
  if (!unchecked) {
    require(C >= 1.0, "holo_semigroup_bound: C must be >= 1");
    require(M >= 1.0, "holo_semigroup_bound: M must be >= 1");
    require(u > 0.0, "holo_semigroup_bound: u must be positive");
  }
  return std::hypot(C, M) / (1.0 - u) * (1.0 + std::log(C / (1.0 - u)));
}

KatoBounds kato_bounds(double M, double eps, bool unchecked) {
  require(eps > 0.0, "kato_bounds: eps must be positive");
  if (!unchecked) {
    require(eps <= 2.0, "kato_bounds: eps must be <= 2");
    require(M >= 1.0, "kato_bounds: M must be >= 1");
  }
  const double c = M * M / eps;
  const double l = 1.0 + std::log(M / eps);
  return {1.0 / c, c * l, c * c * l};
}

double epsilon_from_delta(double delta, double q, bool unchecked) {
  if (!unchecked) {
    require(delta > 0.0 && delta <= 1.0, "epsilon_from_delta: delta must lie in (0, 1]");
    require(q >= 2.0, "epsilon_from_delta: q must be >= 2");
  }
  return 2.0 * delta / ((1.0 + 2.0 * delta) * q);
}

ElemIneqResult elem_ineq_bruteforce(double q, double delta, int grid_size) {
  require(q > 1.0, "elem_ineq_bruteforce: q must exceed 1");
  require(delta > 0.0 && delta <= 1.0, "elem_ineq_bruteforce: delta must lie in (0, 1]");
  require(grid_size >= 1000, "elem_ineq_bruteforce: grid_size must be >= 1000");
  const double eps = epsilon_from_delta(delta, q, true);
  const double rhs = std::pow(2.0, q);
  ElemIneqResult res;
  res.margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_size; ++i) {
    const double x = 2.0 * i / (grid_size - 1);
    const double excess = std::max(x - 1.0, 0.0);
    if (std::pow(x, q) + delta * rhs * std::pow(excess, q) > rhs) continue;
    ++res.satisfied;
    const double m = 2.0 - eps - x;
    res.margin = std::min(res.margin, m);
    if (m < 0.0) ++res.violations;
  }
  return res;
}

double B_constant(double q, double m, bool unchecked) {
  if (!unchecked) {
    require(q >= 2.0, "B_constant: q must be >= 2");
    require(m >= 1.0, "B_constant: m must be >= 1");
  }
  return q * q * std::pow(m, 2.0 * q + 1.0) * (1.0 + std::log(q) + q * std::log(m));
}

SectorBound analytic_sector_bound_cotype(double q, double m, bool unchecked) {
  if (!unchecked) {
    require(q >= 2.0, "analytic_sector_bound_cotype: q must be >= 2");
    require(m >= 1.0, "analytic_sector_bound_cotype: m must be >= 1");
  }
  return {1.0 / (q * std::pow(m, q)),
          q * std::pow(m, q + 1.0) * (1.0 + std::log(q) + q * std::log(m))};
}

double theorem_heat_constant(int k, double p, double q, double m, bool sharp_case,
                             bool unchecked) {
  require(k >= 1, "theorem_heat_constant: k must be positive");
  if (sharp_case) require(k == 1, "theorem_heat_constant: the sharp case needs k = 1");
  if (!unchecked) {
    require(p > 1.0 && std::isfinite(p), "theorem_heat_constant: p must lie in (1, inf)");
    if (sharp_case) require(p == q, "theorem_heat_constant: the sharp case needs p = q");
  }
  const double B = B_constant(q, m, unchecked);
  if (sharp_case) return B * m;
  return std::pow(static_cast<double>(k), k - 1) * B * B * m;
}

double xu_constant(double p, double q, double beta0, double T_beta0, double m, bool unchecked) {
  require(p > 1.0 && std::isfinite(p), "xu_constant: p must lie in (1, inf)");
  require(q > 1.0 && std::isfinite(q), "xu_constant: q must lie in (1, inf)");
  require(beta0 > 0.0, "xu_constant: beta0 must be positive");
  if (!unchecked) {
    require(q >= 2.0, "xu_constant: q must be >= 2");
    require(beta0 <= std::numbers::pi / 2.0, "xu_constant: beta0 must be <= pi/2");
    require(T_beta0 >= 1.0, "xu_constant: T_beta0 must be >= 1");
    require(m >= 1.0, "xu_constant: m must be >= 1");
  }
  const double pp = p / (p - 1.0), qq = q / (q - 1.0);
  const double r = std::min(p / q, pp / qq);
  const double beta_q = beta0 * r;
  const double mx = std::max(std::pow(p, 2.0 / q), std::pow(pp, 1.0 + 1.0 / qq));
  return std::pow(beta_q, -3.0) * std::pow(T_beta0, r) * mx * m;
}

double xu_specialized(double q, double m, bool unchecked) {
  const double s = q * std::pow(m, q);
  return s * s * B_constant(q, m, unchecked) * m;
}

int N_alpha(double re_alpha) {
  require(std::isfinite(re_alpha), "N_alpha: Re alpha must be finite");
  if (re_alpha > 0.0) return 0;
  return static_cast<int>(std::floor(-re_alpha)) + 1;
}

}  // namespace sglab
