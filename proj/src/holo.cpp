#include "sglab/holo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/tools/minima.hpp>

#include "sglab/bounds.hpp"
#include "sglab/errors.hpp"

namespace sglab {

namespace {

constexpr double kPi = std::numbers::pi;

double spectral_distance(const DiffusionSemigroup& G, complex lambda) {
  double d = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < G.eigenvalues().size(); ++k)
    d = std::min(d, std::abs(lambda - G.eigenvalues()(k)));
  return d;
}

}  // namespace

CMatrix resolvent(const DiffusionSemigroup& G, complex lambda) {
  const double dist = spectral_distance(G, lambda);
  if (dist <= 1e-12) throw SingularityError("resolvent: lambda lies on the spectrum", dist);
  const int n = G.size();
  const CMatrix M = lambda * CMatrix::Identity(n, n) - G.generator().cast<complex>();
  Eigen::PartialPivLU<CMatrix> lu(M);
  CMatrix R = lu.solve(CMatrix::Identity(n, n));
  const double residual = (M * R - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
  const double scale = M.cwiseAbs().rowwise().sum().maxCoeff() * R.cwiseAbs().rowwise().sum().maxCoeff();
  if (!(residual <= 1e-10 * std::max(1.0, scale)))
    throw NumericError("resolvent: LU residual too large");
  return R;
}

ResolventSample resolvent_sample(const DiffusionSemigroup& G, const MixedNormConfig& cfg,
                                 complex lambda, const AscentOptions& opts) {
  const CMatrix R = resolvent(G, lambda);
  ResolventSample s{lambda, operator_norm_estimate(R, G.space(), cfg, opts).value, std::nullopt};
  if (cfg.hilbert()) s.exact_l2 = 1.0 / spectral_distance(G, lambda);
  return s;
}

HilleYosidaReport hille_yosida_check(const DiffusionSemigroup& G, const MixedNormConfig& cfg,
                                     const std::vector<complex>& lambda_grid, int n_max, double tol,
                                     const AscentOptions& opts) {
  if (n_max < 1) throw DomainError("hille_yosida_check: n_max must be at least 1");
  HilleYosidaReport rep;
  rep.tol = tol;
  for (const complex lambda : lambda_grid) {
    if (!(lambda.real() > 0.0))
      throw DomainError("hille_yosida_check: grid points need Re lambda > 0");
    const CMatrix R = resolvent(G, lambda);
    CMatrix Rn = R;
    for (int n = 1; n <= n_max; ++n) {
      if (n > 1) Rn = Rn * R;
      const NormEstimate est = operator_norm_estimate(Rn, G.space(), cfg, opts);
      rep.converged = rep.converged && est.converged;
      const double v = est.value * std::pow(lambda.real(), n);
      if (v > rep.max_value) {
        rep.max_value = v;
        rep.argmax_lambda = lambda;
        rep.argmax_n = n;
      }
    }
  }
  rep.passed = rep.max_value <= 1.0 + tol;
  return rep;
}

double sector_constant(const DiffusionSemigroup& G, const MixedNormConfig& cfg,
                       const std::vector<double>& r_grid, const std::vector<double>& s_grid,
                       const AscentOptions& opts) {
  if (r_grid.empty() || s_grid.empty()) throw DomainError("sector_constant: empty grid");
  double best = 0.0;
  for (const double s : s_grid) {
    if (s == 0.0) throw DomainError("sector_constant: s must be nonzero");
    for (const double r : r_grid) {
      if (!(r > 0.0)) throw DomainError("sector_constant: r must be positive");
      const CMatrix R = resolvent(G, complex(r, s));
      best = std::max(best, std::abs(s) * operator_norm_estimate(R, G.space(), cfg, opts).value);
    }
  }
  return best;
}

// ---------------------------------------------------------------------------

Contour make_contour(complex z, double C, double q_param, double tol, int nodes) {
  if (z == complex(0.0)) throw DomainError("contour_exp: z = 0 (use the identity)");
  if (!(C > 0.0)) throw DomainError("contour_exp: sector constant must be positive");
  if (!(q_param > 0.0 && q_param < 1.0)) throw DomainError("contour_exp: q_param must lie in (0, 1)");
  if (!(tol > 0.0)) throw DomainError("contour_exp: tol must be positive");
  const double half = std::atan(q_param / C);
  const double arg = std::abs(std::arg(z));
  if (!(arg < half)) throw DomainError("contour_exp: arg z outside the admissible sector");

  Contour c;
  c.z = z;
  c.q_param = q_param;
  c.C = C;
  c.theta = kPi / 2.0 + half;
  c.eps_prime = std::sin(half - arg);
  const double az = std::abs(z);
  // Bound for ||mu R(mu)|| on the closed sector of half-angle theta.
  const double m_sector = resolvent_sector_bound(C, 1.0, q_param, true);
  const double ep = c.eps_prime;
  c.r_max = std::max(2.0 / az, std::log(10.0 * m_sector / (tol * ep)) / (ep * az));
  // int_{r_max}^inf e^{-ep r |z|} m_sector / r dr / (2 pi), for both rays.
  c.tail_bound = 2.0 * m_sector * std::exp(-ep * c.r_max * az) / (2.0 * kPi * ep * az * c.r_max);
  c.arc = quad::mapped(quad::gauss_legendre(nodes), -c.theta, c.theta);
  c.ray = quad::mapped(quad::gauss_legendre(nodes), 0.0, std::log(c.r_max * az));
  return c;
}

namespace {

CMatrix contour_sum(const DiffusionSemigroup& G, const Contour& c) {
  const int n = G.size();
  const CMatrix A = G.generator().cast<complex>();
  const CMatrix I = CMatrix::Identity(n, n);
  const double rho = 1.0 / std::abs(c.z);
  CMatrix total = CMatrix::Zero(n, n);

  // Arc: (1/2 pi) int e^{mu z} mu R(mu) d phi.
  for (std::size_t m = 0; m < c.arc.size(); ++m) {
    const complex mu = std::polar(rho, c.arc.nodes[m]);
    const CMatrix R = (mu * I - A).partialPivLu().solve(I);
    total += (c.arc.weights[m] / (2.0 * kPi) * std::exp(mu * c.z) * mu) * R;
  }
  // Rays: upper outward, lower inward; dr = r du.
  const complex up = std::polar(1.0, c.theta);
  const complex down = std::conj(up);
  const complex inv2pii = 1.0 / complex(0.0, 2.0 * kPi);
  for (std::size_t m = 0; m < c.ray.size(); ++m) {
    const double r = rho * std::exp(c.ray.nodes[m]);
    const double w = c.ray.weights[m] * r;
    const complex mu_up = r * up;
    const complex mu_dn = r * down;
    const CMatrix Ru = (mu_up * I - A).partialPivLu().solve(I);
    const CMatrix Rd = (mu_dn * I - A).partialPivLu().solve(I);
    total += (inv2pii * w * std::exp(mu_up * c.z) * up) * Ru;
    total -= (inv2pii * w * std::exp(mu_dn * c.z) * down) * Rd;
  }
  return total;
}

}  // namespace

ContourResult contour_exp(const DiffusionSemigroup& G, complex z, double C, double q_param,
                          const ContourOptions& opts) {
  int nodes = opts.initial_nodes;
  Contour c = make_contour(z, C, q_param, opts.tol, nodes);
  CMatrix prev = contour_sum(G, c);
  double change = std::numeric_limits<double>::infinity();
  while (true) {
    if (2 * nodes > opts.max_nodes)
      throw ConvergenceError("contour_exp: node cap reached", change + c.tail_bound);
    nodes *= 2;
    c = make_contour(z, C, q_param, opts.tol, nodes);
    CMatrix next = contour_sum(G, c);
    const double scale = std::max(1.0, next.cwiseAbs().maxCoeff());
    change = (next - prev).cwiseAbs().maxCoeff() / scale;
    prev = std::move(next);
    if (change < opts.tol / 2.0) break;
  }
  return {std::move(prev), change + c.tail_bound, nodes, std::move(c)};
}

ContourResult contour_exp(const DiffusionSemigroup& G, complex z, double C,
                          const ContourOptions& opts) {
  if (!(C > 0.0)) throw DomainError("contour_exp: sector constant must be positive");
  const double u = C * std::tan(std::abs(std::arg(z)));
  if (!(u < 1.0)) throw DomainError("contour_exp: arg z outside the admissible sector");
  return contour_exp(G, z, C, (1.0 + C * u) / (1.0 + C), opts);
}

// ---------------------------------------------------------------------------

std::vector<double> default_time_grid(const DiffusionSemigroup& G, int points) {
  if (points < 2) throw DomainError("default_time_grid: need at least two points");
  const double gap = G.spectral_gap() > 0.0 ? G.spectral_gap() : 1.0;
  const double lo = std::log(1e-4 / gap), hi = std::log(1e2 / gap);
  std::vector<double> t(points);
  for (int i = 0; i < points; ++i) t[i] = std::exp(lo + (hi - lo) * i / (points - 1));
  return t;
}

KatoResult kato_epsilon(const DiffusionSemigroup& G, const MixedNormConfig& cfg,
                        const std::vector<double>& t_grid, const AscentOptions& opts) {
  if (t_grid.empty()) throw DomainError("kato_epsilon: empty time grid");
  const int n = G.size();
  const Matrix I = Matrix::Identity(n, n);
  KatoResult res;
  for (const double t : t_grid) {
    if (!(t > 0.0)) throw DomainError("kato_epsilon: times must be positive");
    const Matrix T = markov_at(G, t).matrix;
    const NormEstimate est = operator_norm_estimate(Matrix(I - T), G.space(), cfg, opts);
    res.converged = res.converged && est.converged;
    if (est.value > res.sup_value) {
      res.sup_value = est.value;
      res.argmax_t = t;
    }
  }
  if (G.ergodic() || G.zero_modes() == 0) {
    const NormEstimate est =
        operator_norm_estimate(Matrix(I - G.kernel_projection()), G.space(), cfg, opts);
    res.converged = res.converged && est.converged;
    if (est.value > res.sup_value) {
      res.sup_value = est.value;
      res.argmax_t = std::numeric_limits<double>::infinity();
    }
  } else {
    res.warnings.push_back("chain is not ergodic: sup over the time grid only");
  }
  res.epsilon = std::clamp(2.0 - res.sup_value, 0.0, 2.0);
  return res;
}

double kato_criterion_check(const CMatrix& T, const FiniteMeasureSpace& space, complex zeta,
                            const MixedNormConfig& cfg, const AscentOptions& opts) {
  if (std::abs(std::abs(zeta) - 1.0) > 1e-12) throw DomainError("kato_criterion_check: |zeta| must be 1");
  const Eigen::Index n = T.rows();
  const CMatrix M = zeta * CMatrix::Identity(n, n) - T;
  const double gain = minimum_gain_estimate(M, space, cfg, opts).value;
  if (gain <= 1e-12) return std::numeric_limits<double>::infinity();
  return 1.0 / gain;
}

double kato_criterion_check(const MarkovOperator& T, complex zeta, const MixedNormConfig& cfg,
                            const AscentOptions& opts) {
  return kato_criterion_check(T.matrix.cast<complex>(), T.space, zeta, cfg, opts);
}

DerivativeSup max_t_derivative(const DiffusionSemigroup& G, const MixedNormConfig& cfg,
                               const std::vector<double>& t_grid, const AscentOptions& opts) {
  if (t_grid.empty()) throw DomainError("max_t_derivative: empty time grid");
  DerivativeSup res;
  const Vector& lam = G.eigenvalues();
  auto value_at = [&](double t) {
    const Vector factors = (t * lam.array() * (t * lam.array()).exp()).matrix();
    const NormEstimate est = operator_norm_estimate(G.spectral_function(factors), G.space(), cfg, opts);
    res.converged = res.converged && est.converged;
    return est.value;
  };
  std::size_t best = 0;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double v = value_at(t_grid[i]);
    if (v > res.sup_value) {
      res.sup_value = v;
      res.argmax_t = t_grid[i];
      best = i;
    }
  }
  if (res.sup_value == 0.0 || t_grid.size() < 2) return res;
  const double lo = std::log(t_grid[best > 0 ? best - 1 : 0]);
  const double hi = std::log(t_grid[std::min(best + 1, t_grid.size() - 1)]);
  const auto [u, neg] = boost::math::tools::brent_find_minima(
      [&](double x) { return -value_at(std::exp(x)); }, lo, hi, 40);
  if (-neg > res.sup_value) {
    res.sup_value = -neg;
    res.argmax_t = std::exp(u);
  }
  return res;
}

std::vector<double> neumann_partial_errors(const DiffusionSemigroup& G, complex lambda, complex mu,
                                           int terms) {
  if (terms < 1) throw DomainError("neumann_partial_errors: terms must be positive");
  const CMatrix target = resolvent(G, lambda);
  const CMatrix Rmu = resolvent(G, mu);
  const complex h = mu - lambda;
  CMatrix power = Rmu;  // h^n R(mu)^{n+1}
  CMatrix sum = CMatrix::Zero(G.size(), G.size());
  std::vector<double> errs;
  errs.reserve(terms);
  for (int n = 0; n < terms; ++n) {
    if (n > 0) power = h * (power * Rmu);
    sum += power;
    errs.push_back((sum - target).cwiseAbs().maxCoeff());
  }
  return errs;
}

}  // namespace sglab
