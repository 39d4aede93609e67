#include "sglab/lps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_gamma.h>

#include "sglab/ascent.hpp"
#include "sglab/errors.hpp"
#include "sglab/quadrature.hpp"

namespace sglab {

TimeGrid make_time_grid(double t_min, double t_max, int panels, int order) {
  if (!(t_min > 0.0) || !(t_max > t_min)) throw DomainError("time grid needs 0 < t_min < t_max");
  if (panels < 1 || order < 1) throw DomainError("time grid needs positive panels and order");
  const quad::Rule r = quad::composite_legendre(std::log(t_min), std::log(t_max), panels, order);
  TimeGrid g;
  g.weights = r.weights;
  g.nodes.resize(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) g.nodes[i] = std::exp(r.nodes[i]);
  g.t_min = t_min;
  g.t_max = t_max;
  g.panels = panels;
  g.order = order;
  return g;
}

TimeGrid TimeGrid::refined() const { return make_time_grid(t_min, t_max, 2 * panels, order); }

TimeGrid default_time_grid_lps(const DiffusionSemigroup& G, int order) {
  const double radius = G.spectral_radius() > 0.0 ? G.spectral_radius() : 1.0;
  const double gap = G.spectral_gap() > 0.0 ? G.spectral_gap() : 1.0;
  const double lo = 1e-6 / radius, hi = 50.0 / gap;
  const int panels = std::max(1, static_cast<int>(std::ceil(2.0 * std::log(hi / lo))));
  return make_time_grid(lo, hi, panels, order);
}

namespace {

constexpr int kMaxDoublings = 6;
constexpr double kDoublingTol = 1e-8;

double lq(const Eigen::Ref<const Eigen::RowVectorXd>& x, double q) {
  if (q == 2.0) return x.norm();
  return std::pow(x.array().abs().pow(q).sum(), 1.0 / q);
}

/// Turns an error bound on I into one on I^{1/Q}.
double root_error(double I, double dI, double Q) {
  if (dI <= 0.0) return 0.0;
  const double crude = std::pow(dI, 1.0 / Q);
  if (I <= 0.0) return crude;
  return std::min(crude, dI / (Q * std::pow(I, 1.0 - 1.0 / Q)));
}

void check_field(const DiffusionSemigroup& G, const FunctionField& f, const MixedNormConfig& cfg) {
  if (f.rows() != G.size() || f.cols() != cfg.d())
    throw ShapeError("field shape does not match the space and config");
  if (!f.allFinite()) throw NumericError("field has non-finite entries");
}

/// Stacked spectral multipliers: block m is V diag(phi(t_m lambda)) V^T D.
Matrix stacked_multipliers(const DiffusionSemigroup& G, const TimeGrid& grid,
                           const std::function<double(double t, double lambda)>& phi) {
  const int n = G.size();
  const Matrix right = G.eigenvectors().transpose() * G.space().weights().asDiagonal();
  Matrix P(n * static_cast<Eigen::Index>(grid.size()), n);
  Vector fac(n);
  for (std::size_t m = 0; m < grid.size(); ++m) {
    for (int j = 0; j < n; ++j) fac(j) = phi(grid.nodes[m], G.eigenvalues()(j));
    P.middleRows(static_cast<Eigen::Index>(m) * n, n) = G.eigenvectors() * fac.asDiagonal() * right;
  }
  return P;
}

double g_factor(double t, double lambda, int k) {
  const double s = t * lambda;
  return std::pow(s, k) * std::exp(s);
}

/// Per-point integrals sum_m w_m ||(t_m A)^k e^{t_m A} f(i)||_q^Q.
Vector g_integrals(const DiffusionSemigroup& G, const Matrix& coeffs, double q, double Q, int k,
                   const TimeGrid& grid) {
  const int n = G.size();
  Vector I = Vector::Zero(n);
  Vector fac(n);
  for (std::size_t m = 0; m < grid.size(); ++m) {
    for (int j = 0; j < n; ++j) fac(j) = g_factor(grid.nodes[m], G.eigenvalues()(j), k);
    const Matrix h = G.eigenvectors() * (fac.asDiagonal() * coeffs);
    for (int i = 0; i < n; ++i) I(i) += grid.weights[m] * std::pow(lq(h.row(i), q), Q);
  }
  return I;
}

/// Per-point bound on |(t^k A^k e^{tA} f)(i)| / max over modes of |t lambda|^k e^{t lambda}.
Vector mode_envelope(const DiffusionSemigroup& G, const Matrix& coeffs, double q) {
  const int n = G.size();
  Vector K = Vector::Zero(n);
  for (int j = 0; j < n; ++j) {
    if (G.eigenvalues()(j) == 0.0) continue;
    const double cn = lq(coeffs.row(j), q);
    K += cn * G.eigenvectors().col(j).cwiseAbs();
  }
  return K;
}

}  // namespace

GFunctionResult g_function(const DiffusionSemigroup& G, const FunctionField& f,
                           const MixedNormConfig& cfg, double q_time, int k, const TimeGrid& grid) {
  check_field(G, f, cfg);
  if (k < 1) throw DomainError("g_function: k must be positive");
  if (!(q_time >= 2.0) || !std::isfinite(q_time)) throw DomainError("g_function: q_time must be >= 2");
  const int n = G.size();
  const double Q = q_time, q = cfg.q(), p = cfg.p();
  const Matrix coeffs = G.coefficients(f);

  TimeGrid g = grid;
  Vector cur = g_integrals(G, coeffs, q, Q, k, g);
  Vector delta = Vector::Zero(n);
  for (int it = 0;; ++it) {
    const TimeGrid finer = g.refined();
    const Vector next = g_integrals(G, coeffs, q, Q, k, finer);
    delta = (next - cur).cwiseAbs();
    const double scale = next.cwiseAbs().maxCoeff();
    g = finer;
    cur = next;
    if (scale == 0.0 || delta.maxCoeff() <= kDoublingTol * scale) break;
    if (it + 1 >= kMaxDoublings)
      throw ConvergenceError("g_function: time quadrature did not settle", delta.maxCoeff() / scale);
  }

  // Tails: below t_min, |t lambda|^k e^{t lambda} <= (t rho)^k; above t_max,
  // the slowest mode dominates once t gap >= k.
  const Vector K = mode_envelope(G, coeffs, q);
  const double rho = G.spectral_radius(), gap = G.spectral_gap();
  const double kQ = k * Q;
  Vector tail = Vector::Zero(n);
  if (gap > 0.0) {
    const double lower = std::pow(g.t_min * rho, kQ) / kQ;
    double upper;
    if (gap * g.t_max >= k) {
      upper = std::pow(Q, -kQ) * boost::math::tgamma(kQ, Q * gap * g.t_max);
    } else {
      // s^k e^{-s} <= (2k/e)^k e^{-s/2}, and int_x^inf e^{-u} du/u <= e^{-x}/x.
      const double x = Q * gap * g.t_max / 2.0;
      upper = std::pow(2.0 * k / std::numbers::e, kQ) * std::exp(-x) / x;
    }
    for (int i = 0; i < n; ++i) tail(i) = std::pow(K(i), Q) * (lower + upper);
  }

  GFunctionResult res;
  res.panels = g.panels;
  res.per_point.resize(n);
  Vector err(n);
  for (int i = 0; i < n; ++i) {
    res.per_point(i) = std::pow(std::max(cur(i), 0.0), 1.0 / Q);
    err(i) = root_error(cur(i), delta(i) + tail(i), Q);
  }
  const Vector& mu = G.space().weights();
  res.lp_norm = std::pow(mu.dot(res.per_point.array().pow(p).matrix()), 1.0 / p);
  res.quad_error = std::pow(mu.dot(err.array().pow(p).matrix()), 1.0 / p);
  return res;
}

// ---------------------------------------------------------------------------

namespace {

/// Mixed norm of f and its gradient (written into grad when not null).
double mixed_norm_with_grad(const Matrix& f, const Vector& mu, double p, double q, Matrix* grad) {
  const Eigen::Index n = f.rows();
  Vector r(n);
  for (Eigen::Index i = 0; i < n; ++i) r(i) = lq(f.row(i), q);
  const double N = std::pow(mu.dot(r.array().pow(p).matrix()), 1.0 / p);
  if (grad) {
    grad->setZero(f.rows(), f.cols());
    if (N > 0.0)
      for (Eigen::Index i = 0; i < n; ++i) {
        if (r(i) == 0.0) continue;
        const double c = mu(i) * std::pow(r(i) / N, p - 1.0);
        for (Eigen::Index j = 0; j < f.cols(); ++j) {
          const double x = f(i, j);
          (*grad)(i, j) = c * std::pow(std::abs(x) / r(i), q - 2.0) * x / r(i);
        }
      }
  }
  return N;
}

}  // namespace

LpsRatioResult lps_ratio(const DiffusionSemigroup& G, const MixedNormConfig& cfg, double q_time,
                         int k, const TimeGrid& grid, const AscentOptions& opts) {
  if (k < 1) throw DomainError("lps_ratio: k must be positive");
  if (!(q_time >= 2.0) || !std::isfinite(q_time)) throw DomainError("lps_ratio: q_time must be >= 2");
  if (opts.restarts < 1) throw DomainError("lps_ratio: restarts must be positive");
  const int n = G.size(), d = cfg.d();
  const double Q = q_time, q = cfg.q(), p = cfg.p();
  const Vector& mu = G.space().weights();
  const Matrix P = stacked_multipliers(G, grid, [k](double t, double l) { return g_factor(t, l, k); });
  const Eigen::Index M = static_cast<Eigen::Index>(grid.size());

  const RatioObjective<Matrix> objective = [&](const Matrix& f, Matrix* grad) {
    const Matrix H = P * f;
    Matrix A(M, n);  // A(m, i) = ||H_m(i)||_q
    for (Eigen::Index m = 0; m < M; ++m)
      for (int i = 0; i < n; ++i) A(m, i) = lq(H.row(m * n + i), q);
    Vector I = Vector::Zero(n);
    for (Eigen::Index m = 0; m < M; ++m)
      for (int i = 0; i < n; ++i) I(i) += grid.weights[m] * std::pow(A(m, i), Q);
    Vector Gv(n);
    for (int i = 0; i < n; ++i) Gv(i) = std::pow(I(i), 1.0 / Q);
    const double num = std::pow(mu.dot(Gv.array().pow(p).matrix()), 1.0 / p);
    Matrix dden;
    const double den = mixed_norm_with_grad(f, mu, p, q, grad ? &dden : nullptr);
    if (!(den > 0.0)) return 0.0;
    const double ratio = num / den;
    if (grad) {
      Matrix dH = Matrix::Zero(H.rows(), d);
      if (num > 0.0)
        for (int i = 0; i < n; ++i) {
          if (I(i) <= 0.0) continue;
          const double ci = mu(i) * std::pow(Gv(i) / num, p - 1.0) * std::pow(I(i), 1.0 / Q - 1.0);
          for (Eigen::Index m = 0; m < M; ++m) {
            const double a = A(m, i);
            if (a == 0.0) continue;
            const double cm = ci * grid.weights[m] * std::pow(a, Q - q);
            for (int j = 0; j < d; ++j) {
              const double h = H(m * n + i, j);
              dH(m * n + i, j) = cm * std::pow(std::abs(h), q - 2.0) * h;
            }
          }
        }
      *grad = (P.transpose() * dH) / den - (ratio / den) * dden;
    }
    return ratio;
  };

  std::function<void(Matrix&)> project;
  if (G.zero_modes() > 0) {
    const Matrix Pi = G.kernel_projection();
    project = [Pi](Matrix& f) { f -= Pi * f; };
  }
  const auto best = optimize_ratio<Matrix>(objective, n, d, opts, false, project);
  return {best.value, best.argbest, best.converged};
}

FunctionalValue semigroup_difference_functional(const DiffusionSemigroup& G, const FunctionField& f,
                                                const MixedNormConfig& cfg, double alpha_ratio,
                                                double q_time, const TimeGrid& grid) {
  check_field(G, f, cfg);
  if (!(alpha_ratio > 1.0) || !std::isfinite(alpha_ratio))
    throw DomainError("semigroup_difference_functional: alpha must exceed 1");
  if (!(q_time >= 1.0) || !std::isfinite(q_time))
    throw DomainError("semigroup_difference_functional: q_time must be >= 1");
  const int n = G.size();
  const double Q = q_time;
  const Matrix coeffs = G.coefficients(f);
  const auto integral = [&](const TimeGrid& g) {
    double I = 0.0;
    Vector fac(n);
    for (std::size_t m = 0; m < g.size(); ++m) {
      const double t = g.nodes[m];
      for (int j = 0; j < n; ++j) {
        const double l = G.eigenvalues()(j);
        fac(j) = std::exp(t * l) - std::exp(alpha_ratio * t * l);
      }
      const Matrix h = G.eigenvectors() * (fac.asDiagonal() * coeffs);
      I += g.weights[m] * std::pow(mixed_norm(h, G.space(), cfg), Q);
    }
    return I;
  };

  TimeGrid g = grid;
  double cur = integral(g), delta = 0.0;
  for (int it = 0;; ++it) {
    const TimeGrid finer = g.refined();
    const double next = integral(finer);
    delta = std::abs(next - cur);
    g = finer;
    cur = next;
    if (next == 0.0 || delta <= kDoublingTol * std::abs(next)) break;
    if (it + 1 >= kMaxDoublings)
      throw ConvergenceError("semigroup_difference_functional: time quadrature did not settle",
                             delta / std::abs(next));
  }

  // |e^{t l} - e^{a t l}| <= (a - 1) t |l| near 0 and <= e^{-t gap} for large t.
  double K = 0.0;
  for (int j = 0; j < n; ++j) {
    if (G.eigenvalues()(j) == 0.0) continue;
    const Matrix mode = G.eigenvectors().col(j) * coeffs.row(j);
    K += mixed_norm(mode, G.space(), cfg);
  }
  double tail = 0.0;
  const double gap = G.spectral_gap();
  if (gap > 0.0 && K > 0.0) {
    const double lower = std::pow((alpha_ratio - 1.0) * G.spectral_radius() * g.t_min, Q) / Q;
    const double x = Q * gap * g.t_max;
    tail = std::pow(K, Q) * (lower + std::exp(-x) / x);
  }
  return {std::pow(std::max(cur, 0.0), 1.0 / Q), root_error(cur, delta + tail, Q)};
}

// ---------------------------------------------------------------------------

namespace {

complex inverse_gamma(complex a) {
  if (a.imag() == 0.0) return 1.0 / std::tgamma(a.real());
  gsl_sf_result lnr, arg;
  const int status = gsl_sf_lngamma_complex_e(a.real(), a.imag(), &lnr, &arg);
  if (status != GSL_SUCCESS) throw NumericError("complex log-gamma evaluation failed");
  return std::exp(complex(-lnr.val, -arg.val));
}

/// (1/Gamma(alpha)) int_0^1 v^{alpha-1} F(v) dv for Re alpha > 0.
template <class Fn>
Eigen::VectorXcd unit_riemann_liouville(const Fn& F, complex alpha, const FractionalOptions& opts) {
  const complex am1 = alpha - 1.0;
  Eigen::VectorXcd sum;
  auto add = [&sum](const Eigen::VectorXcd& v, complex w) {
    if (sum.size() == 0) sum = Eigen::VectorXcd::Zero(v.size());
    sum += w * v;
  };

  // [0, 1/2]: the v^{alpha-1} singularity.
  if (alpha.imag() == 0.0) {
    const quad::Rule r = quad::gauss_jacobi(opts.order, 0.0, alpha.real() - 1.0);
    const double scale = std::pow(4.0, -alpha.real());
    for (std::size_t m = 0; m < r.size(); ++m) add(F((1.0 + r.nodes[m]) / 4.0), scale * r.weights[m]);
  } else {
    // v = w^2: v^{alpha-1} dv = 2 w^{2 alpha - 1} dw, graded towards w = 0; the
    // innermost piece [0, v0] is taken as F(0) v0^alpha / alpha.
    const double whi = std::sqrt(0.5);
    const double w0 = whi * std::ldexp(1.0, -opts.levels);
    const quad::Rule r = quad::graded_legendre(w0, whi, opts.levels, opts.order);
    for (std::size_t m = 0; m < r.size(); ++m) {
      const double w = r.nodes[m];
      add(F(w * w), 2.0 * r.weights[m] * std::exp((2.0 * alpha - 1.0) * std::log(w)));
    }
    const double v0 = w0 * w0;
    add(F(0.0), std::exp(alpha * std::log(v0)) / alpha);
  }
  // [1/2, 1] in y = 1 - v, graded towards y = 0.
  const quad::Rule r = quad::graded_legendre(0.0, 0.5, opts.levels, opts.order);
  for (std::size_t m = 0; m < r.size(); ++m) {
    const double y = r.nodes[m];
    add(F(1.0 - y), r.weights[m] * std::exp(am1 * std::log1p(-y)));
  }
  return inverse_gamma(alpha) * sum;
}

complex direct_factor(complex alpha, int k, double x, const FractionalOptions& opts) {
  const auto F = [k, x](double v) {
    const double s = -x * (1.0 - v);
    Eigen::VectorXcd out(1);
    out(0) = std::pow(s, k) * std::exp(s);
    return out;
  };
  return unit_riemann_liouville(F, alpha, opts)(0);
}

}  // namespace

complex fractional_factor(complex alpha, int k, double x, const FractionalOptions& opts) {
  if (k < 0) throw DomainError("fractional_factor: k must be nonnegative");
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("fractional_factor: x must be >= 0");
  if (alpha.real() > 0.0) return direct_factor(alpha, k, x, opts);
  const int steps = static_cast<int>(std::ceil(-alpha.real())) + 1;
  const complex a0 = alpha + static_cast<double>(steps);
  // D[j] = D(k + j, current alpha).
  std::vector<complex> D(steps + 1);
  for (int j = 0; j <= steps; ++j) D[j] = direct_factor(a0, k + j, x, opts);
  complex a = a0;
  for (int s = 1; s <= steps; ++s) {
    for (int j = 0; j <= steps - s; ++j) D[j] = (static_cast<double>(k + j) + a) * D[j] + D[j + 1];
    a -= 1.0;
  }
  return D[0];
}

ComplexField fractional_average(const DiffusionSemigroup& G, const FunctionField& f, complex alpha,
                                double t, int k, const FractionalOptions& opts) {
  if (f.rows() != G.size()) throw ShapeError("fractional_average: field shape mismatch");
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("fractional_average: t must be positive");
  const int n = G.size();
  Eigen::VectorXcd fac(n);
  for (int j = 0; j < n; ++j) fac(j) = fractional_factor(alpha, k, -t * G.eigenvalues()(j), opts);
  const Matrix coeffs = G.coefficients(f);
  return G.eigenvectors().cast<complex>() * (fac.asDiagonal() * coeffs.cast<complex>());
}

Eigen::VectorXcd fractional_integral(const std::function<Eigen::VectorXcd(double)>& phi,
                                     complex alpha, double t, const FractionalOptions& opts) {
  if (!(alpha.real() > 0.0)) throw DomainError("fractional_integral: Re alpha must be positive");
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("fractional_integral: t must be positive");
  const auto F = [&phi, t](double v) { return phi(t * (1.0 - v)); };
  return std::exp(alpha * std::log(t)) * unit_riemann_liouville(F, alpha, opts);
}

// ---------------------------------------------------------------------------

double analyticity_constant(const DiffusionSemigroup& G, const MixedNormConfig& cfg, double beta0,
                            const AscentOptions& opts, int angles, int radii) {
  if (!(beta0 > 0.0 && beta0 < std::numbers::pi / 2.0))
    throw DomainError("analyticity_constant: beta0 must lie in (0, pi/2)");
  if (angles < 1 || radii < 2) throw DomainError("analyticity_constant: grid too small");
  const double radius = G.spectral_radius() > 0.0 ? G.spectral_radius() : 1.0;
  const double gap = G.spectral_gap() > 0.0 ? G.spectral_gap() : 1.0;
  const double lo = std::log(1e-3 / radius), hi = std::log(1e3 / gap);
  double best = 0.0;
  for (int a = 0; a <= angles; ++a) {
    const double phi = beta0 * a / angles;
    for (const double sgn : {1.0, -1.0}) {
      if (a == 0 && sgn < 0.0) continue;
      for (int r = 0; r < radii; ++r) {
        const double rr = std::exp(lo + (hi - lo) * r / (radii - 1));
        const CMatrix T = semigroup_at(G, std::polar(rr, sgn * phi));
        best = std::max(best, operator_norm_estimate(T, G.space(), cfg, opts).value);
      }
    }
  }
  return best;
}

}  // namespace sglab
