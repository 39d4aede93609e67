#include "sglab/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "sglab/ascent.hpp"
#include "sglab/errors.hpp"

namespace sglab {

FiniteMeasureSpace::FiniteMeasureSpace(Vector weights) : weights_(std::move(weights)) {
  if (weights_.size() == 0) throw ShapeError("measure space needs at least one atom");
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    if (!std::isfinite(weights_(i))) throw NumericError("measure space: non-finite weight");
    if (!(weights_(i) > 0.0)) throw DomainError("measure space: weights must be positive");
  }
  total_mass_ = weights_.sum();
}

FiniteMeasureSpace FiniteMeasureSpace::uniform(int n, bool probability) {
  if (n < 1) throw ShapeError("measure space needs at least one atom");
  return FiniteMeasureSpace(Vector::Constant(n, probability ? 1.0 / n : 1.0));
}

FiniteMeasureSpace FiniteMeasureSpace::normalized() const {
  return FiniteMeasureSpace(weights_ / total_mass_);
}

MixedNormConfig::MixedNormConfig(double p, double q, int d) : p_(p), q_(q), d_(d) {
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("mixed norm: p must lie in (1, inf)");
  if (!(q >= 2.0) || !std::isfinite(q)) throw DomainError("mixed norm: q must lie in [2, inf)");
  if (d < 1) throw DomainError("mixed norm: d must be positive");
}

namespace {

template <class Derived>
double lq_norm(const Eigen::MatrixBase<Derived>& row, double q) {
  const double scale = row.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (Eigen::Index j = 0; j < row.size(); ++j) s += std::pow(std::abs(row(j)) / scale, q);
  return scale * std::pow(s, 1.0 / q);
}

template <class M>
void check_field(const M& f, const FiniteMeasureSpace& space, int d) {
  if (f.rows() != space.size() || f.cols() != d)
    throw ShapeError("field shape does not match measure space and inner dimension");
  if (!f.allFinite()) throw NumericError("field has non-finite entries");
}

/// Norm of f together with its gradient (see header of ascent.hpp for packing).
template <class M>
double mixed_norm_grad(const M& f, const Vector& mu, double p, double q, M* grad) {
  const Eigen::Index n = f.rows();
  Vector r(n);
  for (Eigen::Index i = 0; i < n; ++i) r(i) = lq_norm(f.row(i), q);
  const double rmax = r.maxCoeff();
  if (rmax == 0.0) {
    if (grad) grad->setZero(f.rows(), f.cols());
    return 0.0;
  }
  double s = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) s += mu(i) * std::pow(r(i) / rmax, p);
  const double norm = rmax * std::pow(s, 1.0 / p);
  if (grad) {
    grad->resize(f.rows(), f.cols());
    for (Eigen::Index i = 0; i < n; ++i) {
      if (r(i) == 0.0) {
        grad->row(i).setZero();
        continue;
      }
      // mu_i (r_i / N)^(p-1) (|f_ij| / r_i)^(q-2) f_ij / r_i
      const double c = mu(i) * std::pow(r(i) / norm, p - 1.0);
      for (Eigen::Index j = 0; j < f.cols(); ++j) {
        const double a = std::abs(f(i, j)) / r(i);
        (*grad)(i, j) = c * (a == 0.0 ? 0.0 : std::pow(a, q - 2.0)) * (f(i, j) / r(i));
      }
    }
  }
  return norm;
}

template <class M>
double mixed_norm_impl(const M& f, const FiniteMeasureSpace& space, const MixedNormConfig& cfg) {
  check_field(f, space, cfg.d());
  return mixed_norm_grad<M>(f, space.weights(), cfg.p(), cfg.q(), nullptr);
}

template <class M>
AscentResult<M> ratio_search(const M& T, const FiniteMeasureSpace& space,
                             const MixedNormConfig& cfg, const AscentOptions& opts,
                             bool minimize) {
  if (T.rows() != space.size() || T.cols() != space.size())
    throw ShapeError("operator shape does not match measure space");
  if (!T.allFinite()) throw NumericError("operator has non-finite entries");
  if (opts.restarts < 1) throw DomainError("restarts must be at least 1");
  if (!(opts.tol > 0.0)) throw DomainError("tol must be positive");
  const Vector& mu = space.weights();
  const double p = cfg.p(), q = cfg.q();
  const M Tadj = T.adjoint();
  RatioObjective<M> objective = [&](const M& f, M* grad) {
    const M Tf = T * f;
    M gf, gt;
    const double nf = mixed_norm_grad<M>(f, mu, p, q, grad ? &gf : nullptr);
    const double nt = mixed_norm_grad<M>(Tf, mu, p, q, grad ? &gt : nullptr);
    if (nf == 0.0) {
      if (grad) grad->setZero(f.rows(), f.cols());
      return 0.0;
    }
    if (grad) *grad = (Tadj * gt) / nf - (nt / (nf * nf)) * gf;
    return nt / nf;
  };
  return optimize_ratio<M>(objective, space.size(), cfg.d(), opts, minimize);
}

template <class M>
double upper_impl(const M& T, const FiniteMeasureSpace& space, double p) {
  if (T.rows() != space.size() || T.cols() != space.size())
    throw ShapeError("operator shape does not match measure space");
  if (!(p >= 1.0)) throw DomainError("operator_norm_upper: p must lie in [1, inf]");
  const Vector& mu = space.weights();
  const Matrix A = T.cwiseAbs();
  const double norm_inf = A.rowwise().sum().maxCoeff();
  double norm_1 = 0.0;
  for (Eigen::Index j = 0; j < A.cols(); ++j)
    norm_1 = std::max(norm_1, mu.dot(A.col(j)) / mu(j));
  if (std::isinf(p)) return norm_inf;
  if (norm_1 == 0.0 || norm_inf == 0.0) return 0.0;
  return std::pow(norm_1, 1.0 / p) * std::pow(norm_inf, 1.0 - 1.0 / p);
}

Eigen::JacobiSVD<CMatrix> weighted_svd(const CMatrix& T, const FiniteMeasureSpace& space) {
  if (T.rows() != space.size() || T.cols() != space.size())
    throw ShapeError("operator shape does not match measure space");
  const Vector s = space.weights().cwiseSqrt();
  const CMatrix B = s.asDiagonal() * T * s.cwiseInverse().asDiagonal();
  return Eigen::JacobiSVD<CMatrix>(B);
}

}  // namespace

double mixed_norm(const Eigen::Ref<const Matrix>& f, const FiniteMeasureSpace& space,
                  const MixedNormConfig& cfg) {
  return mixed_norm_impl(Matrix(f), space, cfg);
}

double mixed_norm(const Eigen::Ref<const CMatrix>& f, const FiniteMeasureSpace& space,
                  const MixedNormConfig& cfg) {
  return mixed_norm_impl(CMatrix(f), space, cfg);
}

NormEstimate operator_norm_lower(const Matrix& T, const FiniteMeasureSpace& space,
                                 const MixedNormConfig& cfg, const AscentOptions& opts) {
  const auto r = ratio_search(T, space, cfg, opts, false);
  return {r.value, r.converged, r.iterations};
}

NormEstimate operator_norm_lower(const CMatrix& T, const FiniteMeasureSpace& space,
                                 const MixedNormConfig& cfg, const AscentOptions& opts) {
  const auto r = ratio_search(T, space, cfg, opts, false);
  return {r.value, r.converged, r.iterations};
}

double operator_norm_upper(const Matrix& T, const FiniteMeasureSpace& space, double p) {
  return upper_impl(T, space, p);
}

double operator_norm_upper(const CMatrix& T, const FiniteMeasureSpace& space, double p) {
  return upper_impl(T, space, p);
}

double l2_operator_norm(const CMatrix& T, const FiniteMeasureSpace& space) {
  return weighted_svd(T, space).singularValues()(0);
}

double l2_minimum_gain(const CMatrix& T, const FiniteMeasureSpace& space) {
  const auto svd = weighted_svd(T, space);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

NormEstimate operator_norm_estimate(const CMatrix& T, const FiniteMeasureSpace& space,
                                    const MixedNormConfig& cfg, const AscentOptions& opts) {
  if (cfg.hilbert() && opts.exact_hilbert) return {l2_operator_norm(T, space), true, 0};
  if (T.imag().cwiseAbs().maxCoeff() == 0.0) return operator_norm_lower(Matrix(T.real()), space, cfg, opts);
  return operator_norm_lower(T, space, cfg, opts);
}

NormEstimate operator_norm_estimate(const Matrix& T, const FiniteMeasureSpace& space,
                                    const MixedNormConfig& cfg, const AscentOptions& opts) {
  if (cfg.hilbert() && opts.exact_hilbert)
    return {l2_operator_norm(T.cast<complex>(), space), true, 0};
  return operator_norm_lower(T, space, cfg, opts);
}

NormEstimate minimum_gain_estimate(const CMatrix& T, const FiniteMeasureSpace& space,
                                   const MixedNormConfig& cfg, const AscentOptions& opts) {
  if (cfg.hilbert() && opts.exact_hilbert) return {l2_minimum_gain(T, space), true, 0};
  const auto r = ratio_search(T, space, cfg, opts, true);
  return {r.value, r.converged, r.iterations};
}

// ---------------------------------------------------------------------------
// Uniform convexity probe

double uniform_convexity_deficit(double q, double delta, int d, int sample_count,
                                 std::uint64_t seed,
                                 const std::optional<FiniteMeasureSpace>& space) {
  if (!(q >= 2.0)) throw DomainError("uniform_convexity_deficit: q must be at least 2");
  if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("uniform_convexity_deficit: delta in (0, 1]");
  if (d < 1 || sample_count < 1) throw DomainError("uniform_convexity_deficit: d, sample_count >= 1");
  const int n = space ? space->size() : 1;
  const Vector mu = space ? space->weights() : Vector::Ones(1);
  const auto norm = [&](const Matrix& x) { return mixed_norm_grad<Matrix>(x, mu, q, q, nullptr); };

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const auto gaussian = [&]() {
    Matrix x(n, d);
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, j) = normal(rng);
    return x;
  };

  double worst = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < sample_count; ++s) {
    Matrix x = gaussian(), y;
    if (s % 2 == 0) {
      y = gaussian();
    } else {
      switch ((s / 2) % 3) {
        case 0: y = -x; break;
        case 1: y = x * (1.0 + std::pow(10.0, -6.0 * unif(rng))); break;
        default: y = x + std::pow(10.0, -6.0 * unif(rng)) * gaussian(); break;
      }
    }
    const double scale = std::max(norm(x), norm(y));
    if (scale == 0.0) {
      worst = std::max(worst, 0.0);
      continue;
    }
    x /= scale;
    y /= scale;
    const double lhs = std::pow(norm(0.5 * (x + y)), q) + delta * std::pow(norm(0.5 * (x - y)), q);
    const double rhs = 0.5 * (std::pow(norm(x), q) + std::pow(norm(y), q));
    worst = std::max(worst, lhs - rhs);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Martingale cotype probe

namespace {

struct PaleyWalsh {
  int depth;
  double q;
  double r;

  /// ||x||_r^q and its gradient q ||x||^(q-r) |x|^(r-2) x.
  double power_norm(const Eigen::RowVectorXd& x, Eigen::RowVectorXd* g) const {
    const double nx = lq_norm(x, r);
    if (g) {
      g->setZero(x.size());
      if (nx > 0.0)
        for (Eigen::Index j = 0; j < x.size(); ++j) {
          const double a = std::abs(x(j)) / nx;
          (*g)(j) = q * std::pow(nx, q - 1.0) * (a == 0.0 ? 0.0 : std::pow(a, r - 2.0)) * (x(j) / nx);
        }
    }
    return std::pow(nx, q);
  }

  double operator()(const Matrix& params, Matrix* grad) const {
    const Eigen::Index d = params.cols();
    const int leaves = 1 << depth;
    double increments = 0.0;
    Matrix g_num = Matrix::Zero(params.rows(), d);
    Matrix g_den = Matrix::Zero(params.rows(), d);
    Eigen::RowVectorXd g(d);
    for (int k = 1; k <= depth; ++k) {
      const double prob = std::ldexp(1.0, -(k - 1));
      for (int node = 1 << (k - 1); node < (1 << k); ++node) {
        increments += prob * power_norm(params.row(node), grad ? &g : nullptr);
        if (grad) g_num.row(node) = prob * g;
      }
    }
    double terminal = 0.0;
    const double leaf_prob = std::ldexp(1.0, -depth);
    for (int leaf = 0; leaf < leaves; ++leaf) {
      Eigen::RowVectorXd x = params.row(0);
      for (int k = 1; k <= depth; ++k) {
        const int prefix = leaf & ((1 << (k - 1)) - 1);
        const int node = (1 << (k - 1)) + prefix;
        const double eps = (leaf >> (k - 1)) & 1 ? 1.0 : -1.0;
        x += eps * params.row(node);
      }
      terminal += leaf_prob * power_norm(x, grad ? &g : nullptr);
      if (grad) {
        g_den.row(0) += leaf_prob * g;
        for (int k = 1; k <= depth; ++k) {
          const int prefix = leaf & ((1 << (k - 1)) - 1);
          const int node = (1 << (k - 1)) + prefix;
          const double eps = (leaf >> (k - 1)) & 1 ? 1.0 : -1.0;
          g_den.row(node) += leaf_prob * eps * g;
        }
      }
    }
    if (terminal == 0.0) {
      if (grad) grad->setZero(params.rows(), d);
      return 0.0;
    }
    const double ratio = std::pow(increments / terminal, 1.0 / q);
    if (grad) {
      *grad = (ratio / q) * ((increments > 0.0 ? g_num / increments : Matrix(g_num * 0.0)) -
                             g_den / terminal);
    }
    return ratio;
  }
};

}  // namespace

double paley_walsh_ratio(const Matrix& params, int depth, double q, double inner_q) {
  if (depth < 1) throw DomainError("paley_walsh_ratio: depth must be at least 1");
  if (params.rows() != (1 << depth)) throw ShapeError("paley_walsh_ratio: expected 2^depth rows");
  return PaleyWalsh{depth, q, inner_q}(params, nullptr);
}

CotypeEstimate cotype_lower_bound(double q, int d, int depth, int restarts, std::uint64_t seed,
                                  std::optional<double> inner_q) {
  if (depth < 1) throw DomainError("cotype_lower_bound: depth must be at least 1");
  if (depth > 16) throw DomainError("cotype_lower_bound: depth above 16 is not supported");
  if (!(q > 1.0)) throw DomainError("cotype_lower_bound: q must exceed 1");
  if (d < 1) throw DomainError("cotype_lower_bound: d must be positive");
  const double r = inner_q.value_or(q);
  if (!(r >= 1.0)) throw DomainError("cotype_lower_bound: inner exponent must be at least 1");

  const PaleyWalsh pw{depth, q, r};
  AscentOptions opts;
  opts.restarts = restarts;
  opts.seed = seed;
  RatioObjective<Matrix> objective = [&](const Matrix& f, Matrix* g) { return pw(f, g); };
  // Restart 0 starts the martingale at f_0 = 0; the others start anywhere.
  const auto initial = [&](int restart, Matrix& f) {
    if (restart != 0) return false;
    std::mt19937_64 rng(seed);
    detail::fill_gaussian(f, rng);
    f.row(0).setZero();
    return true;
  };
  const auto res = optimize_ratio<Matrix>(objective, 1 << depth, d, opts, false, {}, initial);
  return {res.value, res.converged};
}

}  // namespace sglab
