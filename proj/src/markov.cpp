#include "sglab/markov.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "sglab/errors.hpp"
#include "sglab/quadrature.hpp"

namespace sglab {

MarkovOperator::MarkovOperator(FiniteMeasureSpace space_, Matrix matrix_)
    : space(std::move(space_)), matrix(std::move(matrix_)) {
  if (matrix.rows() != space.size() || matrix.cols() != space.size())
    throw ShapeError("Markov operator: matrix shape does not match measure space");
  if (!matrix.allFinite()) throw NumericError("Markov operator: non-finite entries");
}

MarkovDiagnostics validate_markov(const FiniteMeasureSpace& space, const Matrix& S, double tol) {
  if (S.rows() != space.size() || S.cols() != space.size())
    throw ShapeError("validate_markov: matrix shape does not match measure space");
  const Vector& mu = space.weights();
  MarkovDiagnostics diag;
  diag.min_entry = S.minCoeff();
  diag.max_row_sum_defect = (S.rowwise().sum().array() - 1.0).abs().maxCoeff();
  const Matrix flux = mu.asDiagonal() * S;
  diag.max_detailed_balance_defect = (flux - flux.transpose()).cwiseAbs().maxCoeff();
  const Matrix A = S.cwiseAbs();
  diag.norm_inf = A.rowwise().sum().maxCoeff();
  diag.norm_1 = 0.0;
  for (Eigen::Index j = 0; j < A.cols(); ++j)
    diag.norm_1 = std::max(diag.norm_1, mu.dot(A.col(j)) / mu(j));

  if (diag.min_entry < -tol) diag.violations.push_back({"positivity", -diag.min_entry});
  if (diag.max_row_sum_defect > tol)
    diag.violations.push_back({"row sums (S1 = 1)", diag.max_row_sum_defect});
  if (diag.max_detailed_balance_defect > tol)
    diag.violations.push_back({"detailed balance", diag.max_detailed_balance_defect});
  if (std::abs(diag.norm_1 - 1.0) > tol)
    diag.violations.push_back({"L1 contraction", std::abs(diag.norm_1 - 1.0)});
  if (std::abs(diag.norm_inf - 1.0) > tol)
    diag.violations.push_back({"Linf contraction", std::abs(diag.norm_inf - 1.0)});
  return diag;
}

MarkovDiagnostics validate_markov(const MarkovOperator& S, double tol) {
  return validate_markov(S.space, S.matrix, tol);
}

// ---------------------------------------------------------------------------

DiffusionSemigroup::DiffusionSemigroup(FiniteMeasureSpace space, Matrix generator,
                                       GeneratorKind kind)
    : space_(std::move(space)), generator_(std::move(generator)), kind_(kind) {
  const int n = space_.size();
  if (generator_.rows() != n || generator_.cols() != n)
    throw ShapeError("generator shape does not match measure space");
  if (!generator_.allFinite()) throw NumericError("generator has non-finite entries");

  const double scale = std::max(1.0, generator_.cwiseAbs().maxCoeff());
  const double tol = 1e-10 * scale;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && generator_(i, j) < -tol)
        throw DomainError("generator has a negative off-diagonal rate");
  const Vector rows = generator_.rowwise().sum();
  if (kind_ == GeneratorKind::conservative && rows.cwiseAbs().maxCoeff() > tol)
    throw DomainError("conservative generator must annihilate constants");
  if (kind_ == GeneratorKind::sub_markov && rows.maxCoeff() > tol)
    throw DomainError("sub-Markov generator must have nonpositive row sums");

  const Vector& mu = space_.weights();
  const Vector s = mu.cwiseSqrt();
  const Matrix B = s.asDiagonal() * generator_ * s.cwiseInverse().asDiagonal();
  if ((B - B.transpose()).cwiseAbs().maxCoeff() > tol)
    throw DomainError("generator is not self-adjoint on L2(mu) (detailed balance fails)");

  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (B + B.transpose()));
  if (eig.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
  eigenvalues_.resize(n);
  eigenvectors_.resize(n, n);
  const double zero_tol = 1e-12 * scale;
  for (int k = 0; k < n; ++k) {
    // Solver returns ascending eigenvalues; store descending.
    double lambda = eig.eigenvalues()(n - 1 - k);
    if (lambda > tol) throw DomainError("generator has positive spectrum");
    if (std::abs(lambda) <= zero_tol) lambda = 0.0;
    eigenvalues_(k) = lambda;
    eigenvectors_.col(k) = s.cwiseInverse().asDiagonal() * eig.eigenvectors().col(n - 1 - k);
  }
  zero_modes_ = static_cast<int>((eigenvalues_.array() == 0.0).count());
  radius_ = eigenvalues_.cwiseAbs().maxCoeff();
  gap_ = 0.0;
  for (int k = 0; k < n; ++k)
    if (eigenvalues_(k) != 0.0) {
      gap_ = -eigenvalues_(k);
      break;
    }
}

CMatrix DiffusionSemigroup::spectral_function(const Eigen::VectorXcd& values) const {
  const CMatrix V = eigenvectors_.cast<complex>();
  return V * values.asDiagonal() * (V.transpose() * space_.weights().cast<complex>().asDiagonal());
}

Matrix DiffusionSemigroup::spectral_function(const Vector& values) const {
  return eigenvectors_ * values.asDiagonal() *
         (eigenvectors_.transpose() * space_.weights().asDiagonal());
}

Matrix DiffusionSemigroup::coefficients(const Matrix& f) const {
  if (f.rows() != size()) throw ShapeError("field shape does not match measure space");
  return eigenvectors_.transpose() * (space_.weights().asDiagonal() * f);
}

Matrix DiffusionSemigroup::synthesize(const Matrix& c) const { return eigenvectors_ * c; }

Matrix DiffusionSemigroup::kernel_projection() const {
  Vector mask(size());
  for (int k = 0; k < size(); ++k) mask(k) = eigenvalues_(k) == 0.0 ? 1.0 : 0.0;
  return spectral_function(mask);
}

CMatrix semigroup_at(const DiffusionSemigroup& G, complex z) {
  const Eigen::VectorXcd values =
      (z * G.eigenvalues().cast<complex>()).array().exp().matrix();
  return G.spectral_function(values);
}

MarkovOperator markov_at(const DiffusionSemigroup& G, double t) {
  const Vector values = (t * G.eigenvalues()).array().exp().matrix();
  return MarkovOperator(G.space(), G.spectral_function(values));
}

// ---------------------------------------------------------------------------

DilationBundle build_rota_dilation(const MarkovOperator& S, double tol) {
  const auto diag = validate_markov(S, tol);
  if (!diag.valid())
    throw ShapeError("build_rota_dilation: kernel is not a symmetric Markov operator (" +
                     diag.violations.front().invariant + ")");
  const int n = S.space.size();
  const Vector& mu = S.space.weights();
  std::vector<std::pair<int, int>> atoms;
  std::vector<double> mass;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double w = mu(i) * S.matrix(i, j);
      if (w > 0.0) {
        atoms.emplace_back(i, j);
        mass.push_back(w);
      }
    }
  const int m = static_cast<int>(atoms.size());
  const Vector mt = Eigen::Map<const Vector>(mass.data(), m);

  Matrix embed = Matrix::Zero(m, n);
  for (int a = 0; a < m; ++a) embed(a, atoms[a].first) = 1.0;

  // Marginal masses of each coordinate class.
  Vector first_mass = Vector::Zero(n), second_mass = Vector::Zero(n);
  for (int a = 0; a < m; ++a) {
    first_mass(atoms[a].first) += mt(a);
    second_mass(atoms[a].second) += mt(a);
  }
  Matrix ea = Matrix::Zero(m, m), eb = Matrix::Zero(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      if (atoms[a].first == atoms[b].first) ea(a, b) = mt(b) / first_mass(atoms[a].first);
      if (atoms[a].second == atoms[b].second) eb(a, b) = mt(b) / second_mass(atoms[a].second);
    }
  return {FiniteMeasureSpace(mt), std::move(atoms), std::move(embed), std::move(ea), std::move(eb)};
}

double rota_deviation(const DilationBundle& bundle, const MarkovOperator& S) {
  const Matrix lhs = bundle.expect_first * (bundle.expect_second * bundle.embed);
  const Matrix rhs = bundle.embed * (S.matrix * S.matrix);
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------

namespace {

/// Quadrature of the subordination integral for each eigenvalue.
Vector poisson_factors(const Vector& lambdas, double t, const quad::Rule& rule) {
  Vector out = Vector::Zero(lambdas.size());
  const double c = 1.0 / std::sqrt(std::numbers::pi);
  for (std::size_t m = 0; m < rule.size(); ++m) {
    const double u = rule.nodes[m];
    const double s = std::exp(u);
    const double base = c * rule.weights[m] * std::exp(-s + 0.5 * u);
    if (base == 0.0) continue;
    const double tau = t * t / (4.0 * s);
    for (Eigen::Index k = 0; k < lambdas.size(); ++k) out(k) += base * std::exp(lambdas(k) * tau);
  }
  return out;
}

}  // namespace

SubordinationResult subordinated_poisson(const DiffusionSemigroup& G, double t,
                                         const SubordinationOptions& opts) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("subordinated_poisson: t must be positive");
  if (!(opts.tol > 0.0)) throw DomainError("subordinated_poisson: tol must be positive");
  // int_{-inf}^{-L} e^{u/2} du / sqrt(pi) = 2 e^{-L/2} / sqrt(pi) <= tol / 10;
  // the upper tail is below e^{-e^L}.
  const double L = std::max(5.0, 2.0 * std::log(20.0 / (std::sqrt(std::numbers::pi) * opts.tol)));
  const double tail = 2.0 * std::exp(-L / 2.0) / std::sqrt(std::numbers::pi) + std::exp(-std::exp(L));

  int panels = opts.initial_panels;
  Vector prev = poisson_factors(G.eigenvalues(), t, quad::composite_legendre(-L, L, panels, opts.order));
  double change = 0.0;
  while (true) {
    if (2 * panels > opts.max_panels)
      throw ConvergenceError("subordinated_poisson: node cap reached", change + tail);
    panels *= 2;
    const Vector next =
        poisson_factors(G.eigenvalues(), t, quad::composite_legendre(-L, L, panels, opts.order));
    change = (next - prev).cwiseAbs().maxCoeff();
    prev = next;
    if (change < opts.tol / 2.0) break;
  }
  return {G.spectral_function(prev), change + tail, panels};
}

Matrix poisson_spectral(const DiffusionSemigroup& G, double t) {
  const Vector values = (-t * (-G.eigenvalues()).cwiseMax(0.0).cwiseSqrt()).array().exp().matrix();
  return G.spectral_function(values);
}

// ---------------------------------------------------------------------------

DiffusionSemigroup two_point_chain(double rate) {
  if (!(rate > 0.0)) throw DomainError("two_point_chain: rate must be positive");
  Matrix A(2, 2);
  A << -rate, rate, rate, -rate;
  return DiffusionSemigroup(FiniteMeasureSpace::uniform(2), A);
}

DiffusionSemigroup cycle_chain(int n) {
  if (n < 2) throw DomainError("cycle_chain: n must be at least 2");
  Matrix P = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    P(i, (i + 1) % n) += 0.5;
    P(i, (i + n - 1) % n) += 0.5;
  }
  return DiffusionSemigroup(FiniteMeasureSpace::uniform(n), P - Matrix::Identity(n, n));
}

DiffusionSemigroup complete_graph_chain(int n) {
  if (n < 2) throw DomainError("complete_graph_chain: n must be at least 2");
  Matrix P = Matrix::Constant(n, n, 1.0 / (n - 1));
  P.diagonal().setZero();
  return DiffusionSemigroup(FiniteMeasureSpace::uniform(n), P - Matrix::Identity(n, n));
}

DiffusionSemigroup zero_chain(int n) {
  if (n < 1) throw DomainError("zero_chain: n must be positive");
  return DiffusionSemigroup(FiniteMeasureSpace::uniform(n), Matrix::Zero(n, n));
}

MarkovOperator random_reversible_kernel(int n, std::uint64_t seed) {
  if (n < 2) throw DomainError("random_reversible_kernel: n must be at least 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vector mu(n);
  for (int i = 0; i < n; ++i) mu(i) = 0.5 + unif(rng);
  mu /= mu.sum();
  Matrix c = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) c(i, j) = c(j, i) = unif(rng);
  double K = 0.0;
  for (int i = 0; i < n; ++i) K = std::max(K, c.row(i).sum() / mu(i));
  K *= 1.25;
  Matrix S = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) {
        S(i, j) = c(i, j) / (K * mu(i));
        off += S(i, j);
      }
    S(i, i) = 1.0 - off;
  }
  return MarkovOperator(FiniteMeasureSpace(mu), S);
}

DiffusionSemigroup random_reversible_chain(int n, std::uint64_t seed) {
  MarkovOperator S = random_reversible_kernel(n, seed);
  Matrix A = S.matrix - Matrix::Identity(n, n);
  // Row sums of S - I are exact zeros only up to rounding; pin them.
  for (int i = 0; i < n; ++i) A(i, i) = -(A.row(i).sum() - A(i, i));
  return DiffusionSemigroup(S.space, A);
}

}  // namespace sglab
