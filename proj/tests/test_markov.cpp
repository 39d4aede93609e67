#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "sglab/errors.hpp"
#include "sglab/markov.hpp"

using namespace sglab;
using doctest::Approx;

namespace {

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

std::vector<DiffusionSemigroup> sample_chains() {
  std::vector<DiffusionSemigroup> out;
  out.push_back(two_point_chain());
  out.push_back(two_point_chain(2.5));
  out.push_back(cycle_chain(5));
  out.push_back(complete_graph_chain(4));
  out.push_back(random_reversible_chain(6, 1));
  out.push_back(random_reversible_chain(9, 42));
  return out;
}

}  // namespace

TEST_CASE("validate_markov examples") {
  const auto two = FiniteMeasureSpace::uniform(2);
  Matrix S(2, 2);
  S << 0.5, 0.5, 0.5, 0.5;
  CHECK(validate_markov(two, S).valid());
  CHECK(validate_markov(two, Matrix::Identity(2, 2)).valid());

  S << 0.2, 0.8, 0.4, 0.6;
  const auto bad = validate_markov(two, S);
  CHECK_FALSE(bad.valid());
  bool balance = false;
  for (const auto& v : bad.violations) balance = balance || v.invariant == "detailed balance";
  CHECK(balance);
  CHECK(bad.max_detailed_balance_defect == Approx(0.2));

  S << 1.2, -0.2, -0.2, 1.2;
  const auto neg = validate_markov(two, S);
  CHECK_FALSE(neg.valid());
  CHECK(neg.violations.front().invariant == "positivity");

  S << 0.5, 0.4, 0.4, 0.5;
  CHECK_FALSE(validate_markov(two, S).valid());

  // Reversible for non-uniform weights: mu = (1/3, 2/3), flux 0.2 each way.
  Vector w(2);
  w << 1.0 / 3.0, 2.0 / 3.0;
  S << 0.4, 0.6, 0.3, 0.7;
  CHECK(validate_markov(FiniteMeasureSpace(w), S).valid());
  CHECK_FALSE(validate_markov(two, S).valid());

  CHECK_THROWS_AS(validate_markov(two, Matrix::Identity(3, 3)), ShapeError);
}

TEST_CASE("semigroup at zero is the identity") {
  for (const auto& G : sample_chains())
    CHECK(max_abs(semigroup_at(G, 0.0) - CMatrix::Identity(G.size(), G.size())) <= 1e-13);
}

TEST_CASE("two-point closed form") {
  for (double a : {1.0, 0.3, 4.0}) {
    const auto G = two_point_chain(a);
    for (complex z : {complex(0.5, 0.0), complex(1.0, 2.0), complex(0.1, -0.3)}) {
      const CMatrix T = semigroup_at(G, z);
      const complex e = std::exp(-2.0 * a * z);
      CHECK(std::abs(T(0, 0) - 0.5 * (1.0 + e)) <= 1e-14);
      CHECK(std::abs(T(0, 1) - 0.5 * (1.0 - e)) <= 1e-14);
      CHECK(std::abs(T(1, 1) - 0.5 * (1.0 + e)) <= 1e-14);
    }
  }
  const auto G = two_point_chain();
  CHECK(G.spectral_gap() == Approx(2.0));
  CHECK(G.ergodic());
}

TEST_CASE("semigroup law and matrix exponential oracle") {
  for (const auto& G : sample_chains()) {
    const Matrix& A = G.generator();
    for (complex z : {complex(0.3, 0.0), complex(1.7, 0.9), complex(0.05, -1.0)}) {
      const CMatrix expected = (z * A.cast<complex>()).exp();
      CHECK(max_abs(semigroup_at(G, z) - expected) <= 1e-10);
    }
    const complex z(0.4, 0.2), w(1.1, -0.5);
    CHECK(max_abs(semigroup_at(G, z) * semigroup_at(G, w) - semigroup_at(G, z + w)) <= 1e-12);
  }
}

TEST_CASE("real-time semigroups are symmetric Markov operators") {
  for (const auto& G : sample_chains())
    for (double t : {1e-3, 0.5, 3.0, 40.0}) CHECK(validate_markov(markov_at(G, t), 1e-12).valid());
}

TEST_CASE("example builders") {
  CHECK(cycle_chain(4).spectral_gap() == Approx(1.0).epsilon(1e-12));
  CHECK(cycle_chain(4).spectral_radius() == Approx(2.0).epsilon(1e-12));
  const auto K = complete_graph_chain(5);
  CHECK(K.spectral_gap() == Approx(5.0 / 4.0).epsilon(1e-12));
  CHECK(K.zero_modes() == 1);
  const auto Z = zero_chain(3);
  CHECK(Z.spectral_gap() == 0.0);
  CHECK(Z.zero_modes() == 3);
  CHECK_FALSE(Z.ergodic());
  CHECK(max_abs(semigroup_at(Z, complex(2.0, 1.0)) - CMatrix::Identity(3, 3)) == 0.0);
  for (std::uint64_t seed : {1, 2, 3, 4}) {
    const auto S = random_reversible_kernel(7, seed);
    CHECK(validate_markov(S, 1e-12).valid());
  }
  const auto a = random_reversible_kernel(5, 9), b = random_reversible_kernel(5, 9);
  CHECK(a.matrix == b.matrix);
  CHECK_THROWS_AS(cycle_chain(1), DomainError);
  CHECK_THROWS_AS(two_point_chain(0.0), DomainError);
}

TEST_CASE("generator validation") {
  const auto two = FiniteMeasureSpace::uniform(2);
  Matrix A(2, 2);
  A << -1.0, 1.0, 1.0, -1.0;
  CHECK_NOTHROW(DiffusionSemigroup(two, A));
  A << 1.0, -1.0, -1.0, 1.0;
  CHECK_THROWS_AS(DiffusionSemigroup(two, A), DomainError);
  A << -1.0, 1.0, 2.0, -2.0;
  CHECK_THROWS_AS(DiffusionSemigroup(two, A), DomainError);
  A << -2.0, 1.0, 1.0, -1.0;
  CHECK_THROWS_AS(DiffusionSemigroup(two, A), DomainError);
  CHECK_NOTHROW(DiffusionSemigroup(two, A, GeneratorKind::sub_markov));
  A << -1.0, 1.0, 1.0, NAN;
  CHECK_THROWS_AS(DiffusionSemigroup(two, A), NumericError);
  CHECK_THROWS_AS(DiffusionSemigroup(two, Matrix::Zero(3, 3)), ShapeError);
}

TEST_CASE("spectral decomposition reconstructs the generator") {
  for (const auto& G : sample_chains()) {
    CHECK((G.spectral_function(G.eigenvalues()) - G.generator()).cwiseAbs().maxCoeff() <= 1e-12);
    const Matrix f = Matrix::Random(G.size(), 3);
    CHECK((G.synthesize(G.coefficients(f)) - f).cwiseAbs().maxCoeff() <= 1e-12);
    const Matrix P = G.kernel_projection();
    CHECK((P * P - P).cwiseAbs().maxCoeff() <= 1e-12);
    for (Eigen::Index k = 1; k < G.eigenvalues().size(); ++k)
      CHECK(G.eigenvalues()(k) <= G.eigenvalues()(k - 1));
  }
}

TEST_CASE("Rota dilation of two-point kernels") {
  for (double t : {0.1, 1.0, 5.0}) {
    const auto S = markov_at(two_point_chain(), t);
    const auto bundle = build_rota_dilation(S);
    CHECK(bundle.atoms.size() == 4);
    CHECK(rota_deviation(bundle, S) <= 1e-12);
  }
  const auto I = MarkovOperator(FiniteMeasureSpace::uniform(2), Matrix::Identity(2, 2));
  const auto bundle = build_rota_dilation(I);
  CHECK(bundle.atoms.size() == 2);
  CHECK(rota_deviation(bundle, I) <= 1e-15);
}

TEST_CASE("Rota dilation invariants") {
  for (std::uint64_t seed : {3, 5, 8}) {
    const auto G = random_reversible_chain(6, seed);
    const auto S = markov_at(G, 0.8);
    const auto b = build_rota_dilation(S);
    const int m = static_cast<int>(b.atoms.size());
    CHECK(b.big_space.total_mass() == Approx(1.0).epsilon(1e-13));
    CHECK(rota_deviation(b, S) <= 1e-12);
    for (const Matrix* E : {&b.expect_first, &b.expect_second}) {
      CHECK((*E * *E - *E).cwiseAbs().maxCoeff() <= 1e-13);
      CHECK((E->rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-13);
      CHECK(validate_markov(b.big_space, *E, 1e-12).valid());
    }
    // E_A fixes functions of the first coordinate.
    CHECK((b.expect_first * b.embed - b.embed).cwiseAbs().maxCoeff() <= 1e-13);
    CHECK(m <= 36);
  }
  Matrix S(2, 2);
  S << 0.2, 0.8, 0.4, 0.6;
  CHECK_THROWS_AS(build_rota_dilation(MarkovOperator(FiniteMeasureSpace::uniform(2), S)), ShapeError);
}

TEST_CASE("subordinated Poisson semigroup") {
  const auto G = two_point_chain(2.0);
  const auto P = subordinated_poisson(G, 1.0);
  const double e = std::exp(-2.0);
  CHECK(P.matrix(0, 0) == Approx(0.5 * (1.0 + e)).epsilon(1e-9));
  CHECK(P.matrix(0, 1) == Approx(0.5 * (1.0 - e)).epsilon(1e-9));
  CHECK(P.achieved <= 1e-8);

  for (const auto& H : sample_chains()) {
    for (double t : {0.05, 0.7, 4.0}) {
      const auto R = subordinated_poisson(H, t);
      CHECK((R.matrix - poisson_spectral(H, t)).cwiseAbs().maxCoeff() <= 1e-8);
      CHECK((R.matrix.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-8);
    }
    const Matrix lhs = poisson_spectral(H, 0.3) * poisson_spectral(H, 0.9);
    CHECK((lhs - poisson_spectral(H, 1.2)).cwiseAbs().maxCoeff() <= 1e-13);
  }
  SubordinationOptions tight;
  tight.max_panels = 16;
  CHECK_THROWS_AS(subordinated_poisson(G, 1.0, tight), ConvergenceError);
  CHECK_THROWS_AS(subordinated_poisson(G, 0.0), DomainError);
}
