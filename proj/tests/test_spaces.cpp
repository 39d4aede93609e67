#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sglab/errors.hpp"
#include "sglab/markov.hpp"
#include "sglab/spaces.hpp"

using namespace sglab;

namespace {

Matrix random_matrix(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

/// Largest |eigenvalue| of D^{1/2} T D^{-1/2} for a mu-self-adjoint T.
double symmetrized_spectral_radius(const Matrix& T, const Vector& mu) {
  const Vector s = mu.cwiseSqrt();
  const Matrix B = s.asDiagonal() * T * s.cwiseInverse().asDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (B + B.transpose()));
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("measure spaces reject nonpositive weights") {
  CHECK_THROWS_AS(FiniteMeasureSpace{Vector::Zero(0)}, ShapeError);
  Vector w(2);
  w << 1.0, 0.0;
  CHECK_THROWS_AS(FiniteMeasureSpace{w}, DomainError);
  w << 1.0, -1.0;
  CHECK_THROWS_AS(FiniteMeasureSpace{w}, DomainError);
  w << 1.0, 3.0;
  const FiniteMeasureSpace s(w);
  CHECK(s.total_mass() == 4.0);
  CHECK(s.normalized().weights()(1) == doctest::Approx(0.75));
  CHECK(FiniteMeasureSpace::uniform(4).total_mass() == doctest::Approx(1.0));
  CHECK(FiniteMeasureSpace::uniform(4, false).total_mass() == 4.0);
}

TEST_CASE("mixed norm config ranges") {
  CHECK_THROWS_AS(MixedNormConfig(1.0, 2.0, 1), DomainError);
  CHECK_THROWS_AS(MixedNormConfig(2.0, 1.5, 1), DomainError);
  CHECK_THROWS_AS(MixedNormConfig(2.0, 2.0, 0), DomainError);
  CHECK_THROWS_AS(MixedNormConfig(INFINITY, 2.0, 1), DomainError);
  CHECK(MixedNormConfig(2.0, 2.0, 3).hilbert());
  CHECK_FALSE(MixedNormConfig(3.0, 2.0, 3).hilbert());
}

TEST_CASE("mixed norm examples") {
  const auto two = FiniteMeasureSpace::uniform(2);
  CHECK(mixed_norm(Matrix::Zero(2, 1), two, MixedNormConfig(3.0, 2.0, 1)) == 0.0);
  Matrix f(2, 1);
  f << 1.0, -1.0;
  for (double p : {1.5, 2.0, 3.0, 7.0}) CHECK(mixed_norm(f, two, MixedNormConfig(p, 2.0, 1)) == doctest::Approx(1.0));
  Matrix g(1, 2);
  g << 3.0, 4.0;
  for (double p : {1.5, 2.0, 5.0}) CHECK(mixed_norm(g, FiniteMeasureSpace::uniform(1), MixedNormConfig(p, 2.0, 2)) == doctest::Approx(5.0));
  // sum_i mu_i ||f_i||_q^p by hand.
  Vector w(2);
  w << 0.25, 2.0;
  Matrix h(2, 2);
  h << 1.0, 2.0, -3.0, 0.5;
  const double q = 3.0, p = 4.0;
  const double r0 = std::cbrt(1.0 + 8.0), r1 = std::cbrt(27.0 + 0.125);
  const double expect = std::pow(0.25 * std::pow(r0, p) + 2.0 * std::pow(r1, p), 1.0 / p);
  CHECK(mixed_norm(h, FiniteMeasureSpace(w), MixedNormConfig(p, q, 2)) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("mixed norm shape and finiteness errors") {
  const auto s = FiniteMeasureSpace::uniform(3);
  CHECK_THROWS_AS(mixed_norm(Matrix::Zero(2, 1), s, MixedNormConfig(2.0, 2.0, 1)), ShapeError);
  CHECK_THROWS_AS(mixed_norm(Matrix::Zero(3, 2), s, MixedNormConfig(2.0, 2.0, 1)), ShapeError);
  Matrix f = Matrix::Zero(3, 1);
  f(1, 0) = NAN;
  CHECK_THROWS_AS(mixed_norm(f, s, MixedNormConfig(2.0, 2.0, 1)), NumericError);
}

TEST_CASE("mixed norm is a norm on random triples") {
  Vector w(5);
  w << 0.1, 0.7, 1.3, 0.2, 2.0;
  const FiniteMeasureSpace s(w);
  for (auto [p, q] : {std::pair{1.5, 2.0}, {2.0, 2.0}, {3.0, 4.0}, {6.0, 2.5}}) {
    const MixedNormConfig cfg(p, q, 3);
    for (int trial = 0; trial < 20; ++trial) {
      const Matrix f = random_matrix(5, 3, 100 + trial), g = random_matrix(5, 3, 200 + trial);
      const double nf = mixed_norm(f, s, cfg), ng = mixed_norm(g, s, cfg);
      CHECK(mixed_norm(f + g, s, cfg) <= nf + ng + 1e-12);
      CHECK(mixed_norm(-2.5 * f, s, cfg) == doctest::Approx(2.5 * nf).epsilon(1e-12));
      CHECK(nf > 0.0);
    }
  }
}

TEST_CASE("complex mixed norm uses moduli") {
  const auto s = FiniteMeasureSpace::uniform(1);
  CMatrix f(1, 2);
  f << complex(3.0, 4.0), complex(0.0, 0.0);
  CHECK(mixed_norm(f, s, MixedNormConfig(2.0, 3.0, 2)) == doctest::Approx(5.0));
}

TEST_CASE("operator_norm_lower examples") {
  const auto s = FiniteMeasureSpace::uniform(2);
  AscentOptions opts;
  opts.restarts = 8;
  SUBCASE("identity") {
    const auto est = operator_norm_lower(Matrix(Matrix::Identity(2, 2)), s, MixedNormConfig(3.0, 2.0, 2), opts);
    CHECK(est.value <= 1.0 + 1e-12);
    CHECK(est.value >= 1.0 - opts.tol);
  }
  SUBCASE("diag(2, 1) at large p") {
    Matrix T = Matrix::Identity(2, 2);
    T(0, 0) = 2.0;
    const auto est = operator_norm_lower(T, s, MixedNormConfig(40.0, 2.0, 1), opts);
    CHECK(est.value >= 2.0 - 10.0 * opts.tol);
    CHECK(est.value <= 2.0 + 1e-12);
  }
  SUBCASE("two-point chain, I - T_10 on L_2") {
    const auto G = two_point_chain();
    const Matrix T = Matrix::Identity(2, 2) - markov_at(G, 10.0).matrix;
    const auto est = operator_norm_lower(T, s, MixedNormConfig(2.0, 2.0, 1), opts);
    CHECK(est.value == doctest::Approx(1.0 - std::exp(-20.0)).epsilon(1e-9));
  }
}

TEST_CASE("operator_norm_upper examples") {
  const auto G = random_reversible_chain(6, 4);
  const MarkovOperator S = markov_at(G, 0.7);
  for (double p : {1.0, 1.5, 2.0, 4.0, double(INFINITY)})
    CHECK(operator_norm_upper(S.matrix, S.space, p) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(operator_norm_upper(Matrix(2.0 * Matrix::Identity(6, 6)), S.space, 3.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(operator_norm_upper(S.matrix, S.space, 0.5), DomainError);
}

TEST_CASE("lower and upper estimates sandwich the norm") {
  const auto G = random_reversible_chain(5, 11);
  AscentOptions opts;
  opts.restarts = 6;
  for (double t : {0.1, 1.0, 5.0}) {
    const Matrix T = Matrix::Identity(5, 5) - markov_at(G, t).matrix;
    for (auto [p, q] : {std::pair{2.0, 2.0}, {3.0, 2.0}, {1.5, 4.0}}) {
      const double lo = operator_norm_lower(T, G.space(), MixedNormConfig(p, q, 2), opts).value;
      const double hi = operator_norm_upper(T, G.space(), p);
      CHECK(lo <= hi + 1e-12);
    }
  }
  const auto two = two_point_chain();
  const Matrix T = Matrix::Identity(2, 2) - markov_at(two, 0.3).matrix;
  CHECK(operator_norm_lower(T, two.space(), MixedNormConfig(3.0, 2.0, 1), opts).value <=
        operator_norm_upper(T, two.space(), 3.0) + 1e-12);
}

TEST_CASE("Hilbert ascent agrees with the symmetrized spectrum") {
  AscentOptions opts;
  opts.restarts = 6;
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto G = random_reversible_chain(6, seed);
    for (double t : {0.2, 1.5}) {
      const Matrix T = markov_at(G, t).matrix - 0.5 * Matrix::Identity(6, 6);
      const double expect = symmetrized_spectral_radius(T, G.space().weights());
      const double got = operator_norm_lower(T, G.space(), MixedNormConfig(2.0, 2.0, 1), opts).value;
      CHECK(got == doctest::Approx(expect).epsilon(1e-8));
      const double exact = operator_norm_estimate(T, G.space(), MixedNormConfig(2.0, 2.0, 1)).value;
      CHECK(exact == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("minimum gain") {
  const auto s = FiniteMeasureSpace::uniform(3);
  Matrix T = Matrix::Identity(3, 3);
  T(2, 2) = 0.25;
  const CMatrix Tc = T.cast<complex>();
  CHECK(l2_minimum_gain(Tc, s) == doctest::Approx(0.25));
  CHECK(l2_operator_norm(Tc, s) == doctest::Approx(1.0));
  AscentOptions opts;
  opts.restarts = 6;
  opts.exact_hilbert = false;
  const double g = minimum_gain_estimate(Tc, s, MixedNormConfig(3.0, 2.0, 1), opts).value;
  CHECK(g >= 0.25 - 1e-12);
  CHECK(g == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("uniform convexity: parallelogram law and Clarkson") {
  CHECK(std::abs(uniform_convexity_deficit(2.0, 1.0, 3, 400, 1)) <= 1e-12);
  for (double q : {2.5, 3.0, 4.0, 8.0})
    for (int d : {1, 2, 5}) CHECK(uniform_convexity_deficit(q, 1.0, d, 400, 7) <= 1e-12);
  const FiniteMeasureSpace s = FiniteMeasureSpace::uniform(4);
  CHECK(uniform_convexity_deficit(4.0, 1.0, 2, 200, 3, s) <= 1e-12);
  CHECK(uniform_convexity_deficit(3.0, 0.5, 2, 200, 3, s) <= 1e-12);
  CHECK_THROWS_AS(uniform_convexity_deficit(1.5, 1.0, 1, 10), DomainError);
  CHECK_THROWS_AS(uniform_convexity_deficit(2.0, 1.5, 1, 10), DomainError);
}

TEST_CASE("Paley-Walsh ratio of a single increment is 1") {
  Matrix params(2, 3);
  params << 0.0, 0.0, 0.0, 1.0, -2.0, 0.5;
  for (double q : {2.0, 3.0, 5.0}) CHECK(paley_walsh_ratio(params, 1, q, q) == doctest::Approx(1.0));
  CHECK_THROWS_AS(paley_walsh_ratio(Matrix::Zero(3, 1), 1, 2.0, 2.0), ShapeError);
}

TEST_CASE("cotype lower bound in Hilbert space is 1") {
  for (int depth : {1, 2, 3}) {
    const auto est = cotype_lower_bound(2.0, 1, depth, 6, 0);
    CHECK(est.value == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(est.value <= 1.0 + 1e-9);
  }
  CHECK(cotype_lower_bound(2.0, 3, 3, 6, 1).value == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("cotype 2 probe detects a nearly sup-normed inner space") {
  const auto est = cotype_lower_bound(2.0, 4, 3, 8, 0, 20.0);
  CHECK(est.value > 1.0 + 1e-3);
}
