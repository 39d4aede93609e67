#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sglab/quadrature.hpp"

using namespace sglab;

namespace {

double apply(const quad::Rule& r, double (*f)(double)) {
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * f(r.nodes[i]);
  return s;
}

/// int_{-1}^{1} (1-x)^a (1+x)^b dx = 2^{a+b+1} B(a+1, b+1).
double jacobi_mass(double a, double b) {
  return std::exp((a + b + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                  std::lgamma(a + b + 2.0));
}

}  // namespace

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n-1 exactly") {
  for (int n : {1, 2, 3, 5, 8, 16, 33, 64}) {
    const quad::Rule& r = quad::gauss_legendre(n);
    REQUIRE(r.size() == static_cast<std::size_t>(n));
    for (int deg = 0; deg <= 2 * n - 1; ++deg) {
      double s = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], deg);
      const double exact = deg % 2 == 1 ? 0.0 : 2.0 / (deg + 1);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("Gauss-Legendre nodes are increasing with positive weights") {
  const quad::Rule& r = quad::gauss_legendre(40);
  for (std::size_t i = 0; i < r.size(); ++i) {
    CHECK(r.weights[i] > 0.0);
    if (i > 0) CHECK(r.nodes[i] > r.nodes[i - 1]);
  }
}

TEST_CASE("Gauss-Jacobi moments match the beta function") {
  for (auto [a, b] : {std::pair{0.0, -0.5}, {0.0, 0.3}, {1.5, -0.7}, {0.0, -0.99}, {2.0, 3.0}}) {
    const quad::Rule r = quad::gauss_jacobi(20, a, b);
    double m0 = 0.0, m1 = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      m0 += r.weights[i];
      m1 += r.weights[i] * (1.0 + r.nodes[i]);
    }
    CHECK(m0 == doctest::Approx(jacobi_mass(a, b)).epsilon(1e-12));
    // (1+x) raises b by one.
    CHECK(m1 == doctest::Approx(jacobi_mass(a, b + 1.0)).epsilon(1e-12));
  }
}

TEST_CASE("Gauss-Jacobi with a + b = -1 reproduces Chebyshev nodes") {
  const int n = 7;
  const quad::Rule r = quad::gauss_jacobi(n, -0.5, -0.5);
  for (int k = 0; k < n; ++k) {
    const double node = -std::cos((2.0 * k + 1.0) * std::numbers::pi / (2.0 * n));
    CHECK(r.nodes[k] == doctest::Approx(node).epsilon(1e-13));
    CHECK(r.weights[k] == doctest::Approx(std::numbers::pi / n).epsilon(1e-13));
  }
}

TEST_CASE("mapped and composite rules") {
  const quad::Rule m = quad::mapped(quad::gauss_legendre(10), 0.0, 2.0);
  CHECK(apply(m, [](double x) { return std::exp(x); }) == doctest::Approx(std::exp(2.0) - 1.0).epsilon(1e-14));
  const quad::Rule c = quad::composite_legendre(0.0, std::numbers::pi, 8, 12);
  CHECK(c.size() == 96);
  CHECK(apply(c, [](double x) { return std::sin(x); }) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("graded rule resolves an endpoint singularity") {
  const quad::Rule g = quad::graded_legendre(0.0, 1.0, 40, 16);
  CHECK(apply(g, [](double x) { return std::sqrt(x); }) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(apply(g, [](double x) { return std::pow(x, -0.5); }) == doctest::Approx(2.0).epsilon(1e-5));
}
