#pragma once

#include <vector>

namespace sglab::quad {

/// Nodes and weights of an interval rule. Nodes are stored in increasing order.
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule on [-1, 1].
///
/// Nodes are Newton-refined roots of P_n started from the Chebyshev-like
/// guess cos(pi (i - 1/4) / (n + 1/2)); exact for polynomials of degree 2n-1.
/// Rules are cached per n, so repeated calls are cheap.
const Rule& gauss_legendre(int n);

/// n-point Gauss-Jacobi rule on [-1, 1] for the weight (1-x)^a (1+x)^b,
/// a, b > -1, computed with the Golub-Welsch eigenvalue method.
Rule gauss_jacobi(int n, double a, double b);

/// Maps a rule on [-1, 1] to [lo, hi] (weights rescaled by the half-length).
Rule mapped(const Rule& reference, double lo, double hi);

/// Composite Gauss-Legendre rule: `panels` equal panels on [lo, hi], each
/// carrying an `order`-point rule.
Rule composite_legendre(double lo, double hi, int panels, int order);

/// Composite Gauss-Legendre rule on [lo, hi] whose panels shrink
/// geometrically (ratio 1/2) towards `lo`; the innermost panel has width
/// (hi - lo) 2^-levels. Used when the integrand is non-smooth at `lo`.
Rule graded_legendre(double lo, double hi, int levels, int order);

}  // namespace sglab::quad
