#pragma once

#include <functional>
#include <vector>

namespace spfl {

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n >= 1. Nodes are computed by Newton iteration on the Legendre polynomial
// and are accurate to machine precision.
GaussLegendreRule gauss_legendre(int n);

// Brent's method on [lo, hi]. Throws RootNotBracketed unless f changes sign
// on the bracket. Converges to |x - root| < xtol (plus a few ulps of x).
double brent_root(const std::function<double(double)>& f, double lo, double hi,
                  double xtol = 1e-13, int max_iter = 200);

}  // namespace spfl
