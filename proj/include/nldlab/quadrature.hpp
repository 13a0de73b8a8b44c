#pragma once

// Quadrature helpers on top of Boost.Math: composite Gauss-Legendre with
// cached nodes, and adaptive Gauss-Kronrod for real integrands.

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cstddef>
#include <vector>

namespace nldlab {

inline constexpr unsigned kGaussOrder = 20;

struct QuadratureNode {
  double x;
  double w;
};

/// Nodes of the composite rule: `panels` equal panels of a kGaussOrder-point
/// Gauss-Legendre rule on [a, b].
std::vector<QuadratureNode> gauss_legendre_nodes(double a, double b, int panels);

/// Composite Gauss-Legendre; works for real or complex valued f.
template <class F>
auto integrate_gl(F&& f, double a, double b, int panels) -> decltype(f(a)) {
  using R = decltype(f(a));
  using Rule = boost::math::quadrature::gauss<double, kGaussOrder>;
  const auto& xs = Rule::abscissa();
  const auto& ws = Rule::weights();
  const double h = (b - a) / panels;
  R total{};
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    const double half = 0.5 * h;
    R acc{};
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (xs[i] == 0.0) {
        acc += ws[i] * f(mid);
      } else {
        acc += ws[i] * (f(mid - half * xs[i]) + f(mid + half * xs[i]));
      }
    }
    total += acc * half;
  }
  return total;
}

struct AdaptiveResult {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive 31-point Gauss-Kronrod with interval bisection.
template <class F>
AdaptiveResult integrate_adaptive(F&& f, double a, double b, double tol, unsigned max_depth = 20) {
  AdaptiveResult r;
  r.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, max_depth, tol, &r.error);
  return r;
}

}  // namespace nldlab
