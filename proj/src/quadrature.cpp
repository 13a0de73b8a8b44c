#include "nldlab/quadrature.hpp"

namespace nldlab {

std::vector<QuadratureNode> gauss_legendre_nodes(double a, double b, int panels) {
  using Rule = boost::math::quadrature::gauss<double, kGaussOrder>;
  const auto& xs = Rule::abscissa();
  const auto& ws = Rule::weights();
  std::vector<QuadratureNode> nodes;
  nodes.reserve(static_cast<std::size_t>(panels) * kGaussOrder);
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    const double half = 0.5 * h;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (xs[i] == 0.0) {
        nodes.push_back({mid, ws[i] * half});
      } else {
        nodes.push_back({mid - half * xs[i], ws[i] * half});
        nodes.push_back({mid + half * xs[i], ws[i] * half});
      }
    }
  }
  return nodes;
}

}  // namespace nldlab
