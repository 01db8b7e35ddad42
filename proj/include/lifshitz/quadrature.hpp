#pragma once

#include <span>
#include <vector>

namespace lifshitz {

// Gauss-Legendre rule of the given order on [-1, 1]. Nodes/weights are
// computed once per order and cached for the lifetime of the process.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const GaussLegendreRule& gauss_legendre(int order);

// Nodes and weights of a composite Gauss-Legendre rule: `panels` equal
// subintervals of [a, b], `order` points each.
struct PanelRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

PanelRule composite_gauss_legendre(double a, double b, int panels, int order);

// Convenience: integrate f over [a, b] with a composite rule.
template <class F>
double integrate_panels(F&& f, double a, double b, int panels, int order) {
  PanelRule rule = composite_gauss_legendre(a, b, panels, order);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    sum += rule.weights[i] * f(rule.nodes[i]);
  return sum;
}

}  // namespace lifshitz
