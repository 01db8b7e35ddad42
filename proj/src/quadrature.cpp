#include "lifshitz/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "lifshitz/errors.hpp"

namespace lifshitz {

namespace {

// Newton iteration on the Legendre polynomial, seeded with the Chebyshev
// estimate of the k-th root. Standard construction, converges in ~4 steps.
GaussLegendreRule build_rule(int order) {
  GaussLegendreRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const int half = (order + 1) / 2;
  for (int k = 0; k < half; ++k) {
    double x = std::cos(std::numbers::pi * (k + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= order; ++j) {
        double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[k] = -x;
    rule.nodes[order - 1 - k] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[k] = w;
    rule.weights[order - 1 - k] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussLegendreRule& gauss_legendre(int order) {
  if (order < 1) throw ConfigError("Gauss-Legendre order must be >= 1");
  static std::map<int, GaussLegendreRule> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, build_rule(order)).first;
  return it->second;
}

PanelRule composite_gauss_legendre(double a, double b, int panels, int order) {
  if (panels < 1) throw ConfigError("composite rule needs at least one panel");
  const GaussLegendreRule& gl = gauss_legendre(order);
  PanelRule rule;
  rule.nodes.reserve(static_cast<std::size_t>(panels) * order);
  rule.weights.reserve(static_cast<std::size_t>(panels) * order);
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    const double half = 0.5 * width;
    for (int j = 0; j < order; ++j) {
      rule.nodes.push_back(mid + half * gl.nodes[j]);
      rule.weights.push_back(half * gl.weights[j]);
    }
  }
  return rule;
}

}  // namespace lifshitz
