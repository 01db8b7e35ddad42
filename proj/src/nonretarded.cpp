#include "lifshitz/nonretarded.hpp"

#include <cmath>
#include <functional>
#include <numbers>

#include "lifshitz/constants.hpp"
#include "lifshitz/errors.hpp"
#include "lifshitz/quadrature.hpp"

namespace lifshitz {

namespace {

constexpr double kXiLow = 1e10;    // below this the integrand is flat in xi
constexpr double kXiHigh = 1e19;   // the oscillator tails are ~xi^-4 beyond
constexpr double kXMax = 60.0;
constexpr double kRelTol = 1e-9;   // outer tolerance; the 1e-7 contract needs
                                   // both methods well past their last digit

// -ln(1 - y) / y, continued through y = 0.
double neg_log1m_over(double y) {
  if (std::abs(y) < 1e-4)
    return 1.0 + y * (0.5 + y * (1.0 / 3.0 + y * 0.25));
  return -std::log1p(-y) / y;
}

// Inner integral of the damped variable, int_0^xmax x e^-x / (P - N e^-x)^2 dx.
// Strong reflectivities (N/P -> 1) squeeze a boundary layer of width 1 - N/P
// against x = 0, so the panels are graded geometrically from 0.05 up.
const PanelRule& inner_x_rule() {
  static const PanelRule rule = [] {
    std::vector<double> edges{0.0};
    double width = 0.05;
    while (edges.back() + 1.5 * width < kXMax) {
      edges.push_back(edges.back() + width);
      width = std::min(2.0 * width, 2.0);
    }
    edges.push_back(kXMax);
    const GaussLegendreRule& gl = gauss_legendre(8);
    PanelRule rule;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
      const double mid = 0.5 * (edges[p] + edges[p + 1]);
      const double half = 0.5 * (edges[p + 1] - edges[p]);
      for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
        rule.nodes.push_back(mid + half * gl.nodes[j]);
        rule.weights.push_back(half * gl.weights[j]);
      }
    }
    return rule;
  }();
  return rule;
}

double inner_x_integral(double p, double nm) {
  const PanelRule& rule = inner_x_rule();
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = rule.nodes[i];
    const double ex = std::exp(-x);
    const double den = p - nm * ex;
    sum += rule.weights[i] * x * ex / (den * den);
  }
  return sum;
}

struct EpsAt {
  double e1p, e1t, e2p, e2t, e3;
};

EpsAt eval_all(const UniaxialMaterial& plate1, const UniaxialMaterial& plate2,
               const OscillatorModel& medium, double xi) {
  return {plate1.eps_parallel(xi), plate1.eps_perpendicular(xi),
          plate2.eps_parallel(xi), plate2.eps_perpendicular(xi), medium(xi)};
}

// Outer frequency integral: a flat linear section [0, kXiLow] plus
// log-spaced panels up to kXiHigh, panel count doubled until two successive
// estimates agree to kRelTol.
double xi_integral(const std::function<double(double)>& integrand) {
  auto evaluate = [&](int level) {
    const int low_panels = 2 << level;
    const int log_panels = 72 << level;
    double sum = 0.0;
    PanelRule low = composite_gauss_legendre(0.0, kXiLow, low_panels, 8);
    for (std::size_t i = 0; i < low.nodes.size(); ++i)
      sum += low.weights[i] * integrand(low.nodes[i]);
    PanelRule log_rule = composite_gauss_legendre(std::log(kXiLow),
                                                  std::log(kXiHigh), log_panels, 8);
    for (std::size_t i = 0; i < log_rule.nodes.size(); ++i) {
      const double xi = std::exp(log_rule.nodes[i]);
      sum += log_rule.weights[i] * xi * integrand(xi);
    }
    return sum;
  };

  double prev = evaluate(0);
  for (int level = 1; level <= 5; ++level) {
    const double cur = evaluate(level);
    if (std::abs(cur - prev) <= kRelTol * std::abs(cur) + 1e-6) return cur;
    prev = cur;
  }
  throw NumericalError("omega_bar frequency integral did not converge",
                       std::abs(prev));
}

}  // namespace

OmegaBarResult omega_bar_numeric(const UniaxialMaterial& plate1,
                                 const UniaxialMaterial& plate2,
                                 const OscillatorModel& medium) {
  auto integrand = [&](double xi) {
    const EpsAt e = eval_all(plate1, plate2, medium, xi);
    const double anis = (e.e2p - e.e2t) * (e.e1p - e.e1t);
    if (anis == 0.0) return 0.0;
    const double p = (e.e1t + e.e3) * (e.e2t + e.e3);
    const double nm = (e.e1t - e.e3) * (e.e2t - e.e3);
    return anis * e.e3 * e.e3 * inner_x_integral(p, nm);
  };
  return {xi_integral(integrand), OmegaBarMethod::numeric};
}

OmegaBarResult omega_bar_closed(const UniaxialMaterial& plate1,
                                const UniaxialMaterial& plate2,
                                const OscillatorModel& medium) {
  // Integrating out the damped variable gives -ln(1 - N/P) / (P N); written
  // as g(N/P) / P^2 with g(y) = -ln(1-y)/y this passes smoothly through the
  // eps_perp = eps3 crossings where N vanishes.
  auto integrand = [&](double xi) {
    const EpsAt e = eval_all(plate1, plate2, medium, xi);
    const double anis = (e.e2p - e.e2t) * (e.e1p - e.e1t);
    if (anis == 0.0) return 0.0;
    const double p = (e.e1t + e.e3) * (e.e2t + e.e3);
    const double y = (e.e1t - e.e3) * (e.e2t - e.e3) / p;
    return anis * e.e3 * e.e3 * neg_log1m_over(y) / (p * p);
  };
  return {xi_integral(integrand), OmegaBarMethod::closed_form};
}

double torque_nonretarded(double theta, double d, double area,
                          double omega_bar) {
  if (!(d > 0.0)) throw ConfigError("plate separation d must be > 0");
  const double pi2 = std::numbers::pi * std::numbers::pi;
  return -constants::hbar * omega_bar * area /
         (64.0 * pi2 * d * d) * std::sin(2.0 * theta);
}

}  // namespace lifshitz
