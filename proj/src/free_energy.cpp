#include "lifshitz/free_energy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "lifshitz/constants.hpp"
#include "lifshitz/errors.hpp"
#include "lifshitz/quadrature.hpp"

namespace lifshitz {

namespace {

constexpr int kPhiOrder = 4;   // Gauss-Legendre points per azimuthal panel
constexpr int kUOrder = 8;     // Gauss-Legendre points per radial panel
constexpr double kUPanelWidth = 4.0;
constexpr int kBatch = 8;      // Matsubara terms evaluated per parallel batch
constexpr double kAbsFloor = 1e-14;  // absolute floor on the dimensionless integral

std::atomic<int> g_threads{0};

// Azimuthal node data for one refinement level: the theta-dependent
// trigonometric combinations the kernel needs, tabulated once per node.
struct PhiTable {
  std::vector<double> weight;
  std::vector<double> s1;   // sin^2(phi)
  std::vector<double> s2;   // sin^2(phi + theta)
  std::vector<double> c1;   // cos^2(phi)
  std::vector<double> c2;   // cos^2(phi + theta)
  std::vector<double> m12;  // sin(phi) sin(phi + theta)
};

PhiTable make_phi_table(double theta, int panels) {
  PanelRule rule =
      composite_gauss_legendre(0.0, 2.0 * std::numbers::pi, panels, kPhiOrder);
  PhiTable table;
  const std::size_t n = rule.nodes.size();
  table.weight = std::move(rule.weights);
  table.s1.resize(n);
  table.s2.resize(n);
  table.c1.resize(n);
  table.c2.resize(n);
  table.m12.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double phi = rule.nodes[i];
    const double sp = std::sin(phi);
    const double cp = std::cos(phi);
    const double spt = std::sin(phi + theta);
    const double cpt = std::cos(phi + theta);
    table.s1[i] = sp * sp;
    table.s2[i] = spt * spt;
    table.c1[i] = cp * cp;
    table.c2[i] = cpt * cpt;
    table.m12[i] = sp * spt;
  }
  return table;
}

// Per-Matsubara-term constants plus the pointwise kernel. The kernel is the
// regularized logarithm ln(D_n(d) / D_n(inf)) written as log1p of the
// exponential-carrying part: D_n is quadratic in e^(-2 rho3 d), so we
// assemble the three polynomial coefficients N0, N1, N2 and never form the
// divergent-normalization pieces separately. The removable singularities at
// rho_i^2 = r^2 sin^2 of the printed kernel cancel exactly against the
// (rho_tilde - rho) factors via
//   rho_tilde^2 - rho^2 = (eps_par/eps_perp - 1) (rho^2 - r^2 sin^2),
// so the assembled kernel is regular everywhere.
struct TermKernel {
  double e1t, e2t, e3;  // perpendicular permittivities and the medium
  double a1, a2;        // eps_par/eps_perp - 1 per plate
  double k1, k1p;       // (xi/c)^2 * eps1_perp, (xi/c)^2 * eps1_par
  double k2, k2p;
  double k3;            // (xi/c)^2 * eps3
  double cos_theta, sin2_theta;

  explicit TermKernel(const KernelContext& ctx) {
    e1t = ctx.eps1_perp;
    e2t = ctx.eps2_perp;
    e3 = ctx.eps3;
    a1 = ctx.eps1_par / ctx.eps1_perp - 1.0;
    a2 = ctx.eps2_par / ctx.eps2_perp - 1.0;
    const double kk = ctx.xi_n / constants::light_speed;
    k1 = kk * kk * ctx.eps1_perp;
    k1p = kk * kk * ctx.eps1_par;
    k2 = kk * kk * ctx.eps2_perp;
    k2p = kk * kk * ctx.eps2_par;
    k3 = kk * kk * ctx.eps3;
    cos_theta = std::cos(ctx.theta);
    const double st = std::sin(ctx.theta);
    sin2_theta = st * st;
  }

  // All five rho factors are taken through the same sqrt(rsq + k) route so
  // that equal permittivities cancel exactly.
  double eval(double rsq, double e2, const PhiTable& phi, std::size_t i) const {
    const double s1 = phi.s1[i];
    const double s2 = phi.s2[i];
    const double rho3 = std::sqrt(rsq + k3);
    const double rho3sq = rho3 * rho3;

    const double rho1 = std::sqrt(rsq + k1);
    const double rho2 = std::sqrt(rsq + k2);
    const double rho1t = std::sqrt(rsq * (1.0 + a1 * phi.c1[i]) + k1p);
    const double rho2t = std::sqrt(rsq * (1.0 + a2 * phi.c2[i]) + k2p);
    const double T1 = e1t * a1 / (rho1t + rho1);
    const double Q2 = e2t * a2 / (rho2t + rho2);

    const double P = (rho1 + rho3) * (rho2 + rho3);
    const double Pm = (rho1 - rho3) * (rho2 - rho3);
    const double G1p = e3 * rho1 + e1t * rho3;
    const double G1m = e3 * rho1 - e1t * rho3;
    const double G2p = e3 * rho2 + e2t * rho3;
    const double G2m = e3 * rho2 - e2t * rho3;
    const double u1 = rsq * s1 - rho1 * rho3;
    const double v1 = rsq * s1 + rho1 * rho3;

    const double A0 = P * (G1p * G2p) - T1 * u1 * G2p * P;
    const double A1 = -(Pm * G1p * G2p + P * G1m * G2m) -
                      2.0 * T1 * (e2t - e3) *
                          (rsq * s1 * (rsq * rho1 - rho2 * rho3sq) +
                           rho1 * rho3sq * (rsq - 2.0 * rsq * s1 + rho1 * rho2));
    const double A2 = Pm * (G1m * G2m) - T1 * v1 * G2m * Pm;

    const double B0 = (G1p - T1 * u1) * P;
    const double B1 =
        2.0 * (e1t - e3) * (rsq * rho2 - rho1 * rho3sq - 2.0 * rho2 * rho3sq) +
        2.0 * T1 * (rsq * s1 * (rho1 * rho2 + rho3sq) - rho1 * rho1 * rho3sq +
                    rho1 * rho2 * rho3sq);
    const double B2 = (G1m - T1 * v1) * Pm;

    const double C0 = -rho2 * rho3 * B0;
    const double C1 =
        rho2 * rho3 *
        (2.0 * rho3 * (e1t - e3) * (rsq + rho1 * rho2) +
         2.0 * T1 * rho3 *
             (rho1 * rho1 * rho2 + rho1 * rho3sq + rsq * s1 * (rho1 - rho2)));
    const double C2 = rho2 * rho3 * B2;

    const double E1 = 4.0 * rho1 * rho2 * rho3sq * T1;
    const double W = 2.0 * rsq * phi.m12[i] * cos_theta + rho3sq * sin2_theta;

    const double rs2 = rsq * s2;
    const double N0 = A0 - Q2 * (B0 * rs2 + C0);
    const double N1 = A1 - Q2 * (B1 * rs2 - E1 * W + C1);
    const double N2 = A2 - Q2 * (B2 * rs2 + C2);

    return std::log1p((N1 * e2 + N2 * e2 * e2) / N0);
  }
};

struct TermGeometry {
  double d = 0.0;
  double u0 = 0.0;  // lower end of the damped variable, 2 d xi sqrt(eps3) / c
  std::vector<double> edges;  // base radial panel boundaries
};

// Radial panels graded to both scales of the integrand: the retardation
// crossover of each term lives at u ~ u0, the overall decay at u ~ 1, so
// panel widths start near u0/2 and double up to kUPanelWidth.
TermGeometry term_geometry(const KernelContext& ctx, const QuadratureSpec& spec) {
  TermGeometry geom;
  geom.d = ctx.d;
  geom.u0 = 2.0 * ctx.d * ctx.xi_n * std::sqrt(ctx.eps3) / constants::light_speed;
  if (geom.u0 >= spec.u_max) return geom;
  geom.edges.push_back(geom.u0);
  double width = std::clamp(0.5 * geom.u0, 0.25, kUPanelWidth);
  while (geom.edges.back() + 1.5 * width < spec.u_max) {
    geom.edges.push_back(geom.edges.back() + width);
    width = std::min(2.0 * width, kUPanelWidth);
  }
  geom.edges.push_back(spec.u_max);
  return geom;
}

// Dimensionless double integral of one term at a given refinement level:
//   J = int_{u0}^{umax} u du int_0^{2pi} dphi ln(D/Dinf),
// in the substitution u = 2 rho3 d (so r dr = u du / (4 d^2)). Level L splits
// every base panel into 2^L equal parts.
double integrate_level(const TermKernel& kernel, const TermGeometry& geom,
                       const std::vector<PhiTable>& phi_tables, int level) {
  const PhiTable& phi = phi_tables[static_cast<std::size_t>(level)];
  const GaussLegendreRule& gl = gauss_legendre(kUOrder);
  const int splits = 1 << level;

  const std::size_t nphi = phi.weight.size();
  const double inv4d2 = 1.0 / (4.0 * geom.d * geom.d);
  double outer = 0.0;
  for (std::size_t p = 0; p + 1 < geom.edges.size(); ++p) {
    const double sub_width = (geom.edges[p + 1] - geom.edges[p]) / splits;
    for (int s = 0; s < splits; ++s) {
      const double mid = geom.edges[p] + (s + 0.5) * sub_width;
      const double half = 0.5 * sub_width;
      for (int j = 0; j < kUOrder; ++j) {
        const double u = mid + half * gl.nodes[j];
        const double rsq = std::max(0.0, (u - geom.u0) * (u + geom.u0)) * inv4d2;
        const double e2 = std::exp(-u);
        double inner = 0.0;
        for (std::size_t i = 0; i < nphi; ++i)
          inner += phi.weight[i] * kernel.eval(rsq, e2, phi, i);
        outer += half * gl.weights[j] * u * inner;
      }
    }
  }
  return outer;
}

struct TermResult {
  double integral = 0.0;  // the dimensionless J above
  int level = 0;
};

// Refine by doubling both panel sets until two successive estimates agree.
// `scale` is the largest |J| seen so far in the enclosing sum; terms that are
// already negligible at level 0 are not refined further.
TermResult integrate_adaptive(const TermKernel& kernel, const TermGeometry& geom,
                              const QuadratureSpec& spec,
                              const std::vector<PhiTable>& phi_tables,
                              double scale) {
  double prev = integrate_level(kernel, geom, phi_tables, 0);
  if (!std::isfinite(prev))
    throw NumericalError("free-energy integrand produced a non-finite value",
                         std::abs(prev));
  if (std::abs(prev) < 1e-10 * scale) return {prev, 0};
  for (int level = 1; level <= spec.max_refinements; ++level) {
    const double cur = integrate_level(kernel, geom, phi_tables, level);
    const double diff = std::abs(cur - prev);
    if (diff <= spec.rel_tol * std::abs(cur) + kAbsFloor) return {cur, level};
    prev = cur;
  }
  throw NumericalError(
      "free-energy quadrature did not reach the requested tolerance",
      std::abs(prev));
}

double term_prefactor(int n, double temperature, double d) {
  const double weight = (n == 0) ? 0.5 : 1.0;
  return constants::boltzmann * temperature /
         (4.0 * std::numbers::pi * std::numbers::pi) * weight /
         (4.0 * d * d);
}

void check_geometry(double d) {
  if (!(d > 0.0)) throw ConfigError("plate separation d must be > 0");
}

// Runs fn(i) for i in [0, count) across the worker threads. Exceptions are
// rethrown on the calling thread.
template <class Fn>
void parallel_for(int count, Fn&& fn) {
  const int nthreads = std::min(worker_threads(), count);
  if (nthreads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(nthreads));
  for (int t = 0; t < nthreads; ++t) {
    pool.emplace_back([&, t]() {
      try {
        for (int i = t; i < count; i += nthreads) fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
      }
    });
  }
  for (std::thread& th : pool) th.join();
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
}

struct SumOutcome {
  double omega = 0.0;
  std::vector<int> levels;
};

// Shared driver of the Matsubara sum. With `plan` null it adapts every term
// and applies the truncation rule; with `plan` set it re-evaluates exactly
// the planned terms at their recorded levels. Terms are computed in parallel
// batches of fixed size and always reduced in index order.
SumOutcome sum_terms(double theta, double d, const PlateSystem& system,
                     const QuadratureSpec& spec, const FreeEnergyPlan* plan) {
  spec.validate();
  check_geometry(d);

  std::vector<PhiTable> phi_tables;
  phi_tables.reserve(static_cast<std::size_t>(spec.max_refinements) + 1);
  for (int level = 0; level <= spec.max_refinements; ++level)
    phi_tables.push_back(make_phi_table(theta, spec.panels_phi << level));

  const int term_count = plan ? static_cast<int>(plan->term_levels.size())
                              : spec.max_matsubara + 1;

  SumOutcome out;
  out.levels.reserve(static_cast<std::size_t>(std::min(term_count, 256)));
  double sum = 0.0;
  double scale = 0.0;
  int consecutive_small = 0;
  bool stopped = false;

  std::vector<double> values(kBatch);
  std::vector<int> levels(kBatch);
  for (int start = 0; start < term_count && !stopped; start += kBatch) {
    const int batch = std::min(kBatch, term_count - start);
    const double batch_scale = scale;
    parallel_for(batch, [&](int k) {
      const int n = start + k;
      const KernelContext ctx = make_kernel_context(system, n, d, theta);
      const TermGeometry geom = term_geometry(ctx, spec);
      if (geom.u0 >= spec.u_max) {
        values[static_cast<std::size_t>(k)] = 0.0;
        levels[static_cast<std::size_t>(k)] = 0;
        return;
      }
      const TermKernel kernel(ctx);
      if (plan) {
        const int level = plan->term_levels[static_cast<std::size_t>(n)];
        values[static_cast<std::size_t>(k)] =
            integrate_level(kernel, geom, phi_tables, level);
        levels[static_cast<std::size_t>(k)] = level;
      } else {
        const TermResult res =
            integrate_adaptive(kernel, geom, spec, phi_tables, batch_scale);
        values[static_cast<std::size_t>(k)] = res.integral;
        levels[static_cast<std::size_t>(k)] = res.level;
      }
    });
    for (int k = 0; k < batch; ++k) {
      const int n = start + k;
      const double term =
          term_prefactor(n, system.temperature, d) * values[static_cast<std::size_t>(k)];
      sum += term;
      scale = std::max(scale, std::abs(values[static_cast<std::size_t>(k)]));
      out.levels.push_back(levels[static_cast<std::size_t>(k)]);
      if (plan == nullptr && n >= 1) {
        if (std::abs(term) <= spec.term_stop_ratio * std::abs(sum)) {
          if (++consecutive_small >= 3) {
            stopped = true;
            break;
          }
        } else {
          consecutive_small = 0;
        }
      }
    }
  }

  if (plan == nullptr && !stopped)
    throw NumericalError(
        "Matsubara sum not truncated within max_matsubara terms",
        std::abs(sum));
  out.omega = sum;
  return out;
}

}  // namespace

void QuadratureSpec::validate() const {
  if (!(rel_tol > 0.0)) throw ConfigError("rel_tol must be > 0");
  if (!(u_max >= 30.0)) throw ConfigError("u_max must be >= 30");
  if (panels_phi < 16 || panels_phi % 2 != 0)
    throw ConfigError("panels_phi must be >= 16 and even");
  if (max_matsubara < 1) throw ConfigError("max_matsubara must be >= 1");
  if (!(term_stop_ratio > 0.0)) throw ConfigError("term_stop_ratio must be > 0");
  if (max_refinements < 1) throw ConfigError("max_refinements must be >= 1");
}

void set_worker_threads(int count) {
  g_threads.store(count > 0 ? count : 0);
}

int worker_threads() {
  const int configured = g_threads.load();
  if (configured > 0) return configured;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

KernelContext make_kernel_context(const PlateSystem& system, int n, double d,
                                  double theta) {
  check_geometry(d);
  KernelContext ctx;
  ctx.xi_n = matsubara_xi(n, system.temperature);
  ctx.eps1_par = system.plate1_parallel(ctx.xi_n);
  ctx.eps1_perp = system.plate1_perpendicular(ctx.xi_n);
  ctx.eps2_par = system.plate2_parallel(ctx.xi_n);
  ctx.eps2_perp = system.plate2_perpendicular(ctx.xi_n);
  ctx.eps3 = system.medium(ctx.xi_n);
  ctx.d = d;
  ctx.theta = theta;
  ctx.temperature = system.temperature;
  return ctx;
}

RhoSet rho_factors(double r, double phi, const KernelContext& ctx) {
  if (!(r >= 0.0)) throw ConfigError("radial wave number r must be >= 0");
  const double kk = ctx.xi_n / constants::light_speed;
  const double kk2 = kk * kk;
  const double rsq = r * r;
  RhoSet rho;
  rho.rho1 = std::sqrt(rsq + kk2 * ctx.eps1_perp);
  rho.rho2 = std::sqrt(rsq + kk2 * ctx.eps2_perp);
  rho.rho3 = std::sqrt(rsq + kk2 * ctx.eps3);
  const double c1 = std::cos(phi);
  // (r cos(phi) cos(theta) - r sin(phi) sin(theta))^2 = r^2 cos^2(phi + theta)
  const double c2 = std::cos(phi + ctx.theta);
  rho.rho1_tilde = std::sqrt(
      rsq + (ctx.eps1_par / ctx.eps1_perp - 1.0) * rsq * c1 * c1 +
      kk2 * ctx.eps1_par);
  rho.rho2_tilde = std::sqrt(
      rsq + (ctx.eps2_par / ctx.eps2_perp - 1.0) * rsq * c2 * c2 +
      kk2 * ctx.eps2_par);
  return rho;
}

double log_integrand(double r, double phi, const KernelContext& ctx) {
  if (!(r >= 0.0)) throw ConfigError("radial wave number r must be >= 0");
  check_geometry(ctx.d);
  TermKernel kernel(ctx);

  PhiTable single;
  const double sp = std::sin(phi);
  const double cp = std::cos(phi);
  const double spt = std::sin(phi + ctx.theta);
  const double cpt = std::cos(phi + ctx.theta);
  single.weight = {1.0};
  single.s1 = {sp * sp};
  single.s2 = {spt * spt};
  single.c1 = {cp * cp};
  single.c2 = {cpt * cpt};
  single.m12 = {sp * spt};

  double rsq = r * r;
  const double kk = ctx.xi_n / constants::light_speed;
  const double rho3 = std::sqrt(rsq + kk * kk * ctx.eps3);
  const double e2 = std::exp(-2.0 * rho3 * ctx.d);
  if (rsq == 0.0 && ctx.xi_n == 0.0) {
    // The kernel coefficients are homogeneous in r at xi = 0, so the r -> 0
    // limit equals their value at any r > 0 (with the exponential pinned).
    rsq = 1.0;
  }
  return kernel.eval(rsq, e2, single, 0);
}

double matsubara_term(int n, double theta, double d, const PlateSystem& system,
                      const QuadratureSpec& spec) {
  spec.validate();
  check_geometry(d);
  if (n < 0) throw ConfigError("Matsubara index must be >= 0");
  const KernelContext ctx = make_kernel_context(system, n, d, theta);
  const TermGeometry geom = term_geometry(ctx, spec);
  if (geom.u0 >= spec.u_max) return 0.0;

  std::vector<PhiTable> phi_tables;
  for (int level = 0; level <= spec.max_refinements; ++level)
    phi_tables.push_back(make_phi_table(theta, spec.panels_phi << level));

  const TermKernel kernel(ctx);
  const TermResult res = integrate_adaptive(kernel, geom, spec, phi_tables, 0.0);
  return term_prefactor(n, system.temperature, d) * res.integral;
}

double free_energy(double theta, double d, const PlateSystem& system,
                   const QuadratureSpec& spec) {
  return sum_terms(theta, d, system, spec, nullptr).omega;
}

FreeEnergyPlan plan_free_energy(double theta, double d, const PlateSystem& system,
                                const QuadratureSpec& spec, double* omega_out) {
  SumOutcome out = sum_terms(theta, d, system, spec, nullptr);
  if (omega_out != nullptr) *omega_out = out.omega;
  FreeEnergyPlan plan;
  plan.term_levels = std::move(out.levels);
  return plan;
}

double free_energy_with_plan(double theta, double d, const PlateSystem& system,
                             const QuadratureSpec& spec,
                             const FreeEnergyPlan& plan) {
  if (plan.term_levels.empty())
    throw ConfigError("free_energy_with_plan: empty plan");
  return sum_terms(theta, d, system, spec, &plan).omega;
}

}  // namespace lifshitz
