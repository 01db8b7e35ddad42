#pragma once

#include <vector>

#include "lifshitz/materials.hpp"

namespace lifshitz {

// Accuracy knobs of the Matsubara-sum / double-quadrature evaluation.
struct QuadratureSpec {
  double rel_tol = 1e-6;         // per-term relative tolerance
  double u_max = 60.0;           // cutoff of the damped radial variable u = 2 rho3 d
  int panels_phi = 32;           // azimuthal subintervals on [0, 2pi), even, >= 16
  int max_matsubara = 2000;      // hard cap on the frequency sum
  double term_stop_ratio = 1e-7; // tail cutoff relative to the accumulated sum
  int max_refinements = 5;       // panel-doubling passes before giving up

  void validate() const;  // throws ConfigError
};

// The two plates and the gap medium, with materials already resolved to
// oscillator models. Plate 1's optical axis defines theta = 0.
struct PlateSystem {
  OscillatorModel plate1_parallel;
  OscillatorModel plate1_perpendicular;
  OscillatorModel plate2_parallel;
  OscillatorModel plate2_perpendicular;
  OscillatorModel medium;
  double temperature = 300.0;  // [K]
};

// Everything the integrand needs for one Matsubara term: the permittivities
// evaluated at i*xi_n plus the geometry.
struct KernelContext {
  double xi_n = 0.0;  // [rad/s]
  double eps1_par = 1.0, eps1_perp = 1.0;
  double eps2_par = 1.0, eps2_perp = 1.0;
  double eps3 = 1.0;
  double d = 0.0;      // plate separation [m]
  double theta = 0.0;  // angle between optical axes [rad]
  double temperature = 300.0;
};

KernelContext make_kernel_context(const PlateSystem& system, int n, double d,
                                  double theta);

// The five transverse wave-vector factors [1/m] entering the kernel.
struct RhoSet {
  double rho1 = 0.0;
  double rho2 = 0.0;
  double rho3 = 0.0;
  double rho1_tilde = 0.0;
  double rho2_tilde = 0.0;
};

RhoSet rho_factors(double r, double phi, const KernelContext& ctx);

// ln( D_n(phi, r; d) / D_n(phi, r; d -> infinity) ). The d -> infinity
// reference is the same kernel with all exp(-2 rho3 d) factors set to zero,
// which makes the radial integral convergent and the free energy vanish at
// infinite separation.
double log_integrand(double r, double phi, const KernelContext& ctx);

// One summand of the free energy [J/m^2]: (k_B T / 4 pi^2) * w_n *
// integral r dr dphi of log_integrand, with w_0 = 1/2 and w_n = 1 otherwise.
double matsubara_term(int n, double theta, double d, const PlateSystem& system,
                      const QuadratureSpec& spec);

// Helmholtz free energy per unit area Omega(theta, d) [J/m^2], normalized to
// zero at infinite separation.
double free_energy(double theta, double d, const PlateSystem& system,
                   const QuadratureSpec& spec);

// Frozen evaluation plan: the refinement level of every Matsubara term, as
// chosen by one adaptive run. Re-using a plan at nearby (theta, d) keeps the
// quadrature error a smooth function of the perturbed variable, which is what
// makes finite-difference derivatives of Omega clean.
struct FreeEnergyPlan {
  std::vector<int> term_levels;  // refinement level per n; size = term count
};

// Adaptive evaluation that also records the plan. If omega_out is non-null
// it receives Omega(theta, d).
FreeEnergyPlan plan_free_energy(double theta, double d, const PlateSystem& system,
                                const QuadratureSpec& spec,
                                double* omega_out = nullptr);

double free_energy_with_plan(double theta, double d, const PlateSystem& system,
                             const QuadratureSpec& spec,
                             const FreeEnergyPlan& plan);

// Worker threads used to evaluate independent Matsubara terms (results are
// reduced in index order, so the count never changes the values). Default:
// hardware concurrency.
void set_worker_threads(int count);
int worker_threads();

}  // namespace lifshitz
