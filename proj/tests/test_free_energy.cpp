#include <cmath>
#include <vector>

#include <doctest.h>

#include "lifshitz/constants.hpp"
#include "lifshitz/errors.hpp"
#include "lifshitz/free_energy.hpp"
#include "lifshitz/materials.hpp"

using namespace lifshitz;

namespace {

PlateSystem make_system(const char* plate1, const char* plate2,
                        const char* medium, double temperature = 300.0) {
  const MaterialDatabase& db = MaterialDatabase::bundled();
  PlateSystem system;
  system.plate1_parallel = db.require(plate1).eps_parallel;
  system.plate1_perpendicular = db.require(plate1).eps_perpendicular;
  system.plate2_parallel = db.require(plate2).eps_parallel;
  system.plate2_perpendicular = db.require(plate2).eps_perpendicular;
  system.medium = db.require(medium).eps_parallel;
  system.temperature = temperature;
  return system;
}

// eps(i xi) = 1 + C / (1 + (xi/w)^2); static value 1 + C.
OscillatorModel single(double strength, double omega = 1e16) {
  return OscillatorModel{{{strength, omega, 0.0}}};
}

PlateSystem isotropic_system(double c1, double c2, double c3, double omega = 1e16,
                             double temperature = 300.0) {
  PlateSystem system;
  system.plate1_parallel = single(c1, omega);
  system.plate1_perpendicular = single(c1, omega);
  system.plate2_parallel = single(c2, omega);
  system.plate2_perpendicular = single(c2, omega);
  system.medium = c3 > 0.0 ? single(c3, omega) : OscillatorModel{};
  system.temperature = temperature;
  return system;
}

// Standard two-interface reflection product form of the isotropic kernel,
// assembled independently of the implementation path under test.
double iso_reference_log(double r, double d, double xi, double e1, double e2,
                         double e3) {
  const double kk = xi / constants::light_speed;
  const double rho1 = std::sqrt(r * r + kk * kk * e1);
  const double rho2 = std::sqrt(r * r + kk * kk * e2);
  const double rho3 = std::sqrt(r * r + kk * kk * e3);
  const double e = std::exp(-2.0 * rho3 * d);
  const double rte = (rho1 - rho3) * (rho2 - rho3) /
                     ((rho1 + rho3) * (rho2 + rho3));
  const double rtm = (e3 * rho1 - e1 * rho3) * (e3 * rho2 - e2 * rho3) /
                     ((e3 * rho1 + e1 * rho3) * (e3 * rho2 + e2 * rho3));
  return std::log((1.0 - rte * e) * (1.0 - rtm * e));
}

}  // namespace

TEST_CASE("rho factors collapse to r at zero frequency") {
  PlateSystem system = make_system("quartz", "BaTiO3", "vacuum");
  const KernelContext ctx = make_kernel_context(system, 0, 100e-9, 0.5);
  const RhoSet rho = rho_factors(2.5e7, 1.1, ctx);
  CHECK(rho.rho1 == 2.5e7);
  CHECK(rho.rho2 == 2.5e7);
  CHECK(rho.rho3 == 2.5e7);
  // static anisotropy still shifts the tilde factors
  CHECK(rho.rho1_tilde != rho.rho1);
}

TEST_CASE("isotropic plate keeps rho_tilde equal to rho") {
  PlateSystem system = isotropic_system(1.0, 2.0, 0.0);
  for (int n : {0, 1, 7}) {
    const KernelContext ctx = make_kernel_context(system, n, 100e-9, 0.9);
    const RhoSet rho = rho_factors(1.3e7, 0.4, ctx);
    CHECK(rho.rho1_tilde == doctest::Approx(rho.rho1).epsilon(1e-15));
    CHECK(rho.rho2_tilde == doctest::Approx(rho.rho2).epsilon(1e-15));
  }
}

TEST_CASE("rho3 against hand arithmetic at the first Matsubara frequency") {
  PlateSystem system = make_system("quartz", "BaTiO3", "vacuum");
  const KernelContext ctx = make_kernel_context(system, 1, 100e-9, 0.0);
  CHECK(ctx.xi_n == doctest::Approx(2.4677902551530605e14).epsilon(1e-12));
  RhoSet rho = rho_factors(1e7, 0.0, ctx);
  // sqrt(1e14 + (xi_1/c)^2) with eps3 = 1
  CHECK(rho.rho3 == doctest::Approx(1.0033822932047094e7).epsilon(1e-12));
  CHECK(rho.rho3 >= 1e7);
}

TEST_CASE("log integrand vanishes at huge separation") {
  PlateSystem system = make_system("quartz", "BaTiO3", "vacuum");
  KernelContext ctx = make_kernel_context(system, 0, 1e-4, 0.7);
  // 2 rho3 d = 2 * 1e7 * 1e-4 = 2000 >> 700
  CHECK(log_integrand(1e7, 0.3, ctx) == 0.0);
}

TEST_CASE("log integrand is zero when both plates match the medium") {
  PlateSystem system = isotropic_system(1.5, 1.5, 1.5);
  for (int n : {0, 1, 5}) {
    const KernelContext ctx = make_kernel_context(system, n, 50e-9, 0.6);
    for (double r : {1e5, 1e7, 5e7}) {
      for (double phi : {0.0, 0.8, 2.9, 5.5}) {
        CHECK(log_integrand(r, phi, ctx) == 0.0);
      }
    }
  }
}

TEST_CASE("static isotropic limit matches the two-medium reflection formula") {
  // eps1 = eps2 = 2, eps3 = 1 at xi = 0: ln(1 - (1/3)^2 exp(-2 r d))
  PlateSystem system = isotropic_system(1.0, 1.0, 0.0);
  const double d = 100e-9;
  const KernelContext ctx = make_kernel_context(system, 0, d, 0.4);
  for (double r : {1e5, 1e6, 1e7, 3e7}) {
    const double expected = std::log1p(-std::exp(-2.0 * r * d) / 9.0);
    for (double phi : {0.0, 1.0, 4.0}) {
      CHECK(log_integrand(r, phi, ctx) ==
            doctest::Approx(expected).epsilon(1e-10));
    }
  }
}

TEST_CASE("retarded isotropic limit matches an independent reflection product") {
  PlateSystem system = isotropic_system(2.5, 0.8, 0.4);
  const double d = 80e-9;
  for (int n : {1, 3, 20}) {
    const KernelContext ctx = make_kernel_context(system, n, d, 1.3);
    const double e1 = system.plate1_parallel(ctx.xi_n);
    const double e2 = system.plate2_parallel(ctx.xi_n);
    const double e3 = system.medium(ctx.xi_n);
    for (double r : {1e5, 1e7, 6e7}) {
      const double expected = iso_reference_log(r, d, ctx.xi_n, e1, e2, e3);
      CHECK(log_integrand(r, 2.2, ctx) ==
            doctest::Approx(expected).epsilon(1e-10));
    }
  }
}

TEST_CASE("regularized integrand decays below 1e-12 once 2 rho3 d > 60") {
  PlateSystem system = make_system("calcite", "BaTiO3", "ethanol");
  const double d = 100e-9;
  for (int n : {0, 1, 4}) {
    const KernelContext ctx = make_kernel_context(system, n, d, 0.8);
    for (double u : {62.0, 80.0, 150.0}) {
      const double rho3 = u / (2.0 * d);
      const double kk = ctx.xi_n / constants::light_speed;
      const double r2 = rho3 * rho3 - kk * kk * ctx.eps3;
      if (r2 <= 0.0) continue;
      CHECK(std::abs(log_integrand(std::sqrt(r2), 1.0, ctx)) < 1e-12);
    }
  }
}

TEST_CASE("r = 0 limit of the static term is finite") {
  PlateSystem system = make_system("quartz", "BaTiO3", "vacuum");
  const KernelContext ctx = make_kernel_context(system, 0, 100e-9, 0.7);
  const double at_zero = log_integrand(0.0, 0.9, ctx);
  const double nearby = log_integrand(1e-3, 0.9, ctx);
  CHECK(std::isfinite(at_zero));
  CHECK(at_zero == doctest::Approx(nearby).epsilon(1e-9));
}

TEST_CASE("matsubara term vanishes for identical media") {
  PlateSystem system = isotropic_system(1.5, 1.5, 1.5);
  QuadratureSpec spec;
  CHECK(matsubara_term(0, 0.3, 100e-9, system, spec) == 0.0);
  CHECK(matsubara_term(5, 0.3, 100e-9, system, spec) == 0.0);
}

TEST_CASE("static isotropic term reproduces the series oracle") {
  // eps1 = eps2 = 2 in vacuum at d = 100 nm, T = 300 K. The n = 0 summand is
  //   (k_B T / 8 pi^2) int dphi int r dr ln(1 - Delta^2 e^(-2 r d))
  // = -(k_B T / 16 pi d^2) sum_k Delta^(2k) / k^3 with Delta = 1/3.
  PlateSystem system = isotropic_system(1.0, 1.0, 0.0);
  QuadratureSpec spec;
  const double term = matsubara_term(0, 0.4, 100e-9, system, spec);
  double series = 0.0;
  for (int k = 40; k >= 1; --k)
    series += std::pow(1.0 / 9.0, k) / (static_cast<double>(k) * k * k);
  const double oracle = -constants::boltzmann * 300.0 * series /
                        (16.0 * std::numbers::pi * 100e-9 * 100e-9);
  CHECK(term == doctest::Approx(oracle).epsilon(1e-6));
  CHECK(term == doctest::Approx(-9.2872703241973071e-10).epsilon(1e-6));
}

TEST_CASE("n = 0 term is linear in temperature") {
  PlateSystem sys300 = make_system("quartz", "BaTiO3", "ethanol", 300.0);
  PlateSystem sys600 = make_system("quartz", "BaTiO3", "ethanol", 600.0);
  QuadratureSpec spec;
  const double t300 = matsubara_term(0, 0.6, 100e-9, sys300, spec);
  const double t600 = matsubara_term(0, 0.6, 100e-9, sys600, spec);
  CHECK(t600 == doctest::Approx(2.0 * t300).epsilon(1e-14));
}

TEST_CASE("free energy of isotropic plates does not depend on theta") {
  PlateSystem system = isotropic_system(2.5, 0.8, 0.0);
  QuadratureSpec spec;
  spec.rel_tol = 1e-6;
  const double a = free_energy(0.3, 100e-9, system, spec);
  const double b = free_energy(1.1, 100e-9, system, spec);
  CHECK(a == doctest::Approx(b).epsilon(2e-6));
}

TEST_CASE("free energy is pi-periodic and reflection symmetric in theta") {
  PlateSystem system = make_system("quartz", "BaTiO3", "vacuum");
  QuadratureSpec spec;
  spec.rel_tol = 1e-5;
  const double d = 100e-9;
  const double base = free_energy(0.4, d, system, spec);
  CHECK(free_energy(0.4 + std::numbers::pi, d, system, spec) ==
        doctest::Approx(base).epsilon(4e-5));
  CHECK(free_energy(-0.4, d, system, spec) ==
        doctest::Approx(base).epsilon(4e-5));
  CHECK(free_energy(std::numbers::pi - 0.4, d, system, spec) ==
        doctest::Approx(base).epsilon(4e-5));
}

TEST_CASE("free energy is symmetric under swapping the plates") {
  PlateSystem ab = make_system("quartz", "BaTiO3", "vacuum");
  PlateSystem ba = make_system("BaTiO3", "quartz", "vacuum");
  QuadratureSpec spec;
  spec.rel_tol = 1e-5;
  const double a = free_energy(std::numbers::pi / 8, 100e-9, ab, spec);
  const double b = free_energy(std::numbers::pi / 8, 100e-9, ba, spec);
  CHECK(a == doctest::Approx(b).epsilon(2e-5));
}

TEST_CASE("Matsubara terms decay monotonically beyond the peak") {
  PlateSystem system = make_system("quartz", "BaTiO3", "vacuum");
  QuadratureSpec spec;
  std::vector<double> mags;
  for (int n = 0; n <= 150; ++n)
    mags.push_back(std::abs(matsubara_term(n, std::numbers::pi / 4, 100e-9,
                                           system, spec)));
  std::size_t peak = 0;
  for (std::size_t i = 1; i < mags.size(); ++i)
    if (mags[i] > mags[peak]) peak = i;
  const double floor = 1e-12 * mags[peak];
  for (std::size_t i = peak + 1; i < mags.size(); ++i) {
    if (mags[i] < floor || mags[i - 1] < floor) break;
    CHECK(mags[i] <= mags[i - 1]);
  }
}

TEST_CASE("halving rel_tol moves Omega by less than the claimed error") {
  PlateSystem system = make_system("quartz", "BaTiO3", "vacuum");
  QuadratureSpec coarse;
  coarse.rel_tol = 1e-4;
  QuadratureSpec fine;
  fine.rel_tol = 5e-5;
  const double a = free_energy(0.7, 100e-9, system, coarse);
  const double b = free_energy(0.7, 100e-9, system, fine);
  CHECK(std::abs(a - b) <= coarse.rel_tol * std::abs(a));
}

TEST_CASE("plan reuse reproduces the adaptive value") {
  PlateSystem system = make_system("calcite", "BaTiO3", "ethanol");
  QuadratureSpec spec;
  spec.rel_tol = 1e-5;
  double omega = 0.0;
  const FreeEnergyPlan plan = plan_free_energy(0.5, 100e-9, system, spec, &omega);
  CHECK(free_energy_with_plan(0.5, 100e-9, system, spec, plan) == omega);
  CHECK(plan.term_levels.size() > 10);
  CHECK_THROWS_AS(
      free_energy_with_plan(0.5, 100e-9, system, spec, FreeEnergyPlan{}),
      ConfigError);
}

TEST_CASE("spec validation rejects out-of-range settings") {
  QuadratureSpec spec;
  spec.rel_tol = 0.0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = {};
  spec.u_max = 10.0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = {};
  spec.panels_phi = 17;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = {};
  spec.panels_phi = 8;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = {};
  spec.max_refinements = 0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("truncation failure is explicit") {
  PlateSystem system = make_system("quartz", "BaTiO3", "vacuum");
  QuadratureSpec spec;
  spec.max_matsubara = 3;
  CHECK_THROWS_AS(free_energy(0.5, 100e-9, system, spec), NumericalError);
}

TEST_CASE("unreachable tolerance fails with the achieved error attached") {
  PlateSystem system = make_system("quartz", "BaTiO3", "vacuum");
  QuadratureSpec spec;
  spec.rel_tol = 1e-16;
  spec.max_refinements = 1;
  try {
    (void)matsubara_term(0, 0.5, 100e-9, system, spec);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(e.achieved_error > 0.0);
  }
}
