#include <cmath>
#include <numbers>

#include <doctest.h>

#include "lifshitz/errors.hpp"
#include "lifshitz/experiment.hpp"

using namespace lifshitz;

namespace {

const MaterialDatabase& db() { return MaterialDatabase::bundled(); }

DiskSpec quartz_disk() {
  DiskSpec disk;
  disk.radius = 20e-6;
  disk.thickness = 20e-6;
  disk.density = 2643.0;
  disk.material = "quartz";
  return disk;
}

}  // namespace

TEST_CASE("net weight in ethanol") {
  DiskSpec disk = quartz_disk();
  CHECK(net_weight(disk, 789.0) ==
        doctest::Approx(-4.571077629552098e-10).epsilon(1e-12));
  disk.density = 2760.0;  // calcite
  CHECK(net_weight(disk, 789.0) ==
        doctest::Approx(-4.859543693552959e-10).epsilon(1e-12));
  disk.density = 789.0;  // neutral buoyancy
  CHECK(net_weight(disk, 789.0) == 0.0);
  disk.density = -1.0;
  CHECK_THROWS_AS(net_weight(disk, 789.0), ConfigError);
}

TEST_CASE("disk mass and inertia") {
  const DiskSpec disk = quartz_disk();
  const double mass = 2643.0 * std::numbers::pi * 4e-10 * 2e-5;
  CHECK(disk.mass() == doctest::Approx(mass).epsilon(1e-14));
  CHECK(disk.moment_of_inertia() ==
        doctest::Approx(0.5 * mass * 4e-10).epsilon(1e-14));
  Scenario s;
  s.plate1 = "BaTiO3";  // bundled entry has no density
  CHECK_THROWS_AS(make_disk(s, db()), ConfigError);
}

TEST_CASE("drag coefficients and their exact ratios") {
  const double gap = gap_drag_coefficient(20e-6, 100e-9, 1.2e-3);
  const double bulk = bulk_drag_coefficient(20e-6, 1.2e-3);
  CHECK(gap == doctest::Approx(3.0159289474462015e-15).epsilon(1e-14));
  CHECK(bulk == doctest::Approx(1.024e-16).epsilon(1e-14));
  // R^4 and 1/d laws hold exactly in floating point
  CHECK(gap_drag_coefficient(40e-6, 100e-9, 1.2e-3) == 16.0 * gap);
  CHECK(gap_drag_coefficient(20e-6, 50e-9, 1.2e-3) == 2.0 * gap);
  CHECK(bulk_drag_coefficient(20e-6, 0.0) == 0.0);
  // gap/bulk = (3 pi / 64) (R / d)
  const double expected = 3.0 * std::numbers::pi / 64.0 * (20e-6 / 100e-9);
  CHECK(gap / bulk == doctest::Approx(expected).epsilon(1e-12));
  CHECK_THROWS_AS(gap_drag_coefficient(0.0, 1e-7, 1e-3), ConfigError);
}

TEST_CASE("quasi-static rotation matches the separable closed form") {
  // gamma theta' = a sin(2 theta) integrates to
  // tan(theta(t)) = tan(theta0) exp(2 a t / gamma).
  RotationSetup setup;
  setup.theta0 = std::numbers::pi / 4;
  setup.amplitude = -3.5e-19;
  setup.gap = 100e-9;
  setup.t_end = 4000.0;
  setup.out_dt = 40.0;
  setup.mode = RotationMode::quasi_static;
  const DiskSpec disk = quartz_disk();
  const double gamma = gap_drag_coefficient(disk.radius, setup.gap, setup.viscosity);
  const Trajectory traj = simulate_rotation(setup, disk);
  REQUIRE(traj.samples.size() > 10);
  for (const TrajectoryPoint& p : traj.samples) {
    const double expected =
        std::atan(std::tan(setup.theta0) *
                  std::exp(2.0 * setup.amplitude * p.t / gamma));
    CHECK(std::abs(p.theta - expected) < 1e-6);
  }
}

TEST_CASE("unstable equilibrium start stays put") {
  RotationSetup setup;
  setup.theta0 = 0.0;
  setup.amplitude = 3.5e-19;  // minima at pi/2; theta = 0 is a maximum
  setup.gap = 100e-9;
  setup.t_end = 50.0;
  setup.out_dt = 5.0;
  setup.mode = RotationMode::quasi_static;
  const Trajectory traj = simulate_rotation(setup, quartz_disk());
  for (const TrajectoryPoint& p : traj.samples) {
    CHECK(p.theta == 0.0);
    CHECK(p.theta_dot == 0.0);
  }
}

TEST_CASE("zero amplitude keeps theta constant") {
  RotationSetup setup;
  setup.theta0 = 0.8;
  setup.amplitude = 0.0;
  setup.t_end = 10.0;
  setup.out_dt = 1.0;
  setup.mode = RotationMode::quasi_static;
  const Trajectory traj = simulate_rotation(setup, quartz_disk());
  REQUIRE(traj.samples.size() == 11);
  for (const TrajectoryPoint& p : traj.samples) CHECK(p.theta == 0.8);
}

TEST_CASE("full dynamics is overdamped and tracks the quasi-static limit") {
  RotationSetup setup;
  setup.theta0 = std::numbers::pi / 4;
  setup.amplitude = -7.3e-19;
  setup.gap = 83e-9;
  setup.t_end = 30.0;
  setup.out_dt = 3.0;
  setup.mode = RotationMode::full;
  DiskSpec disk = quartz_disk();
  disk.density = 2760.0;
  const Trajectory full = simulate_rotation(setup, disk);
  setup.mode = RotationMode::quasi_static;
  const Trajectory quasi = simulate_rotation(setup, disk);
  REQUIRE(full.samples.size() == quasi.samples.size());

  const double gamma = gap_drag_coefficient(disk.radius, setup.gap, setup.viscosity);
  const double inertia = disk.moment_of_inertia();
  for (std::size_t i = 0; i < full.samples.size(); ++i) {
    const TrajectoryPoint& p = full.samples[i];
    CHECK(std::abs(p.theta - quasi.samples[i].theta) < 1e-3);
    if (p.t > 0.0) {
      // inertial term reconstructed from the equation of motion
      const double accel =
          (setup.amplitude * std::sin(2.0 * p.theta) - gamma * p.theta_dot) /
          inertia;
      CHECK(inertia * std::abs(accel) < 1e-3 * gamma * std::abs(p.theta_dot));
    }
  }
  // monotone decay toward theta = 0, no overshoot
  for (std::size_t i = 1; i < full.samples.size(); ++i) {
    CHECK(full.samples[i].theta <= full.samples[i - 1].theta);
    CHECK(full.samples[i].theta_dot <= 0.0);
  }
}

TEST_CASE("early stop fires near the equilibrium angle") {
  RotationSetup setup;
  setup.theta0 = 0.05;
  setup.amplitude = -3.5e-19;
  setup.gap = 100e-9;
  setup.t_end = 1e5;
  setup.out_dt = 100.0;
  setup.mode = RotationMode::quasi_static;
  const Trajectory traj = simulate_rotation(setup, quartz_disk());
  const TrajectoryPoint& last = traj.samples.back();
  CHECK(last.t < 1e5);
  CHECK(std::abs(last.theta) < 2e-4);
}

TEST_CASE("trajectory times are strictly increasing") {
  RotationSetup setup;
  setup.theta0 = std::numbers::pi / 4;
  setup.amplitude = -3.5e-19;
  setup.gap = 100e-9;
  setup.t_end = 100.0;
  setup.out_dt = 10.0;
  setup.mode = RotationMode::quasi_static;
  const Trajectory traj = simulate_rotation(setup, quartz_disk());
  for (std::size_t i = 1; i < traj.samples.size(); ++i)
    CHECK(traj.samples[i].t > traj.samples[i - 1].t);
  for (const TrajectoryPoint& p : traj.samples) {
    CHECK(p.theta >= 0.0);
    CHECK(p.theta < 2.0 * std::numbers::pi);
  }
}

TEST_CASE("identical media cannot levitate") {
  // Plates made of the gap liquid: the force vanishes identically and the
  // neutrally buoyant disk has nothing to balance against.
  Scenario s;
  s.plate1 = "ethanol";
  s.plate2 = "ethanol";
  s.medium = "ethanol";
  QuadratureSpec spec;
  CHECK_THROWS_AS(equilibrium_distance(s, db(), spec), NoLevitationError);
}

TEST_CASE("equilibrium needs a medium with a density") {
  Scenario s;
  s.medium = "vacuum";
  QuadratureSpec spec;
  CHECK_THROWS_AS(equilibrium_distance(s, db(), spec), ConfigError);
}
