#pragma once

#include <string>
#include <vector>

#include "lifshitz/errors.hpp"
#include "lifshitz/materials.hpp"
#include "lifshitz/observables.hpp"

namespace lifshitz {

// The floating disk of the levitation experiment.
struct DiskSpec {
  double radius = 20e-6;     // R [m]
  double thickness = 20e-6;  // h [m]
  double density = 0.0;      // [kg/m^3]
  std::string material;

  double mass() const;               // rho pi R^2 h
  double moment_of_inertia() const;  // solid disk about its axis, m R^2 / 2
};

// Disk built from the scenario's plate1 material (its density must be set).
DiskSpec make_disk(const Scenario& scenario, const MaterialDatabase& db);

// Buoyancy-corrected weight, negative = downward:
//   -pi R^2 h (rho_disk - rho_liquid) g
double net_weight(const DiskSpec& disk, double liquid_density);

// The net vertical force never crosses zero from above: no float height.
struct NoLevitationError : Error {
  using Error::Error;
};

// Separation at which the repulsive force balances the disk's net weight.
// Searches [bracket_lo, bracket_hi] for the stable root (net force positive
// below it, negative above it) and bisects to 1e-3 relative.
double equilibrium_distance(const Scenario& scenario, const MaterialDatabase& db,
                            const QuadratureSpec& spec,
                            double bracket_lo = 5e-9, double bracket_hi = 2e-6);

// Viscous drag torque coefficients [N m s]: torque = -coefficient * theta_dot.
double gap_drag_coefficient(double radius, double d, double viscosity);
double bulk_drag_coefficient(double radius, double viscosity);

struct TrajectoryPoint {
  double t = 0.0;          // [s]
  double theta = 0.0;      // [rad], wrapped to [0, 2 pi)
  double theta_dot = 0.0;  // [rad/s]
};

struct Trajectory {
  std::vector<TrajectoryPoint> samples;
};

enum class RotationMode { full, quasi_static };

struct RotationSetup {
  double theta0 = 0.0;        // initial angle [rad]; theta_dot(0) = 0
  double amplitude = 0.0;     // a of the driving torque a sin(2 theta) [N m]
  double gap = 100e-9;        // separation d [m], fixed during rotation
  double viscosity = 1.2e-3;  // eta of the liquid [Pa s]
  double t_end = 600.0;       // [s]
  double out_dt = 0.0;        // output interval; 0 -> t_end / 1000
  RotationMode mode = RotationMode::full;
};

// Integrate I theta'' + gamma_d theta' = a sin(2 theta) (full) or the
// inertia-free limit gamma_d theta' = a sin(2 theta) (quasi_static) with an
// adaptive embedded Runge-Kutta pair at rel/abs tolerance 1e-8. Stops early
// once |theta - theta_eq| < 1e-4 rad.
Trajectory simulate_rotation(const RotationSetup& setup, const DiskSpec& disk);

// Convenience overload resolving the disk from the scenario; the gap is
// scenario.d (pin it to the equilibrium distance first).
Trajectory simulate_rotation(double theta0, const Scenario& scenario,
                             const MaterialDatabase& db, double amplitude,
                             RotationMode mode, double t_end,
                             double viscosity = 1.2e-3, double out_dt = 0.0);

}  // namespace lifshitz
