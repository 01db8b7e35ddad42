#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lifshitz/free_energy.hpp"
#include "lifshitz/materials.hpp"

namespace lifshitz {

// One full problem statement: which materials face each other, the gap, and
// the disk geometry used to convert per-area results into torque and force.
struct Scenario {
  std::string plate1 = "quartz";
  std::string plate2 = "BaTiO3";
  std::string medium = "vacuum";
  double d = 100e-9;              // separation [m]
  double theta = 0.0;             // angle between optical axes [rad]
  double temperature = 300.0;     // [K]
  double disk_radius = 20e-6;     // [m]
  double disk_thickness = 20e-6;  // [m]

  double area() const;  // interacting surface S = pi R^2
  void validate() const;
};

// Resolve the scenario's material names against a database. The gap medium
// must be isotropic.
PlateSystem make_plate_system(const Scenario& scenario,
                              const MaterialDatabase& db);

struct TorqueSample {
  double theta = 0.0;           // [rad]
  double torque = 0.0;          // [N m]; positive drives theta upward
  double error_estimate = 0.0;  // [N m]
};

struct AmplitudeFit {
  double amplitude = 0.0;     // a of M = a sin(2 theta) [N m]
  double rms_residual = 0.0;  // [N m]
};

// M = -S dOmega/dtheta by Richardson-extrapolated central differences
// (steps delta and delta/2, delta = 1e-3 rad).
TorqueSample torque(const Scenario& scenario, const MaterialDatabase& db,
                    const QuadratureSpec& spec);

// F = -S dOmega/dd, relative step 1e-3 d. Positive = repulsive.
double force(const Scenario& scenario, const MaterialDatabase& db,
             const QuadratureSpec& spec);

std::vector<TorqueSample> torque_vs_theta(const Scenario& scenario,
                                          std::span<const double> thetas,
                                          const MaterialDatabase& db,
                                          const QuadratureSpec& spec);

// Unweighted least-squares amplitude of M = a sin(2 theta).
AmplitudeFit fit_sin2theta(std::span<const TorqueSample> samples);

// |M(theta = pi/4)| per distance.
std::vector<std::pair<double, double>> torque_vs_distance(
    const Scenario& scenario, std::span<const double> distances,
    const MaterialDatabase& db, const QuadratureSpec& spec);

// Replace one material role by a named alternative and report how torque and
// force at the scenario point move relative to the baseline.
struct MaterialOverride {
  std::string role;      // "plate1", "plate2" or "medium"
  std::string material;  // replacement database entry
};

struct SensitivityRow {
  MaterialOverride variant;
  double torque = 0.0;             // [N m] with the variant applied
  double force = 0.0;              // [N]
  double torque_rel_change = 0.0;  // (variant - baseline) / baseline
  double force_rel_change = 0.0;
};

std::vector<SensitivityRow> sensitivity_scan(
    const Scenario& scenario, std::span<const MaterialOverride> variants,
    const MaterialDatabase& db, const QuadratureSpec& spec);

}  // namespace lifshitz
