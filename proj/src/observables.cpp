#include "lifshitz/observables.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "lifshitz/errors.hpp"

namespace lifshitz {

namespace {

constexpr double kThetaStep = 1e-3;    // [rad]
constexpr double kDistStepRel = 1e-3;  // relative step in d

}  // namespace

double Scenario::area() const {
  return std::numbers::pi * disk_radius * disk_radius;
}

void Scenario::validate() const {
  if (!(d > 0.0)) throw ConfigError("scenario: separation d must be > 0");
  if (!(temperature > 0.0)) throw ConfigError("scenario: temperature must be > 0");
  if (!(disk_radius > 0.0)) throw ConfigError("scenario: disk radius must be > 0");
  if (!(disk_thickness > 0.0))
    throw ConfigError("scenario: disk thickness must be > 0");
}

PlateSystem make_plate_system(const Scenario& scenario,
                              const MaterialDatabase& db) {
  scenario.validate();
  const UniaxialMaterial& p1 = db.require(scenario.plate1);
  const UniaxialMaterial& p2 = db.require(scenario.plate2);
  const UniaxialMaterial& med = db.require(scenario.medium);
  if (med.is_birefringent())
    throw ConfigError("gap medium '" + med.name + "' must be isotropic");
  PlateSystem system;
  system.plate1_parallel = p1.eps_parallel;
  system.plate1_perpendicular = p1.eps_perpendicular;
  system.plate2_parallel = p2.eps_parallel;
  system.plate2_perpendicular = p2.eps_perpendicular;
  system.medium = med.eps_parallel;
  system.temperature = scenario.temperature;
  return system;
}

// One adaptive evaluation at the center point fixes the quadrature plan; the
// four perturbed evaluations reuse it so their quadrature error varies
// smoothly with the perturbation and cancels in the differences.
TorqueSample torque(const Scenario& scenario, const MaterialDatabase& db,
                    const QuadratureSpec& spec) {
  const PlateSystem system = make_plate_system(scenario, db);
  const double s = scenario.area();
  double omega_center = 0.0;
  const FreeEnergyPlan plan =
      plan_free_energy(scenario.theta, scenario.d, system, spec, &omega_center);
  auto value_at = [&](double theta) {
    return free_energy_with_plan(theta, scenario.d, system, spec, plan);
  };
  const double step = kThetaStep;
  const double op = value_at(scenario.theta + step);
  const double om = value_at(scenario.theta - step);
  const double op2 = value_at(scenario.theta + 0.5 * step);
  const double om2 = value_at(scenario.theta - 0.5 * step);
  const double d1 = (op - om) / (2.0 * step);
  const double d2 = (op2 - om2) / step;
  TorqueSample sample;
  sample.theta = scenario.theta;
  sample.torque = -s * (4.0 * d2 - d1) / 3.0;
  sample.error_estimate =
      s * (std::abs(d1 - d2) + 2.0 * std::numeric_limits<double>::epsilon() *
                                   std::abs(omega_center) / step);
  return sample;
}

double force(const Scenario& scenario, const MaterialDatabase& db,
             const QuadratureSpec& spec) {
  const PlateSystem system = make_plate_system(scenario, db);
  const double s = scenario.area();
  const FreeEnergyPlan plan =
      plan_free_energy(scenario.theta, scenario.d, system, spec);
  auto value_at = [&](double d) {
    return free_energy_with_plan(scenario.theta, d, system, spec, plan);
  };
  const double step = kDistStepRel * scenario.d;
  const double op = value_at(scenario.d + step);
  const double om = value_at(scenario.d - step);
  const double op2 = value_at(scenario.d + 0.5 * step);
  const double om2 = value_at(scenario.d - 0.5 * step);
  const double d1 = (op - om) / (2.0 * step);
  const double d2 = (op2 - om2) / step;
  return -s * (4.0 * d2 - d1) / 3.0;
}

std::vector<TorqueSample> torque_vs_theta(const Scenario& scenario,
                                          std::span<const double> thetas,
                                          const MaterialDatabase& db,
                                          const QuadratureSpec& spec) {
  if (thetas.empty()) throw ConfigError("torque_vs_theta: empty angle list");
  std::vector<TorqueSample> samples;
  samples.reserve(thetas.size());
  Scenario point = scenario;
  for (double theta : thetas) {
    point.theta = theta;
    samples.push_back(torque(point, db, spec));
  }
  return samples;
}

AmplitudeFit fit_sin2theta(std::span<const TorqueSample> samples) {
  if (samples.size() < 3)
    throw ConfigError("fit_sin2theta: need at least 3 samples");
  double num = 0.0, den = 0.0;
  for (const TorqueSample& s : samples) {
    const double basis = std::sin(2.0 * s.theta);
    num += s.torque * basis;
    den += basis * basis;
  }
  if (den <= 1e-12 * static_cast<double>(samples.size()))
    throw ConfigError("fit_sin2theta: all angles sit at zeros of sin(2 theta)");
  AmplitudeFit fit;
  fit.amplitude = num / den;
  double ss = 0.0;
  for (const TorqueSample& s : samples) {
    const double r = s.torque - fit.amplitude * std::sin(2.0 * s.theta);
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / static_cast<double>(samples.size()));
  return fit;
}

std::vector<std::pair<double, double>> torque_vs_distance(
    const Scenario& scenario, std::span<const double> distances,
    const MaterialDatabase& db, const QuadratureSpec& spec) {
  std::vector<std::pair<double, double>> rows;
  rows.reserve(distances.size());
  Scenario point = scenario;
  point.theta = std::numbers::pi / 4.0;
  for (double d : distances) {
    if (!(d > 0.0)) throw ConfigError("torque_vs_distance: distances must be > 0");
    point.d = d;
    rows.emplace_back(d, std::abs(torque(point, db, spec).torque));
  }
  return rows;
}

namespace {

Scenario apply_override(const Scenario& scenario, const MaterialOverride& variant,
                        const MaterialDatabase& db) {
  db.require(variant.material);
  Scenario modified = scenario;
  if (variant.role == "plate1") {
    modified.plate1 = variant.material;
  } else if (variant.role == "plate2") {
    modified.plate2 = variant.material;
  } else if (variant.role == "medium") {
    modified.medium = variant.material;
  } else {
    throw ConfigError("sensitivity_scan: unknown role '" + variant.role + "'");
  }
  return modified;
}

}  // namespace

std::vector<SensitivityRow> sensitivity_scan(
    const Scenario& scenario, std::span<const MaterialOverride> variants,
    const MaterialDatabase& db, const QuadratureSpec& spec) {
  std::vector<Scenario> modified;
  modified.reserve(variants.size());
  for (const MaterialOverride& variant : variants)
    modified.push_back(apply_override(scenario, variant, db));

  const double torque_base = torque(scenario, db, spec).torque;
  const double force_base = force(scenario, db, spec);
  std::vector<SensitivityRow> rows;
  rows.reserve(variants.size());
  for (std::size_t i = 0; i < variants.size(); ++i) {
    const MaterialOverride& variant = variants[i];
    SensitivityRow row;
    row.variant = variant;
    row.torque = torque(modified[i], db, spec).torque;
    row.force = force(modified[i], db, spec);
    // identical recomputations difference out exactly, even when the
    // baseline itself is zero
    const double dm = row.torque - torque_base;
    const double df = row.force - force_base;
    row.torque_rel_change = dm == 0.0 ? 0.0 : dm / torque_base;
    row.force_rel_change = df == 0.0 ? 0.0 : df / force_base;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace lifshitz
