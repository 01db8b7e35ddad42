#include "lifshitz/experiment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "lifshitz/constants.hpp"
#include "lifshitz/free_energy.hpp"

namespace lifshitz {

namespace {

constexpr double kOdeTol = 1e-8;       // rel and abs tolerance of the stepper
constexpr double kStopAngle = 1e-4;    // early-stop distance from equilibrium
constexpr long kMaxSteps = 400000000;

double wrap_angle(double theta) {
  const double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(theta, two_pi);
  if (w < 0.0) w += two_pi;
  return w;
}

// Cash-Karp embedded 4(5) pair on a fixed-size state. RHS is called as
// rhs(y, dydt).
template <std::size_t N, class RHS>
struct CashKarp {
  RHS rhs;

  // One attempted step; fills y_out and the scaled error estimate.
  double step(const std::array<double, N>& y, double h,
              std::array<double, N>& y_out) {
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 3.0 / 10, a42 = -9.0 / 10, a43 = 6.0 / 5;
    static constexpr double a51 = -11.0 / 54, a52 = 5.0 / 2, a53 = -70.0 / 27,
                            a54 = 35.0 / 27;
    static constexpr double a61 = 1631.0 / 55296, a62 = 175.0 / 512,
                            a63 = 575.0 / 13824, a64 = 44275.0 / 110592,
                            a65 = 253.0 / 4096;
    static constexpr double b1 = 37.0 / 378, b3 = 250.0 / 621, b4 = 125.0 / 594,
                            b6 = 512.0 / 1771;
    static constexpr double d1 = 2825.0 / 27648, d3 = 18575.0 / 48384,
                            d4 = 13525.0 / 55296, d5 = 277.0 / 14336,
                            d6 = 1.0 / 4;

    std::array<double, N> k1, k2, k3, k4, k5, k6, tmp;
    rhs(y, k1);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    rhs(tmp, k2);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(tmp, k3);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(tmp, k4);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(tmp, k5);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                           a64 * k4[i] + a65 * k5[i]);
    rhs(tmp, k6);

    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double y5 = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b6 * k6[i]);
      const double y4 = y[i] + h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] +
                                    d5 * k5[i] + d6 * k6[i]);
      y_out[i] = y5;
      const double scale = kOdeTol + kOdeTol * std::abs(y[i]);
      const double e = (y5 - y4) / scale;
      err += e * e;
    }
    return std::sqrt(err / N);
  }
};

struct StopCondition {
  bool enabled = false;
  double theta_eq = 0.0;
};

StopCondition make_stop(double amplitude, double theta0) {
  StopCondition stop;
  if (amplitude == 0.0) return stop;
  stop.enabled = true;
  const double pi = std::numbers::pi;
  if (amplitude < 0.0) {
    stop.theta_eq = pi * std::round(theta0 / pi);  // minima of (a/2) cos 2theta
  } else {
    stop.theta_eq = pi / 2.0 + pi * std::round((theta0 - pi / 2.0) / pi);
  }
  return stop;
}

template <std::size_t N, class RHS, class Record>
void integrate_adaptive(std::array<double, N> y, double t_end, double out_dt,
                        const StopCondition& stop, RHS rhs, Record record) {
  CashKarp<N, RHS> stepper{rhs};
  double t = 0.0;
  double h = out_dt * 1e-3;
  double next_out = std::min(out_dt, t_end);
  long steps = 0;
  std::array<double, N> y_next;
  while (t < t_end) {
    if (h < 1e-14 * std::max(t, out_dt))
      throw NumericalError("rotation ODE: step size underflow", h);
    if (++steps > kMaxSteps)
      throw NumericalError("rotation ODE: step budget exhausted", h);
    bool at_output = false;
    double h_try = h;
    if (t + h_try >= next_out) {
      h_try = next_out - t;
      at_output = true;
    }
    const double err = stepper.step(y, h_try, y_next);
    if (err <= 1.0) {
      y = y_next;
      if (at_output) {
        t = next_out;  // land on the output time exactly
        record(t, y);
        next_out = std::min(next_out + out_dt, t_end);
      } else {
        t += h_try;
      }
      if (stop.enabled && std::abs(y[0] - stop.theta_eq) < kStopAngle) {
        if (!at_output) record(t, y);
        return;
      }
      if (err > 0.0)
        h = h_try * std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      else
        h = h_try * 5.0;
    } else {
      h = h_try * std::max(0.9 * std::pow(err, -0.25), 0.1);
    }
  }
}

}  // namespace

double DiskSpec::mass() const {
  return density * std::numbers::pi * radius * radius * thickness;
}

double DiskSpec::moment_of_inertia() const {
  return 0.5 * mass() * radius * radius;
}

DiskSpec make_disk(const Scenario& scenario, const MaterialDatabase& db) {
  scenario.validate();
  const UniaxialMaterial& mat = db.require(scenario.plate1);
  if (!mat.density)
    throw ConfigError("material '" + mat.name +
                      "' has no density; required for a floating disk");
  DiskSpec disk;
  disk.radius = scenario.disk_radius;
  disk.thickness = scenario.disk_thickness;
  disk.density = *mat.density;
  disk.material = mat.name;
  return disk;
}

double net_weight(const DiskSpec& disk, double liquid_density) {
  if (!(disk.density > 0.0) || !(liquid_density > 0.0))
    throw ConfigError("net_weight: densities must be > 0");
  const double area = std::numbers::pi * disk.radius * disk.radius;
  return -area * disk.thickness * (disk.density - liquid_density) *
         constants::gravity;
}

double gap_drag_coefficient(double radius, double d, double viscosity) {
  if (!(radius > 0.0) || !(d > 0.0) || !(viscosity > 0.0))
    throw ConfigError("gap_drag_coefficient: inputs must be > 0");
  const double r2 = radius * radius;
  return 0.5 * std::numbers::pi * r2 * r2 * viscosity / d;
}

double bulk_drag_coefficient(double radius, double viscosity) {
  if (!(radius > 0.0) || !(viscosity >= 0.0))
    throw ConfigError("bulk_drag_coefficient: bad inputs");
  return 32.0 / 3.0 * viscosity * radius * radius * radius;
}

double equilibrium_distance(const Scenario& scenario, const MaterialDatabase& db,
                            const QuadratureSpec& spec, double bracket_lo,
                            double bracket_hi) {
  if (!(bracket_lo > 0.0) || !(bracket_hi > bracket_lo))
    throw ConfigError("equilibrium_distance: bad bracket");
  const DiskSpec disk = make_disk(scenario, db);
  const UniaxialMaterial& med = db.require(scenario.medium);
  if (!med.density)
    throw ConfigError("medium '" + med.name +
                      "' has no density; required for buoyancy");
  const double weight = net_weight(disk, *med.density);

  const PlateSystem system = make_plate_system(scenario, db);
  const double area = scenario.area();
  auto net_force = [&](double d) {
    const FreeEnergyPlan plan = plan_free_energy(scenario.theta, d, system, spec);
    const double step = 1e-3 * d;
    const double op = free_energy_with_plan(scenario.theta, d + step, system,
                                            spec, plan);
    const double om = free_energy_with_plan(scenario.theta, d - step, system,
                                            spec, plan);
    return -area * (op - om) / (2.0 * step) + weight;
  };

  // Locate the stable crossing (net positive below, negative above). A scan
  // on a log grid also steps over the unstable crossing at the attractive
  // short-distance end without bracketing it.
  constexpr int kScan = 19;
  const double ratio = std::pow(bracket_hi / bracket_lo, 1.0 / (kScan - 1));
  std::array<double, kScan> grid{}, net{};
  for (int i = 0; i < kScan; ++i) {
    grid[static_cast<std::size_t>(i)] = bracket_lo * std::pow(ratio, i);
    net[static_cast<std::size_t>(i)] = net_force(grid[static_cast<std::size_t>(i)]);
  }
  int found = -1;
  for (int i = kScan - 2; i >= 0; --i) {
    if (net[static_cast<std::size_t>(i)] > 0.0 &&
        net[static_cast<std::size_t>(i + 1)] <= 0.0) {
      found = i;
      break;
    }
  }
  if (found < 0)
    throw NoLevitationError(
        "no levitation: net vertical force has no stable zero in the bracket");

  double lo = grid[static_cast<std::size_t>(found)];
  double hi = grid[static_cast<std::size_t>(found + 1)];
  while (hi - lo > 1e-3 * lo) {
    const double mid = std::sqrt(lo * hi);
    if (net_force(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

Trajectory simulate_rotation(const RotationSetup& setup, const DiskSpec& disk) {
  if (!(setup.t_end > 0.0)) throw ConfigError("simulate_rotation: t_end must be > 0");
  if (!(setup.gap > 0.0)) throw ConfigError("simulate_rotation: gap must be > 0");
  if (!std::isfinite(setup.amplitude))
    throw ConfigError("simulate_rotation: amplitude must be finite");
  const double gamma = gap_drag_coefficient(disk.radius, setup.gap, setup.viscosity);
  const double inertia = disk.moment_of_inertia();
  const double a = setup.amplitude;
  const double out_dt = setup.out_dt > 0.0 ? setup.out_dt : setup.t_end / 1000.0;
  const StopCondition stop = make_stop(a, setup.theta0);

  Trajectory traj;
  if (setup.mode == RotationMode::full) {
    if (!(inertia > 0.0))
      throw ConfigError("simulate_rotation: disk needs positive inertia");
    auto rhs = [&](const std::array<double, 2>& y, std::array<double, 2>& dydt) {
      dydt[0] = y[1];
      dydt[1] = (a * std::sin(2.0 * y[0]) - gamma * y[1]) / inertia;
    };
    traj.samples.push_back({0.0, wrap_angle(setup.theta0), 0.0});
    integrate_adaptive<2>(std::array<double, 2>{setup.theta0, 0.0}, setup.t_end,
                          out_dt, stop, rhs,
                          [&](double t, const std::array<double, 2>& y) {
                            traj.samples.push_back({t, wrap_angle(y[0]), y[1]});
                          });
  } else {
    auto rhs = [&](const std::array<double, 1>& y, std::array<double, 1>& dydt) {
      dydt[0] = a * std::sin(2.0 * y[0]) / gamma;
    };
    const double w0 = a * std::sin(2.0 * setup.theta0) / gamma;
    traj.samples.push_back({0.0, wrap_angle(setup.theta0), w0});
    integrate_adaptive<1>(std::array<double, 1>{setup.theta0}, setup.t_end,
                          out_dt, stop, rhs,
                          [&](double t, const std::array<double, 1>& y) {
                            traj.samples.push_back(
                                {t, wrap_angle(y[0]),
                                 a * std::sin(2.0 * y[0]) / gamma});
                          });
  }
  return traj;
}

Trajectory simulate_rotation(double theta0, const Scenario& scenario,
                             const MaterialDatabase& db, double amplitude,
                             RotationMode mode, double t_end, double viscosity,
                             double out_dt) {
  RotationSetup setup;
  setup.theta0 = theta0;
  setup.amplitude = amplitude;
  setup.gap = scenario.d;
  setup.viscosity = viscosity;
  setup.t_end = t_end;
  setup.out_dt = out_dt;
  setup.mode = mode;
  return simulate_rotation(setup, make_disk(scenario, db));
}

}  // namespace lifshitz
