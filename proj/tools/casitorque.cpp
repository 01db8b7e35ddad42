// casitorque: fluctuation-induced torque and force between birefringent
// plates, plus the liquid-levitation experiment built on top of them.
// Subcommands produce machine-readable tables (CSV or JSON) with the fully
// resolved configuration embedded, so any output can be reproduced from its
// own header.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lifshitz/constants.hpp"
#include "lifshitz/errors.hpp"
#include "lifshitz/experiment.hpp"
#include "lifshitz/free_energy.hpp"
#include "lifshitz/materials.hpp"
#include "lifshitz/nonretarded.hpp"
#include "lifshitz/observables.hpp"

namespace {

using namespace lifshitz;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12e", v);
  return buf;
}

std::string format_flag(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Table {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_meta(std::string key, std::string value) {
    meta.emplace_back(std::move(key), std::move(value));
  }
};

std::string to_csv(const Table& table) {
  std::ostringstream out;
  for (const auto& [key, value] : table.meta)
    out << "# " << key << " = " << value << "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    out << (i ? "," : "") << table.columns[i];
  out << "\n";
  for (const std::vector<double>& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << format_double(row[i]);
    out << "\n";
  }
  return out.str();
}

std::string to_json(const Table& table) {
  nlohmann::json doc;
  nlohmann::json config = nlohmann::json::object();
  for (const auto& [key, value] : table.meta) config[key] = value;
  doc["config"] = std::move(config);
  doc["columns"] = table.columns;
  doc["rows"] = table.rows;
  return doc.dump(2) + "\n";
}

void write_output(const std::string& path, const std::string& content) {
  if (path == "-" || path.empty()) {
    std::cout << content;
    return;
  }
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write failure on '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    std::error_code ec2;
    fs::remove(tmp, ec2);
    throw IoError("cannot move output into place at '" + path + "': " +
                  ec.message());
  }
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

// Options shared by every computing subcommand.
struct CommonOpts {
  std::string materials_path;
  Scenario scenario;
  double rel_tol = 1e-6;
  std::string out = "-";
  std::string format = "csv";
  bool no_timestamp = false;
  int threads = 0;

  MaterialDatabase db_storage;
  bool db_loaded = false;

  const MaterialDatabase& db() {
    if (!db_loaded) {
      if (materials_path.empty()) return MaterialDatabase::bundled();
      db_storage = MaterialDatabase::load_file(materials_path);
      db_loaded = true;
    }
    return db_storage;
  }

  QuadratureSpec spec() const {
    QuadratureSpec spec;
    spec.rel_tol = rel_tol;
    return spec;
  }
};

void add_common_options(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--materials", opts.materials_path,
                  "material database file (default: built-in table)");
  cmd->add_option("--plate1", opts.scenario.plate1, "disk material name");
  cmd->add_option("--plate2", opts.scenario.plate2, "plate material name");
  cmd->add_option("--medium", opts.scenario.medium, "gap medium name");
  cmd->add_option("--distance-m", opts.scenario.d, "plate separation [m]");
  cmd->add_option("--theta-rad", opts.scenario.theta,
                  "angle between optical axes [rad]");
  cmd->add_option("--temperature-k", opts.scenario.temperature,
                  "temperature [K]");
  cmd->add_option("--radius-m", opts.scenario.disk_radius, "disk radius [m]");
  cmd->add_option("--thickness-m", opts.scenario.disk_thickness,
                  "disk thickness [m]");
  cmd->add_option("--rel-tol", opts.rel_tol, "quadrature relative tolerance");
  cmd->add_option("--out", opts.out, "output path ('-' = stdout)");
  cmd->add_option("--format", opts.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_flag("--no-timestamp", opts.no_timestamp,
                "omit the timestamp header line");
  cmd->add_option("--threads", opts.threads, "worker threads (default: all)");
}

// The embedded header doubles as the reproduction recipe.
void fill_meta(Table& table, const CommonOpts& opts, const std::string& command,
               const std::string& extra_flags) {
  std::string cmdline = "casitorque " + command;
  if (!opts.materials_path.empty())
    cmdline += " --materials " + opts.materials_path;
  cmdline += " --plate1 " + opts.scenario.plate1;
  cmdline += " --plate2 " + opts.scenario.plate2;
  cmdline += " --medium " + opts.scenario.medium;
  cmdline += " --distance-m " + format_flag(opts.scenario.d);
  cmdline += " --theta-rad " + format_flag(opts.scenario.theta);
  cmdline += " --temperature-k " + format_flag(opts.scenario.temperature);
  cmdline += " --radius-m " + format_flag(opts.scenario.disk_radius);
  cmdline += " --thickness-m " + format_flag(opts.scenario.disk_thickness);
  cmdline += " --rel-tol " + format_flag(opts.rel_tol);
  cmdline += " --format " + opts.format;
  if (!extra_flags.empty()) cmdline += " " + extra_flags;
  cmdline += " --no-timestamp";
  table.add_meta("command", cmdline);
  table.add_meta("constants", constants::table_version);
  if (!opts.no_timestamp) table.add_meta("generated", timestamp_utc());
}

void emit(const Table& table, const CommonOpts& opts) {
  write_output(opts.out, opts.format == "json" ? to_json(table) : to_csv(table));
}

std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2)
    throw ConfigError("grid needs 0 < min < max and at least 2 points");
  std::vector<double> grid(static_cast<std::size_t>(points));
  const double step = std::log(hi / lo) / (points - 1);
  for (int i = 0; i < points; ++i)
    grid[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

// ---------------------------------------------------------------- eps-table

int cmd_eps_table(CommonOpts& opts, const std::vector<std::string>& names,
                  double xi_min, double xi_max, int points) {
  const MaterialDatabase& db = opts.db();
  std::vector<std::string> selected = names;
  if (selected.empty())
    for (const UniaxialMaterial& m : db.entries()) selected.push_back(m.name);

  std::string extra;
  for (const std::string& name : selected) extra += "--names " + name + " ";
  extra += "--xi-min " + format_flag(xi_min) + " --xi-max " +
           format_flag(xi_max) + " --points " + std::to_string(points);

  Table table;
  fill_meta(table, opts, "eps-table", extra);
  table.columns = {"xi_rad_s"};
  for (const std::string& name : selected) {
    db.require(name);
    table.columns.push_back(name + "_eps_par");
    table.columns.push_back(name + "_eps_perp");
    table.columns.push_back(name + "_eps_avg");
  }

  std::vector<double> grid = {0.0};
  for (double xi : log_grid(xi_min, xi_max, points)) grid.push_back(xi);
  for (double xi : grid) {
    std::vector<double> row = {xi};
    for (const std::string& name : selected) {
      const UniaxialMaterial& mat = db.require(name);
      const double par = mat.eps_parallel(xi);
      const double perp = mat.eps_perpendicular(xi);
      row.push_back(par);
      row.push_back(perp);
      row.push_back(0.5 * (par + perp));
    }
    table.rows.push_back(std::move(row));
  }
  emit(table, opts);
  return 0;
}

// --------------------------------------------------------------- torque-scan

int cmd_torque_scan(CommonOpts& opts, const std::string& scan_over,
                    int theta_points, double dmin, double dmax, int points) {
  const MaterialDatabase& db = opts.db();
  const QuadratureSpec spec = opts.spec();
  Table table;

  if (scan_over == "theta") {
    std::vector<double> thetas(static_cast<std::size_t>(theta_points));
    for (int i = 0; i < theta_points; ++i)
      thetas[static_cast<std::size_t>(i)] =
          std::numbers::pi * i / (theta_points - 1);
    const std::vector<TorqueSample> samples =
        torque_vs_theta(opts.scenario, thetas, db, spec);
    const AmplitudeFit fit = fit_sin2theta(samples);
    fill_meta(table, opts, "torque-scan",
              "--scan theta --theta-points " + std::to_string(theta_points));
    table.add_meta("fit_amplitude_Nm", format_double(fit.amplitude));
    table.add_meta("fit_rms_residual_Nm", format_double(fit.rms_residual));
    table.columns = {"theta_rad", "torque_Nm", "torque_error_Nm"};
    for (const TorqueSample& s : samples)
      table.rows.push_back({s.theta, s.torque, s.error_estimate});
  } else {
    const std::vector<double> grid = log_grid(dmin, dmax, points);
    const auto rows = torque_vs_distance(opts.scenario, grid, db, spec);
    fill_meta(table, opts, "torque-scan",
              "--scan distance --dmin-m " + format_flag(dmin) + " --dmax-m " +
                  format_flag(dmax) + " --points " + std::to_string(points));
    table.columns = {"d_m", "abs_torque_Nm"};
    for (const auto& [d, m] : rows) table.rows.push_back({d, m});
  }
  emit(table, opts);
  return 0;
}

// ---------------------------------------------------------------- force-scan

int cmd_force_scan(CommonOpts& opts, double dmin, double dmax, int points) {
  const MaterialDatabase& db = opts.db();
  const QuadratureSpec spec = opts.spec();
  Table table;
  fill_meta(table, opts, "force-scan",
            "--dmin-m " + format_flag(dmin) + " --dmax-m " + format_flag(dmax) +
                " --points " + std::to_string(points));
  table.columns = {"d_m", "force_N"};
  Scenario point = opts.scenario;
  for (double d : log_grid(dmin, dmax, points)) {
    point.d = d;
    table.rows.push_back({d, force(point, db, spec)});
  }
  emit(table, opts);
  return 0;
}

// --------------------------------------------------------------- equilibrium

int cmd_equilibrium(CommonOpts& opts, double bracket_lo, double bracket_hi) {
  const MaterialDatabase& db = opts.db();
  const QuadratureSpec spec = opts.spec();
  const double d_star =
      equilibrium_distance(opts.scenario, db, spec, bracket_lo, bracket_hi);
  Scenario at = opts.scenario;
  at.d = d_star;
  const double f = force(at, db, spec);
  const DiskSpec disk = make_disk(opts.scenario, db);
  const double weight =
      net_weight(disk, db.require(opts.scenario.medium).density.value());

  Table table;
  fill_meta(table, opts, "equilibrium",
            "--bracket-lo-m " + format_flag(bracket_lo) + " --bracket-hi-m " +
                format_flag(bracket_hi));
  table.columns = {"d_star_m", "force_N", "net_weight_N"};
  table.rows.push_back({d_star, f, weight});
  emit(table, opts);
  return 0;
}

// ------------------------------------------------------------------ dynamics

int cmd_dynamics(CommonOpts& opts, double theta0, double t_end, double out_dt,
                 const std::string& mode_name, double viscosity,
                 double amplitude, bool amplitude_given) {
  const MaterialDatabase& db = opts.db();
  const QuadratureSpec spec = opts.spec();
  const RotationMode mode = (mode_name == "full") ? RotationMode::full
                                                  : RotationMode::quasi_static;

  Scenario scenario = opts.scenario;
  double a = amplitude;
  if (!amplitude_given) {
    // Float height first, then the torque amplitude at that gap.
    scenario.d = equilibrium_distance(scenario, db, spec);
    std::vector<double> thetas;
    for (int i = 0; i < 8; ++i)
      thetas.push_back((i + 0.5) * std::numbers::pi / 8.0);
    const std::vector<TorqueSample> samples =
        torque_vs_theta(scenario, thetas, db, spec);
    a = fit_sin2theta(samples).amplitude;
  }

  const DiskSpec disk = make_disk(scenario, db);
  RotationSetup setup;
  setup.theta0 = theta0;
  setup.amplitude = a;
  setup.gap = scenario.d;
  setup.viscosity = viscosity;
  setup.t_end = t_end;
  setup.out_dt = out_dt;
  setup.mode = mode;
  const Trajectory traj = simulate_rotation(setup, disk);

  Table table;
  std::string extra = "--theta0-rad " + format_flag(theta0) + " --t-end-s " +
                      format_flag(t_end) + " --mode " + mode_name +
                      " --viscosity-pa-s " + format_flag(viscosity) +
                      " --amplitude-nm " + format_flag(a);
  if (out_dt > 0.0) extra += " --out-dt-s " + format_flag(out_dt);
  CommonOpts echo = opts;
  echo.scenario = scenario;  // reflects the pinned gap
  fill_meta(table, echo, "dynamics", extra);
  table.add_meta("amplitude_Nm", format_double(a));
  table.add_meta("gap_m", format_double(scenario.d));
  table.add_meta("gap_drag_Nms", format_double(gap_drag_coefficient(
                                     disk.radius, scenario.d, viscosity)));
  table.add_meta("inertia_kg_m2", format_double(disk.moment_of_inertia()));
  table.columns = {"t_s", "theta_rad", "theta_dot_rad_s"};
  for (const TrajectoryPoint& p : traj.samples)
    table.rows.push_back({p.t, p.theta, p.theta_dot});
  emit(table, opts);
  return 0;
}

// -------------------------------------------------------------------- oracle

int cmd_oracle(CommonOpts& opts) {
  const MaterialDatabase& db = opts.db();
  const UniaxialMaterial& p1 = db.require(opts.scenario.plate1);
  const UniaxialMaterial& p2 = db.require(opts.scenario.plate2);
  const UniaxialMaterial& med = db.require(opts.scenario.medium);
  if (med.is_birefringent())
    throw ConfigError("gap medium '" + med.name + "' must be isotropic");

  const OmegaBarResult numeric = omega_bar_numeric(p1, p2, med.eps_parallel);
  const OmegaBarResult closed = omega_bar_closed(p1, p2, med.eps_parallel);
  const double torque = torque_nonretarded(
      opts.scenario.theta, opts.scenario.d, opts.scenario.area(),
      closed.omega_bar);

  Table table;
  fill_meta(table, opts, "oracle", "");
  table.columns = {"omega_bar_numeric_rad_s", "omega_bar_closed_rad_s",
                   "rel_difference", "torque_nonretarded_Nm"};
  const double rel =
      std::abs(numeric.omega_bar - closed.omega_bar) /
      std::max(std::abs(numeric.omega_bar), std::abs(closed.omega_bar));
  table.rows.push_back({numeric.omega_bar, closed.omega_bar, rel, torque});
  emit(table, opts);
  return 0;
}

// --------------------------------------------------------------- sensitivity

int cmd_sensitivity(CommonOpts& opts, const std::vector<std::string>& specs) {
  const MaterialDatabase& db = opts.db();
  std::vector<MaterialOverride> variants;
  if (specs.empty()) {
    // Default scan: the two literature values of the plate2 infrared
    // frequency, expected as "<plate2>_wIR_low" / "<plate2>_wIR_high".
    for (const char* suffix : {"_wIR_low", "_wIR_high"}) {
      const std::string name = opts.scenario.plate2 + suffix;
      if (db.find(name) == nullptr)
        throw ConfigError("no bundled variant '" + name +
                          "'; pass --variant role=material explicitly");
      variants.push_back({"plate2", name});
    }
  } else {
    for (const std::string& s : specs) {
      const std::size_t eq = s.find('=');
      if (eq == std::string::npos)
        throw ConfigError("--variant expects role=material, got '" + s + "'");
      variants.push_back({s.substr(0, eq), s.substr(eq + 1)});
    }
  }

  const auto rows = sensitivity_scan(opts.scenario, variants, db, opts.spec());
  Table table;
  std::string extra;
  for (const MaterialOverride& v : variants) {
    if (!extra.empty()) extra += " ";
    extra += "--variant " + v.role + "=" + v.material;
  }
  fill_meta(table, opts, "sensitivity", extra);
  for (std::size_t i = 0; i < rows.size(); ++i)
    table.add_meta("variant_" + std::to_string(i),
                   rows[i].variant.role + "=" + rows[i].variant.material);
  table.columns = {"variant_index", "torque_Nm", "force_N",
                   "torque_rel_change", "force_rel_change"};
  for (std::size_t i = 0; i < rows.size(); ++i)
    table.rows.push_back({static_cast<double>(i), rows[i].torque, rows[i].force,
                          rows[i].torque_rel_change, rows[i].force_rel_change});
  emit(table, opts);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Casimir-Lifshitz torque, force and levitation calculator"};
  app.require_subcommand(1);

  CommonOpts opts;
  opts.scenario.theta = std::numbers::pi / 4;

  // eps-table
  std::vector<std::string> eps_names;
  double xi_min = 1e12, xi_max = 1e18;
  int eps_points = 120;
  CLI::App* eps = app.add_subcommand(
      "eps-table", "dielectric functions at imaginary frequency");
  add_common_options(eps, opts);
  eps->add_option("--names", eps_names, "materials to tabulate (default: all)");
  eps->add_option("--xi-min", xi_min, "lowest nonzero frequency [rad/s]");
  eps->add_option("--xi-max", xi_max, "highest frequency [rad/s]");
  eps->add_option("--points", eps_points, "number of log-spaced points");

  // torque-scan
  std::string scan_over = "theta";
  int theta_points = 17;
  double dmin = 50e-9, dmax = 500e-9;
  int dist_points = 13;
  CLI::App* tscan = app.add_subcommand("torque-scan",
                                       "torque vs angle or separation");
  add_common_options(tscan, opts);
  tscan->add_option("--scan", scan_over, "scan variable: theta or distance")
      ->check(CLI::IsMember({"theta", "distance"}));
  tscan->add_option("--theta-points", theta_points,
                    "points on [0, pi] for the angle scan");
  tscan->add_option("--dmin-m", dmin, "smallest separation [m]");
  tscan->add_option("--dmax-m", dmax, "largest separation [m]");
  tscan->add_option("--points", dist_points, "points of the distance scan");

  // force-scan
  double f_dmin = 10e-9, f_dmax = 500e-9;
  int f_points = 13;
  CLI::App* fscan = app.add_subcommand("force-scan", "force vs separation");
  add_common_options(fscan, opts);
  fscan->add_option("--dmin-m", f_dmin, "smallest separation [m]");
  fscan->add_option("--dmax-m", f_dmax, "largest separation [m]");
  fscan->add_option("--points", f_points, "points of the scan");

  // equilibrium
  double bracket_lo = 5e-9, bracket_hi = 2e-6;
  CLI::App* equil = app.add_subcommand("equilibrium",
                                       "float height of the levitating disk");
  add_common_options(equil, opts);
  equil->add_option("--bracket-lo-m", bracket_lo, "search bracket lower end [m]");
  equil->add_option("--bracket-hi-m", bracket_hi, "search bracket upper end [m]");

  // dynamics
  double theta0 = std::numbers::pi / 4, t_end = 600.0, out_dt = 0.0;
  double viscosity = 1.2e-3;
  double amplitude = 0.0;
  std::string mode_name = "full";
  CLI::App* dyn = app.add_subcommand("dynamics",
                                     "overdamped rotation of the floating disk");
  add_common_options(dyn, opts);
  dyn->add_option("--theta0-rad", theta0, "initial angle [rad]");
  dyn->add_option("--t-end-s", t_end, "simulated time span [s]");
  dyn->add_option("--out-dt-s", out_dt, "output sampling interval [s]");
  dyn->add_option("--mode", mode_name, "full or quasi-static")
      ->check(CLI::IsMember({"full", "quasi-static"}));
  dyn->add_option("--viscosity-pa-s", viscosity, "liquid viscosity [Pa s]");
  CLI::Option* amp_opt = dyn->add_option(
      "--amplitude-nm", amplitude,
      "torque amplitude a [N m] (default: fit at the float height)");

  // oracle
  CLI::App* oracle = app.add_subcommand(
      "oracle", "non-retarded weak-anisotropy torque cross-check");
  add_common_options(oracle, opts);

  // sensitivity
  std::vector<std::string> variant_specs;
  CLI::App* sens = app.add_subcommand(
      "sensitivity", "observable shifts under material parameter variants");
  add_common_options(sens, opts);
  sens->add_option("--variant", variant_specs,
                   "role=material override (repeatable)");

  CLI11_PARSE(app, argc, argv);

  try {
    set_worker_threads(opts.threads);
    if (eps->parsed())
      return cmd_eps_table(opts, eps_names, xi_min, xi_max, eps_points);
    if (tscan->parsed())
      return cmd_torque_scan(opts, scan_over, theta_points, dmin, dmax,
                             dist_points);
    if (fscan->parsed()) return cmd_force_scan(opts, f_dmin, f_dmax, f_points);
    if (equil->parsed()) return cmd_equilibrium(opts, bracket_lo, bracket_hi);
    if (dyn->parsed())
      return cmd_dynamics(opts, theta0, t_end, out_dt, mode_name, viscosity,
                          amplitude, amp_opt->count() > 0);
    if (oracle->parsed()) return cmd_oracle(opts);
    if (sens->parsed()) return cmd_sensitivity(opts, variant_specs);
    std::cerr << "casitorque: no subcommand\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "casitorque: configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NoLevitationError& e) {
    std::cerr << "casitorque: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const NumericalError& e) {
    std::cerr << "casitorque: numerical failure: " << e.what()
              << " (achieved error " << e.achieved_error << ")\n";
    return kExitNumerical;
  } catch (const IoError& e) {
    std::cerr << "casitorque: I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "casitorque: " << e.what() << "\n";
    return kExitNumerical;
  }
}
