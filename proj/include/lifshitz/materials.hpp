#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lifshitz {

// One term of the oscillator-sum permittivity model:
//   eps(i xi) = 1 + sum_j C_j / (1 + (xi/omega_j)^2 + g_j xi/omega_j)
struct Oscillator {
  double strength = 0.0;  // C_j, dimensionless, > 0
  double omega = 0.0;     // resonance angular frequency [rad/s], > 0
  double damping = 0.0;   // g_j, dimensionless, >= 0
};

// Permittivity along one principal axis, evaluated at imaginary frequency.
// An empty oscillator list gives eps == 1 (vacuum).
class OscillatorModel {
 public:
  OscillatorModel() = default;
  explicit OscillatorModel(std::vector<Oscillator> oscillators);

  // eps(i xi). xi must be >= 0 (rad/s).
  double operator()(double xi) const;

  std::span<const Oscillator> oscillators() const { return oscillators_; }
  double static_value() const;  // eps at xi = 0

 private:
  std::vector<Oscillator> oscillators_;
};

// Free-function spelling of OscillatorModel::operator().
double eval_epsilon(const OscillatorModel& model, double xi);

// n-th Matsubara angular frequency 2 pi k_B T n / hbar [rad/s].
double matsubara_xi(int n, double temperature);

// Uniaxial dielectric: eps_parallel along the optical axis, eps_perpendicular
// across it. Isotropic media use the same model for both.
struct UniaxialMaterial {
  std::string name;
  OscillatorModel eps_parallel;
  OscillatorModel eps_perpendicular;
  std::optional<double> density;  // [kg/m^3], needed only for floating disks
  bool isotropic = false;         // declared with a single "isotropic" model

  bool is_birefringent() const;
};

class MaterialDatabase {
 public:
  void add(UniaxialMaterial material);  // ConfigError on duplicate name
  const UniaxialMaterial* find(std::string_view name) const;
  const UniaxialMaterial& require(std::string_view name) const;  // ConfigError

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  const std::vector<UniaxialMaterial>& entries() const { return entries_; }

  // Parse the JSON database format (see README). An empty or whitespace-only
  // document yields an empty database.
  static MaterialDatabase parse(std::string_view text);
  static MaterialDatabase load_file(const std::filesystem::path& path);
  std::string serialize() const;

  // Database built into the binary: quartz, calcite, BaTiO3 (plus the two
  // literature omega_IR variants), ethanol, vacuum.
  static const MaterialDatabase& bundled();

 private:
  std::vector<UniaxialMaterial> entries_;  // insertion order preserved
};

// JSON text of the bundled database (also shipped as data/materials.json).
extern const char* const kDefaultMaterialsJson;

}  // namespace lifshitz
