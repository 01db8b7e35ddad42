#include "lifshitz/materials.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "lifshitz/constants.hpp"
#include "lifshitz/errors.hpp"

namespace lifshitz {

using nlohmann::json;

OscillatorModel::OscillatorModel(std::vector<Oscillator> oscillators)
    : oscillators_(std::move(oscillators)) {
  for (const Oscillator& osc : oscillators_) {
    if (!(osc.strength > 0.0))
      throw ConfigError("oscillator strength C must be > 0");
    if (!(osc.omega > 0.0))
      throw ConfigError("oscillator frequency omega must be > 0");
    if (!(osc.damping >= 0.0))
      throw ConfigError("oscillator damping g must be >= 0");
  }
}

double OscillatorModel::operator()(double xi) const {
  if (!(xi >= 0.0)) throw ConfigError("permittivity argument xi must be >= 0");
  double eps = 1.0;
  for (const Oscillator& osc : oscillators_) {
    const double x = xi / osc.omega;
    eps += osc.strength / (1.0 + x * x + osc.damping * x);
  }
  return eps;
}

double OscillatorModel::static_value() const {
  double eps = 1.0;
  for (const Oscillator& osc : oscillators_) eps += osc.strength;
  return eps;
}

double eval_epsilon(const OscillatorModel& model, double xi) {
  return model(xi);
}

double matsubara_xi(int n, double temperature) {
  if (n < 0) throw ConfigError("Matsubara index must be >= 0");
  if (!(temperature > 0.0)) throw ConfigError("temperature must be > 0 K");
  const double base = 2.0 * std::numbers::pi * constants::boltzmann *
                      temperature / constants::hbar;
  return n * base;
}

bool UniaxialMaterial::is_birefringent() const {
  auto par = eps_parallel.oscillators();
  auto perp = eps_perpendicular.oscillators();
  if (par.size() != perp.size()) return true;
  for (std::size_t i = 0; i < par.size(); ++i) {
    if (par[i].strength != perp[i].strength || par[i].omega != perp[i].omega ||
        par[i].damping != perp[i].damping)
      return true;
  }
  return false;
}

void MaterialDatabase::add(UniaxialMaterial material) {
  if (material.name.empty()) throw ConfigError("material name must not be empty");
  if (find(material.name) != nullptr)
    throw ConfigError("duplicate material name '" + material.name + "'");
  entries_.push_back(std::move(material));
}

const UniaxialMaterial* MaterialDatabase::find(std::string_view name) const {
  for (const UniaxialMaterial& m : entries_)
    if (m.name == name) return &m;
  return nullptr;
}

const UniaxialMaterial& MaterialDatabase::require(std::string_view name) const {
  const UniaxialMaterial* m = find(name);
  if (m == nullptr)
    throw ConfigError("unknown material '" + std::string(name) + "'");
  return *m;
}

namespace {

OscillatorModel parse_model(const json& node, const std::string& where) {
  if (!node.is_object() || !node.contains("oscillators"))
    throw ConfigError("material database: missing field 'oscillators' in " + where);
  const json& list = node.at("oscillators");
  if (!list.is_array())
    throw ConfigError("material database: 'oscillators' must be an array in " + where);
  std::vector<Oscillator> oscillators;
  oscillators.reserve(list.size());
  for (const json& item : list) {
    Oscillator osc;
    if (!item.contains("C"))
      throw ConfigError("material database: missing field 'C' in " + where);
    if (!item.contains("omega_rad_s"))
      throw ConfigError("material database: missing field 'omega_rad_s' in " + where);
    osc.strength = item.at("C").get<double>();
    osc.omega = item.at("omega_rad_s").get<double>();
    osc.damping = item.value("g", 0.0);
    oscillators.push_back(osc);
  }
  return OscillatorModel(std::move(oscillators));
}

json model_to_json(const OscillatorModel& model) {
  json list = json::array();
  for (const Oscillator& osc : model.oscillators()) {
    json item;
    item["C"] = osc.strength;
    item["omega_rad_s"] = osc.omega;
    item["g"] = osc.damping;
    list.push_back(std::move(item));
  }
  return json{{"oscillators", std::move(list)}};
}

}  // namespace

MaterialDatabase MaterialDatabase::parse(std::string_view text) {
  MaterialDatabase db;
  // An empty document is a valid (empty) database.
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) return db;

  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("material database: JSON parse failure: ") + e.what());
  }
  if (!doc.is_array())
    throw ConfigError("material database: top-level value must be an array");

  for (const json& node : doc) {
    UniaxialMaterial mat;
    if (!node.is_object() || !node.contains("name") || !node.at("name").is_string())
      throw ConfigError("material database: missing field 'name' in entry");
    mat.name = node.at("name").get<std::string>();
    const std::string where = "material '" + mat.name + "'";
    try {
      if (node.contains("isotropic")) {
        if (node.contains("parallel") || node.contains("perpendicular"))
          throw ConfigError("material database: " + where +
                            " mixes 'isotropic' with 'parallel'/'perpendicular'");
        mat.eps_parallel = parse_model(node.at("isotropic"), where);
        mat.eps_perpendicular = mat.eps_parallel;
        mat.isotropic = true;
      } else {
        if (!node.contains("parallel"))
          throw ConfigError("material database: missing field 'parallel' in " + where);
        if (!node.contains("perpendicular"))
          throw ConfigError("material database: missing field 'perpendicular' in " + where);
        mat.eps_parallel = parse_model(node.at("parallel"), where);
        mat.eps_perpendicular = parse_model(node.at("perpendicular"), where);
      }
      if (node.contains("density_kg_m3"))
        mat.density = node.at("density_kg_m3").get<double>();
    } catch (const json::exception& e) {
      throw ConfigError("material database: bad value in " + where + ": " + e.what());
    }
    db.add(std::move(mat));
  }
  return db;
}

MaterialDatabase MaterialDatabase::load_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open material database '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("read failure on '" + path.string() + "'");
  return parse(buffer.str());
}

std::string MaterialDatabase::serialize() const {
  json doc = json::array();
  for (const UniaxialMaterial& mat : entries_) {
    json node;
    node["name"] = mat.name;
    if (mat.density) node["density_kg_m3"] = *mat.density;
    if (mat.isotropic) {
      node["isotropic"] = model_to_json(mat.eps_parallel);
    } else {
      node["parallel"] = model_to_json(mat.eps_parallel);
      node["perpendicular"] = model_to_json(mat.eps_perpendicular);
    }
    doc.push_back(std::move(node));
  }
  return doc.dump(2) + "\n";
}

const MaterialDatabase& MaterialDatabase::bundled() {
  static const MaterialDatabase db = parse(kDefaultMaterialsJson);
  return db;
}

}  // namespace lifshitz
