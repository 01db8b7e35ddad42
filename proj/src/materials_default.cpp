#include "lifshitz/materials.hpp"

namespace lifshitz {

// Two-oscillator parameters for the bundled materials, plus the two
// literature values of the BaTiO3 infrared frequency (the default entry
// carries their average). Densities: quartz 2643, calcite 2760, ethanol
// 789 kg/m^3.
const char* const kDefaultMaterialsJson = R"JSON([
  {
    "name": "quartz",
    "density_kg_m3": 2643.0,
    "parallel":      {"oscillators": [{"C": 1.920, "omega_rad_s": 2.093e14},
                                      {"C": 1.350, "omega_rad_s": 2.040e16}]},
    "perpendicular": {"oscillators": [{"C": 1.960, "omega_rad_s": 2.093e14},
                                      {"C": 1.377, "omega_rad_s": 2.024e16}]}
  },
  {
    "name": "calcite",
    "density_kg_m3": 2760.0,
    "parallel":      {"oscillators": [{"C": 5.300, "omega_rad_s": 2.691e14},
                                      {"C": 1.683, "omega_rad_s": 1.660e16}]},
    "perpendicular": {"oscillators": [{"C": 6.300, "omega_rad_s": 2.691e14},
                                      {"C": 1.182, "omega_rad_s": 2.134e16}]}
  },
  {
    "name": "BaTiO3",
    "parallel":      {"oscillators": [{"C": 3595.0, "omega_rad_s": 0.850e14},
                                      {"C": 4.128,  "omega_rad_s": 0.841e16}]},
    "perpendicular": {"oscillators": [{"C": 145.0,  "omega_rad_s": 0.850e14},
                                      {"C": 4.064,  "omega_rad_s": 0.896e16}]}
  },
  {
    "name": "BaTiO3_wIR_low",
    "parallel":      {"oscillators": [{"C": 3595.0, "omega_rad_s": 0.700e14},
                                      {"C": 4.128,  "omega_rad_s": 0.841e16}]},
    "perpendicular": {"oscillators": [{"C": 145.0,  "omega_rad_s": 0.700e14},
                                      {"C": 4.064,  "omega_rad_s": 0.896e16}]}
  },
  {
    "name": "BaTiO3_wIR_high",
    "parallel":      {"oscillators": [{"C": 3595.0, "omega_rad_s": 1.000e14},
                                      {"C": 4.128,  "omega_rad_s": 0.841e16}]},
    "perpendicular": {"oscillators": [{"C": 145.0,  "omega_rad_s": 1.000e14},
                                      {"C": 4.064,  "omega_rad_s": 0.896e16}]}
  },
  {
    "name": "ethanol",
    "density_kg_m3": 789.0,
    "isotropic":     {"oscillators": [{"C": 23.84, "omega_rad_s": 6.600e14},
                                      {"C": 0.852, "omega_rad_s": 1.140e16}]}
  },
  {
    "name": "vacuum",
    "isotropic":     {"oscillators": []}
  }
])JSON";

}  // namespace lifshitz
