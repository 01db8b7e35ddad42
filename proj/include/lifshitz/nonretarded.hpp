#pragma once

#include "lifshitz/materials.hpp"

namespace lifshitz {

// Small-separation, weak-anisotropy limit of the torque. Serves as an
// independent oracle for the full retarded kernel: the frequency integral
// omega_bar is computed both as a nested double quadrature and from the
// closed form obtained by integrating out the damped variable analytically.

enum class OmegaBarMethod { numeric, closed_form };

struct OmegaBarResult {
  double omega_bar = 0.0;  // [rad/s]
  OmegaBarMethod method = OmegaBarMethod::numeric;
};

OmegaBarResult omega_bar_numeric(const UniaxialMaterial& plate1,
                                 const UniaxialMaterial& plate2,
                                 const OscillatorModel& medium);

OmegaBarResult omega_bar_closed(const UniaxialMaterial& plate1,
                                const UniaxialMaterial& plate2,
                                const OscillatorModel& medium);

// M = -hbar * omega_bar * S * sin(2 theta) / (64 pi^2 d^2)  [N m]
double torque_nonretarded(double theta, double d, double area, double omega_bar);

}  // namespace lifshitz
