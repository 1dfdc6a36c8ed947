#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "levtrap/beam.hpp"
#include "levtrap/mie.hpp"
#include "levtrap/vswf.hpp"

namespace levtrap {

struct ForceVector {
  Vec3 F{0, 0, 0};  // N
  Vec3 position{0, 0, 0};
  std::string beam_id;
};

// Force and the two independent estimates of extinction / scattering / absorption.
struct ScatteringEvaluation {
  Vec3 force{0, 0, 0};
  double P_ext_flux = 0.0, P_sca_flux = 0.0, P_abs_flux = 0.0;
  double P_ext_coeff = 0.0, P_sca_coeff = 0.0, P_abs_coeff = 0.0;
};

// Far-field momentum-flux force engine for one beam and one sphere.
class ForceEngine {
 public:
  ForceEngine(const AngularSpectrum& spectrum, const MieTable& mie);

  ScatteringEvaluation evaluate(const Vec3& position) const;
  Vec3 force(const Vec3& position) const { return evaluate(position).force; }

  const AngularSpectrum& spectrum() const { return projector_->spectrum(); }
  const BeamProjector& projector() const { return *projector_; }
  const MieTable& mie() const { return mie_; }

 private:
  ScatteringEvaluation evaluate_forward(const Vec3& d) const;
  std::shared_ptr<const BeamProjector> projector_;
  MieTable mie_;
  std::shared_ptr<const detail::SphereTables> sphere_;
};

ForceVector optical_force(const AngularSpectrum& spectrum, const MieTable& mie, const Vec3& position);
// Pair of mutually incoherent beams along +z and -z, each with the spectrum's power.
ForceVector counterprop_force(const AngularSpectrum& spectrum, const MieTable& mie, const Vec3& position);

using ForceField = std::function<Vec3(const Vec3&)>;

enum class Axis { x = 0, y = 1, z = 2 };
std::string to_string(Axis a);

struct PotentialProfile {
  Axis axis = Axis::z;
  Vec3 through{0, 0, 0};
  std::vector<double> coordinate;  // m, absolute position along the axis
  std::vector<double> force;       // N, component along the axis
  std::vector<double> potential;   // J, zero at the minimum
};

PotentialProfile potential_profile(const ForceField& field, Axis axis, const Vec3& through,
                                   std::pair<double, double> window, int samples);

struct ScanConfig {
  double axial_half_window = 6.0;       // wavelengths
  double transverse_half_window = 2.0;  // wavelengths
  int samples = 401;
  double root_tolerance = 1e-4;         // wavelengths
  double stiffness_step = 1.0 / 200.0;  // wavelengths
  bool counterpropagating = false;
};

struct TrapReport {
  std::string material;
  BeamSpec beam;
  bool counterpropagating = false;
  double kR = 0.0, radius = 0.0, mass = 0.0;
  std::optional<double> z_eq;
  Vec3 evaluation_point{0, 0, 0};
  Vec3 depth{0, 0, 0};       // J, signed
  Vec3 stiffness{0, 0, 0};   // N/m
  Vec3 frequencies{0, 0, 0}; // rad/s, NaN where stiffness <= 0
  int equilibria_found = 0;
  bool trapped = false;
  ScanConfig scan;
  PotentialProfile axial, transverse_x, transverse_y;
};

// Trap analysis of an arbitrary force field; `downstream` is +1/-1 for single beams, 0 for pairs.
TrapReport analyze_trap(const ForceField& field, double wavelength, double mass, int downstream,
                        const ScanConfig& scan);

TrapReport trap_report(const AngularSpectrum& spectrum, const MieTable& mie, const Material& material,
                       const ScanConfig& scan);

}  // namespace levtrap
