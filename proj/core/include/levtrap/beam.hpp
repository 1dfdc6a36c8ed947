#pragma once

#include <optional>
#include <string>
#include <vector>

#include "levtrap/common.hpp"
#include "levtrap/special_fn.hpp"

namespace levtrap {

enum class BeamFamily { gaussian_linear_x, radial, azimuthal };

std::string to_string(BeamFamily f);
std::optional<BeamFamily> parse_family(const std::string& s);

struct BeamSpec {
  BeamFamily family = BeamFamily::gaussian_linear_x;
  double power = 0.5;                 // W
  double wavelength_vacuum = 1550e-9; // m
  double numerical_aperture = 0.8;
  int propagation_sign = +1;
  double frequency_offset = 0.0;      // Hz, only labels the partner of a counterpropagating pair
  double medium_index = 1.0;

  void validate() const;
  double wavenumber() const { return 2.0 * pi * medium_index / wavelength_vacuum; }
  double impedance() const { return constants::Z0 / medium_index; }
};

struct TransverseField {
  cplx ex, ey;
};

// Paraxial Hermite-Gauss superpositions, normalized to beam.power.
class ParaxialField {
 public:
  explicit ParaxialField(const BeamSpec& beam);
  TransverseField operator()(double x, double y, double z) const;

  double waist(double z) const;
  double wavefront_radius(double z) const;  // infinite at z = 0
  double gouy_phase(double z) const;        // (mode order + 1) * atan(z / zR)

  BeamSpec beam;
  double waist_w0;
  double rayleigh_range_zR;
};

ParaxialField paraxial_field(const BeamSpec& beam);

// A(theta, phi) = g(theta) sum_c e^{i c phi} (u_c theta_hat + v_c phi_hat) in the
// frame of a +z beam.
struct AzimuthalHarmonic {
  int c;
  cplx u, v;
};

// Plane-wave spectrum E(r) = int_cap A(k) exp(i k k.r) dOmega over the aperture cone.
class AngularSpectrum {
 public:
  AngularSpectrum(const BeamSpec& beam, double fill_factor);

  double envelope(double theta) const;  // g(theta), +z frame, zero outside the cone
  std::vector<AzimuthalHarmonic> harmonics() const;
  // Cartesian amplitude at a direction of the actual (signed) beam.
  CVec3 amplitude(double theta, double phi) const;
  double cone_power(const SphereQuadrature& grid) const;
  double wavenumber() const { return beam.wavenumber(); }

  BeamSpec beam;
  double theta_max;
  double fill_factor;
  double scale;  // V/m/sr, sets the power
  SphereQuadrature grid;  // nodes of the signed beam's cone
  std::vector<CVec3> E_far;
};

AngularSpectrum focus(const BeamSpec& beam, double fill_factor = 1.0);

struct FieldSample {
  CVec3 E, H;
};

// Richards-Wolf integral reduced to theta quadratures with Bessel kernels.
// order_theta = 0 selects an order from the distance to the focus.
FieldSample focal_field(const AngularSpectrum& spectrum, const Vec3& point, int order_theta = 0);

}  // namespace levtrap
