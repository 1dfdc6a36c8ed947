#pragma once

#include <array>
#include <string>
#include <vector>

#include "levtrap/beam.hpp"
#include "levtrap/dynamics.hpp"
#include "levtrap/mie.hpp"

namespace levtrap {

enum class RecoilRegime { rayleigh, mie };
std::string to_string(RecoilRegime r);

// Angular weight applied to |dE/dx_j|^2 in the Mie rate.
//   amplitude_derivative: weight 1; the derivative already carries (k_i - k_s)_j.
//   verbatim: additional (z_j - rhat_j)^2 factor, as the rate is usually printed.
enum class RecoilWeighting { amplitude_derivative, verbatim };
std::string to_string(RecoilWeighting w);
std::optional<RecoilWeighting> parse_weighting(const std::string& s);

struct RecoilReport {
  std::string material;
  BeamSpec beam;
  bool counterpropagating = false;
  double kR = 0.0;
  double epsilon = 0.0;          // J, hbar^2 k^2 / 2m
  Vec3 delta_E{0, 0, 0};         // J per scattered photon (Rayleigh only)
  Vec3 Edot{0, 0, 0};            // W
  Vec3 Gamma{0, 0, 0};           // quanta / s
  Vec3 frequencies{0, 0, 0};     // rad / s
  RecoilRegime regime = RecoilRegime::rayleigh;
  std::vector<std::string> warnings;
};

// Per-photon energy partition <dE_j>/epsilon of a dipole driven along `polarization`,
// photons incident along +z.
Vec3 rayleigh_partition(Axis polarization);

// Intensity |E|^2 / 2Z at a point, summed over both beams for a counterpropagating pair.
double local_intensity(const AngularSpectrum& spectrum, const Vec3& point, bool counterpropagating);

RecoilReport rayleigh_recoil(double intensity, const MieTable& mie, double mass, Axis polarization,
                             const Vec3& frequencies = {NAN, NAN, NAN});

struct RecoilOptions {
  double step = 1.0 / 2000.0;  // wavelengths (in the medium)
  double richardson_tolerance = 0.01;
  RecoilWeighting weighting = RecoilWeighting::amplitude_derivative;
  bool counterpropagating = false;
};

RecoilReport mie_recoil(const AngularSpectrum& spectrum, const MieTable& mie, const Vec3& equilibrium,
                        double mass, const Vec3& frequencies, const RecoilOptions& options = {});

// Componentwise Gamma_a / Gamma_b; `defined[j]` is false where the ratio has no finite value.
struct RecoilRatio {
  Vec3 ratio{NAN, NAN, NAN};
  std::array<bool, 3> defined{false, false, false};
};
RecoilRatio recoil_ratio(const RecoilReport& a, const RecoilReport& b);

}  // namespace levtrap
