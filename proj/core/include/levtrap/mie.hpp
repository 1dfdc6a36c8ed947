#pragma once

#include <optional>
#include <string>
#include <vector>

#include "levtrap/common.hpp"

namespace levtrap {

struct Material {
  std::string name;
  cplx refractive_index;
  double density = 0.0;  // kg/m^3
  std::string nk_table_path;
  double melting_point = NAN;  // K

  void validate() const;
};

// Built-in materials.
Material silicon();
Material silica();
std::optional<Material> material_preset(const std::string& name);

struct SizeParameter {
  double value = 0.0;
  double radius = 0.0;
  double wavelength_vacuum = 0.0;
  double medium_index = 1.0;

  static SizeParameter from_radius(double radius, double wavelength, double medium_index = 1.0);
  static SizeParameter from_kR(double kR, double wavelength, double medium_index = 1.0);
  double wavenumber() const { return 2.0 * pi * medium_index / wavelength_vacuum; }
};

struct MieTable {
  SizeParameter x;
  cplx m;
  int n_max = 0;
  std::vector<cplx> a, b;  // index n = 1..n_max, entry 0 is zero
  // Per-mode absorption weight Re(c) - |c|^2 evaluated from the surface flux
  // of the exterior field, same indexing.
  std::vector<double> absorb_a, absorb_b;
  double Q_sca = 0.0, Q_ext = 0.0, Q_abs = 0.0;
  double sigma_sca = 0.0, sigma_ext = 0.0, sigma_abs = 0.0;
};

int default_n_max(double x);

MieTable mie_coefficients(const SizeParameter& x, cplx m, std::optional<int> n_max = std::nullopt);

// Bohren-Huffman amplitudes S1, S2 at cos(theta).
std::pair<cplx, cplx> scattering_amplitudes(const MieTable& mie, double cos_theta);

enum class Family { electric, magnetic };

// Rendering of the canonical families in the TE/TM vocabulary (configurable).
struct FamilyLabels {
  std::string magnetic = "TM";
  std::string electric = "TE";
  const std::string& of(Family f) const { return f == Family::magnetic ? magnetic : electric; }
};

struct Resonance {
  Family family;
  int order;
  double kR_peak;
  double width;  // full width at half maximum of |coefficient|^2, NaN if not resolved in range
};

struct ResonanceList {
  std::vector<Resonance> entries;
};

ResonanceList locate_resonances(cplx m, double kR_min, double kR_max,
                                std::vector<Family> families = {Family::electric, Family::magnetic},
                                double grid_step = 0.002);

double mass_of(double radius, double density);

}  // namespace levtrap
