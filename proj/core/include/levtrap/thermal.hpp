#pragma once

#include <functional>
#include <istream>
#include <string>
#include <vector>

#include "levtrap/beam.hpp"
#include "levtrap/mie.hpp"

namespace levtrap {

struct NkRow {
  double wavelength = 0.0;  // m
  double n = 0.0, k = 0.0;
};

struct NkSample {
  cplx index{1.0, 0.0};
  bool extrapolated = false;
};

// Tabulated optical constants, linear in log-wavelength between rows,
// endpoint values held outside the tabulated range.
class NkTable {
 public:
  NkTable() = default;
  NkTable(std::vector<NkRow> rows, std::string source);

  NkSample at(double wavelength) const;
  double min_wavelength() const { return rows_.front().wavelength; }
  double max_wavelength() const { return rows_.back().wavelength; }
  const std::vector<NkRow>& rows() const { return rows_; }
  const std::string& source() const { return source_; }

 private:
  std::vector<NkRow> rows_;
  std::string source_;
};

// Data lines "wavelength_um,n,k"; '#' starts a comment line.
NkTable parse_nk(std::istream& in, const std::string& source);
NkTable load_nk(const std::string& path);

// Bundled data directory: $LEVTRAP_DATA_DIR if set, else the source tree's data/.
std::string data_directory();
// Relative paths resolve against data_directory().
std::string resolve_data_path(const std::string& path);

struct AbsorbedPower {
  double flux = 0.0;         // W, Poynting flux through a sphere at infinity
  double coefficient = 0.0;  // W, per-mode absorption sums
  double extinction = 0.0;   // W
  double value() const { return coefficient; }
};

// Both estimates at `position`; summed over both beams for a counterpropagating pair.
// Throws ConsistencyError when they differ by more than 1% (absolute floor 1e-11 P_ext).
AbsorbedPower absorbed_power(const AngularSpectrum& spectrum, const MieTable& mie, const Vec3& position,
                             bool counterpropagating = false);

struct BlackbodyGrid {
  double lambda_min = 0.5e-6;
  double lambda_max = 200e-6;
  int nodes = 2000;
};

// Absorption cross section sampled once on a log-wavelength grid; power(T) is
// int dw hbar w^3 / (pi^2 c^2) / (e^{hbar w / kT} - 1) sigma_abs(w).
class BlackbodyExchange {
 public:
  BlackbodyExchange(const NkTable& nk, double radius, double medium_index = 1.0, BlackbodyGrid grid = {});
  BlackbodyExchange(const std::function<double(double wavelength)>& sigma_abs, BlackbodyGrid grid = {});

  double power(double T) const;
  // Share of the Planck-weighted band at T that falls outside the nk table.
  double uncovered_fraction(double T) const;
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  std::vector<double> lambda_, weight_, sigma_;
  std::vector<bool> covered_;
  std::vector<std::string> warnings_;
};

double blackbody_power(const NkTable& nk, double radius, double T);

struct ThermalReport {
  std::string material;
  BeamSpec beam;
  double kR = 0.0;
  double P_abs = 0.0;            // W
  double P_bb_absorbed = 0.0;    // W, from surroundings at T0
  double P_bb_emitted = 0.0;     // W, at T_solution
  double T_solution = constants::T_ambient;
  double balance_residual = 0.0;  // W
  bool resonance_flag = false;
  bool melting_exceeded = false;
  bool runaway = false;
  std::vector<std::string> warnings;
};

struct TemperatureSolve {
  double T_min = constants::T_ambient;
  double T_max = 5000.0;
  double tolerance = 0.1;  // K
  double relative_residual = 1e-6;
};

// Steady state of P_abs + P_BB(T0) = P_BB(T); gas exchange neglected.
ThermalReport solve_temperature(double P_abs, const BlackbodyExchange& bb, const TemperatureSolve& opt = {});

// Absorbed power at `position`, nk-table exchange, melting and resonance flags.
ThermalReport thermal_report(const AngularSpectrum& spectrum, const MieTable& mie, const Material& material,
                             const Vec3& position, bool counterpropagating, const NkTable& nk,
                             const TemperatureSolve& opt = {});

}  // namespace levtrap
