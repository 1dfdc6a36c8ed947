#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "levtrap/config.hpp"

namespace levtrap {

// One CSV record. Depths in units of kB * 293 K, frequencies as Omega / 2pi.
struct ResultRow {
  double kR = NAN;
  double R_nm = NAN;
  double z_eq_um = NAN;
  Vec3 dU_kT{NAN, NAN, NAN};
  Vec3 f_kHz{NAN, NAN, NAN};
  Vec3 Gamma_per_s{NAN, NAN, NAN};
  double T_K = NAN;
  std::string flags;  // ';'-separated tokens

  bool operator==(const ResultRow& o) const;
};

inline constexpr const char* result_header =
    "kR,R_nm,z_eq_um,dUx_kT,dUy_kT,dUz_kT,fx_kHz,fy_kHz,fz_kHz,Gx_per_s,Gy_per_s,Gz_per_s,T_K,flags";

std::string format_number(double v);  // shortest round-trip, "nan" for NaN
std::string to_csv(const ResultRow& row);
ResultRow parse_result_line(const std::string& line);
void write_results(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results(std::istream& in);  // ParseError on bad lines or header

struct ProfilePoint {
  double kR = 0.0;
  Axis axis = Axis::z;
  double coordinate_um = 0.0;
  double force_N = 0.0;
  double U_kT = 0.0;
};
inline constexpr const char* profile_header = "kR,axis,coordinate_um,force_N,U_kT";

inline constexpr const char* resonance_header = "label,family,order,kR,width";
// Dashed-line overlays for a material over a kR range.
void emit_resonance_annotations(std::ostream& out, cplx m, double kR_min, double kR_max,
                                const FamilyLabels& labels = {});

// Transverse stiffness at a fixed trap centre, one entry per wavelength.
struct WavelengthPoint {
  double wavelength_nm = 0.0;
  double kR = 0.0;
  double center_z_um = 0.0;
  Vec3 stiffness{NAN, NAN, NAN};  // N/m
};
inline constexpr const char* wavelength_header = "wavelength_nm,kR,center_z_um,kx_N_per_m,ky_N_per_m,kz_N_per_m";

struct RowResult {
  ResultRow row;
  std::vector<ProfilePoint> profile;
};

// Everything a single kR (or wavelength) point produces. Exceptions are caught and
// recorded as an "error=<kind>" flag.
RowResult compute_row(const SweepConfig& cfg, const AngularSpectrum& spectrum, double kR,
                      const NkTable* nk);

struct SweepSummary {
  std::vector<std::filesystem::path> files;
  std::filesystem::path manifest;
  std::size_t rows = 0, cached_rows = 0, failed_rows = 0;
  std::vector<WavelengthPoint> wavelength_points;
};

struct SweepRunOptions {
  unsigned jobs = 0;      // 0 = hardware concurrency
  bool use_cache = true;  // combined with SweepConfig::cache
  std::filesystem::path cache_dir;  // empty = $LEVTRAP_CACHE_DIR, else <output_dir>/.cache
  bool quiet = true;
};

std::filesystem::path default_cache_dir(const SweepConfig& cfg);

SweepSummary run_sweep(const SweepConfig& cfg, const SweepRunOptions& opt = {});

// Row-matched ratios a / b on kR (rows without a partner are dropped).
struct RatioRow {
  double kR = NAN;
  Vec3 f_ratio{NAN, NAN, NAN};
  Vec3 Gamma_ratio{NAN, NAN, NAN};
  double T_ratio = NAN;
};
inline constexpr const char* ratio_header = "kR,fx_ratio,fy_ratio,fz_ratio,Gx_ratio,Gy_ratio,Gz_ratio,T_ratio";
std::vector<RatioRow> compare(const std::vector<ResultRow>& a, const std::vector<ResultRow>& b);
void write_ratios(std::ostream& out, const std::vector<RatioRow>& rows);

}  // namespace levtrap
