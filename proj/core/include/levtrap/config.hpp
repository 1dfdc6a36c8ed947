#pragma once

#include <istream>
#include <set>
#include <string>
#include <vector>

#include "levtrap/beam.hpp"
#include "levtrap/dynamics.hpp"
#include "levtrap/mie.hpp"
#include "levtrap/recoil.hpp"
#include "levtrap/thermal.hpp"

namespace levtrap {

enum class Output { trap, recoil, thermal, resonances, potential_profile };
std::string to_string(Output o);
std::optional<Output> parse_output(const std::string& s);

struct KrGrid {
  double min = 0.1;
  double max = 2.2;
  double step = 0.01;
  // min, min + step, ... up to max (inclusive within 1e-9 step), rounded to 1e-9.
  std::vector<double> values() const;
};

struct SweepConfig {
  BeamSpec beam;
  double fill_factor = 1.0;
  bool counterpropagating = false;
  Material material = silicon();
  KrGrid kR_grid;
  std::set<Output> outputs{Output::trap};
  std::vector<double> wavelength_list;  // m; non-empty selects wavelength mode
  double radius = 385e-9;               // m, wavelength mode only
  std::string output_dir = "levtrap-out";
  bool cache = true;
  ScanConfig scan;
  RecoilOptions recoil;
  TemperatureSolve thermal;
  FamilyLabels labels;

  void validate() const;  // ConfigError
  // Normalised key = value text of everything that affects results.
  std::string canonical() const;
  std::string hash() const;  // SHA-256 hex of canonical()
};

// "385nm", "1.55um", "1.55e-6" (metres). ConfigError on malformed input.
double parse_length(const std::string& text);
bool parse_bool(const std::string& text);

// Sets "section.key" from text, e.g. ("beam.family", "AVB"). ConfigError on unknown keys.
void apply_setting(SweepConfig& cfg, const std::string& key, const std::string& value);

// INI-style file: [section] headers, key = value lines, ';' or '#' comments.
SweepConfig parse_config(std::istream& in, const std::string& source = "<config>");
SweepConfig load_config(const std::string& path);

}  // namespace levtrap
