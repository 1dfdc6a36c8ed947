#include "levtrap/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <openssl/evp.h>

namespace levtrap {

std::string to_string(Output o) {
  switch (o) {
    case Output::trap: return "trap";
    case Output::recoil: return "recoil";
    case Output::thermal: return "thermal";
    case Output::resonances: return "resonances";
    case Output::potential_profile: return "potential_profile";
  }
  return "?";
}

std::optional<Output> parse_output(const std::string& s) {
  for (Output o : {Output::trap, Output::recoil, Output::thermal, Output::resonances, Output::potential_profile})
    if (to_string(o) == s) return o;
  return std::nullopt;
}

std::vector<double> KrGrid::values() const {
  std::vector<double> v;
  const long n = static_cast<long>(std::floor((max - min) / step + 1e-9));
  for (long i = 0; i <= n; ++i) v.push_back(std::round((min + i * step) * 1e9) / 1e9);
  return v;
}

namespace {

double parse_number(const std::string& text, const std::string& what) {
  const std::string s = boost::trim_copy(text);
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    throw ConfigError(fmt::format("{}: '{}' is not a number", what, text));
  return v;
}

int parse_int(const std::string& text, const std::string& what) {
  const double v = parse_number(text, what);
  if (v != std::floor(v)) throw ConfigError(fmt::format("{}: '{}' is not an integer", what, text));
  return static_cast<int>(v);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  boost::split(parts, s, boost::is_any_of(","));
  std::vector<std::string> out;
  for (auto& p : parts) {
    boost::trim(p);
    if (!p.empty()) out.push_back(p);
  }
  return out;
}

std::string num(double v) { return std::isnan(v) ? "nan" : fmt::format("{}", v); }

}  // namespace

double parse_length(const std::string& text) {
  std::string s = boost::trim_copy(text);
  double scale = 1.0;
  auto strip = [&](const std::string& suffix, double f) {
    if (s.size() > suffix.size() && boost::ends_with(s, suffix)) {
      s.resize(s.size() - suffix.size());
      scale = f;
      return true;
    }
    return false;
  };
  strip("nm", 1e-9) || strip("um", 1e-6) || strip("\xC2\xB5m", 1e-6) || strip("mm", 1e-3) || strip("m", 1.0);
  return parse_number(s, "length") * scale;
}

bool parse_bool(const std::string& text) {
  const std::string s = boost::to_lower_copy(boost::trim_copy(text));
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  throw ConfigError(fmt::format("'{}' is not a boolean", text));
}

void apply_setting(SweepConfig& cfg, const std::string& key, const std::string& raw) {
  const std::string v = boost::trim_copy(raw);
  auto number = [&] { return parse_number(v, key); };

  if (key == "beam.family") {
    auto f = parse_family(v);
    if (!f) throw ConfigError(fmt::format("beam.family: unknown family '{}'", v));
    cfg.beam.family = *f;
  } else if (key == "beam.power") cfg.beam.power = number();
  else if (key == "beam.wavelength") cfg.beam.wavelength_vacuum = parse_length(v);
  else if (key == "beam.numerical_aperture") cfg.beam.numerical_aperture = number();
  else if (key == "beam.fill_factor") cfg.fill_factor = number();
  else if (key == "beam.counterpropagating") cfg.counterpropagating = parse_bool(v);
  else if (key == "beam.medium_index") cfg.beam.medium_index = number();
  else if (key == "material.preset") {
    auto m = material_preset(v);
    if (!m) throw ConfigError(fmt::format("material.preset: unknown material '{}'", v));
    cfg.material = *m;
  } else if (key == "material.name") cfg.material.name = v;
  else if (key == "material.n") cfg.material.refractive_index.real(number());
  else if (key == "material.k") cfg.material.refractive_index.imag(number());
  else if (key == "material.density") cfg.material.density = number();
  else if (key == "material.nk_table") cfg.material.nk_table_path = v;
  else if (key == "material.melting_point") cfg.material.melting_point = number();
  else if (key == "sweep.kR_min") cfg.kR_grid.min = number();
  else if (key == "sweep.kR_max") cfg.kR_grid.max = number();
  else if (key == "sweep.kR_step") cfg.kR_grid.step = number();
  else if (key == "sweep.outputs") {
    cfg.outputs.clear();
    for (const auto& s : split_list(v)) {
      auto o = parse_output(s);
      if (!o) throw ConfigError(fmt::format("sweep.outputs: unknown output '{}'", s));
      cfg.outputs.insert(*o);
    }
  } else if (key == "sweep.wavelengths") {
    cfg.wavelength_list.clear();
    for (const auto& s : split_list(v)) cfg.wavelength_list.push_back(parse_length(s));
  } else if (key == "sweep.radius") cfg.radius = parse_length(v);
  else if (key == "sweep.output_dir") cfg.output_dir = v;
  else if (key == "sweep.cache") cfg.cache = parse_bool(v);
  else if (key == "scan.axial_half_window") cfg.scan.axial_half_window = number();
  else if (key == "scan.transverse_half_window") cfg.scan.transverse_half_window = number();
  else if (key == "scan.samples") cfg.scan.samples = parse_int(v, key);
  else if (key == "scan.root_tolerance") cfg.scan.root_tolerance = number();
  else if (key == "scan.stiffness_step") cfg.scan.stiffness_step = number();
  else if (key == "recoil.step") cfg.recoil.step = number();
  else if (key == "recoil.richardson_tolerance") cfg.recoil.richardson_tolerance = number();
  else if (key == "recoil.weighting") {
    auto w = parse_weighting(v);
    if (!w) throw ConfigError(fmt::format("recoil.weighting: unknown weighting '{}'", v));
    cfg.recoil.weighting = *w;
  } else if (key == "thermal.T_max") cfg.thermal.T_max = number();
  else if (key == "thermal.tolerance") cfg.thermal.tolerance = number();
  else if (key == "labels.magnetic") cfg.labels.magnetic = v;
  else if (key == "labels.electric") cfg.labels.electric = v;
  else throw ConfigError(fmt::format("unknown setting '{}'", key));
}

void SweepConfig::validate() const {
  try {
    beam.validate();
    material.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (!(fill_factor > 0.0)) throw ConfigError("beam.fill_factor must be > 0");
  if (!(kR_grid.step > 0.0)) throw ConfigError("sweep.kR_step must be > 0");
  if (!(kR_grid.min > 0.0)) throw ConfigError("sweep.kR_min must be > 0");
  if (!(kR_grid.min < kR_grid.max)) throw ConfigError("sweep.kR_min must be below sweep.kR_max");
  for (double w : wavelength_list)
    if (!(w > 0.0)) throw ConfigError("sweep.wavelengths must be > 0");
  if (!wavelength_list.empty() && !(radius > 0.0)) throw ConfigError("sweep.radius must be > 0");
  if (scan.samples < 11) throw ConfigError("scan.samples must be >= 11");
  if (!(scan.axial_half_window > 0.0) || !(scan.transverse_half_window > 0.0))
    throw ConfigError("scan windows must be > 0");
  if (!(scan.stiffness_step > 0.0) || !(scan.root_tolerance > 0.0))
    throw ConfigError("scan.stiffness_step and scan.root_tolerance must be > 0");
  if (!(recoil.step > 0.0) || !(recoil.richardson_tolerance > 0.0))
    throw ConfigError("recoil.step and recoil.richardson_tolerance must be > 0");
  if (!(thermal.T_max > thermal.T_min) || !(thermal.tolerance > 0.0))
    throw ConfigError("thermal.T_max must exceed 293 K and thermal.tolerance must be > 0");
}

std::string SweepConfig::canonical() const {
  std::string out;
  auto line = [&](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
  line("beam.family", to_string(beam.family));
  line("beam.power", num(beam.power));
  line("beam.wavelength", num(beam.wavelength_vacuum));
  line("beam.numerical_aperture", num(beam.numerical_aperture));
  line("beam.fill_factor", num(fill_factor));
  line("beam.counterpropagating", counterpropagating ? "true" : "false");
  line("beam.medium_index", num(beam.medium_index));
  line("material.name", material.name);
  line("material.n", num(material.refractive_index.real()));
  line("material.k", num(material.refractive_index.imag()));
  line("material.density", num(material.density));
  line("material.nk_table", material.nk_table_path);
  line("material.melting_point", num(material.melting_point));
  line("sweep.kR_min", num(kR_grid.min));
  line("sweep.kR_max", num(kR_grid.max));
  line("sweep.kR_step", num(kR_grid.step));
  std::vector<std::string> outs;
  for (Output o : outputs) outs.push_back(to_string(o));
  line("sweep.outputs", boost::join(outs, ","));
  std::vector<std::string> wl;
  for (double w : wavelength_list) wl.push_back(num(w));
  line("sweep.wavelengths", boost::join(wl, ","));
  line("sweep.radius", wavelength_list.empty() ? "-" : num(radius));
  line("scan.axial_half_window", num(scan.axial_half_window));
  line("scan.transverse_half_window", num(scan.transverse_half_window));
  line("scan.samples", std::to_string(scan.samples));
  line("scan.root_tolerance", num(scan.root_tolerance));
  line("scan.stiffness_step", num(scan.stiffness_step));
  line("recoil.step", num(recoil.step));
  line("recoil.richardson_tolerance", num(recoil.richardson_tolerance));
  line("recoil.weighting", to_string(recoil.weighting));
  line("thermal.T_max", num(thermal.T_max));
  line("thermal.tolerance", num(thermal.tolerance));
  line("labels.magnetic", labels.magnetic);
  line("labels.electric", labels.electric);
  return out;
}

std::string SweepConfig::hash() const {
  const std::string text = canonical();
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr);
  std::string hex;
  for (unsigned i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

SweepConfig parse_config(std::istream& in, const std::string& source) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("{}:{}: {}", source, e.line(), e.message()));
  }
  SweepConfig cfg;
  // a preset replaces the whole material, so it goes first
  if (auto p = tree.get_optional<std::string>("material.preset")) apply_setting(cfg, "material.preset", *p);
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError(fmt::format("{}: setting '{}' outside a section", source, section));
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      if (full == "material.preset") continue;
      try {
        apply_setting(cfg, full, value.data());
      } catch (const ConfigError& e) {
        throw ConfigError(fmt::format("{}: {}", source, e.what()));
      }
    }
  }
  return cfg;
}

SweepConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(fmt::format("cannot open config file '{}'", path));
  return parse_config(f, path);
}

}  // namespace levtrap
