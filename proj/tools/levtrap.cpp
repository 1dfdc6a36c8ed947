// levtrap command-line front end.
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <boost/algorithm/string.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "levtrap/config.hpp"
#include "levtrap/sweep.hpp"

using namespace levtrap;
using nlohmann::json;

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> settings;
  std::string family, material, wavelength, out;
  double power = NAN, na = NAN, fill = NAN;
  bool counterprop = false;
  double kR = NAN;
  std::string radius;

  void attach(CLI::App* app, bool point) {
    app->add_option("-c,--config", config_path, "INI configuration file");
    app->add_option("--set", settings, "Override a setting, section.key=value");
    app->add_option("--family", family, "GB, RVB or AVB");
    app->add_option("--material", material, "Si or SiO2");
    app->add_option("--power", power, "Beam power per beam (W)");
    app->add_option("--wavelength", wavelength, "Vacuum wavelength (m, or with nm/um suffix)");
    app->add_option("--na", na, "Numerical aperture");
    app->add_option("--fill", fill, "Filling factor of the lens aperture");
    app->add_flag("--counterprop", counterprop, "Add a mirror beam along -z");
    if (point) {
      app->add_option("--kR", kR, "Size parameter");
      app->add_option("--radius", radius, "Particle radius (m, or with nm/um suffix)");
    }
  }

  SweepConfig resolve() const {
    SweepConfig cfg = config_path.empty() ? SweepConfig{} : load_config(config_path);
    if (!material.empty()) apply_setting(cfg, "material.preset", material);
    if (!family.empty()) apply_setting(cfg, "beam.family", family);
    if (!wavelength.empty()) apply_setting(cfg, "beam.wavelength", wavelength);
    if (!std::isnan(power)) cfg.beam.power = power;
    if (!std::isnan(na)) cfg.beam.numerical_aperture = na;
    if (!std::isnan(fill)) cfg.fill_factor = fill;
    if (counterprop) cfg.counterpropagating = true;
    for (const auto& s : settings) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError(fmt::format("--set expects key=value, got '{}'", s));
      apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
    }
    cfg.validate();
    return cfg;
  }

  SizeParameter size(const SweepConfig& cfg) const {
    const auto& b = cfg.beam;
    if (!radius.empty()) return SizeParameter::from_radius(parse_length(radius), b.wavelength_vacuum, b.medium_index);
    if (std::isnan(kR)) throw ConfigError("give --kR or --radius");
    return SizeParameter::from_kR(kR, b.wavelength_vacuum, b.medium_index);
  }
};

Vec3 parse_point(const std::string& s) {
  std::vector<std::string> parts;
  boost::split(parts, s, boost::is_any_of(","));
  if (parts.size() != 3) throw ConfigError(fmt::format("expected x,y,z, got '{}'", s));
  return {parse_length(parts[0]), parse_length(parts[1]), parse_length(parts[2])};
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
json vec(const Vec3& v) { return json::array({num(v[0]), num(v[1]), num(v[2])}); }
json cvec(const CVec3& v) {
  json a = json::array();
  for (const auto& c : v) a.push_back({c.real(), c.imag()});
  return a;
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw DataFileError(fmt::format("cannot write '{}'", out));
  f << text;
}

std::vector<ResultRow> read_csv_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataFileError(fmt::format("cannot open '{}'", path));
  try {
    return read_results(f);
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}:{}: {}", path, e.line, e.what()), e.line);
  }
}

int run(int argc, char** argv) {
  CLI::App app{"Optical levitation trap design with focused vector beams"};
  app.require_subcommand(1);
  app.set_version_flag("--version", LEVTRAP_VERSION);

  Common common;
  std::string out;

  auto* mie = app.add_subcommand("mie", "Mie coefficients and efficiencies");
  common.attach(mie, true);
  mie->add_option("-o,--out", out, "Output file (default stdout)");

  auto* res = app.add_subcommand("resonances", "Resonance positions of a_n and b_n");
  common.attach(res, false);
  double res_min = 0.2, res_max = 2.2;
  res->add_option("--kR-min", res_min);
  res->add_option("--kR-max", res_max);
  res->add_option("-o,--out", out, "Output CSV (default stdout)");

  auto* foc = app.add_subcommand("focus", "Focal field at a point");
  common.attach(foc, false);
  std::string point = "0,0,0";
  foc->add_option("--point", point, "x,y,z (m, or with nm/um suffix)");

  auto* frc = app.add_subcommand("force", "Optical force on a sphere");
  common.attach(frc, true);
  frc->add_option("--position", point, "x,y,z (m, or with nm/um suffix)");

  auto* trp = app.add_subcommand("trap", "Equilibrium, depths and frequencies");
  common.attach(trp, true);

  auto* rec = app.add_subcommand("recoil", "Photon recoil heating rates at the trap");
  common.attach(rec, true);
  bool rayleigh = false;
  rec->add_flag("--rayleigh", rayleigh, "Dipole-limit rates from the local intensity");

  auto* thm = app.add_subcommand("thermal", "Steady-state bulk temperature");
  common.attach(thm, true);
  thm->add_option("--position", point, "Particle centre x,y,z");

  auto* swp = app.add_subcommand("sweep", "Sweep kR (or wavelength) and write CSV tables");
  common.attach(swp, false);
  unsigned jobs = 0;
  bool no_cache = false, quiet = false;
  std::string outdir;
  swp->add_option("-j,--jobs", jobs, "Worker threads (default: all cores)");
  swp->add_flag("--no-cache", no_cache, "Ignore and do not write the row cache");
  swp->add_flag("-q,--quiet", quiet);
  swp->add_option("-o,--out", outdir, "Output directory");

  auto* cmp = app.add_subcommand("compare", "Ratio table a / b of two sweep CSVs");
  std::string csv_a, csv_b;
  cmp->add_option("a", csv_a)->required();
  cmp->add_option("b", csv_b)->required();
  cmp->add_option("-o,--out", out, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (*cmp) {
    std::ostringstream s;
    write_ratios(s, compare(read_csv_file(csv_a), read_csv_file(csv_b)));
    emit(out, s.str());
    return 0;
  }

  SweepConfig cfg = common.resolve();

  if (*res) {
    std::ostringstream s;
    emit_resonance_annotations(s, cfg.material.refractive_index, res_min, res_max, cfg.labels);
    emit(out, s.str());
    return 0;
  }

  if (*swp) {
    if (!outdir.empty()) cfg.output_dir = outdir;
    SweepRunOptions ro;
    ro.jobs = jobs;
    ro.use_cache = !no_cache;
    ro.quiet = quiet;
    const SweepSummary sum = run_sweep(cfg, ro);
    for (const auto& f : sum.files) fmt::print("{}\n", f.string());
    fmt::print("{}\n", sum.manifest.string());
    fmt::print(stderr, "{} rows, {} cached, {} with errors\n", sum.rows, sum.cached_rows, sum.failed_rows);
    return 0;
  }

  const AngularSpectrum spectrum = focus(cfg.beam, cfg.fill_factor);
  if (*foc) {
    const Vec3 p = parse_point(point);
    const FieldSample fs = focal_field(spectrum, p);
    json j{{"point_m", vec(p)}, {"E_V_per_m", cvec(fs.E)}, {"H_A_per_m", cvec(fs.H)},
           {"intensity_W_per_m2", norm2(fs.E) / (2.0 * cfg.beam.impedance())}};
    if (cfg.counterpropagating) j["note"] = "single beam field; the mirror beam is incoherent";
    fmt::print("{}\n", j.dump(2));
    return 0;
  }

  const SizeParameter sp = common.size(cfg);
  const MieTable table = mie_coefficients(sp, cfg.material.refractive_index);

  if (*mie) {
    std::string s = fmt::format("# x = {}, m = {}{:+}i, Q_ext = {}, Q_sca = {}, Q_abs = {}\nn,a_re,a_im,b_re,b_im\n",
                                sp.value, table.m.real(), table.m.imag(), table.Q_ext, table.Q_sca, table.Q_abs);
    for (int n = 1; n <= table.n_max; ++n)
      s += fmt::format("{},{},{},{},{}\n", n, table.a[n].real(), table.a[n].imag(), table.b[n].real(),
                       table.b[n].imag());
    emit(out, s);
    return 0;
  }

  if (*frc) {
    const Vec3 p = parse_point(point);
    const ForceVector f =
        cfg.counterpropagating ? counterprop_force(spectrum, table, p) : optical_force(spectrum, table, p);
    fmt::print("{}\n", json{{"kR", sp.value}, {"position_m", vec(p)}, {"force_N", vec(f.F)}, {"beam", f.beam_id}}.dump(2));
    return 0;
  }

  const double mass = mass_of(sp.radius, cfg.material.density);
  ScanConfig scan = cfg.scan;
  scan.counterpropagating = cfg.counterpropagating;

  if (*thm) {
    const NkTable nk = load_nk(resolve_data_path(cfg.material.nk_table_path));
    const ThermalReport t =
        thermal_report(spectrum, table, cfg.material, parse_point(point), cfg.counterpropagating, nk, cfg.thermal);
    fmt::print("{}\n", json{{"material", t.material},
                            {"kR", t.kR},
                            {"P_abs_W", t.P_abs},
                            {"P_bb_absorbed_W", t.P_bb_absorbed},
                            {"P_bb_emitted_W", t.P_bb_emitted},
                            {"T_K", t.T_solution},
                            {"balance_residual_W", t.balance_residual},
                            {"resonance", t.resonance_flag},
                            {"melting_exceeded", t.melting_exceeded},
                            {"runaway", t.runaway},
                            {"warnings", t.warnings}}
                           .dump(2));
    return 0;
  }

  const TrapReport tr = trap_report(spectrum, table, cfg.material, scan);
  if (*trp) {
    const double kT = constants::kB * constants::T_ambient;
    fmt::print("{}\n", json{{"material", tr.material},
                            {"beam", to_string(tr.beam.family)},
                            {"counterpropagating", tr.counterpropagating},
                            {"kR", tr.kR},
                            {"R_nm", tr.radius * 1e9},
                            {"mass_kg", tr.mass},
                            {"z_eq_um", tr.z_eq ? json(*tr.z_eq * 1e6) : json(nullptr)},
                            {"depth_kT", vec((1.0 / kT) * tr.depth)},
                            {"stiffness_N_per_m", vec(tr.stiffness)},
                            {"frequency_kHz", vec((1.0 / (2e3 * pi)) * tr.frequencies)},
                            {"trapped", tr.trapped}}
                           .dump(2));
    return 0;
  }

  if (*rec) {
    RecoilReport r;
    if (rayleigh) {
      const double I0 = local_intensity(spectrum, tr.evaluation_point, cfg.counterpropagating);
      r = rayleigh_recoil(I0, table, mass, Axis::x, tr.frequencies);
    } else {
      RecoilOptions ro = cfg.recoil;
      ro.counterpropagating = cfg.counterpropagating;
      r = mie_recoil(spectrum, table, tr.evaluation_point, mass, tr.frequencies, ro);
    }
    fmt::print("{}\n", json{{"kR", r.kR},
                            {"regime", to_string(r.regime)},
                            {"epsilon_J", r.epsilon},
                            {"Edot_W", vec(r.Edot)},
                            {"Gamma_per_s", vec(r.Gamma)},
                            {"frequency_kHz", vec((1.0 / (2e3 * pi)) * r.frequencies)},
                            {"evaluation_point_m", vec(tr.evaluation_point)},
                            {"warnings", r.warnings}}
                           .dump(2));
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return 2;
  } catch (const DomainError& e) {
    fmt::print(stderr, "invalid input: {}\n", e.what());
    return 2;
  } catch (const RangeError& e) {
    fmt::print(stderr, "out of range: {}\n", e.what());
    return 2;
  } catch (const DataFileError& e) {
    fmt::print(stderr, "data file error: {}\n", e.what());
    return 3;
  } catch (const ConsistencyError& e) {
    fmt::print(stderr, "numerical consistency failure: {}\n", e.what());
    return 4;
  } catch (const ConvergenceError& e) {
    fmt::print(stderr, "numerical consistency failure: {}\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
}
