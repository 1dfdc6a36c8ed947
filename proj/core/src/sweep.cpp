#include "levtrap/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <boost/algorithm/string.hpp>
#include <boost/version.hpp>
#include <fmt/format.h>
#include <gsl/gsl_version.h>
#include <nlohmann/json.hpp>
#include <openssl/opensslv.h>

namespace levtrap {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kT0 = constants::kB * constants::T_ambient;

bool same(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }
bool same(const Vec3& a, const Vec3& b) { return same(a[0], b[0]) && same(a[1], b[1]) && same(a[2], b[2]); }

double parse_field(const std::string& s, int line) {
  if (s == "nan") return std::nan("");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw ParseError(fmt::format("bad number '{}'", s), line);
  return v;
}

void add_flag(std::string& flags, const std::string& f) {
  if (!flags.empty()) flags += ';';
  flags += f;
}

std::string error_kind(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const StepSizeError&) {
    return "step_size";
  } catch (const ConsistencyError&) {
    return "consistency";
  } catch (const ConvergenceError&) {
    return "convergence";
  } catch (const RangeError&) {
    return "range";
  } catch (const DomainError&) {
    return "domain";
  } catch (...) {
    return "other";
  }
}

}  // namespace

bool ResultRow::operator==(const ResultRow& o) const {
  return same(kR, o.kR) && same(R_nm, o.R_nm) && same(z_eq_um, o.z_eq_um) && same(dU_kT, o.dU_kT) &&
         same(f_kHz, o.f_kHz) && same(Gamma_per_s, o.Gamma_per_s) && same(T_K, o.T_K) && flags == o.flags;
}

std::string format_number(double v) { return std::isnan(v) ? "nan" : fmt::format("{}", v); }

std::string to_csv(const ResultRow& r) {
  std::string s = format_number(r.kR) + ',' + format_number(r.R_nm) + ',' + format_number(r.z_eq_um);
  for (const Vec3* v : {&r.dU_kT, &r.f_kHz, &r.Gamma_per_s})
    for (double x : *v) s += ',' + format_number(x);
  s += ',' + format_number(r.T_K) + ',' + r.flags;
  return s;
}

ResultRow parse_result_line(const std::string& line) {
  std::vector<std::string> f;
  boost::split(f, line, boost::is_any_of(","));
  if (f.size() != 14) throw ParseError(fmt::format("expected 14 fields, got {}", f.size()), 0);
  ResultRow r;
  r.kR = parse_field(f[0], 0);
  r.R_nm = parse_field(f[1], 0);
  r.z_eq_um = parse_field(f[2], 0);
  for (int j = 0; j < 3; ++j) {
    r.dU_kT[j] = parse_field(f[3 + j], 0);
    r.f_kHz[j] = parse_field(f[6 + j], 0);
    r.Gamma_per_s[j] = parse_field(f[9 + j], 0);
  }
  r.T_K = parse_field(f[12], 0);
  r.flags = f[13];
  return r;
}

void write_results(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << result_header << '\n';
  for (const auto& r : rows) out << to_csv(r) << '\n';
}

std::vector<ResultRow> read_results(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != result_header) throw ParseError("missing or wrong CSV header", 1);
  std::vector<ResultRow> rows;
  int n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      rows.push_back(parse_result_line(line));
    } catch (const ParseError& e) {
      throw ParseError(e.what(), n);
    }
  }
  return rows;
}

void emit_resonance_annotations(std::ostream& out, cplx m, double kR_min, double kR_max,
                                const FamilyLabels& labels) {
  out << resonance_header << '\n';
  const ResonanceList list = locate_resonances(m, kR_min, kR_max);
  for (const auto& r : list.entries)
    out << labels.of(r.family) << ',' << (r.family == Family::electric ? "electric" : "magnetic") << ','
        << r.order << ',' << format_number(r.kR_peak) << ',' << format_number(r.width) << '\n';
}

RowResult compute_row(const SweepConfig& cfg, const AngularSpectrum& spectrum, double kR, const NkTable* nk) {
  RowResult out;
  ResultRow& row = out.row;
  row.kR = kR;
  const auto& beam = spectrum.beam;
  const SizeParameter sp = SizeParameter::from_kR(kR, beam.wavelength_vacuum, beam.medium_index);
  row.R_nm = sp.radius * 1e9;
  const double mass = mass_of(sp.radius, cfg.material.density);

  auto guarded = [&](const char* stage, auto&& fn) {
    try {
      fn();
      return true;
    } catch (...) {
      add_flag(row.flags, fmt::format("error={}:{}", stage, error_kind(std::current_exception())));
      return false;
    }
  };

  MieTable mie;
  if (!guarded("mie", [&] { mie = mie_coefficients(sp, cfg.material.refractive_index); })) return out;

  const bool want_trap = cfg.outputs.count(Output::trap) || cfg.outputs.count(Output::recoil) ||
                         cfg.outputs.count(Output::potential_profile);
  TrapReport tr;
  bool have_trap = false;
  if (want_trap) {
    have_trap = guarded("trap", [&] {
      ScanConfig sc = cfg.scan;
      sc.counterpropagating = cfg.counterpropagating;
      tr = trap_report(spectrum, mie, cfg.material, sc);
    });
    if (have_trap) {
      row.z_eq_um = tr.z_eq ? *tr.z_eq * 1e6 : std::nan("");
      for (int j = 0; j < 3; ++j) {
        row.dU_kT[j] = tr.depth[j] / kT0;
        row.f_kHz[j] = tr.frequencies[j] / (2.0 * pi) / 1e3;
      }
      add_flag(row.flags, tr.trapped ? "trapped" : "untrapped");
      if (!tr.z_eq) add_flag(row.flags, "no_z_eq");
      if (cfg.outputs.count(Output::potential_profile))
        for (const PotentialProfile* p : {&tr.axial, &tr.transverse_x, &tr.transverse_y})
          for (std::size_t i = 0; i < p->coordinate.size(); ++i)
            out.profile.push_back({kR, p->axis, p->coordinate[i] * 1e6, p->force[i], p->potential[i] / kT0});
    }
  }

  if (cfg.outputs.count(Output::recoil) && have_trap) {
    guarded("recoil", [&] {
      RecoilOptions ro = cfg.recoil;
      ro.counterpropagating = cfg.counterpropagating;
      const RecoilReport rep = mie_recoil(spectrum, mie, tr.evaluation_point, mass, tr.frequencies, ro);
      row.Gamma_per_s = rep.Gamma;
    });
  }

  if (cfg.outputs.count(Output::thermal) && nk) {
    guarded("thermal", [&] {
      const ThermalReport th =
          thermal_report(spectrum, mie, cfg.material, {0, 0, 0}, cfg.counterpropagating, *nk, cfg.thermal);
      row.T_K = th.T_solution;
      if (th.melting_exceeded) add_flag(row.flags, "melting");
      if (th.runaway) add_flag(row.flags, "runaway");
      if (th.resonance_flag) add_flag(row.flags, "resonance");
    });
  }
  return out;
}

fs::path default_cache_dir(const SweepConfig& cfg) {
  if (const char* env = std::getenv("LEVTRAP_CACHE_DIR"); env && *env) return env;
  return fs::path(cfg.output_dir) / ".cache";
}

namespace {

json num_json(double v) { return std::isnan(v) ? json(nullptr) : json(v); }
double json_num(const json& j) { return j.is_null() ? std::nan("") : j.get<double>(); }
json vec_json(const Vec3& v) { return json::array({num_json(v[0]), num_json(v[1]), num_json(v[2])}); }
Vec3 json_vec(const json& j) { return {json_num(j.at(0)), json_num(j.at(1)), json_num(j.at(2))}; }

json to_json(const RowResult& r) {
  json j;
  j["kR"] = num_json(r.row.kR);
  j["R_nm"] = num_json(r.row.R_nm);
  j["z_eq_um"] = num_json(r.row.z_eq_um);
  j["dU_kT"] = vec_json(r.row.dU_kT);
  j["f_kHz"] = vec_json(r.row.f_kHz);
  j["Gamma_per_s"] = vec_json(r.row.Gamma_per_s);
  j["T_K"] = num_json(r.row.T_K);
  j["flags"] = r.row.flags;
  json prof = json::array();
  for (const auto& p : r.profile)
    prof.push_back({p.kR, static_cast<int>(p.axis), p.coordinate_um, p.force_N, p.U_kT});
  j["profile"] = prof;
  return j;
}

RowResult from_json(const json& j) {
  RowResult r;
  r.row.kR = json_num(j.at("kR"));
  r.row.R_nm = json_num(j.at("R_nm"));
  r.row.z_eq_um = json_num(j.at("z_eq_um"));
  r.row.dU_kT = json_vec(j.at("dU_kT"));
  r.row.f_kHz = json_vec(j.at("f_kHz"));
  r.row.Gamma_per_s = json_vec(j.at("Gamma_per_s"));
  r.row.T_K = json_num(j.at("T_K"));
  r.row.flags = j.at("flags").get<std::string>();
  for (const auto& p : j.at("profile"))
    r.profile.push_back({p.at(0).get<double>(), static_cast<Axis>(p.at(1).get<int>()), p.at(2).get<double>(),
                         p.at(3).get<double>(), p.at(4).get<double>()});
  return r;
}

// Columns an output reports; the rest are written as nan.
ResultRow masked(const ResultRow& r, Output o) {
  ResultRow m;
  m.kR = r.kR;
  m.R_nm = r.R_nm;
  m.flags = r.flags;
  if (o == Output::trap || o == Output::recoil) {
    m.z_eq_um = r.z_eq_um;
    m.f_kHz = r.f_kHz;
  }
  if (o == Output::trap) m.dU_kT = r.dU_kT;
  if (o == Output::recoil) m.Gamma_per_s = r.Gamma_per_s;
  if (o == Output::thermal) m.T_K = r.T_K;
  return m;
}

struct Task {
  double kR;
  std::size_t spectrum;
  std::string key;
};

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw DataFileError(fmt::format("cannot write '{}'", p.string()));
  f << text;
}

}  // namespace

SweepSummary run_sweep(const SweepConfig& cfg, const SweepRunOptions& opt) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path outdir(cfg.output_dir);
  fs::create_directories(outdir);

  std::optional<NkTable> nk;
  if (cfg.outputs.count(Output::thermal)) nk = load_nk(resolve_data_path(cfg.material.nk_table_path));

  // one spectrum per wavelength; the kR grid in single-wavelength mode
  std::vector<SweepConfig> variants;
  std::vector<AngularSpectrum> spectra;
  std::vector<Task> tasks;
  const bool wl_mode = !cfg.wavelength_list.empty();
  if (wl_mode) {
    for (double wl : cfg.wavelength_list) {
      SweepConfig c = cfg;
      c.beam.wavelength_vacuum = wl;
      variants.push_back(c);
      spectra.push_back(focus(c.beam, cfg.fill_factor));
      const double kR = 2.0 * pi * cfg.beam.medium_index * cfg.radius / wl;
      tasks.push_back({kR, spectra.size() - 1, fmt::format("wl_{}", format_number(wl * 1e9))});
    }
  } else {
    variants.push_back(cfg);
    spectra.push_back(focus(cfg.beam, cfg.fill_factor));
    for (double kR : cfg.kR_grid.values()) tasks.push_back({kR, 0, fmt::format("kR_{}", format_number(kR))});
  }

  const std::string hash = cfg.hash();
  const bool caching = cfg.cache && opt.use_cache;
  const fs::path cache = (opt.cache_dir.empty() ? default_cache_dir(cfg) : opt.cache_dir) / hash;
  if (caching) fs::create_directories(cache);

  std::vector<RowResult> results(tasks.size());
  std::vector<WavelengthPoint> wl_points(wl_mode ? tasks.size() : 0);
  std::vector<char> from_cache(tasks.size(), 0);
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const Task& t = tasks[i];
      const fs::path cf = cache / (t.key + ".json");
      bool done = false;
      if (caching && fs::exists(cf)) {
        try {
          std::ifstream f(cf);
          const json j = json::parse(f);
          results[i] = from_json(j.at("row"));
          if (wl_mode) {
            const json& w = j.at("wavelength");
            wl_points[i] = {w.at(0).get<double>(), w.at(1).get<double>(), w.at(2).get<double>(),
                            json_vec(w.at(3))};
          }
          from_cache[i] = 1;
          done = true;
        } catch (const std::exception&) {
          done = false;  // unreadable entry: recompute
        }
      }
      if (!done) {
        const SweepConfig& c = variants[t.spectrum];
        const AngularSpectrum& spec = spectra[t.spectrum];
        results[i] = compute_row(c, spec, t.kR, nk ? &*nk : nullptr);
        if (wl_mode) {
          WavelengthPoint wp;
          wp.wavelength_nm = c.beam.wavelength_vacuum * 1e9;
          wp.kR = t.kR;
          wp.center_z_um = 0.0;
          try {
            const SizeParameter sp = SizeParameter::from_kR(t.kR, c.beam.wavelength_vacuum, c.beam.medium_index);
            const MieTable mie = mie_coefficients(sp, c.material.refractive_index);
            const ForceEngine engine(spec, mie);
            auto field = [&](const Vec3& r) {
              return c.counterpropagating ? engine.force(r) + mirror_z(engine.force(mirror_z(r))) : engine.force(r);
            };
            const double lambda = c.beam.wavelength_vacuum / c.beam.medium_index;
            const double h = c.scan.stiffness_step * lambda;
            for (int j = 0; j < 3; ++j) {
              Vec3 p{0, 0, 0}, m{0, 0, 0};
              p[j] = h;
              m[j] = -h;
              wp.stiffness[j] = -(field(p)[j] - field(m)[j]) / (2.0 * h);
            }
            // trap centre fixed at the focus: transverse profiles through it
            results[i].profile.erase(
                std::remove_if(results[i].profile.begin(), results[i].profile.end(),
                               [](const ProfilePoint& q) { return q.axis != Axis::z; }),
                results[i].profile.end());
            const double T = c.scan.transverse_half_window * lambda;
            for (Axis ax : {Axis::x, Axis::y}) {
              const PotentialProfile pr = potential_profile(field, ax, {0, 0, 0}, {-T, T}, c.scan.samples);
              for (std::size_t k = 0; k < pr.coordinate.size(); ++k)
                results[i].profile.push_back({t.kR, ax, pr.coordinate[k] * 1e6, pr.force[k], pr.potential[k] / kT0});
            }
          } catch (...) {
            add_flag(results[i].row.flags,
                     fmt::format("error=wavelength:{}", error_kind(std::current_exception())));
          }
          wl_points[i] = wp;
        }
        if (caching) {
          json j;
          j["row"] = to_json(results[i]);
          if (wl_mode) {
            const auto& w = wl_points[i];
            j["wavelength"] = json::array({w.wavelength_nm, w.kR, w.center_z_um, vec_json(w.stiffness)});
          }
          const fs::path tmp = cf.string() + fmt::format(".tmp{}", i);
          write_file(tmp, j.dump());
          fs::rename(tmp, cf);
        }
      }
      if (!opt.quiet) {
        std::lock_guard lock(log_mutex);
        fmt::print(stderr, "[{}/{}] kR = {} {}{}\n", i + 1, tasks.size(), format_number(t.kR),
                   results[i].row.flags, from_cache[i] ? " (cached)" : "");
      }
    }
  };

  unsigned jobs = opt.jobs ? opt.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(tasks.size(), 1)));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < jobs; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  // single writer, after all rows are in
  SweepSummary sum;
  sum.rows = tasks.size();
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    sum.cached_rows += from_cache[i];
    if (results[i].row.flags.find("error=") != std::string::npos) ++sum.failed_rows;
  }
  std::vector<ResultRow> rows;
  for (const auto& r : results) rows.push_back(r.row);

  for (Output o : {Output::trap, Output::recoil, Output::thermal}) {
    if (!cfg.outputs.count(o)) continue;
    std::ostringstream s;
    std::vector<ResultRow> m;
    for (const auto& r : rows) m.push_back(masked(r, o));
    write_results(s, m);
    const fs::path p = outdir / (to_string(o) + ".csv");
    write_file(p, s.str());
    sum.files.push_back(p);
  }
  if (cfg.outputs.count(Output::potential_profile) || wl_mode) {
    std::ostringstream s;
    s << profile_header << '\n';
    for (const auto& r : results)
      for (const auto& p : r.profile)
        s << format_number(p.kR) << ',' << to_string(p.axis) << ',' << format_number(p.coordinate_um) << ','
          << format_number(p.force_N) << ',' << format_number(p.U_kT) << '\n';
    const fs::path p = outdir / "profiles.csv";
    write_file(p, s.str());
    sum.files.push_back(p);
  }
  if (cfg.outputs.count(Output::resonances)) {
    std::ostringstream s;
    double lo = cfg.kR_grid.min, hi = cfg.kR_grid.max;
    if (wl_mode) {
      lo = hi = tasks.front().kR;
      for (const auto& t : tasks) lo = std::min(lo, t.kR), hi = std::max(hi, t.kR);
      lo = std::max(lo - 0.2, 1e-3);
      hi += 0.2;
    }
    emit_resonance_annotations(s, cfg.material.refractive_index, lo, hi, cfg.labels);
    const fs::path p = outdir / "resonances.csv";
    write_file(p, s.str());
    sum.files.push_back(p);
  }
  if (wl_mode) {
    std::ostringstream s;
    s << wavelength_header << '\n';
    for (const auto& w : wl_points)
      s << format_number(w.wavelength_nm) << ',' << format_number(w.kR) << ',' << format_number(w.center_z_um)
        << ',' << format_number(w.stiffness[0]) << ',' << format_number(w.stiffness[1]) << ','
        << format_number(w.stiffness[2]) << '\n';
    const fs::path p = outdir / "wavelength.csv";
    write_file(p, s.str());
    sum.files.push_back(p);
    sum.wavelength_points = wl_points;
  }

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json man;
  man["config_hash"] = hash;
  man["config"] = cfg.canonical();
  man["versions"] = {{"levtrap", LEVTRAP_VERSION},
                     {"gsl", GSL_VERSION},
                     {"fmt", FMT_VERSION},
                     {"boost", BOOST_LIB_VERSION},
                     {"nlohmann_json", fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR,
                                                   NLOHMANN_JSON_VERSION_MINOR, NLOHMANN_JSON_VERSION_PATCH)},
                     {"openssl", OPENSSL_VERSION_TEXT}};
  man["rows"] = sum.rows;
  man["cached_rows"] = sum.cached_rows;
  man["failed_rows"] = sum.failed_rows;
  man["jobs"] = jobs;
  man["cache_dir"] = caching ? cache.string() : "";
  json files = json::array();
  for (const auto& f : sum.files) files.push_back(f.filename().string());
  man["files"] = files;
  man["timings"] = {{"total_s", seconds}, {"per_row_s", tasks.empty() ? 0.0 : seconds / tasks.size()}};
  sum.manifest = outdir / "manifest.json";
  write_file(sum.manifest, man.dump(2) + "\n");
  return sum;
}

std::vector<RatioRow> compare(const std::vector<ResultRow>& a, const std::vector<ResultRow>& b) {
  std::vector<RatioRow> out;
  auto ratio = [](double x, double y) { return (std::isfinite(x) && std::isfinite(y) && y != 0.0) ? x / y : NAN; };
  for (const auto& ra : a) {
    auto it = std::find_if(b.begin(), b.end(), [&](const ResultRow& rb) { return std::abs(rb.kR - ra.kR) < 1e-9; });
    if (it == b.end()) continue;
    RatioRow r;
    r.kR = ra.kR;
    for (int j = 0; j < 3; ++j) {
      r.f_ratio[j] = ratio(ra.f_kHz[j], it->f_kHz[j]);
      r.Gamma_ratio[j] = ratio(ra.Gamma_per_s[j], it->Gamma_per_s[j]);
    }
    r.T_ratio = ratio(ra.T_K, it->T_K);
    out.push_back(r);
  }
  return out;
}

void write_ratios(std::ostream& out, const std::vector<RatioRow>& rows) {
  out << ratio_header << '\n';
  for (const auto& r : rows) {
    out << format_number(r.kR);
    for (double v : r.f_ratio) out << ',' << format_number(v);
    for (double v : r.Gamma_ratio) out << ',' << format_number(v);
    out << ',' << format_number(r.T_ratio) << '\n';
  }
}

}  // namespace levtrap
