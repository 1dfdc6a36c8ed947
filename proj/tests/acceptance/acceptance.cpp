// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.
// Usage: levtrap_acceptance [criterion-id ...]
#include <unistd.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "levtrap/sweep.hpp"
#include "oracles.hpp"

using namespace levtrap;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string id;
  std::function<Verdict()> run;
};

fs::path work_dir() {
  static const fs::path p = [] {
    fs::path d = fs::temp_directory_path() / fmt::format("levtrap-acceptance-{}", ::getpid());
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::vector<ResultRow> read_csv(const fs::path& p) {
  std::ifstream f(p);
  return read_results(f);
}

bool has_flag(const ResultRow& r, const std::string& f) {
  std::stringstream s(r.flags);
  std::string t;
  while (std::getline(s, t, ';'))
    if (t == f) return true;
  return false;
}

SweepConfig point_config(const std::string& family, const Material& m, double na, bool cp) {
  SweepConfig c;
  c.beam.family = *parse_family(family);
  c.beam.numerical_aperture = na;
  c.material = m;
  c.counterpropagating = cp;
  c.outputs = {Output::trap, Output::recoil};
  return c;
}

// Single points through the sweep row pipeline, memoised across criteria.
const ResultRow& point(const std::string& family, const Material& m, double kR, double na = 0.8, bool cp = false) {
  static std::map<std::string, ResultRow> memo;
  static std::map<std::string, AngularSpectrum> spectra;
  const std::string beam_key = fmt::format("{}|{}|{}", family, na, cp);
  const std::string key = fmt::format("{}|{}|{:.4f}", beam_key, m.name, kR);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  const SweepConfig c = point_config(family, m, na, cp);
  auto s = spectra.find(beam_key);
  if (s == spectra.end()) s = spectra.emplace(beam_key, focus(c.beam, c.fill_factor)).first;
  return memo[key] = compute_row(c, s->second, kR, nullptr).row;
}

// Full-range Si sweeps (trap + thermal) shared by several criteria.
const std::vector<ResultRow>& si_sweep(const std::string& family) {
  static std::map<std::string, std::vector<ResultRow>> memo;
  if (auto it = memo.find(family); it != memo.end()) return it->second;
  SweepConfig c;
  c.beam.family = *parse_family(family);
  c.material = silicon();
  c.kR_grid = {0.1, 2.2, 0.01};
  c.outputs = {Output::trap, Output::thermal};
  c.output_dir = (work_dir() / ("si_" + family)).string();
  SweepRunOptions o;
  o.use_cache = false;
  run_sweep(c, o);
  std::vector<ResultRow> trap = read_csv(fs::path(c.output_dir) / "trap.csv");
  const std::vector<ResultRow> thermal = read_csv(fs::path(c.output_dir) / "thermal.csv");
  for (std::size_t i = 0; i < trap.size(); ++i) trap[i].T_K = thermal.at(i).T_K;
  return memo[family] = trap;
}

std::vector<std::pair<double, double>> windows(const std::vector<ResultRow>& rows) {
  std::vector<std::pair<double, double>> w;
  bool open = false;
  for (const auto& r : rows) {
    if (has_flag(r, "trapped")) {
      if (!open) w.push_back({r.kR, r.kR});
      w.back().second = r.kR;
      open = true;
    } else {
      open = false;
    }
  }
  return w;
}

std::string show(const std::vector<std::pair<double, double>>& w) {
  std::string s;
  for (const auto& [a, b] : w) s += fmt::format("{}[{:.2f},{:.2f}]", s.empty() ? "" : " ", a, b);
  return s.empty() ? "none" : s;
}

// Every target interval matched edge-for-edge within tol, and no extra intervals.
bool windows_match(const std::vector<std::pair<double, double>>& found,
                   const std::vector<std::pair<double, double>>& target, double tol) {
  std::vector<bool> used(found.size(), false);
  for (const auto& [a, b] : target) {
    bool hit = false;
    for (std::size_t i = 0; i < found.size() && !hit; ++i)
      if (!used[i] && std::abs(found[i].first - a) <= tol + 1e-9 && std::abs(found[i].second - b) <= tol + 1e-9)
        used[i] = hit = true;
    if (!hit) return false;
  }
  return std::all_of(used.begin(), used.end(), [](bool u) { return u; });
}

// ---------------------------------------------------------------------------

Verdict optical_theorem() {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> ux(0.01, 20.0), un(1.01, 4.0), uk(0.0, 0.5);
  double worst_balance = 0.0, worst_forward = 0.0, worst_circle = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double x = ux(rng);
    const SizeParameter sp{x, x, 2.0 * pi, 1.0};
    const MieTable t = mie_coefficients(sp, cplx(un(rng), i % 2 ? uk(rng) : 0.0));
    worst_balance = std::max(worst_balance, std::abs(t.Q_ext - t.Q_sca - t.Q_abs) / t.Q_ext);
    const double q_fwd = 4.0 / (x * x) * scattering_amplitudes(t, 1.0).first.real();
    worst_forward = std::max(worst_forward, std::abs(q_fwd - t.Q_ext) / t.Q_ext);
    if (t.m.imag() == 0.0)
      for (int n = 1; n <= t.n_max; ++n)
        worst_circle = std::max({worst_circle, std::abs(std::abs(t.a[n] - 0.5) - 0.5),
                                 std::abs(std::abs(t.b[n] - 0.5) - 0.5)});
  }
  return {worst_balance <= 1e-10 && worst_circle <= 1e-10,
          fmt::format("max |Qext-Qsca-Qabs|/Qext = {:.2e}, unitarity = {:.2e}, forward-amplitude Qext = {:.2e}",
                      worst_balance, worst_circle, worst_forward)};
}

Verdict rayleigh_force() {
  BeamSpec b;
  const AngularSpectrum s = focus(b);
  const Material m = silica();
  const MieTable t = mie_coefficients(SizeParameter::from_kR(0.1, b.wavelength_vacuum), m.refractive_index);
  const ForceEngine eng(s, t);
  const double w0 = b.wavelength_vacuum / (pi * b.numerical_aperture);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 50;) {
    const Vec3 r{u(rng), u(rng), u(rng)};
    if (norm(r) > 1.0) continue;
    ++i;
    const Vec3 p = (0.5 * w0) * r;
    const Vec3 F = eng.force(p);
    const Vec3 D = oracle::dipole_force(s, t.x.radius, m.refractive_index, p);
    for (int j = 0; j < 3; ++j) worst = std::max(worst, std::abs(F[j] - D[j]) / norm(D));
  }
  return {worst <= 0.02, fmt::format("50 points within w0/2, max |F_mie,j - F_dip,j| / |F_dip| = {:.4f}", worst)};
}

Verdict recoil_partition() {
  const Vec3 p = rayleigh_partition(Axis::x);
  const Vec3 target{0.2, 0.4, 1.4};
  double err = 0.0;
  for (int j = 0; j < 3; ++j) err = std::max(err, std::abs(p[j] - target[j]));
  const double sum_err = std::abs(p[0] + p[1] + p[2] - 2.0);
  const MieTable t = mie_coefficients(SizeParameter::from_kR(0.1, 1550e-9), silica().refractive_index);
  const RecoilReport r = rayleigh_recoil(1e12, t, mass_of(t.x.radius, silica().density), Axis::x);
  const double rep_err = std::abs(r.delta_E[0] + r.delta_E[1] + r.delta_E[2] - 2.0 * r.epsilon) / r.epsilon;
  return {err <= 1e-6 && sum_err <= 1e-6 && rep_err <= 1e-6,
          fmt::format("dE/eps = ({:.7f}, {:.7f}, {:.7f}), sum = {:.7f}", p[0], p[1], p[2], p[0] + p[1] + p[2])};
}

Verdict recoil_crossover() {
  BeamSpec b;
  const AngularSpectrum s = focus(b);
  const Material m = silica();
  const MieTable t = mie_coefficients(SizeParameter::from_kR(0.1, b.wavelength_vacuum), m.refractive_index);
  const TrapReport tr = trap_report(s, t, m, {});
  const RecoilReport mie = mie_recoil(s, t, tr.evaluation_point, tr.mass, tr.frequencies);
  const RecoilReport ray =
      rayleigh_recoil(local_intensity(s, tr.evaluation_point, false), t, tr.mass, Axis::x, tr.frequencies);
  Vec3 q;
  bool ok = true;
  for (int j = 0; j < 3; ++j) {
    q[j] = mie.Gamma[j] / ray.Gamma[j];
    ok = ok && std::abs(q[j] - 1.0) <= 0.05;
  }
  // same comparison with a weakly focused beam, where the plane-wave dipole picture holds
  b.numerical_aperture = 0.05;
  const AngularSpectrum sp = focus(b);
  const Vec3 w{1e5, 1e5, 1e5};
  const RecoilReport mp = mie_recoil(sp, t, {0, 0, 0}, tr.mass, w);
  const RecoilReport rp = rayleigh_recoil(local_intensity(sp, {0, 0, 0}, false), t, tr.mass, Axis::x, w);
  return {ok, fmt::format("Gamma_mie/Gamma_rayleigh at NA 0.8 = ({:.3f}, {:.3f}, {:.3f}); at NA 0.05 = ({:.4f}, "
                          "{:.4f}, {:.4f})",
                          q[0], q[1], q[2], mp.Gamma[0] / rp.Gamma[0], mp.Gamma[1] / rp.Gamma[1],
                          mp.Gamma[2] / rp.Gamma[2])};
}

Verdict trapping_windows() {
  const auto avb = windows(si_sweep("AVB")), rvb = windows(si_sweep("RVB"));
  const bool a = windows_match(avb, {{1.30, 1.36}, {1.54, 1.59}}, 0.05);
  const bool r = windows_match(rvb, {{0.40, 0.74}, {1.35, 1.46}}, 0.05);
  return {a && r, fmt::format("AVB {} (target [1.30,1.36] [1.54,1.59]) {}; RVB {} (target [0.40,0.74] [1.35,1.46]) {}",
                              show(avb), a ? "ok" : "mismatch", show(rvb), r ? "ok" : "mismatch")};
}

Verdict gb_breakdown() {
  const auto& rows = si_sweep("GB");
  double last = NAN;
  for (const auto& r : rows)
    if (has_flag(r, "trapped")) last = r.kR;
  double first_lost = NAN;
  for (const auto& r : rows)
    if (r.kR > 0.3 && !has_flag(r, "trapped")) {
      first_lost = r.kR;
      break;
    }
  const bool ok = std::abs(last - 0.8) <= 0.05 + 1e-9;
  return {ok, fmt::format("GB windows {}; last trapped kR = {:.2f}, first untrapped above 0.3 = {:.2f} (target 0.80 "
                          "+/- 0.05)",
                          show(windows(rows)), last, first_lost)};
}

// Ratios only mean something where both rows sit at an axial equilibrium.
bool equilibrium(const ResultRow& r) { return std::isfinite(r.z_eq_um); }

// Reduction Gamma_ref,z / Gamma_test,z at kR, and the best value within kR +/- 0.05.
struct Reduction {
  Vec3 at{NAN, NAN, NAN};
  double best = NAN, best_kR = NAN;
  std::string missing;  // which side lacks an equilibrium at kR
};

Reduction reduction(const std::function<const ResultRow&(double)>& test, const std::function<const ResultRow&(double)>& ref,
                    double kR, int axis, bool inverse = false) {
  Reduction out;
  auto ratio = [&](double k, int j) {
    if (!equilibrium(test(k)) || !equilibrium(ref(k))) return std::nan("");
    const double a = test(k).Gamma_per_s[j], b = ref(k).Gamma_per_s[j];
    return inverse ? a / b : b / a;
  };
  if (!equilibrium(test(kR))) out.missing += " test";
  if (!equilibrium(ref(kR))) out.missing += " reference";
  if (!out.missing.empty()) out.missing = " (no z_eq:" + out.missing + ")";
  for (int j = 0; j < 3; ++j) out.at[j] = ratio(kR, j);
  for (int i = -5; i <= 5; ++i) {
    const double k = std::round((kR + 0.01 * i) * 100.0) / 100.0;
    const double v = ratio(k, axis);
    if (std::isfinite(v) && !(v <= out.best)) out.best = v, out.best_kR = k;
  }
  return out;
}

Verdict headline_ratios() {
  const Material si = silicon(), sio2 = silica();
  const Reduction rvb = reduction([&](double k) -> const ResultRow& { return point("RVB", si, k); },
                                  [&](double k) -> const ResultRow& { return point("GB", sio2, k); }, 1.39, 2);
  const Reduction avb = reduction([&](double k) -> const ResultRow& { return point("AVB", si, k); },
                                  [&](double k) -> const ResultRow& { return point("GB", sio2, k); }, 1.36, 2);
  const Reduction cp = reduction([&](double k) -> const ResultRow& { return point("AVB", si, k, 0.4, true); },
                                 [&](double k) -> const ResultRow& { return point("GB", sio2, k, 0.4, true); }, 1.97, 2);
  const Reduction low = reduction([&](double k) -> const ResultRow& { return point("RVB", sio2, k); },
                                  [&](double k) -> const ResultRow& { return point("GB", sio2, k); }, 0.40, 2, true);
  const double cp_best_axis = std::max({cp.at[0], cp.at[1], cp.at[2]});
  auto within = [](double v, double target, double tol) { return std::isfinite(v) && std::abs(v / target - 1.0) <= tol; };
  const bool ok1 = within(rvb.at[2], 9.2, 0.2), ok2 = within(avb.at[2], 6.25, 0.2),
             ok3 = within(cp_best_axis, 10.6, 0.2), ok4 = within(low.at[2], 0.34, 0.15);
  return {ok1 && ok2 && ok3 && ok4,
          fmt::format("Si-RVB/SiO2-GB z reduction at 1.39 = {:.3g}{} (9.2; best in +/-0.05: {:.3g} at {:.2f}) {}; "
                      "Si-AVB/SiO2-GB at 1.36 = {:.3g}{} (6.25; best {:.3g} at {:.2f}) {}; "
                      "counterprop NA 0.4 AVB at 1.97 = ({:.3g}, {:.3g}, {:.3g}){} (10.6; best z {:.3g} at {:.2f}) {}; "
                      "SiO2 RVB/GB z Gamma at 0.40 = {:.3g}{} (0.34) {}",
                      rvb.at[2], rvb.missing, rvb.best, rvb.best_kR, ok1 ? "ok" : "off", avb.at[2], avb.missing,
                      avb.best, avb.best_kR, ok2 ? "ok" : "off", cp.at[0], cp.at[1], cp.at[2], cp.missing, cp.best,
                      cp.best_kR, ok3 ? "ok" : "off", low.at[2], low.missing, ok4 ? "ok" : "off")};
}

Verdict frequency_ratio() {
  const Material sio2 = silica();
  double best = NAN, best_kR = NAN;
  int undefined = 0;
  std::string at138;
  for (int i = -5; i <= 5; ++i) {
    const double k = std::round((1.38 + 0.01 * i) * 100.0) / 100.0;
    const ResultRow &a = point("RVB", sio2, k), &b = point("GB", sio2, k);
    const double v = equilibrium(a) && equilibrium(b) ? a.f_kHz[2] / b.f_kHz[2] : NAN;
    if (i == 0) at138 = fmt::format("{:.3g}", v);
    if (!std::isfinite(v)) ++undefined;
    else if (!(v <= best)) best = v, best_kR = k;
  }
  const bool ok = std::isfinite(best) && std::abs(best / 2.56 - 1.0) <= 0.15;
  return {ok, fmt::format("SiO2 RVB/GB Omega_z ratio over kR 1.33-1.43: peak {:.3g} at {:.2f}, at 1.38 = {} "
                          "(target 2.56 +/- 15%); {} of 11 points without an equilibrium in both beams (GB z_eq at 1.38: {})",
                          best, best_kR, at138, undefined,
                          equilibrium(point("GB", sio2, 1.38)) ? "present" : "none")};
}

Verdict equilibrium_position() {
  const ResultRow& r = point("AVB", silicon(), 1.56);
  const bool ok = std::isfinite(r.z_eq_um) && std::abs(r.z_eq_um + 1.3) <= 0.2;
  return {ok, fmt::format("AVB Si kR 1.56: z_eq = {:.3f} um (target -1.3 +/- 0.2), flags {}", r.z_eq_um, r.flags)};
}

Verdict wavelength_tuning() {
  SweepConfig c;
  c.beam.family = BeamFamily::azimuthal;
  c.material = silicon();
  c.radius = 385e-9;
  for (int nm = 1550; nm <= 1570; ++nm) c.wavelength_list.push_back(nm * 1e-9);
  c.outputs = {Output::trap};
  c.output_dir = (work_dir() / "wavelength").string();
  SweepRunOptions o;
  o.use_cache = false;
  const SweepSummary s = run_sweep(c, o);
  const auto& w = s.wavelength_points;
  bool monotone = true, sign_change = false;
  for (std::size_t i = 1; i < w.size(); ++i) {
    monotone = monotone && w[i].stiffness[0] < w[i - 1].stiffness[0];
    sign_change = sign_change || (w[i].stiffness[0] > 0.0) != (w[i - 1].stiffness[0] > 0.0);
  }
  return {sign_change, fmt::format("k_x at focus: {:.3e} N/m at {:.0f} nm -> {:.3e} N/m at {:.0f} nm; sign change {}, "
                                   "strictly decreasing {}",
                                   w.front().stiffness[0], w.front().wavelength_nm, w.back().stiffness[0],
                                   w.back().wavelength_nm, sign_change ? "yes" : "no", monotone ? "yes" : "no")};
}

Verdict thermal_alignment() {
  const Material si = silicon();
  const ResonanceList res = locate_resonances(si.refractive_index, 0.05, 2.3);
  const std::map<std::string, std::vector<Family>> relevant{
      {"GB", {Family::electric, Family::magnetic}}, {"AVB", {Family::magnetic}}, {"RVB", {Family::electric}}};
  bool ok = true;
  std::string detail;
  for (const std::string fam : {"GB", "AVB", "RVB"}) {
    const auto& rows = si_sweep(fam);
    int maxima = 0, aligned = 0;
    std::string misses;
    for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
      if (!(rows[i].T_K > rows[i - 1].T_K && rows[i].T_K > rows[i + 1].T_K)) continue;
      ++maxima;
      double d = INFINITY;
      for (const auto& r : res.entries)
        for (Family f : relevant.at(fam))
          if (r.family == f) d = std::min(d, std::abs(r.kR_peak - rows[i].kR));
      if (d <= 0.03 + 1e-9) ++aligned;
      else misses += fmt::format(" {:.2f}", rows[i].kR);
    }
    double hottest = 0.0;
    for (const auto& r : rows)
      if (has_flag(r, "trapped")) hottest = std::max(hottest, r.T_K);
    const bool fam_ok = maxima > 0 && aligned == maxima && hottest < 1680.0;
    ok = ok && fam_ok;
    detail += fmt::format("{}{}: {}/{} maxima on resonances{}{}, max T in windows {:.0f} K", detail.empty() ? "" : "; ",
                          fam, aligned, maxima, misses.empty() ? "" : " (off:", misses.empty() ? "" : misses + ")",
                          hottest);
  }
  return {ok, detail};
}

Verdict determinism() {
  SweepConfig c;
  c.material = silicon();
  c.kR_grid = {0.5, 0.54, 0.01};
  c.outputs = {Output::trap, Output::recoil, Output::thermal, Output::resonances, Output::potential_profile};
  SweepRunOptions o;
  o.use_cache = false;
  c.output_dir = (work_dir() / "det_a").string();
  o.jobs = 1;
  run_sweep(c, o);
  c.output_dir = (work_dir() / "det_b").string();
  o.jobs = 3;
  const SweepSummary s = run_sweep(c, o);
  int same = 0;
  for (const auto& f : s.files)
    same += slurp(f) == slurp(work_dir() / "det_a" / f.filename());
  return {same == static_cast<int>(s.files.size()),
          fmt::format("{}/{} CSV files byte-identical across two runs (1 and 3 workers)", same, s.files.size())};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {"optical_theorem", optical_theorem},   {"rayleigh_force", rayleigh_force},
      {"recoil_partition", recoil_partition}, {"recoil_crossover", recoil_crossover},
      {"trapping_windows", trapping_windows}, {"gb_breakdown", gb_breakdown},
      {"headline_ratios", headline_ratios},   {"frequency_ratio", frequency_ratio},
      {"equilibrium_position", equilibrium_position}, {"wavelength_tuning", wavelength_tuning},
      {"thermal_alignment", thermal_alignment}, {"determinism", determinism},
  };
  std::vector<std::string> only(argv + 1, argv + argc);
  int failed = 0, ran = 0;
  for (const auto& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, fmt::format("exception: {}", e.what())};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    fmt::print("{} {:<22} {} [{:.1f} s]\n", v.pass ? "PASS" : "FAIL", c.id, v.detail, sec);
    std::fflush(stdout);
    failed += !v.pass;
    ++ran;
  }
  fmt::print("{} of {} criteria passed\n", ran - failed, ran);
  fs::remove_all(work_dir());
  return failed ? 1 : 0;
}
