#include "levtrap/thermal.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "levtrap/dynamics.hpp"

namespace levtrap {

NkTable::NkTable(std::vector<NkRow> rows, std::string source)
    : rows_(std::move(rows)), source_(std::move(source)) {
  if (rows_.empty()) throw DomainError("NkTable: no rows");
}

NkSample NkTable::at(double wavelength) const {
  if (wavelength <= rows_.front().wavelength)
    return {cplx(rows_.front().n, rows_.front().k), wavelength < rows_.front().wavelength};
  if (wavelength >= rows_.back().wavelength)
    return {cplx(rows_.back().n, rows_.back().k), wavelength > rows_.back().wavelength};
  const auto hi = std::upper_bound(rows_.begin(), rows_.end(), wavelength,
                                   [](double w, const NkRow& r) { return w < r.wavelength; });
  const auto lo = hi - 1;
  const double t = std::log(wavelength / lo->wavelength) / std::log(hi->wavelength / lo->wavelength);
  return {cplx(lo->n + t * (hi->n - lo->n), lo->k + t * (hi->k - lo->k)), false};
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& field, int line) {
  const std::string f = trim(field);
  char* end = nullptr;
  const double v = std::strtod(f.c_str(), &end);
  if (f.empty() || end != f.c_str() + f.size() || !std::isfinite(v))
    throw ParseError(fmt::format("nk line {}: '{}' is not a number", line, f), line);
  return v;
}

}  // namespace

NkTable parse_nk(std::istream& in, const std::string& source) {
  std::vector<NkRow> rows;
  std::string text;
  int line = 0;
  while (std::getline(in, text)) {
    ++line;
    const std::string t = trim(text);
    if (t.empty() || t[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(t);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() != 3)
      throw ParseError(fmt::format("nk line {}: expected 3 fields, found {}", line, fields.size()), line);
    NkRow r{parse_number(fields[0], line) * 1e-6, parse_number(fields[1], line), parse_number(fields[2], line)};
    if (!(r.wavelength > 0.0)) throw ParseError(fmt::format("nk line {}: wavelength must be > 0", line), line);
    if (!(r.n > 0.0)) throw ParseError(fmt::format("nk line {}: n must be > 0", line), line);
    if (r.k < 0.0) throw ParseError(fmt::format("nk line {}: negative k", line), line);
    if (!rows.empty() && !(r.wavelength > rows.back().wavelength))
      throw ParseError(fmt::format("nk line {}: wavelengths not strictly increasing", line), line);
    rows.push_back(r);
  }
  if (rows.empty()) throw ParseError("nk: no data rows in " + source, line);
  return NkTable(std::move(rows), source);
}

NkTable load_nk(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataFileError("cannot open nk table " + path);
  return parse_nk(in, path);
}

std::string data_directory() {
  if (const char* env = std::getenv("LEVTRAP_DATA_DIR"); env && *env) return env;
  return LEVTRAP_DATA_DIR;
}

std::string resolve_data_path(const std::string& path) {
  const std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(data_directory()) / p).string();
}

AbsorbedPower absorbed_power(const AngularSpectrum& spectrum, const MieTable& mie, const Vec3& position,
                             bool counterpropagating) {
  const ForceEngine engine(spectrum, mie);
  ScatteringEvaluation e = engine.evaluate(position);
  if (counterpropagating) {
    const ScatteringEvaluation m = engine.evaluate(mirror_z(position));
    e.P_abs_flux += m.P_abs_flux;
    e.P_abs_coeff += m.P_abs_coeff;
    e.P_ext_coeff += m.P_ext_coeff;
  }
  AbsorbedPower out{e.P_abs_flux, e.P_abs_coeff, e.P_ext_coeff};
  const double diff = std::abs(out.flux - out.coefficient);
  const double tol = 0.01 * std::max(std::abs(out.flux), std::abs(out.coefficient)) + 1e-11 * std::abs(out.extinction);
  if (diff > tol)
    throw ConsistencyError(fmt::format("absorbed_power: flux {:.6e} W and coefficient {:.6e} W disagree",
                                       out.flux, out.coefficient));
  return out;
}

namespace {

double planck_spectral(double omega, double T) {
  // hbar w^3 / (pi^2 c^2) / (e^{hbar w / kT} - 1)
  const double x = constants::hbar * omega / (constants::kB * T);
  if (x > 700.0) return 0.0;
  return constants::hbar * omega * omega * omega / (pi * pi * constants::c * constants::c) / std::expm1(x);
}

void make_grid(const BlackbodyGrid& g, std::vector<double>& lambda, std::vector<double>& weight) {
  if (!(g.lambda_min > 0.0 && g.lambda_max > g.lambda_min && g.nodes >= 2))
    throw DomainError("blackbody grid: need 0 < lambda_min < lambda_max and >= 2 nodes");
  const double a = std::log(g.lambda_min), b = std::log(g.lambda_max);
  const double h = (b - a) / (g.nodes - 1);
  lambda.resize(g.nodes);
  weight.resize(g.nodes);
  for (int i = 0; i < g.nodes; ++i) {
    lambda[i] = std::exp(a + i * h);
    // trapezoid in ln(lambda); dw = w d(ln lambda)
    const double omega = 2.0 * pi * constants::c / lambda[i];
    weight[i] = ((i == 0 || i == g.nodes - 1) ? 0.5 : 1.0) * h * omega;
  }
}

}  // namespace

BlackbodyExchange::BlackbodyExchange(const NkTable& nk, double radius, double medium_index, BlackbodyGrid grid) {
  if (!(radius > 0.0)) throw DomainError("blackbody: radius must be positive");
  auto sample = [&](double lambda) {
    const NkSample s = nk.at(lambda);
    return mie_coefficients(SizeParameter::from_radius(radius, lambda, medium_index), s.index / medium_index)
        .sigma_abs;
  };
  // Sharp short-wavelength resonances of high-index spheres need more than the base grid:
  // halve the spacing until a doubling moves the exchange by < 0.1% at 293, 1000 and 2000 K.
  make_grid(grid, lambda_, weight_);
  sigma_.resize(lambda_.size());
  for (std::size_t i = 0; i < lambda_.size(); ++i) sigma_[i] = sample(lambda_[i]);
  for (int level = 0; level < 6; ++level) {
    const std::vector<double> coarse_sigma = sigma_;
    const std::vector<double> coarse_lambda = lambda_, coarse_weight = weight_;
    BlackbodyGrid fine = grid;
    fine.nodes = 2 * grid.nodes - 1;
    make_grid(fine, lambda_, weight_);
    sigma_.resize(lambda_.size());
    for (std::size_t i = 0; i < lambda_.size(); ++i)
      sigma_[i] = (i % 2 == 0) ? coarse_sigma[i / 2] : sample(lambda_[i]);
    covered_.assign(lambda_.size(), true);
    double change = 0.0;
    for (double T : {293.0, 1000.0, 2000.0}) {
      double a = 0.0, b = power(T);
      for (std::size_t i = 0; i < coarse_lambda.size(); ++i)
        a += coarse_weight[i] * planck_spectral(2.0 * pi * constants::c / coarse_lambda[i], T) * coarse_sigma[i];
      if (b > 0.0) change = std::max(change, std::abs(a - b) / b);
    }
    grid = fine;
    if (change < 1e-3) break;
  }
  covered_.resize(lambda_.size());
  for (std::size_t i = 0; i < lambda_.size(); ++i) covered_[i] = !nk.at(lambda_[i]).extrapolated;
  if (nk.min_wavelength() > grid.lambda_min || nk.max_wavelength() < grid.lambda_max)
    warnings_.push_back(fmt::format("nk table {} covers {:.3g}-{:.3g} um; endpoint values held outside",
                                    nk.source(), nk.min_wavelength() * 1e6, nk.max_wavelength() * 1e6));
}

BlackbodyExchange::BlackbodyExchange(const std::function<double(double)>& sigma_abs, BlackbodyGrid grid) {
  make_grid(grid, lambda_, weight_);
  sigma_.resize(lambda_.size());
  covered_.assign(lambda_.size(), true);
  for (std::size_t i = 0; i < lambda_.size(); ++i) sigma_[i] = sigma_abs(lambda_[i]);
}

double BlackbodyExchange::power(double T) const {
  if (!(T > 0.0)) throw DomainError("blackbody_power: T must be > 0");
  double s = 0.0;
  for (std::size_t i = 0; i < lambda_.size(); ++i) {
    const double omega = 2.0 * pi * constants::c / lambda_[i];
    s += weight_[i] * planck_spectral(omega, T) * sigma_[i];
  }
  return s;
}

double BlackbodyExchange::uncovered_fraction(double T) const {
  double all = 0.0, out = 0.0;
  for (std::size_t i = 0; i < lambda_.size(); ++i) {
    const double omega = 2.0 * pi * constants::c / lambda_[i];
    const double w = weight_[i] * planck_spectral(omega, T);
    all += w;
    if (!covered_[i]) out += w;
  }
  return all > 0.0 ? out / all : 0.0;
}

double blackbody_power(const NkTable& nk, double radius, double T) {
  return BlackbodyExchange(nk, radius).power(T);
}

ThermalReport solve_temperature(double P_abs, const BlackbodyExchange& bb, const TemperatureSolve& opt) {
  if (!(P_abs >= 0.0)) throw DomainError("solve_temperature: P_abs must be >= 0");
  ThermalReport r;
  r.P_abs = P_abs;
  r.P_bb_absorbed = bb.power(opt.T_min);
  auto residual = [&](double T) { return P_abs + r.P_bb_absorbed - bb.power(T); };

  double lo = opt.T_min, hi = opt.T_max;
  if (P_abs == 0.0) {
    hi = lo;
  } else if (residual(hi) > 0.0) {
    r.runaway = true;
    r.T_solution = hi;
    r.P_bb_emitted = bb.power(hi);
    r.balance_residual = residual(hi);
    r.warnings.push_back(fmt::format("no balance below {:.0f} K", opt.T_max));
    return r;
  } else {
    // stop once the bracket is below tolerance and the residual is small
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double f = residual(mid);
      if (f > 0.0) lo = mid; else hi = mid;
      const double scale = std::max(P_abs, bb.power(hi));
      if (hi - lo < opt.tolerance && std::abs(residual(hi)) < opt.relative_residual * scale) break;
    }
  }
  r.T_solution = hi;
  r.P_bb_emitted = bb.power(hi);
  r.balance_residual = residual(hi);
  const double uncovered = bb.uncovered_fraction(r.T_solution);
  if (uncovered > 0.5)
    r.warnings.push_back(fmt::format("{:.0f}% of the thermal band at {:.0f} K lies outside the nk table",
                                     100.0 * uncovered, r.T_solution));
  for (const auto& w : bb.warnings()) r.warnings.push_back(w);
  return r;
}

ThermalReport thermal_report(const AngularSpectrum& spectrum, const MieTable& mie, const Material& material,
                             const Vec3& position, bool counterpropagating, const NkTable& nk,
                             const TemperatureSolve& opt) {
  const AbsorbedPower pa = absorbed_power(spectrum, mie, position, counterpropagating);
  const BlackbodyExchange bb(nk, mie.x.radius, spectrum.beam.medium_index);
  ThermalReport r = solve_temperature(std::max(pa.value(), 0.0), bb, opt);
  r.material = material.name;
  r.beam = spectrum.beam;
  r.kR = mie.x.value;
  r.melting_exceeded = std::isfinite(material.melting_point) && r.T_solution >= material.melting_point;
  const ResonanceList near = locate_resonances(mie.m, std::max(1e-3, r.kR - 0.2), r.kR + 0.2);
  for (const auto& res : near.entries)
    if (std::isfinite(res.width) && std::abs(res.kR_peak - r.kR) <= 0.5 * res.width) r.resonance_flag = true;
  return r;
}

}  // namespace levtrap
