#include "levtrap/recoil.hpp"

#include <fmt/format.h>

#include "levtrap/vswf.hpp"

namespace levtrap {

std::string to_string(RecoilRegime r) { return r == RecoilRegime::rayleigh ? "rayleigh" : "mie"; }

std::string to_string(RecoilWeighting w) {
  return w == RecoilWeighting::amplitude_derivative ? "amplitude_derivative" : "verbatim";
}

std::optional<RecoilWeighting> parse_weighting(const std::string& s) {
  if (s == "amplitude_derivative") return RecoilWeighting::amplitude_derivative;
  if (s == "verbatim") return RecoilWeighting::verbatim;
  return std::nullopt;
}

namespace {

Vec3 unit(Axis a) {
  Vec3 e{0, 0, 0};
  e[static_cast<int>(a)] = 1.0;
  return e;
}

Vec3 rhat_of(const QuadratureNode& n) {
  const double st = std::sin(n.theta);
  return {st * std::cos(n.phi), st * std::sin(n.phi), std::cos(n.theta)};
}

Vec3 gamma_of(const Vec3& Edot, const Vec3& omega) {
  Vec3 g;
  for (int j = 0; j < 3; ++j)
    g[j] = (omega[j] > 0.0) ? Edot[j] / (constants::hbar * omega[j]) : std::nan("");
  return g;
}

}  // namespace

Vec3 rayleigh_partition(Axis polarization) {
  const Vec3 p = unit(polarization);
  const SphereQuadrature q = sphere_quadrature(12, 12);
  Vec3 out{0, 0, 0};
  for (const auto& n : q.nodes) {
    const Vec3 r = rhat_of(n);
    const double c = dot(r, p);
    const double P = 3.0 / (8.0 * pi) * (1.0 - c * c);
    const Vec3 ki{0, 0, 1};
    for (int j = 0; j < 3; ++j) out[j] += n.weight * P * (ki[j] - r[j]) * (ki[j] - r[j]);
  }
  return out;
}

double local_intensity(const AngularSpectrum& spectrum, const Vec3& point, bool counterpropagating) {
  const double Z = spectrum.beam.impedance();
  auto one = [&](const Vec3& r) {
    const CVec3 E = focal_field(spectrum, r).E;
    return (std::norm(E[0]) + std::norm(E[1]) + std::norm(E[2])) / (2.0 * Z);
  };
  double I0 = one(point);
  if (counterpropagating) I0 += one(mirror_z(point));
  return I0;
}

RecoilReport rayleigh_recoil(double intensity, const MieTable& mie, double mass, Axis polarization,
                             const Vec3& frequencies) {
  if (!(mass > 0.0)) throw DomainError("rayleigh_recoil: mass must be positive");
  if (!(intensity >= 0.0)) throw DomainError("rayleigh_recoil: negative intensity");
  const double k = mie.x.wavenumber();
  const double omega = 2.0 * pi * constants::c / mie.x.wavelength_vacuum;
  RecoilReport rep;
  rep.kR = mie.x.value;
  rep.regime = RecoilRegime::rayleigh;
  rep.beam.wavelength_vacuum = mie.x.wavelength_vacuum;
  rep.beam.medium_index = mie.x.medium_index;
  if (rep.kR > 0.5) rep.warnings.push_back(fmt::format("kR = {:.3f} beyond the dipole regime", rep.kR));
  rep.epsilon = constants::hbar * constants::hbar * k * k / (2.0 * mass);
  rep.frequencies = frequencies;
  const Vec3 part = rayleigh_partition(polarization);
  const double photon_rate = intensity * mie.sigma_sca / (constants::hbar * omega);
  for (int j = 0; j < 3; ++j) {
    rep.delta_E[j] = rep.epsilon * part[j];
    rep.Edot[j] = photon_rate * rep.delta_E[j];
  }
  rep.Gamma = gamma_of(rep.Edot, frequencies);
  return rep;
}

namespace {

// int |dE/dx_j|^2 w dOmega for one beam, derivative by central difference with step h.
Vec3 derivative_power(const BeamProjector& proj, const MieTable& mie, const Vec3& d, double h,
                      const SphereQuadrature& grid, RecoilWeighting weighting) {
  const int L = mie.n_max;
  const double k = proj.spectrum().wavenumber();
  const double kz = proj.spectrum().beam.propagation_sign > 0 ? 1.0 : -1.0;
  Vec3 out{0, 0, 0};
  for (int j = 0; j < 3; ++j) {
    Vec3 dp = d, dm = d;
    dp[j] += h;
    dm[j] -= h;
    // common phase e^{-ik rhat.d} dropped; only the step phases remain
    const FarScatteringAmplitude fp = far_field(scatter(incident_coefficients(proj, dp, L), mie), grid);
    const FarScatteringAmplitude fm = far_field(scatter(incident_coefficients(proj, dm, L), mie), grid);
    double acc = 0.0;
    for (std::size_t n = 0; n < grid.nodes.size(); ++n) {
      const Vec3 r = rhat_of(grid.nodes[n]);
      const cplx sp = std::exp(-I * (k * h * r[j])), sm = std::conj(sp);
      const cplx Dt = (fp.E_theta[n] * sp - fm.E_theta[n] * sm) / (2.0 * h);
      const cplx Dp = (fp.E_phi[n] * sp - fm.E_phi[n] * sm) / (2.0 * h);
      double w = 1.0;
      if (weighting == RecoilWeighting::verbatim) {
        const double ki = (j == 2) ? kz : 0.0;
        w = (ki - r[j]) * (ki - r[j]);
      }
      acc += grid.nodes[n].weight * w * (std::norm(Dt) + std::norm(Dp));
    }
    out[j] = acc;
  }
  return out;
}

}  // namespace

RecoilReport mie_recoil(const AngularSpectrum& spectrum, const MieTable& mie, const Vec3& equilibrium,
                        double mass, const Vec3& frequencies, const RecoilOptions& opt) {
  if (!(mass > 0.0)) throw DomainError("mie_recoil: mass must be positive");
  if (std::abs(mie.x.wavelength_vacuum - spectrum.beam.wavelength_vacuum) >
      1e-9 * spectrum.beam.wavelength_vacuum)
    throw DomainError("mie_recoil: Mie table and beam use different wavelengths");
  const double lambda = spectrum.beam.wavelength_vacuum / spectrum.beam.medium_index;
  const double h = opt.step * lambda;
  const int L = mie.n_max;
  const SphereQuadrature grid = sphere_quadrature(2 * L + 4, 2 * L + 4);
  const BeamProjector proj(spectrum);

  auto total = [&](double step) {
    Vec3 s = derivative_power(proj, mie, equilibrium, step, grid, opt.weighting);
    if (opt.counterpropagating)
      s = s + derivative_power(proj, mie, mirror_z(equilibrium), step, grid, opt.weighting);
    return s;
  };
  const Vec3 coarse = total(h);
  const Vec3 fine = total(0.5 * h);
  const double scale = std::max({fine[0], fine[1], fine[2]});
  for (int j = 0; j < 3; ++j) {
    const double diff = std::abs(coarse[j] - fine[j]);
    if (diff > opt.richardson_tolerance * std::max(std::abs(fine[j]), 1e-9 * scale))
      throw StepSizeError(fmt::format("mie_recoil: steps {:.3e} and {:.3e} m differ by {:.2e} along {}",
                                      h, 0.5 * h, diff / std::abs(fine[j]), to_string(Axis(j))));
  }

  const double k = spectrum.wavenumber();
  const double omega = 2.0 * pi * constants::c / spectrum.beam.wavelength_vacuum;
  // eps0 c hbar / (4 m omega) generalised to a medium: hbar / (2 m omega) / (2 Z)
  const double pref = constants::hbar / (2.0 * mass * omega) / (2.0 * spectrum.beam.impedance());
  RecoilReport rep;
  rep.beam = spectrum.beam;
  rep.counterpropagating = opt.counterpropagating;
  rep.kR = mie.x.value;
  rep.regime = RecoilRegime::mie;
  rep.epsilon = constants::hbar * constants::hbar * k * k / (2.0 * mass);
  rep.frequencies = frequencies;
  for (int j = 0; j < 3; ++j) rep.Edot[j] = pref * fine[j];
  rep.delta_E = {NAN, NAN, NAN};
  rep.Gamma = gamma_of(rep.Edot, frequencies);
  return rep;
}

RecoilRatio recoil_ratio(const RecoilReport& a, const RecoilReport& b) {
  if (std::abs(a.beam.wavelength_vacuum - b.beam.wavelength_vacuum) > 1e-9 * a.beam.wavelength_vacuum)
    throw DomainError("recoil_ratio: reports use different wavelengths");
  RecoilRatio r;
  for (int j = 0; j < 3; ++j) {
    const double q = a.Gamma[j] / b.Gamma[j];
    r.defined[j] = std::isfinite(q) && b.Gamma[j] != 0.0;
    r.ratio[j] = r.defined[j] ? q : std::nan("");
  }
  return r;
}

}  // namespace levtrap
