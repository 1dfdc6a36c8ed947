#include "levtrap/dynamics.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <limits>

namespace levtrap {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

// Sum_m f_m . conj(g_{m+shift}) over |m| <= L with g stored for |m| <= G.
cplx pair_sum(const cplx* ft, const cplx* fp, int L, const cplx* gt, const cplx* gp, int G, int shift) {
  cplx s = 0.0;
  for (int m = -L; m <= L; ++m) {
    const int mg = m + shift;
    if (mg < -G || mg > G) continue;
    s += ft[m + L] * std::conj(gt[mg + G]) + fp[m + L] * std::conj(gp[mg + G]);
  }
  return s;
}

// F_m(theta) = 4 pi i sum_l (q X + p Z) for one Legendre table.
void synthesize(const VswfCoefficients& c, const detail::VshRow& row, std::vector<cplx>& ft,
                std::vector<cplx>& fp) {
  const int L = c.n_max;
  std::fill(ft.begin(), ft.end(), 0.0);
  std::fill(fp.begin(), fp.end(), 0.0);
  for (int l = 1; l <= L; ++l)
    for (int m = -l; m <= l; ++m) {
      const int j = VswfCoefficients::index(l, m);
      // X = (xt, i xp), Z = (-i xp, xt)
      ft[m + L] += c.q[j] * row.xt[j] - I * (c.p[j] * row.xp[j]);
      fp[m + L] += I * (c.q[j] * row.xp[j]) + c.p[j] * row.xt[j];
    }
  const cplx pref = 4.0 * pi * I;
  for (auto& v : ft) v *= pref;
  for (auto& v : fp) v *= pref;
}

}  // namespace

ForceEngine::ForceEngine(const AngularSpectrum& spectrum, const MieTable& mie)
    : projector_(std::make_shared<BeamProjector>(spectrum)), mie_(mie) {
  const double ks = spectrum.wavenumber(), km = mie.x.wavenumber();
  if (std::abs(ks - km) > 1e-9 * ks)
    throw DomainError("force engine: beam and Mie table use different wavelengths");
  sphere_ = detail::sphere_tables(mie.n_max, 2 * mie.n_max + 2);
}

ScatteringEvaluation ForceEngine::evaluate(const Vec3& r) const {
  const AngularSpectrum& sp = spectrum();
  const double lambda = sp.beam.wavelength_vacuum / sp.beam.medium_index;
  if (!(norm(r) <= 50.0 * lambda)) throw RangeError("force: position outside |r| <= 50 lambda");
  if (sp.beam.propagation_sign > 0) return evaluate_forward(r);
  ScatteringEvaluation e = evaluate_forward(mirror_z(r));
  e.force = mirror_z(e.force);
  return e;
}

ScatteringEvaluation ForceEngine::evaluate_forward(const Vec3& d) const {
  const AngularSpectrum& sp = spectrum();
  const int L = mie_.n_max;
  const double k = sp.wavenumber();
  const double Z = sp.beam.impedance();

  const CapSpectrum cs = projector_->cap_spectrum(d, L);
  const VswfCoefficients sc = scatter(projector_->coefficients(cs, d, L), mie_);
  const auto& cap = *cs.tables;
  const int G = cs.m_max;
  const int wG = 2 * G + 1;

  std::vector<cplx> ft(2 * L + 1), fp(2 * L + 1), gt(wG), gp(wG);
  // interference of scattered and outgoing incident waves over the cone
  cplx C0 = 0.0, Cz = 0.0, Cp = 0.0, Cm = 0.0;
  for (std::size_t i = 0; i < cap.theta.size(); ++i) {
    synthesize(sc, cap.vsh[i], ft, fp);
    for (int m = -G; m <= G; ++m) {
      gt[m + G] = -2.0 * pi * I * cs.theta_at(i, m);
      gp[m + G] = -2.0 * pi * I * cs.phi_at(i, m);
    }
    const double w = 2.0 * pi * cap.weight[i];
    const cplx h0 = pair_sum(ft.data(), fp.data(), L, gt.data(), gp.data(), G, 0);
    C0 += w * h0;
    Cz += w * cap.cos_t[i] * h0;
    Cp += w * cap.sin_t[i] * pair_sum(ft.data(), fp.data(), L, gt.data(), gp.data(), G, 1);
    Cm += w * cap.sin_t[i] * pair_sum(ft.data(), fp.data(), L, gt.data(), gp.data(), G, -1);
  }
  // scattered-scattered term over the full sphere
  double S0 = 0.0, Sz = 0.0;
  cplx Sp = 0.0;
  const auto& sph = *sphere_;
  for (std::size_t i = 0; i < sph.theta.size(); ++i) {
    synthesize(sc, sph.vsh[i], ft, fp);
    const double w = 2.0 * pi * sph.weight[i];
    const double h0 = pair_sum(ft.data(), fp.data(), L, ft.data(), fp.data(), L, 0).real();
    S0 += w * h0;
    Sz += w * sph.cos_t[i] * h0;
    Sp += w * sph.sin_t[i] * pair_sum(ft.data(), fp.data(), L, ft.data(), fp.data(), L, 1);
  }

  const double n_m = sp.beam.medium_index;
  const double flux = 1.0 / (2.0 * Z * k * k);  // W per unit |F|^2 sr
  const double pref = -(n_m / constants::c) * flux;
  const cplx Cx = 0.5 * (Cp + Cm), Cy = (Cp - Cm) / (2.0 * I);

  ScatteringEvaluation e;
  e.force = {pref * (Sp.real() + 2.0 * Cx.real()), pref * (Sp.imag() + 2.0 * Cy.real()),
             pref * (Sz + 2.0 * Cz.real())};
  e.P_sca_flux = flux * S0;
  e.P_ext_flux = -2.0 * flux * C0.real();
  e.P_abs_flux = e.P_ext_flux - e.P_sca_flux;

  double sca = 0.0, ext = 0.0, absb = 0.0;
  for (int l = 1; l <= L; ++l)
    for (int m = -l; m <= l; ++m) {
      const int j = VswfCoefficients::index(l, m);
      const double am = std::norm(sc.g_m[j]), ae = std::norm(sc.g_e[j]);
      sca += std::norm(sc.p[j]) + std::norm(sc.q[j]);
      ext += mie_.b[l].real() * am + mie_.a[l].real() * ae;
      absb += mie_.absorb_b[l] * am + mie_.absorb_a[l] * ae;
    }
  e.P_sca_coeff = 16.0 * pi * pi * flux * sca;
  e.P_ext_coeff = 16.0 * pi * pi * flux * ext;
  e.P_abs_coeff = 16.0 * pi * pi * flux * absb;
  return e;
}

ForceVector optical_force(const AngularSpectrum& spectrum, const MieTable& mie, const Vec3& position) {
  const ForceEngine engine(spectrum, mie);
  return {engine.force(position), position, to_string(spectrum.beam.family)};
}

ForceVector counterprop_force(const AngularSpectrum& spectrum, const MieTable& mie, const Vec3& position) {
  const ForceEngine engine(spectrum, mie);
  const Vec3 a = engine.force(position);
  const Vec3 b = mirror_z(engine.force(mirror_z(position)));
  return {a + b, position, to_string(spectrum.beam.family) + "+mirror"};
}

std::string to_string(Axis a) {
  switch (a) {
    case Axis::x: return "x";
    case Axis::y: return "y";
    case Axis::z: return "z";
  }
  return "?";
}

PotentialProfile potential_profile(const ForceField& field, Axis axis, const Vec3& through,
                                   std::pair<double, double> window, int samples) {
  if (samples < 201) throw DomainError("potential_profile: need at least 201 samples");
  if (!(window.second > window.first)) throw DomainError("potential_profile: empty window");
  const int a = static_cast<int>(axis);
  PotentialProfile out;
  out.axis = axis;
  out.through = through;
  out.coordinate.resize(samples);
  out.force.resize(samples);
  out.potential.assign(samples, 0.0);
  const double h = (window.second - window.first) / (samples - 1);
  for (int i = 0; i < samples; ++i) {
    Vec3 r = through;
    r[a] = window.first + i * h;
    out.coordinate[i] = r[a];
    const Vec3 f = field(r);
    if (!std::isfinite(f[a]))
      throw ConsistencyError(fmt::format("potential_profile: non-finite force at {} = {:.6e} m",
                                         to_string(axis), r[a]));
    out.force[i] = f[a];
  }
  for (int i = 1; i < samples; ++i)
    out.potential[i] = out.potential[i - 1] - 0.5 * (out.force[i - 1] + out.force[i]) * h;
  const double lo = *std::min_element(out.potential.begin(), out.potential.end());
  for (auto& u : out.potential) u -= lo;
  return out;
}

namespace {

// Barrier seen from sample i walking outwards until the potential stops rising.
double barrier(const std::vector<double>& U, int i, int dir) {
  int j = i;
  const int n = static_cast<int>(U.size());
  while (j + dir >= 0 && j + dir < n && U[j + dir] >= U[j]) j += dir;
  return U[j];
}

// Depth of the well at the center sample of a transverse profile; negative if
// the center is not a local minimum.
double transverse_depth(const PotentialProfile& p) {
  const auto& U = p.potential;
  const int c = static_cast<int>(U.size()) / 2;
  if (U[c - 1] < U[c] || U[c + 1] < U[c]) {
    const double lo = *std::min_element(U.begin(), U.end());
    return -(U[c] - lo);
  }
  return std::min(barrier(U, c, -1), barrier(U, c, +1)) - U[c];
}

}  // namespace

TrapReport analyze_trap(const ForceField& field, double wavelength, double mass, int downstream,
                        const ScanConfig& scan) {
  TrapReport rep;
  rep.scan = scan;
  rep.mass = mass;
  const double W = scan.axial_half_window * wavelength;
  rep.axial = potential_profile(field, Axis::z, {0, 0, 0}, {-W, W}, scan.samples);
  const auto& z = rep.axial.coordinate;
  const auto& Fz = rep.axial.force;
  const auto& U = rep.axial.potential;
  const int n = static_cast<int>(z.size());
  auto fz = [&](double zz) { return field({0, 0, zz})[2]; };

  double best_depth = -std::numeric_limits<double>::infinity();
  for (int i = 0; i + 1 < n; ++i) {
    if (!(Fz[i] > 0.0 && Fz[i + 1] <= 0.0)) continue;
    double lo = z[i], hi = z[i + 1];
    if (Fz[i + 1] == 0.0) lo = hi;
    while (hi - lo > scan.root_tolerance * wavelength) {
      const double mid = 0.5 * (lo + hi);
      if (fz(mid) > 0.0) lo = mid;
      else hi = mid;
    }
    const double zeq = 0.5 * (lo + hi);
    const double Ueq = U[i] - 0.5 * Fz[i] * (zeq - z[i]);
    const double depth = std::min(barrier(U, i, -1), barrier(U, i + 1, +1)) - Ueq;
    ++rep.equilibria_found;
    if (depth > best_depth) {
      best_depth = depth;
      rep.z_eq = zeq;
    }
  }

  if (rep.z_eq) {
    rep.depth[2] = best_depth;
    rep.evaluation_point = {0, 0, *rep.z_eq};
  } else {
    // no stable axial point: negative depth from the focus to the lowest point downstream
    const int c = n / 2;
    double lo = U[c];
    for (int i = 0; i < n; ++i)
      if (downstream == 0 || (downstream > 0 ? i >= c : i <= c)) lo = std::min(lo, U[i]);
    rep.depth[2] = -(U[c] - lo);
    rep.evaluation_point = {0, 0, 0};
  }

  const Vec3 p = rep.evaluation_point;
  const double T = scan.transverse_half_window * wavelength;
  rep.transverse_x = potential_profile(field, Axis::x, p, {-T, T}, scan.samples);
  rep.transverse_y = potential_profile(field, Axis::y, p, {-T, T}, scan.samples);
  rep.depth[0] = transverse_depth(rep.transverse_x);
  rep.depth[1] = transverse_depth(rep.transverse_y);

  const double h = scan.stiffness_step * wavelength;
  for (int j = 0; j < 3; ++j) {
    Vec3 a = p, b = p;
    a[j] += h;
    b[j] -= h;
    rep.stiffness[j] = -(field(a)[j] - field(b)[j]) / (2.0 * h);
    rep.frequencies[j] = rep.stiffness[j] > 0.0 ? std::sqrt(rep.stiffness[j] / mass) : nan;
  }
  rep.trapped = rep.z_eq.has_value() && rep.depth[0] > 0.0 && rep.depth[1] > 0.0 && rep.depth[2] > 0.0;
  return rep;
}

TrapReport trap_report(const AngularSpectrum& spectrum, const MieTable& mie, const Material& material,
                       const ScanConfig& scan) {
  material.validate();
  const auto engine = std::make_shared<ForceEngine>(spectrum, mie);
  ForceField field;
  int downstream = spectrum.beam.propagation_sign;
  if (scan.counterpropagating) {
    field = [engine](const Vec3& r) { return engine->force(r) + mirror_z(engine->force(mirror_z(r))); };
    downstream = 0;
  } else {
    field = [engine](const Vec3& r) { return engine->force(r); };
  }
  const double lambda = spectrum.beam.wavelength_vacuum / spectrum.beam.medium_index;
  TrapReport rep = analyze_trap(field, lambda, mass_of(mie.x.radius, material.density), downstream, scan);
  rep.material = material.name;
  rep.beam = spectrum.beam;
  rep.counterpropagating = scan.counterpropagating;
  rep.kR = mie.x.value;
  rep.radius = mie.x.radius;
  return rep;
}

}  // namespace levtrap
