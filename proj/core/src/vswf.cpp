#include "levtrap/vswf.hpp"

#include <fmt/core.h>

#include <algorithm>

namespace levtrap {

namespace {

cplx ipow(int n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return 1.0;
    case 1: return I;
    case 2: return -1.0;
    default: return -I;
  }
}

int round_up8(int n) { return 8 * ((n + 7) / 8); }

}  // namespace

namespace detail {

VshRow::VshRow(int l_max, double theta) {
  const LegendreTable t(l_max, theta);
  const int size = VswfCoefficients::size_for(l_max);
  xt.resize(size);
  xp.resize(size);
  for (int l = 1; l <= l_max; ++l)
    for (int m = -l; m <= l; ++m) {
      const VshPair v = vsh(t, l, m);
      const int j = VswfCoefficients::index(l, m);
      xt[j] = v.x_theta.real();
      xp[j] = v.x_phi.imag();
    }
}

std::shared_ptr<const SphereTables> sphere_tables(int l_max, int order) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const SphereTables>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{l_max, order}];
  if (!slot) {
    auto t = std::make_shared<SphereTables>();
    t->l_max = l_max;
    const GaussRule g = gauss_legendre(order, -1.0, 1.0);
    for (int i = 0; i < order; ++i) {
      const double th = std::acos(g.x[i]);
      t->theta.push_back(th);
      t->weight.push_back(g.w[i]);
      t->cos_t.push_back(g.x[i]);
      t->sin_t.push_back(std::sin(th));
      t->vsh.emplace_back(l_max, th);
    }
    slot = t;
  }
  return slot;
}

}  // namespace detail

FarScatteringAmplitude FarScatteringAmplitude::referenced_to_focus() const {
  FarScatteringAmplitude out = *this;
  for (std::size_t j = 0; j < grid.nodes.size(); ++j) {
    const auto& n = grid.nodes[j];
    const double st = std::sin(n.theta);
    const Vec3 rhat{st * std::cos(n.phi), st * std::sin(n.phi), std::cos(n.theta)};
    const cplx ph = std::exp(-I * k * dot(rhat, origin));
    out.E_theta[j] *= ph;
    out.E_phi[j] *= ph;
  }
  out.origin = {0, 0, 0};
  return out;
}

BeamProjector::BeamProjector(const AngularSpectrum& spectrum)
    : spectrum_(spectrum), harmonics_(spectrum.harmonics()) {}

int BeamProjector::default_order(const Vec3& d, int n_max) const {
  const double k = spectrum_.wavenumber();
  const double kd = k * (std::abs(d[2]) + std::hypot(d[0], d[1]));
  return round_up8(24 + static_cast<int>(std::ceil(0.6 * (n_max + kd))));
}

std::shared_ptr<const detail::CapTables> BeamProjector::tables(int order, int l_max) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto& slot = cache_[{order, l_max}];
  if (!slot) {
    auto t = std::make_shared<detail::CapTables>();
    t->l_max = l_max;
    const GaussRule g = gauss_legendre(order, 0.0, spectrum_.theta_max);
    for (int i = 0; i < order; ++i) {
      const double th = g.x[i];
      t->theta.push_back(th);
      t->weight.push_back(g.w[i] * std::sin(th));
      t->cos_t.push_back(std::cos(th));
      t->sin_t.push_back(std::sin(th));
      t->envelope.push_back(spectrum_.envelope(th));
      t->vsh.emplace_back(l_max, th);
    }
    slot = t;
  }
  return slot;
}

CapSpectrum BeamProjector::cap_spectrum(const Vec3& d, int n_max, int order) const {
  if (order <= 0) order = default_order(d, n_max);
  CapSpectrum cs;
  cs.tables = tables(order, n_max);
  const int M = n_max + 1;
  cs.m_max = M;
  const int width = 2 * M + 1;
  const auto& t = *cs.tables;
  const std::size_t nt = t.theta.size();
  cs.a_theta.assign(nt * width, 0.0);
  cs.a_phi.assign(nt * width, 0.0);

  const double k = spectrum_.wavenumber();
  const double rho = std::hypot(d[0], d[1]);
  const double phid = rho > 0.0 ? std::atan2(d[1], d[0]) : 0.0;
  const int nb = M + 1;  // |m - c| <= M + 1
  std::vector<cplx> rot(2 * nb + 1);
  for (int n = -nb; n <= nb; ++n) rot[n + nb] = ipow(n) * std::exp(-I * (n * phid));
  std::vector<cplx> pw(2 * nb + 1);

  for (std::size_t i = 0; i < nt; ++i) {
    const std::vector<double> J = bessel_j_row(nb, k * rho * t.sin_t[i]);
    for (int n = -nb; n <= nb; ++n) {
      const double jn = n >= 0 ? J[n] : ((-n) % 2 ? -J[-n] : J[-n]);
      pw[n + nb] = rot[n + nb] * jn;
    }
    const cplx base = t.envelope[i] * std::exp(I * (k * d[2] * t.cos_t[i]));
    for (int m = -M; m <= M; ++m) {
      cplx st = 0.0, sp = 0.0;
      for (const auto& h : harmonics_) {
        const int n = m - h.c;
        if (n < -nb || n > nb) continue;
        st += h.u * pw[n + nb];
        sp += h.v * pw[n + nb];
      }
      cs.a_theta[i * width + m + M] = base * st;
      cs.a_phi[i * width + m + M] = base * sp;
    }
  }
  return cs;
}

VswfCoefficients BeamProjector::project(const Vec3& d, int n_max, int order) const {
  return coefficients(cap_spectrum(d, n_max, order), d, n_max);
}

VswfCoefficients BeamProjector::coefficients(const CapSpectrum& cs, const Vec3& d, int n_max) const {
  const auto& t = *cs.tables;
  VswfCoefficients c;
  c.origin = d;
  c.n_max = n_max;
  c.k = spectrum_.wavenumber();
  const int size = VswfCoefficients::size_for(n_max);
  c.g_e.assign(size, 0.0);
  c.g_m.assign(size, 0.0);
  c.p.assign(size, 0.0);
  c.q.assign(size, 0.0);
  for (std::size_t i = 0; i < t.theta.size(); ++i) {
    const double w = 2.0 * pi * t.weight[i];
    const auto& row = t.vsh[i];
    for (int l = 1; l <= n_max; ++l) {
      for (int m = -l; m <= l; ++m) {
        const cplx at = w * cs.theta_at(i, m), ap = w * cs.phi_at(i, m);
        const int j = VswfCoefficients::index(l, m);
        // conj(X) = (xt, -i xp), conj(Z) = (i xp, xt)
        c.g_m[j] += at * row.xt[j] - I * (ap * row.xp[j]);
        c.g_e[j] += I * (at * row.xp[j]) + ap * row.xt[j];
      }
    }
  }
  return c;
}

VswfCoefficients incident_coefficients(const BeamProjector& proj, const Vec3& origin, int n_max) {
  if (proj.spectrum().beam.propagation_sign > 0) return proj.project(origin, n_max);
  // z-mirror: g_m -> -(-1)^{l+m} g_m(M d), g_e -> (-1)^{l+m} g_e(M d)
  VswfCoefficients c = proj.project(mirror_z(origin), n_max);
  c.origin = origin;
  for (int l = 1; l <= n_max; ++l)
    for (int m = -l; m <= l; ++m) {
      const int j = VswfCoefficients::index(l, m);
      const double s = ((l + m) % 2 == 0) ? 1.0 : -1.0;
      c.g_m[j] *= -s;
      c.g_e[j] *= s;
    }
  return c;
}

VswfCoefficients beam_shape_coefficients(const AngularSpectrum& spectrum, const Vec3& origin,
                                         int n_max, double particle_radius) {
  const double k = spectrum.wavenumber();
  const double rmax = particle_radius + norm(origin);
  const int required = static_cast<int>(std::ceil(k * rmax)) + 8;
  if (n_max < required)
    throw ConvergenceError(fmt::format(
        "beam_shape_coefficients: n_max = {} below the required {} for k(R + |origin|) = {:.3f}",
        n_max, required, k * rmax));

  const int extra = 8;
  const int L = n_max + extra;
  const BeamProjector proj(spectrum);
  VswfCoefficients full = incident_coefficients(proj, origin, L);

  // Tail check: field energy inside the ball of radius R + |origin| carried by orders above n_max.
  if (k * rmax > 0.0) {
    const double x = k * rmax;
    const GaussRule g = gauss_legendre(40 + static_cast<int>(std::ceil(x)), 0.0, x);
    std::vector<double> wm(L + 1, 0.0), wn(L + 1, 0.0);
    for (std::size_t i = 0; i < g.x.size(); ++i) {
      const double t = g.x[i];
      const RiccatiBesselRow rb = riccati_bessel(L, cplx(t, 0.0));
      for (int l = 1; l <= L; ++l) {
        const double psi = rb.psi[l].real(), dpsi = rb.psi_prime[l].real();
        wm[l] += g.w[i] * psi * psi;
        wn[l] += g.w[i] * (l * (l + 1.0) * psi * psi / (t * t) + dpsi * dpsi);
      }
    }
    double total = 0.0, tail = 0.0;
    for (int l = 1; l <= L; ++l)
      for (int m = -l; m <= l; ++m) {
        const int j = VswfCoefficients::index(l, m);
        const double e = wm[l] * std::norm(full.g_m[j]) + wn[l] * std::norm(full.g_e[j]);
        total += e;
        if (l > n_max) tail += e;
      }
    if (total > 0.0 && tail > 1e-8 * total)
      throw ConvergenceError(fmt::format(
          "beam_shape_coefficients: tail fraction {:.3e} above 1e-8 at n_max = {}", tail / total,
          n_max));
  }

  VswfCoefficients c;
  c.origin = origin;
  c.n_max = n_max;
  c.k = k;
  const int size = VswfCoefficients::size_for(n_max);
  c.g_e.assign(full.g_e.begin(), full.g_e.begin() + size);
  c.g_m.assign(full.g_m.begin(), full.g_m.begin() + size);
  c.p.assign(size, 0.0);
  c.q.assign(size, 0.0);
  return c;
}

VswfCoefficients plane_wave_coefficients(const CVec3& pol, double k, int n_max) {
  VswfCoefficients c;
  c.n_max = n_max;
  c.k = k;
  const int size = VswfCoefficients::size_for(n_max);
  c.g_e.assign(size, 0.0);
  c.g_m.assign(size, 0.0);
  c.p.assign(size, 0.0);
  c.q.assign(size, 0.0);
  // at the pole with phi = 0: theta_hat = x, phi_hat = y
  const LegendreTable t(n_max, 0.0);
  for (int l = 1; l <= n_max; ++l)
    for (int m = -l; m <= l; ++m) {
      const VshPair v = vsh(t, l, m);
      const int j = VswfCoefficients::index(l, m);
      c.g_m[j] = pol[0] * std::conj(v.x_theta) + pol[1] * std::conj(v.x_phi);
      c.g_e[j] = pol[0] * std::conj(v.z_theta) + pol[1] * std::conj(v.z_phi);
    }
  return c;
}

VswfCoefficients scatter(const VswfCoefficients& incident, const MieTable& mie) {
  if (mie.n_max < incident.n_max)
    throw DomainError("scatter: Mie table has fewer orders than the incident expansion");
  VswfCoefficients c = incident;
  for (int l = 1; l <= c.n_max; ++l)
    for (int m = -l; m <= l; ++m) {
      const int j = VswfCoefficients::index(l, m);
      c.p[j] = mie.a[l] * c.g_e[j];
      c.q[j] = mie.b[l] * c.g_m[j];
    }
  return c;
}

FarScatteringAmplitude far_field(const VswfCoefficients& s, const SphereQuadrature& grid) {
  const int L = s.n_max;
  if (grid.order_theta < 2 * L + 2 || grid.order_phi < 2 * L + 2)
    throw DomainError(fmt::format("far_field: grid order below 2 n_max + 2 = {}", 2 * L + 2));
  FarScatteringAmplitude out;
  out.grid = grid;
  out.origin = s.origin;
  out.k = s.k;
  out.E_theta.assign(grid.nodes.size(), 0.0);
  out.E_phi.assign(grid.nodes.size(), 0.0);
  const cplx pref = 4.0 * pi * I / s.k;
  std::vector<cplx> ft(2 * L + 1), fp(2 * L + 1);
  for (std::size_t i = 0; i < grid.theta.size(); ++i) {
    const LegendreTable t(L, grid.theta[i]);
    std::fill(ft.begin(), ft.end(), 0.0);
    std::fill(fp.begin(), fp.end(), 0.0);
    for (int l = 1; l <= L; ++l)
      for (int m = -l; m <= l; ++m) {
        const VshPair v = vsh(t, l, m);
        const int j = VswfCoefficients::index(l, m);
        ft[m + L] += s.q[j] * v.x_theta + s.p[j] * v.z_theta;
        fp[m + L] += s.q[j] * v.x_phi + s.p[j] * v.z_phi;
      }
    for (int jp = 0; jp < grid.order_phi; ++jp) {
      const std::size_t node = i * grid.order_phi + jp;
      const double phi = grid.nodes[node].phi;
      cplx et = 0.0, ep = 0.0;
      for (int m = -L; m <= L; ++m) {
        const cplx e = std::exp(I * (m * phi));
        et += ft[m + L] * e;
        ep += fp[m + L] * e;
      }
      out.E_theta[node] = pref * et;
      out.E_phi[node] = pref * ep;
    }
  }
  return out;
}

CVec3 incident_field(const VswfCoefficients& c, const Vec3& r) {
  const double rr = norm(r);
  const double t = c.k * rr;
  const double theta = rr > 0.0 ? std::acos(std::clamp(r[2] / rr, -1.0, 1.0)) : 0.0;
  const double phi = std::atan2(r[1], r[0]);
  const int L = c.n_max;
  const LegendreTable tab(L, theta);

  std::vector<double> jl(L + 1, 0.0), jt(L + 1, 0.0), dpt(L + 1, 0.0);  // j_l, j_l/t, psi'/t
  if (t < 1e-8) {
    jt[1] = 1.0 / 3.0;
    dpt[1] = 2.0 / 3.0;
  } else {
    const RiccatiBesselRow rb = riccati_bessel(std::max(L, 1), cplx(t, 0.0));
    for (int l = 1; l <= L; ++l) {
      jl[l] = rb.psi[l].real() / t;
      jt[l] = jl[l] / t;
      dpt[l] = rb.psi_prime[l].real() / t;
    }
  }
  cplx er = 0.0, et = 0.0, ep = 0.0;
  for (int l = 1; l <= L; ++l) {
    const cplx il = 4.0 * pi * ipow(l);
    const double root = std::sqrt(l * (l + 1.0));
    for (int m = -l; m <= l; ++m) {
      const int j = VswfCoefficients::index(l, m);
      const cplx e = std::exp(I * (m * phi));
      const VshPair v = vsh(tab, l, m);
      const cplx a = il * c.g_m[j] * e, b = -I * il * c.g_e[j] * e;
      // M = j X ; N = i sqrt(l(l+1)) (j/t) Y r + (psi'/t) Z
      et += a * jl[l] * v.x_theta + b * dpt[l] * v.z_theta;
      ep += a * jl[l] * v.x_phi + b * dpt[l] * v.z_phi;
      er += b * I * root * jt[l] * tab.p(l, m);
    }
  }
  const double ct = std::cos(theta), st = std::sin(theta), cp = std::cos(phi), sp = std::sin(phi);
  return {er * st * cp + et * ct * cp - ep * sp, er * st * sp + et * ct * sp + ep * cp,
          er * ct - et * st};
}

double scattered_power(const VswfCoefficients& c, double impedance) {
  double s = 0.0;
  for (std::size_t j = 0; j < c.p.size(); ++j) s += std::norm(c.p[j]) + std::norm(c.q[j]);
  return 16.0 * pi * pi / (2.0 * impedance * c.k * c.k) * s;
}

}  // namespace levtrap
