#include "levtrap/mie.hpp"

#include <algorithm>

#include "levtrap/special_fn.hpp"

namespace levtrap {

void Material::validate() const {
  if (refractive_index.imag() < 0.0) throw DomainError("material: Im(n) must be >= 0");
  if (!(refractive_index.real() > 0.0)) throw DomainError("material: Re(n) must be > 0");
  if (!(density > 0.0)) throw DomainError("material: density must be > 0");
}

Material silicon() { return {"Si", cplx(3.48, 5.3e-11), 2200.0, "nk/Si_Franta.csv", 1680.0}; }
Material silica() { return {"SiO2", cplx(1.46, 5e-9), 1850.0, "nk/SiO2_Franta.csv", 1986.0}; }

std::optional<Material> material_preset(const std::string& name) {
  if (name == "Si" || name == "si" || name == "silicon") return silicon();
  if (name == "SiO2" || name == "sio2" || name == "silica") return silica();
  return std::nullopt;
}

SizeParameter SizeParameter::from_radius(double radius, double wavelength, double medium_index) {
  if (!(radius > 0.0) || !(wavelength > 0.0) || !(medium_index > 0.0))
    throw DomainError("size parameter: radius, wavelength and medium index must be > 0");
  return {2.0 * pi * medium_index * radius / wavelength, radius, wavelength, medium_index};
}

SizeParameter SizeParameter::from_kR(double kR, double wavelength, double medium_index) {
  if (!(kR > 0.0)) throw DomainError("size parameter: kR must be > 0");
  return from_radius(kR * wavelength / (2.0 * pi * medium_index), wavelength, medium_index);
}

int default_n_max(double x) {
  return static_cast<int>(std::ceil(x + 4.05 * std::cbrt(x) + 2.0));
}

MieTable mie_coefficients(const SizeParameter& sp, cplx m, std::optional<int> n_max) {
  const double x = sp.value;
  if (!(x > 0.0)) throw DomainError("mie: size parameter must be > 0");
  if (x > 200.0) throw RangeError("mie: size parameter above 200 is outside the validated range");
  if (std::abs(m) == 0.0) throw DomainError("mie: |m| must be > 0");
  const int N = n_max.value_or(default_n_max(x));
  if (N < 1) throw DomainError("mie: n_max must be >= 1");

  const RiccatiBesselRow rb = riccati_bessel(N, cplx(x, 0.0));
  const std::vector<cplx> D = log_derivative(N, m * x);

  MieTable t;
  t.x = sp;
  t.m = m;
  t.n_max = N;
  t.a.assign(N + 1, 0.0);
  t.b.assign(N + 1, 0.0);
  t.absorb_a.assign(N + 1, 0.0);
  t.absorb_b.assign(N + 1, 0.0);

  double sca = 0.0, ext = 0.0, abs = 0.0;
  for (int n = 1; n <= N; ++n) {
    const cplx ta = D[n] / m + double(n) / x;
    const cplx tb = m * D[n] + double(n) / x;
    const cplx da = ta * rb.xi[n] - rb.xi[n - 1];
    const cplx db = tb * rb.xi[n] - rb.xi[n - 1];
    // xi overflows long after the coefficients have underflowed
    const cplx a = std::isfinite(std::abs(da)) ? (ta * rb.psi[n] - rb.psi[n - 1]) / da : 0.0;
    const cplx b = std::isfinite(std::abs(db)) ? (tb * rb.psi[n] - rb.psi[n - 1]) / db : 0.0;
    t.a[n] = a;
    t.b[n] = b;
    // inward flux of psi - c xi through the surface
    auto flux = [&](cplx c) {
      if (c == 0.0) return 0.0;
      const cplx u = rb.psi[n] - c * rb.xi[n];
      const cplx du = rb.psi_prime[n] - c * rb.xi_prime[n];
      return -(std::conj(u) * du).imag();
    };
    t.absorb_a[n] = flux(a);
    t.absorb_b[n] = flux(b);
    const double w = 2.0 * n + 1.0;
    sca += w * (std::norm(a) + std::norm(b));
    ext += w * (a + b).real();
    abs += w * (t.absorb_a[n] + t.absorb_b[n]);
  }
  const double f = 2.0 / (x * x);
  t.Q_sca = f * sca;
  t.Q_ext = f * ext;
  t.Q_abs = f * abs;
  const double area = pi * sp.radius * sp.radius;
  t.sigma_sca = t.Q_sca * area;
  t.sigma_ext = t.Q_ext * area;
  t.sigma_abs = t.Q_abs * area;
  return t;
}

std::pair<cplx, cplx> scattering_amplitudes(const MieTable& mie, double cos_theta) {
  const AngularFunctionRow af = angular_functions(mie.n_max, cos_theta);
  cplx s1 = 0.0, s2 = 0.0;
  for (int n = 1; n <= mie.n_max; ++n) {
    const double w = (2.0 * n + 1.0) / (n * (n + 1.0));
    s1 += w * (mie.a[n] * af.pi_n[n] + mie.b[n] * af.tau_n[n]);
    s2 += w * (mie.a[n] * af.tau_n[n] + mie.b[n] * af.pi_n[n]);
  }
  return {s1, s2};
}

namespace {

double coefficient_power(cplx m, double x, Family f, int order) {
  const MieTable t = mie_coefficients(SizeParameter{x, x, 2.0 * pi, 1.0}, m,
                                      std::max(order, default_n_max(x)));
  return std::norm(f == Family::electric ? t.a[order] : t.b[order]);
}

double golden_max(cplx m, Family f, int order, double lo, double hi, double tol) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
  double fc = coefficient_power(m, c, f, order), fd = coefficient_power(m, d, f, order);
  while (hi - lo > tol) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - g * (hi - lo);
      fc = coefficient_power(m, c, f, order);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + g * (hi - lo);
      fd = coefficient_power(m, d, f, order);
    }
  }
  return 0.5 * (lo + hi);
}

// Half-maximum crossing between inside (above half) and outside (below half).
double half_crossing(cplx m, Family f, int order, double inside, double outside, double half) {
  for (int it = 0; it < 60 && std::abs(outside - inside) > 1e-7; ++it) {
    const double mid = 0.5 * (inside + outside);
    if (coefficient_power(m, mid, f, order) >= half) inside = mid;
    else outside = mid;
  }
  return 0.5 * (inside + outside);
}

}  // namespace

ResonanceList locate_resonances(cplx m, double kR_min, double kR_max, std::vector<Family> families,
                                double grid_step) {
  if (!(kR_max > kR_min)) throw DomainError("locate_resonances: empty kR range");
  if (!(kR_min > 0.0) || kR_max > 200.0) throw DomainError("locate_resonances: range outside (0, 200]");
  if (!(grid_step > 0.0) || grid_step > 0.002) throw DomainError("locate_resonances: grid_step must be in (0, 0.002]");

  const int samples = static_cast<int>(std::ceil((kR_max - kR_min) / grid_step)) + 1;
  const double step = (kR_max - kR_min) / (samples - 1);
  const int N = default_n_max(kR_max);
  std::vector<std::vector<double>> ea(N + 1, std::vector<double>(samples)), mb = ea;
  for (int i = 0; i < samples; ++i) {
    const double x = kR_min + i * step;
    const MieTable t = mie_coefficients(SizeParameter{x, x, 2.0 * pi, 1.0}, m, N);
    for (int n = 1; n <= N; ++n) {
      ea[n][i] = std::norm(t.a[n]);
      mb[n][i] = std::norm(t.b[n]);
    }
  }

  ResonanceList out;
  constexpr double floor = 1e-12;
  for (Family f : families) {
    const auto& grid = f == Family::electric ? ea : mb;
    for (int n = 1; n <= N; ++n) {
      const auto& v = grid[n];
      for (int i = 1; i + 1 < samples; ++i) {
        if (!(v[i] > v[i - 1] && v[i] > v[i + 1] && v[i] > floor)) continue;
        const double xa = kR_min + (i - 1) * step, xb = kR_min + (i + 1) * step;
        const double peak = golden_max(m, f, n, xa, xb, 1e-5);
        const double half = 0.5 * coefficient_power(m, peak, f, n);
        int lo = i, hi = i;
        while (lo > 0 && v[lo] >= half) --lo;
        while (hi + 1 < samples && v[hi] >= half) ++hi;
        double width = std::numeric_limits<double>::quiet_NaN();
        if (v[lo] < half && v[hi] < half) {
          const double left = half_crossing(m, f, n, peak, kR_min + lo * step, half);
          const double right = half_crossing(m, f, n, peak, kR_min + hi * step, half);
          width = right - left;
        }
        out.entries.push_back({f, n, peak, width});
      }
    }
  }
  std::sort(out.entries.begin(), out.entries.end(),
            [](const Resonance& a, const Resonance& b) { return a.kR_peak < b.kR_peak; });
  return out;
}

double mass_of(double radius, double density) {
  if (!(radius > 0.0)) throw DomainError("mass_of: radius must be > 0");
  if (!(density > 0.0)) throw DomainError("mass_of: density must be > 0");
  return 4.0 / 3.0 * pi * radius * radius * radius * density;
}

}  // namespace levtrap
