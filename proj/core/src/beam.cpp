#include "levtrap/beam.hpp"

#include <cmath>

namespace levtrap {

std::string to_string(BeamFamily f) {
  switch (f) {
    case BeamFamily::gaussian_linear_x: return "gaussian";
    case BeamFamily::radial: return "radial";
    case BeamFamily::azimuthal: return "azimuthal";
  }
  return "unknown";
}

std::optional<BeamFamily> parse_family(const std::string& s) {
  if (s == "gaussian" || s == "gaussian_linear_x" || s == "GB") return BeamFamily::gaussian_linear_x;
  if (s == "radial" || s == "RVB") return BeamFamily::radial;
  if (s == "azimuthal" || s == "AVB") return BeamFamily::azimuthal;
  return std::nullopt;
}

void BeamSpec::validate() const {
  if (!(numerical_aperture > 0.0 && numerical_aperture < 1.0))
    throw DomainError("beam: numerical aperture must lie in (0, 1)");
  if (!(power > 0.0)) throw DomainError("beam: power must be > 0");
  if (!(wavelength_vacuum > 0.0)) throw DomainError("beam: wavelength must be > 0");
  if (propagation_sign != 1 && propagation_sign != -1)
    throw DomainError("beam: propagation_sign must be +1 or -1");
  if (!(medium_index > 0.0)) throw DomainError("beam: medium index must be > 0");
}

ParaxialField::ParaxialField(const BeamSpec& b) : beam(b) {
  beam.validate();
  const double na = beam.numerical_aperture;
  waist_w0 = beam.wavelength_vacuum / (pi * na);
  rayleigh_range_zR = beam.medium_index * beam.wavelength_vacuum / (pi * na * na);
}

double ParaxialField::waist(double z) const {
  const double t = z / rayleigh_range_zR;
  return waist_w0 * std::sqrt(1.0 + t * t);
}

double ParaxialField::wavefront_radius(double z) const {
  if (z == 0.0) return std::numeric_limits<double>::infinity();
  const double t = rayleigh_range_zR / z;
  return z * (1.0 + t * t);
}

double ParaxialField::gouy_phase(double z) const {
  const int order = beam.family == BeamFamily::gaussian_linear_x ? 0 : 1;
  return (order + 1) * std::atan(z / rayleigh_range_zR);
}

TransverseField ParaxialField::operator()(double x, double y, double z) const {
  const double k = beam.wavenumber();
  const double w = waist(z);
  const double rho2 = x * x + y * y;
  const double curvature = z == 0.0 ? 0.0 : k * rho2 / (2.0 * wavefront_radius(z));
  const cplx phase = std::exp(I * (k * z + curvature - gouy_phase(z)));
  const double amp = std::sqrt(2.0 * beam.power / (constants::epsilon0 * constants::c * beam.medium_index));
  const cplx u00 = std::sqrt(2.0 / pi) / w * std::exp(-rho2 / (w * w)) * phase;
  switch (beam.family) {
    case BeamFamily::gaussian_linear_x:
      return {amp * u00, 0.0};
    case BeamFamily::radial: {
      // (u10 x + u01 y)/sqrt2
      const cplx u10 = 2.0 * x / w * u00, u01 = 2.0 * y / w * u00;
      return {amp * u10 / std::sqrt(2.0), amp * u01 / std::sqrt(2.0)};
    }
    case BeamFamily::azimuthal: {
      // (u10 y - u01 x)/sqrt2
      const cplx u10 = 2.0 * x / w * u00, u01 = 2.0 * y / w * u00;
      return {-amp * u01 / std::sqrt(2.0), amp * u10 / std::sqrt(2.0)};
    }
  }
  return {0.0, 0.0};
}

ParaxialField paraxial_field(const BeamSpec& beam) { return ParaxialField(beam); }

namespace {

double raw_envelope(BeamFamily family, double theta, double theta_max, double fill) {
  if (theta > theta_max) return 0.0;
  const double s = std::sin(theta) / (fill * std::sin(theta_max));
  const double apod = std::sqrt(std::cos(theta));
  const double gauss = std::exp(-s * s);
  return family == BeamFamily::gaussian_linear_x ? apod * gauss : apod * s * gauss;
}

}  // namespace

AngularSpectrum::AngularSpectrum(const BeamSpec& b, double fill)
    : beam(b), theta_max(0.0), fill_factor(fill), scale(1.0) {
  beam.validate();
  if (!(fill >= 0.1 && fill <= 10.0)) throw DomainError("focus: fill_factor must lie in [0.1, 10]");
  theta_max = std::asin(beam.numerical_aperture);

  // |A|^2 integrates to 2 pi int g^2 sin(theta) for every family.
  const GaussRule rule = gauss_legendre(200, 0.0, theta_max);
  double norm = 0.0;
  for (std::size_t i = 0; i < rule.x.size(); ++i) {
    const double g = raw_envelope(beam.family, rule.x[i], theta_max, fill);
    norm += rule.w[i] * g * g * std::sin(rule.x[i]);
  }
  norm *= 2.0 * pi;
  const double lambda = beam.wavelength_vacuum;
  // P = lambda0^2 / (2 Z0 n) int |A|^2 dOmega
  scale = std::sqrt(beam.power * 2.0 * constants::Z0 * beam.medium_index / (lambda * lambda * norm));

  SphereQuadrature cap = cap_quadrature(theta_max, 64, 32);
  if (beam.propagation_sign < 0) {
    for (auto& t : cap.theta) t = pi - t;
    for (auto& n : cap.nodes) n.theta = pi - n.theta;
  }
  grid = std::move(cap);
  E_far.reserve(grid.nodes.size());
  for (const auto& n : grid.nodes) E_far.push_back(amplitude(n.theta, n.phi));
}

double AngularSpectrum::envelope(double theta) const {
  return scale * raw_envelope(beam.family, theta, theta_max, fill_factor);
}

std::vector<AzimuthalHarmonic> AngularSpectrum::harmonics() const {
  switch (beam.family) {
    case BeamFamily::gaussian_linear_x:
      return {{-1, 0.5, -0.5 * I}, {1, 0.5, 0.5 * I}};
    case BeamFamily::radial:
      return {{0, 1.0, 0.0}};
    case BeamFamily::azimuthal:
      return {{0, 0.0, 1.0}};
  }
  return {};
}

CVec3 AngularSpectrum::amplitude(double theta, double phi) const {
  // mirrored beam: A_-(theta, phi) = M A_+(pi - theta, phi)
  const bool mirrored = beam.propagation_sign < 0;
  const double t = mirrored ? pi - theta : theta;
  const double g = envelope(t);
  cplx u = 0.0, v = 0.0;
  for (const auto& h : harmonics()) {
    const cplx e = std::exp(I * double(h.c) * phi);
    u += h.u * e;
    v += h.v * e;
  }
  u *= g;
  v *= g;
  const double ct = std::cos(t), st = std::sin(t), cp = std::cos(phi), sp = std::sin(phi);
  CVec3 a{u * ct * cp - v * sp, u * ct * sp + v * cp, -u * st};
  return mirrored ? mirror_z(a) : a;
}

double AngularSpectrum::cone_power(const SphereQuadrature& q) const {
  double s = 0.0;
  for (const auto& n : q.nodes) s += n.weight * norm2(amplitude(n.theta, n.phi));
  const double lambda = beam.wavelength_vacuum;
  return lambda * lambda / (2.0 * constants::Z0 * beam.medium_index) * s;
}

AngularSpectrum focus(const BeamSpec& beam, double fill_factor) {
  return AngularSpectrum(beam, fill_factor);
}

namespace {

// Fields of the +z beam.
FieldSample focal_field_forward(const AngularSpectrum& sp, const Vec3& r, int order) {
  const double k = sp.wavenumber();
  const double rho = std::hypot(r[0], r[1]);
  const double ph = std::atan2(r[1], r[0]);
  const GaussRule rule = gauss_legendre(order, 0.0, sp.theta_max);

  // Bessel moments: I[j] = int g f_j(theta) J_n(k rho sin) e^{i k z cos} sin dtheta
  cplx rad_rho = 0.0, rad_z = 0.0, azi = 0.0;       // radial / azimuthal kernels
  cplx lin0 = 0.0, lin2 = 0.0, lin2y = 0.0, linz = 0.0;  // linear-x kernels
  for (std::size_t i = 0; i < rule.x.size(); ++i) {
    const double t = rule.x[i];
    const double ct = std::cos(t), st = std::sin(t);
    const double g = sp.envelope(t);
    const std::vector<double> J = bessel_j_row(2, k * rho * st);
    const cplx e = std::exp(I * k * r[2] * ct) * (rule.w[i] * g * st);
    rad_rho += e * ct * J[1];
    rad_z += e * st * J[0];
    azi += e * J[1];
    lin0 += e * 0.5 * (1.0 + ct) * J[0];
    lin2 += e * 0.5 * (1.0 - ct) * J[2];
    linz += e * st * J[1];
  }
  lin2y = lin2;
  const double tp = 2.0 * pi;
  const double cph = std::cos(ph), sph = std::sin(ph);

  // radial-type field (theta_hat spectrum) and azimuthal-type field (phi_hat spectrum)
  auto radial_type = [&]() -> CVec3 {
    const cplx er = tp * I * rad_rho, ez = -tp * rad_z;
    return {er * cph, er * sph, ez};
  };
  auto azimuthal_type = [&]() -> CVec3 {
    const cplx ep = tp * I * azi;
    return {-ep * sph, ep * cph, 0.0};
  };
  // x-polarized input evaluated at azimuth angle a
  auto linear_type = [&](double a) -> CVec3 {
    return {tp * (lin0 + lin2 * std::cos(2.0 * a)), tp * lin2y * std::sin(2.0 * a),
            -tp * I * linz * std::cos(a)};
  };

  const double invZ = 1.0 / sp.beam.impedance();
  FieldSample out;
  switch (sp.beam.family) {
    case BeamFamily::radial:
      out.E = radial_type();
      out.H = cplx(invZ) * azimuthal_type();
      break;
    case BeamFamily::azimuthal:
      out.E = azimuthal_type();
      out.H = cplx(-invZ) * radial_type();
      break;
    case BeamFamily::gaussian_linear_x: {
      out.E = linear_type(ph);
      // k x A maps the x spectrum onto the y spectrum: rotate by +90 degrees
      const CVec3 rot = linear_type(ph - pi / 2.0);
      out.H = cplx(invZ) * CVec3{-rot[1], rot[0], rot[2]};
      break;
    }
  }
  return out;
}

}  // namespace

FieldSample focal_field(const AngularSpectrum& sp, const Vec3& point, int order) {
  const double lambda = sp.beam.wavelength_vacuum / sp.beam.medium_index;
  const double dist = norm(point);
  if (!(dist < 50.0 * lambda)) throw RangeError("focal_field: point outside |r| < 50 lambda");
  if (order <= 0) order = 64 + 2 * static_cast<int>(std::ceil(sp.wavenumber() * dist));
  if (sp.beam.propagation_sign > 0) return focal_field_forward(sp, point, order);
  const FieldSample f = focal_field_forward(sp, mirror_z(point), order);
  const CVec3 h = mirror_z(f.H);
  return {mirror_z(f.E), {-h[0], -h[1], -h[2]}};
}

}  // namespace levtrap
