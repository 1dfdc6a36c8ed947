#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "levtrap/beam.hpp"
#include "levtrap/common.hpp"
#include "levtrap/mie.hpp"
#include "levtrap/special_fn.hpp"

namespace levtrap {

// Field about `origin` (relative to the focus):
//   E_inc = sum 4 pi i^n [g_m M_nm - i g_e N_nm]
//   E_sca = sum 4 pi i^n [-q M3_nm + i p N3_nm]
// with M_nm = j_n X_nm and N_nm = curl(M_nm)/k. g_m and g_e are the overlaps
// of the displaced spectrum with X_nm and r x X_nm.
struct VswfCoefficients {
  Vec3 origin{0, 0, 0};
  int n_max = 0;
  double k = 0.0;
  std::vector<cplx> g_e, g_m, p, q;

  static int index(int n, int m) { return n * (n + 1) + m - 1; }
  static int size_for(int n_max) { return n_max * (n_max + 2); }
  int m_max() const { return n_max; }
};

// Far-field amplitude: E_sca ~ calE(theta, phi) e^{ikr}/r, referenced to `origin`.
struct FarScatteringAmplitude {
  SphereQuadrature grid;
  std::vector<cplx> E_theta, E_phi;  // V
  Vec3 origin{0, 0, 0};
  double k = 0.0;

  // Same amplitude with the phase referenced to the focus instead of the particle.
  FarScatteringAmplitude referenced_to_focus() const;
};

namespace detail {

// X_lm at one theta: X_theta = xt, X_phi = i xp (both real), flat in VswfCoefficients::index.
struct VshRow {
  std::vector<double> xt, xp;
  VshRow(int l_max, double theta);
};

struct CapTables {
  int l_max = 0;
  std::vector<double> theta, weight, cos_t, sin_t, envelope;
  std::vector<VshRow> vsh;
};

struct SphereTables {
  int l_max = 0;
  std::vector<double> theta, weight, cos_t, sin_t;
  std::vector<VshRow> vsh;
};

std::shared_ptr<const SphereTables> sphere_tables(int l_max, int order);

}  // namespace detail

// Fourier components of the displaced spectrum on the cap nodes,
// A_d(theta_i, phi) = sum_m (a_theta[i][m], a_phi[i][m]) e^{i m phi}.
struct CapSpectrum {
  std::shared_ptr<const detail::CapTables> tables;
  int m_max = 0;
  std::vector<cplx> a_theta, a_phi;  // [i * (2 m_max + 1) + m + m_max]
  cplx theta_at(std::size_t i, int m) const { return a_theta[i * (2 * m_max + 1) + m + m_max]; }
  cplx phi_at(std::size_t i, int m) const { return a_phi[i * (2 * m_max + 1) + m + m_max]; }
};

// Projects the +z-frame spectrum of a beam onto VSWFs about displaced origins.
// Tables are cached per quadrature order and are safe to share across threads.
class BeamProjector {
 public:
  explicit BeamProjector(const AngularSpectrum& spectrum);

  // order_theta = 0 selects the order from the displacement.
  CapSpectrum cap_spectrum(const Vec3& d, int n_max, int order_theta = 0) const;
  VswfCoefficients project(const Vec3& d, int n_max, int order_theta = 0) const;
  VswfCoefficients coefficients(const CapSpectrum& cs, const Vec3& d, int n_max) const;
  int default_order(const Vec3& d, int n_max) const;

  const AngularSpectrum& spectrum() const { return spectrum_; }

 private:
  std::shared_ptr<const detail::CapTables> tables(int order, int l_max) const;
  AngularSpectrum spectrum_;
  std::vector<AzimuthalHarmonic> harmonics_;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<int, int>, std::shared_ptr<const detail::CapTables>> cache_;
};

// Projection about `origin` for either propagation sign, without the n_max contract checks.
VswfCoefficients incident_coefficients(const BeamProjector& proj, const Vec3& origin, int n_max);

VswfCoefficients beam_shape_coefficients(const AngularSpectrum& spectrum, const Vec3& origin,
                                         int n_max, double particle_radius = 0.0);

// Plane wave E0 e^{ikz}, E0 transverse to z.
VswfCoefficients plane_wave_coefficients(const CVec3& polarization, double k, int n_max);

VswfCoefficients scatter(const VswfCoefficients& incident, const MieTable& mie);

FarScatteringAmplitude far_field(const VswfCoefficients& scattered, const SphereQuadrature& grid);

// Regular-wave reconstruction of the incident field at origin + r.
CVec3 incident_field(const VswfCoefficients& c, const Vec3& r);

// Coefficient-space powers (W) for impedance Z.
double scattered_power(const VswfCoefficients& c, double impedance);

}  // namespace levtrap
