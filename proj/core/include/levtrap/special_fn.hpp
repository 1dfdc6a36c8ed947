#pragma once

#include <vector>

#include "levtrap/common.hpp"

namespace levtrap {

// psi_n = z j_n(z), xi_n = z h_n^(1)(z) = psi_n - i chi_n.
struct RiccatiBesselRow {
  int order_max = 0;
  cplx argument;
  std::vector<cplx> psi, psi_prime, xi, xi_prime;  // index n = 0..order_max
};

RiccatiBesselRow riccati_bessel(int order_max, cplx argument);

// D_n(z) = psi_n'(z)/psi_n(z) for n = 0..order_max by downward recurrence.
std::vector<cplx> log_derivative(int order_max, cplx z);

struct AngularFunctionRow {
  int order_max = 0;
  double cos_theta = 1.0;
  std::vector<double> pi_n, tau_n;  // index n = 0..order_max, entry 0 unused
};

AngularFunctionRow angular_functions(int order_max, double cos_theta);

struct QuadratureNode {
  double theta, phi, weight;
};

// Tensor grid: theta rows times uniform phi. theta_weight already contains
// the sin(theta) Jacobian, so a row integral is sum_i theta_weight[i] * int dphi.
struct SphereQuadrature {
  int order_theta = 0;
  int order_phi = 0;
  double theta_max = pi;
  std::vector<double> theta, theta_weight;
  std::vector<QuadratureNode> nodes;
};

// Gauss-Legendre in cos(theta) on the full sphere.
SphereQuadrature sphere_quadrature(int order_theta, int order_phi);
// Gauss-Legendre in theta on [0, theta_max] with sin(theta) weight.
SphereQuadrature cap_quadrature(double theta_max, int order_theta, int order_phi);

struct GaussRule {
  std::vector<double> x, w;
};
GaussRule gauss_legendre(int n, double a, double b);

// J_0..J_n at x (cylindrical, integer order).
std::vector<double> bessel_j_row(int n_max, double x);

// Orthonormal associated Legendre functions with Condon-Shortley phase,
// Y_lm = P(l,m) e^{i m phi}, for 0 <= m <= l <= l_max at one theta.
// Also P/sin(theta) (m >= 1) and dP/dtheta, all finite at the poles.
class LegendreTable {
 public:
  LegendreTable() = default;
  LegendreTable(int l_max, double theta);

  int l_max() const { return l_max_; }
  // Signed m uses P(l,-m) = (-1)^m P(l,m).
  double p(int l, int m) const { return sign(m) * p_[idx(l, std::abs(m))]; }
  double p_over_sin(int l, int m) const { return sign(m) * q_[idx(l, std::abs(m))]; }
  double dp(int l, int m) const { return sign(m) * d_[idx(l, std::abs(m))]; }

 private:
  static int idx(int l, int m) { return l * (l + 1) / 2 + m; }
  static double sign(int m) { return (m < 0 && (m & 1)) ? -1.0 : 1.0; }
  int l_max_ = 0;
  std::vector<double> p_, q_, d_;
};

// Vector spherical harmonic X_lm = L Y_lm / sqrt(l(l+1)) and Z_lm = r x X_lm,
// theta/phi components without the e^{i m phi} factor.
struct VshPair {
  cplx x_theta, x_phi, z_theta, z_phi;
};
VshPair vsh(const LegendreTable& table, int l, int m);

}  // namespace levtrap
