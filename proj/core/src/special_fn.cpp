#include "levtrap/special_fn.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <memory>

namespace levtrap {

RiccatiBesselRow riccati_bessel(int order_max, cplx z) {
  if (order_max < 1) throw DomainError("riccati_bessel: order_max must be >= 1");
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw DomainError("riccati_bessel: non-finite argument");
  if (z == cplx(0.0)) throw DomainError("riccati_bessel: zero argument");

  const double az = std::abs(z);
  const int start = std::max(order_max, static_cast<int>(std::ceil(az))) +
                    std::max(15, static_cast<int>(std::ceil(4.0 * std::sqrt(az))));

  // Miller: unnormalized downward recurrence, rescaled against overflow.
  std::vector<cplx> f(start + 2, cplx(0.0));
  f[start] = 1e-30;
  for (int n = start; n >= 1; --n) {
    f[n - 1] = (2.0 * n + 1.0) / z * f[n] - f[n + 1];
    if (std::abs(f[n - 1]) > 1e250)
      for (int j = n - 1; j <= start; ++j) f[j] *= 1e-250;
  }
  const cplx psi0 = std::sin(z);
  const cplx psi1 = std::sin(z) / z - std::cos(z);
  const cplx scale = std::abs(psi0) >= std::abs(psi1) ? psi0 / f[0] : psi1 / f[1];

  RiccatiBesselRow row;
  row.order_max = order_max;
  row.argument = z;
  row.psi.resize(order_max + 1);
  row.psi_prime.resize(order_max + 1);
  row.xi.resize(order_max + 1);
  row.xi_prime.resize(order_max + 1);
  for (int n = 0; n <= order_max; ++n) row.psi[n] = scale * f[n];

  const cplx e = std::exp(I * z);
  row.xi[0] = -I * e;
  row.xi[1] = row.xi[0] / z - e;
  for (int n = 1; n < order_max; ++n)
    row.xi[n + 1] = (2.0 * n + 1.0) / z * row.xi[n] - row.xi[n - 1];

  row.psi_prime[0] = std::cos(z);
  row.xi_prime[0] = e;
  for (int n = 1; n <= order_max; ++n) {
    row.psi_prime[n] = row.psi[n - 1] - double(n) * row.psi[n] / z;
    row.xi_prime[n] = row.xi[n - 1] - double(n) * row.xi[n] / z;
  }
  return row;
}

std::vector<cplx> log_derivative(int order_max, cplx z) {
  if (z == cplx(0.0)) throw DomainError("log_derivative: zero argument");
  const int start = std::max(order_max, static_cast<int>(std::ceil(std::abs(z)))) + 16;
  std::vector<cplx> d(start + 1, cplx(0.0));
  for (int n = start; n >= 1; --n) {
    const cplx t = double(n) / z;
    d[n - 1] = t - 1.0 / (d[n] + t);
  }
  d.resize(order_max + 1);
  return d;
}

AngularFunctionRow angular_functions(int order_max, double mu) {
  if (!(std::abs(mu) <= 1.0)) throw DomainError("angular_functions: |cos_theta| > 1");
  if (order_max < 1) throw DomainError("angular_functions: order_max must be >= 1");
  AngularFunctionRow row;
  row.order_max = order_max;
  row.cos_theta = mu;
  row.pi_n.assign(order_max + 1, 0.0);
  row.tau_n.assign(order_max + 1, 0.0);
  row.pi_n[1] = 1.0;
  row.tau_n[1] = mu;
  for (int n = 2; n <= order_max; ++n) {
    row.pi_n[n] = (2.0 * n - 1.0) / (n - 1.0) * mu * row.pi_n[n - 1] -
                  double(n) / (n - 1.0) * row.pi_n[n - 2];
    row.tau_n[n] = n * mu * row.pi_n[n] - (n + 1.0) * row.pi_n[n - 1];
  }
  return row;
}

GaussRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw DomainError("gauss_legendre: n must be >= 1");
  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)>
      table(gsl_integration_glfixed_table_alloc(n), &gsl_integration_glfixed_table_free);
  GaussRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < n; ++i)
    gsl_integration_glfixed_point(a, b, i, &rule.x[i], &rule.w[i], table.get());
  return rule;
}

namespace {

void fill_nodes(SphereQuadrature& q) {
  q.nodes.clear();
  q.nodes.reserve(q.theta.size() * q.order_phi);
  const double dphi = 2.0 * pi / q.order_phi;
  for (std::size_t i = 0; i < q.theta.size(); ++i)
    for (int j = 0; j < q.order_phi; ++j)
      q.nodes.push_back({q.theta[i], j * dphi, q.theta_weight[i] * dphi});
}

}  // namespace

SphereQuadrature sphere_quadrature(int order_theta, int order_phi) {
  if (order_theta < 2 || order_phi < 4)
    throw DomainError("sphere_quadrature: need order_theta >= 2 and order_phi >= 4");
  const GaussRule g = gauss_legendre(order_theta, -1.0, 1.0);
  SphereQuadrature q;
  q.order_theta = order_theta;
  q.order_phi = order_phi;
  q.theta_max = pi;
  for (int i = order_theta - 1; i >= 0; --i) {
    q.theta.push_back(std::acos(g.x[i]));
    q.theta_weight.push_back(g.w[i]);
  }
  fill_nodes(q);
  return q;
}

SphereQuadrature cap_quadrature(double theta_max, int order_theta, int order_phi) {
  if (!(theta_max > 0.0 && theta_max <= pi))
    throw DomainError("cap_quadrature: theta_max outside (0, pi]");
  if (order_theta < 2 || order_phi < 4)
    throw DomainError("cap_quadrature: need order_theta >= 2 and order_phi >= 4");
  const GaussRule g = gauss_legendre(order_theta, 0.0, theta_max);
  SphereQuadrature q;
  q.order_theta = order_theta;
  q.order_phi = order_phi;
  q.theta_max = theta_max;
  for (int i = 0; i < order_theta; ++i) {
    q.theta.push_back(g.x[i]);
    q.theta_weight.push_back(g.w[i] * std::sin(g.x[i]));
  }
  fill_nodes(q);
  return q;
}

std::vector<double> bessel_j_row(int n_max, double x) {
  std::vector<double> j(n_max + 1, 0.0);
  if (x == 0.0) {
    j[0] = 1.0;
    return j;
  }
  // Miller recurrence normalised by J0 + 2 sum J_2k = 1
  const double ax = std::abs(x);
  const double top = std::max<double>(n_max, ax);
  int start = static_cast<int>(top + std::sqrt(40.0 * top)) + 16;
  start += start % 2;
  double next = 0.0, cur = 1e-300, norm = 0.0;
  for (int n = start; n > 0; --n) {
    const double prev = 2.0 * n / ax * cur - next;
    next = cur;
    cur = prev;
    if (n - 1 <= n_max) j[n - 1] = cur;
    if ((n - 1) % 2 == 0 && n - 1 > 0) norm += 2.0 * cur;
    if (std::abs(cur) > 1e250) {
      cur *= 1e-250;
      next *= 1e-250;
      norm *= 1e-250;
      for (int m = n - 1; m <= n_max; ++m) j[m] *= 1e-250;
    }
  }
  norm += cur;
  for (double& v : j) v /= norm;
  if (x < 0.0)
    for (int n = 1; n <= n_max; n += 2) j[n] = -j[n];
  return j;
}

LegendreTable::LegendreTable(int l_max, double theta) : l_max_(l_max) {
  const int size = (l_max + 1) * (l_max + 2) / 2;
  p_.assign(size, 0.0);
  q_.assign(size, 0.0);
  d_.assign(size, 0.0);
  const double c = std::cos(theta);
  const double s = std::sin(theta);

  double pmm = 1.0 / std::sqrt(4.0 * pi);
  for (int m = 0; m <= l_max; ++m) {
    double qmm = 0.0;
    if (m > 0) {
      const double f = -std::sqrt((2.0 * m + 1.0) / (2.0 * m));
      qmm = f * pmm;
      pmm = qmm * s;
    }
    p_[idx(m, m)] = pmm;
    q_[idx(m, m)] = qmm;
    if (m + 1 <= l_max) {
      const double f = std::sqrt(2.0 * m + 3.0) * c;
      p_[idx(m + 1, m)] = f * pmm;
      q_[idx(m + 1, m)] = f * qmm;
    }
    for (int l = m + 2; l <= l_max; ++l) {
      const double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
      const double b = std::sqrt((double(l - 1) * (l - 1) - double(m) * m) /
                                 (4.0 * (l - 1) * (l - 1) - 1.0));
      p_[idx(l, m)] = a * (c * p_[idx(l - 1, m)] - b * p_[idx(l - 2, m)]);
      q_[idx(l, m)] = a * (c * q_[idx(l - 1, m)] - b * q_[idx(l - 2, m)]);
    }
  }
  for (int l = 0; l <= l_max; ++l) {
    d_[idx(l, 0)] = l >= 1 ? std::sqrt(double(l) * (l + 1)) * p_[idx(l, 1)] : 0.0;
    for (int m = 1; m <= l; ++m) {
      const double lower = (l - 1 >= m) ? q_[idx(l - 1, m)] : 0.0;
      const double f = std::sqrt((2.0 * l + 1.0) / (2.0 * l - 1.0) * (double(l) * l - double(m) * m));
      d_[idx(l, m)] = l * c * q_[idx(l, m)] - f * lower;
    }
  }
}

VshPair vsh(const LegendreTable& t, int l, int m) {
  const double norm = 1.0 / std::sqrt(double(l) * (l + 1));
  const cplx xt = -double(m) * t.p_over_sin(l, m) * norm;
  const cplx xp = -I * t.dp(l, m) * norm;
  return {xt, xp, -xp, xt};
}

}  // namespace levtrap
