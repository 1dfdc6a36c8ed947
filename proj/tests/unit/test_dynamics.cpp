#include <gtest/gtest.h>

#include "levtrap/dynamics.hpp"
#include "oracles.hpp"

using namespace levtrap;

namespace {

AngularSpectrum beam(BeamFamily f, double na = 0.8) {
  BeamSpec b;
  b.family = f;
  b.numerical_aperture = na;
  return focus(b);
}

MieTable sphere(double kR, cplx m) { return mie_coefficients(SizeParameter::from_kR(kR, 1550e-9), m); }

const cplx n_silica = cplx(1.46, 5e-9);
const cplx n_si = cplx(3.48, 5.3e-11);

}  // namespace

TEST(Force, DipoleLimitMatchesAnalyticForce) {
  const AngularSpectrum s = beam(BeamFamily::gaussian_linear_x);
  const MieTable t = sphere(0.1, n_silica);
  const ForceEngine eng(s, t);
  const double lam = 1550e-9;
  for (const Vec3& r : {Vec3{0.05 * lam, 0.02 * lam, 0.1 * lam}, Vec3{-0.1 * lam, 0.07 * lam, -0.05 * lam},
                        Vec3{0.0, 0.0, 0.15 * lam}}) {
    const Vec3 F = eng.force(r);
    const Vec3 D = oracle::dipole_force(s, t.x.radius, n_silica, r);
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(F[j], D[j], 0.02 * norm(D)) << "axis " << j;
  }
}

TEST(Force, AzimuthalBeamHasNoTransverseForceOnAxis) {
  const ForceEngine eng(beam(BeamFamily::azimuthal), sphere(1.4, n_si));
  for (double z : {-1e-6, 0.0, 0.7e-6}) {
    const Vec3 F = eng.force({0, 0, z});
    EXPECT_LT(std::hypot(F[0], F[1]), 1e-9 * std::abs(F[2]) + 1e-30);
  }
}

TEST(Force, PowerEstimatesAgree) {
  const ForceEngine eng(beam(BeamFamily::radial), sphere(1.2, cplx(3.48, 0.01)));
  const auto e = eng.evaluate({0.1e-6, -0.05e-6, 0.2e-6});
  EXPECT_NEAR(e.P_ext_flux, e.P_ext_coeff, 1e-6 * e.P_ext_coeff);
  EXPECT_NEAR(e.P_sca_flux, e.P_sca_coeff, 1e-6 * e.P_sca_coeff);
  EXPECT_NEAR(e.P_abs_flux, e.P_abs_coeff, 1e-6 * e.P_ext_coeff);
  EXPECT_LE(e.P_abs_coeff, 0.5);
}

TEST(Force, LosslessSphereExtinctionEqualsScattering) {
  const ForceEngine eng(beam(BeamFamily::gaussian_linear_x), sphere(1.0, cplx(1.46, 0.0)));
  const auto e = eng.evaluate({0.05e-6, 0.0, 0.1e-6});
  EXPECT_NEAR(e.P_ext_coeff, e.P_sca_coeff, 1e-8 * e.P_ext_coeff);
}

TEST(Force, SiliconInGaussianBeamBeyondBreakdownHasNoAxialEquilibrium) {
  const AngularSpectrum s = beam(BeamFamily::gaussian_linear_x);
  const MieTable t = sphere(0.9, n_si);
  const TrapReport r = trap_report(s, t, silicon(), {});
  EXPECT_FALSE(r.z_eq.has_value());
  EXPECT_FALSE(r.trapped);
  const ForceEngine eng(s, t);
  for (double z = 0.0; z < 6 * 1550e-9; z += 0.25e-6) EXPECT_GT(eng.force({0, 0, z})[2], 0.0);
}

TEST(Counterpropagating, AxialForceVanishesAtFocus) {
  const AngularSpectrum s = beam(BeamFamily::azimuthal, 0.4);
  const MieTable t = sphere(0.9, n_si);
  const Vec3 F = counterprop_force(s, t, {0, 0, 0}).F;
  const Vec3 F1 = optical_force(s, t, {0, 0, 0}).F;
  EXPECT_LT(std::abs(F[2]), 1e-9 * std::abs(F1[2]));
}

TEST(Counterpropagating, StiffnessAndTransverseForceDouble) {
  const AngularSpectrum s = beam(BeamFamily::gaussian_linear_x);
  const MieTable t = sphere(0.1, n_silica);
  const ForceEngine eng(s, t);
  const double h = 5e-9;
  auto pair = [&](const Vec3& r) { return eng.force(r) + mirror_z(eng.force(mirror_z(r))); };
  const double k1 = -(eng.force({0, 0, h})[2] - eng.force({0, 0, -h})[2]) / (2 * h);
  const double k2 = -(pair({0, 0, h})[2] - pair({0, 0, -h})[2]) / (2 * h);
  EXPECT_NEAR(k2, 2.0 * k1, 0.01 * std::abs(k2));
  const Vec3 r{0.2e-6, 0.1e-6, 0.0};
  EXPECT_NEAR(pair(r)[0], 2.0 * eng.force(r)[0], 1e-9 * std::abs(pair(r)[0]));
  EXPECT_NEAR(counterprop_force(s, t, r).F[1], 2.0 * eng.force(r)[1], 1e-9 * std::abs(pair(r)[1]));
}

TEST(Potential, HarmonicNearEquilibrium) {
  const AngularSpectrum s = beam(BeamFamily::gaussian_linear_x);
  const MieTable t = sphere(0.4, n_silica);
  const TrapReport r = trap_report(s, t, silica(), {});
  ASSERT_TRUE(r.trapped);
  const ForceEngine eng(s, t);
  const double w0 = 1550e-9 / (pi * 0.8);
  const PotentialProfile p = potential_profile([&](const Vec3& q) { return eng.force(q); }, Axis::x,
                                               r.evaluation_point, {-w0 / 4, w0 / 4}, 201);
  // U(x) - U(0) against k x^2 / 2 with k from the trap report
  const double U0 = p.potential[100];
  double umax = 0.0, res = 0.0;
  for (std::size_t i = 0; i < p.coordinate.size(); ++i) {
    const double x = p.coordinate[i];
    const double model = 0.5 * r.stiffness[0] * x * x;
    umax = std::max(umax, model);
    res = std::max(res, std::abs(p.potential[i] - U0 - model));
  }
  EXPECT_LT(res, 0.02 * umax);
}

TEST(Potential, ZeroFieldGivesFlatPotential) {
  const PotentialProfile p =
      potential_profile([](const Vec3&) { return Vec3{0, 0, 0}; }, Axis::z, {0, 0, 0}, {-1e-6, 1e-6}, 201);
  for (double u : p.potential) EXPECT_EQ(u, 0.0);
}

TEST(Potential, RejectsCoarseSampling) {
  EXPECT_THROW(potential_profile([](const Vec3&) { return Vec3{0, 0, 0}; }, Axis::z, {0, 0, 0}, {-1, 1}, 50),
               DomainError);
}

TEST(Trap, SilicaInGaussianBeamIsTrapped) {
  const TrapReport r = trap_report(beam(BeamFamily::gaussian_linear_x), sphere(0.3, n_silica), silica(), {});
  ASSERT_TRUE(r.z_eq.has_value());
  EXPECT_GT(*r.z_eq, 0.0);  // pushed downstream by the scattering force
  EXPECT_TRUE(r.trapped);
  for (int j = 0; j < 3; ++j) {
    EXPECT_GT(r.depth[j], 0.0);
    EXPECT_GT(r.frequencies[j], 0.0);
  }
  EXPECT_NEAR(r.frequencies[0], std::sqrt(r.stiffness[0] / r.mass), 1e-9 * r.frequencies[0]);
}
