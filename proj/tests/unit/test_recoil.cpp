#include <gtest/gtest.h>

#include <random>

#include "levtrap/recoil.hpp"

using namespace levtrap;

namespace {

AngularSpectrum beam(BeamFamily f, double na = 0.8) {
  BeamSpec b;
  b.family = f;
  b.numerical_aperture = na;
  return focus(b);
}

MieTable sphere(double kR, cplx m) { return mie_coefficients(SizeParameter::from_kR(kR, 1550e-9), m); }

}  // namespace

TEST(RayleighRecoil, DipolePartition) {
  const Vec3 p = rayleigh_partition(Axis::x);
  EXPECT_NEAR(p[0], 0.2, 1e-6);
  EXPECT_NEAR(p[1], 0.4, 1e-6);
  EXPECT_NEAR(p[2], 1.4, 1e-6);
  EXPECT_NEAR(p[0] + p[1] + p[2], 2.0, 1e-6);
  const Vec3 q = rayleigh_partition(Axis::y);
  EXPECT_NEAR(q[0], 0.4, 1e-6);
  EXPECT_NEAR(q[1], 0.2, 1e-6);
}

TEST(RayleighRecoil, ReportScalesWithEpsilon) {
  const MieTable t = sphere(0.1, cplx(1.46, 5e-9));
  const double mass = mass_of(t.x.radius, 1850.0);
  const RecoilReport r = rayleigh_recoil(1e12, t, mass, Axis::x, {1e5, 1e5, 1e5});
  EXPECT_NEAR(r.delta_E[0] + r.delta_E[1] + r.delta_E[2], 2.0 * r.epsilon, 1e-9 * r.epsilon);
  EXPECT_NEAR(r.Gamma[2], r.Edot[2] / (constants::hbar * 1e5), 1e-12 * r.Gamma[2]);
  EXPECT_EQ(r.regime, RecoilRegime::rayleigh);
}

TEST(RayleighRecoil, ZeroIntensityGivesNoHeating) {
  const MieTable t = sphere(0.1, cplx(1.46, 5e-9));
  const RecoilReport r = rayleigh_recoil(0.0, t, 1e-18, Axis::x);
  for (double e : r.Edot) EXPECT_EQ(e, 0.0);
  EXPECT_THROW(rayleigh_recoil(1.0, t, 0.0, Axis::x), DomainError);
}

TEST(MieRecoil, ParaxialLimitMatchesDipoleRates) {
  const AngularSpectrum s = beam(BeamFamily::gaussian_linear_x, 0.05);
  const MieTable t = sphere(0.1, cplx(1.46, 5e-9));
  const double mass = mass_of(t.x.radius, 1850.0);
  const Vec3 w{1e5, 1e5, 1e5};
  const RecoilReport mie = mie_recoil(s, t, {0, 0, 0}, mass, w);
  const RecoilReport ray = rayleigh_recoil(local_intensity(s, {0, 0, 0}, false), t, mass, Axis::x, w);
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(mie.Edot[j] / ray.Edot[j], 1.0, 0.01) << "axis " << j;

  RecoilOptions verbatim;
  verbatim.weighting = RecoilWeighting::verbatim;
  const RecoilReport v = mie_recoil(s, t, {0, 0, 0}, mass, w, verbatim);
  EXPECT_GT(std::abs(v.Edot[2] / ray.Edot[2] - 1.0), 0.5);
}

TEST(MieRecoil, RatesArePositive) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ukR(0.2, 1.8), upos(-0.3e-6, 0.3e-6);
  const BeamFamily fams[] = {BeamFamily::gaussian_linear_x, BeamFamily::radial, BeamFamily::azimuthal};
  for (int i = 0; i < 6; ++i) {
    const AngularSpectrum s = beam(fams[i % 3]);
    const MieTable t = sphere(ukR(rng), cplx(3.48, 5.3e-11));
    const RecoilReport r = mie_recoil(s, t, {upos(rng), upos(rng), upos(rng)}, mass_of(t.x.radius, 2200.0),
                                      {1e5, 1e5, 1e5});
    for (double e : r.Edot) EXPECT_GT(e, 0.0);
  }
}

TEST(MieRecoil, CounterpropagatingPairAddsMirrorBeam) {
  const AngularSpectrum s = beam(BeamFamily::azimuthal, 0.4);
  const MieTable t = sphere(1.0, cplx(3.48, 5.3e-11));
  const double mass = mass_of(t.x.radius, 2200.0);
  RecoilOptions cp;
  cp.counterpropagating = true;
  const RecoilReport one = mie_recoil(s, t, {0, 0, 0}, mass, {1, 1, 1});
  const RecoilReport two = mie_recoil(s, t, {0, 0, 0}, mass, {1, 1, 1}, cp);
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(two.Edot[j], 2.0 * one.Edot[j], 1e-6 * two.Edot[j]);
}

TEST(MieRecoil, StepSizeDisagreementIsReported) {
  const AngularSpectrum s = beam(BeamFamily::gaussian_linear_x);
  const MieTable t = sphere(1.0, cplx(3.48, 5.3e-11));
  RecoilOptions o;
  o.step = 0.2;
  o.richardson_tolerance = 1e-9;
  EXPECT_THROW(mie_recoil(s, t, {0, 0, 0}, mass_of(t.x.radius, 2200.0), {1, 1, 1}, o), StepSizeError);
}

TEST(MieRecoil, UndefinedFrequencyGivesNanRate) {
  const AngularSpectrum s = beam(BeamFamily::gaussian_linear_x);
  const MieTable t = sphere(0.5, cplx(3.48, 5.3e-11));
  const RecoilReport r = mie_recoil(s, t, {0, 0, 0}, mass_of(t.x.radius, 2200.0), {NAN, 1e5, -1.0});
  EXPECT_TRUE(std::isnan(r.Gamma[0]));
  EXPECT_TRUE(std::isfinite(r.Gamma[1]));
  EXPECT_TRUE(std::isnan(r.Gamma[2]));
}

TEST(RecoilRatio, IdenticalReportsGiveUnity) {
  RecoilReport a;
  a.Gamma = {2.0, 3.0, 4.0};
  const RecoilRatio r = recoil_ratio(a, a);
  for (int j = 0; j < 3; ++j) {
    EXPECT_DOUBLE_EQ(r.ratio[j], 1.0);
    EXPECT_TRUE(r.defined[j]);
  }
  RecoilReport b = a;
  b.beam.wavelength_vacuum = 1064e-9;
  EXPECT_THROW(recoil_ratio(a, b), DomainError);
  b = a;
  b.Gamma[1] = NAN;
  EXPECT_FALSE(recoil_ratio(a, b).defined[1]);
}

TEST(RecoilWeighting, Parsing) {
  EXPECT_EQ(parse_weighting("verbatim"), RecoilWeighting::verbatim);
  EXPECT_EQ(to_string(RecoilWeighting::amplitude_derivative), "amplitude_derivative");
  EXPECT_FALSE(parse_weighting("other").has_value());
}
