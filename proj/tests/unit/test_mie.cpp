#include <gtest/gtest.h>

#include <random>

#include "levtrap/mie.hpp"

using namespace levtrap;

namespace {
SizeParameter dimensionless(double x) { return SizeParameter{x, x, 2.0 * pi, 1.0}; }
}  // namespace

TEST(Mie, SmallSphereDipoleLimit) {
  const MieTable t = mie_coefficients(dimensionless(0.01), cplx(1.5, 0.0));
  const cplx m2(2.25, 0.0);
  const cplx expect = -I * (2.0 / 3.0) * std::pow(0.01, 3) * (m2 - 1.0) / (m2 + 2.0);
  EXPECT_NEAR(t.a[1].imag(), -1.961e-7, 1e-10);
  EXPECT_LT(std::abs(t.a[1] - expect), 1e-3 * std::abs(expect));
  const double q = 8.0 / 3.0 * std::pow(0.01, 4) * std::norm((m2 - 1.0) / (m2 + 2.0));
  EXPECT_NEAR(t.Q_sca, q, 1e-3 * q);
}

TEST(Mie, IndexMatchedSphereDoesNotScatter) {
  const MieTable t = mie_coefficients(dimensionless(2.0), cplx(1.0, 0.0));
  for (int n = 1; n <= t.n_max; ++n) {
    EXPECT_LT(std::abs(t.a[n]), 1e-15);
    EXPECT_LT(std::abs(t.b[n]), 1e-15);
  }
  EXPECT_NEAR(t.Q_ext, 0.0, 1e-15);
}

TEST(Mie, SiliconPowerBalance) {
  const MieTable t = mie_coefficients(dimensionless(0.9), cplx(3.48, 5.3e-11));
  EXPECT_NEAR(t.Q_ext, t.Q_sca + t.Q_abs, 1e-10 * t.Q_ext);
  EXPECT_GT(t.Q_abs, 0.0);
}

TEST(Mie, ForwardAmplitudeOpticalTheorem) {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> ux(0.05, 20.0), un(1.01, 4.0), uk(0.0, 0.1);
  for (int i = 0; i < 200; ++i) {
    const double x = ux(rng);
    const MieTable t = mie_coefficients(dimensionless(x), cplx(un(rng), uk(rng)));
    const auto [s1, s2] = scattering_amplitudes(t, 1.0);
    EXPECT_LT(std::abs(s1 - s2), 1e-12 * std::abs(s1));
    const double q = 4.0 / (x * x) * s1.real();
    EXPECT_NEAR(q, t.Q_ext, 1e-8 * t.Q_ext);
  }
}

TEST(Mie, LosslessCoefficientsLieOnUnitarityCircle) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(0.05, 20.0), un(1.01, 4.0);
  for (int i = 0; i < 100; ++i) {
    const MieTable t = mie_coefficients(dimensionless(ux(rng)), cplx(un(rng), 0.0));
    for (int n = 1; n <= t.n_max; ++n) {
      EXPECT_NEAR(std::abs(t.a[n] - 0.5), 0.5, 1e-10);
      EXPECT_NEAR(std::abs(t.b[n] - 0.5), 0.5, 1e-10);
    }
  }
}

TEST(Mie, TruncationIsSufficient) {
  for (double x : {0.5, 3.0, 12.0, 20.0}) {
    const MieTable a = mie_coefficients(dimensionless(x), cplx(1.46, 0.0));
    const MieTable b = mie_coefficients(dimensionless(x), cplx(1.46, 0.0), default_n_max(x) + 5);
    EXPECT_LT(std::abs(a.Q_sca - b.Q_sca), 1e-10 * b.Q_sca);
  }
}

TEST(Mie, InputValidation) {
  EXPECT_THROW(mie_coefficients(dimensionless(0.0), cplx(1.5, 0.0)), DomainError);
  EXPECT_THROW(mie_coefficients(dimensionless(250.0), cplx(1.5, 0.0)), RangeError);
  EXPECT_THROW(SizeParameter::from_radius(-1.0, 1550e-9), DomainError);
  Material bad = silicon();
  bad.refractive_index = cplx(3.48, -0.1);
  EXPECT_THROW(bad.validate(), DomainError);
}

TEST(Mie, SizeParameterFromRadius) {
  const auto sp = SizeParameter::from_radius(385e-9, 1550e-9);
  EXPECT_NEAR(sp.value, 2.0 * pi * 385.0 / 1550.0, 1e-12);
  EXPECT_NEAR(SizeParameter::from_kR(sp.value, 1550e-9).radius, 385e-9, 1e-18);
}

TEST(Resonances, SiliconMagneticDipoleComesFirst) {
  const ResonanceList r = locate_resonances(cplx(3.48, 0.0), 0.2, 2.2);
  double b1 = 0.0, a1 = 0.0;
  bool electric = false, magnetic = false;
  for (const auto& e : r.entries) {
    if (e.family == Family::magnetic && e.order == 1 && b1 == 0.0) b1 = e.kR_peak;
    if (e.family == Family::electric && e.order == 1 && a1 == 0.0) a1 = e.kR_peak;
    electric |= e.family == Family::electric;
    magnetic |= e.family == Family::magnetic;
  }
  EXPECT_TRUE(electric && magnetic);
  ASSERT_GT(b1, 0.0);
  ASSERT_GT(a1, 0.0);
  EXPECT_LT(b1, a1);

  // dense-scan oracle for the first magnetic dipole peak
  double best = 0.0, at = 0.0;
  for (double x = 0.6; x < 1.1; x += 1e-5) {
    const double v = std::norm(mie_coefficients(dimensionless(x), cplx(3.48, 0.0), 4).b[1]);
    if (v > best) best = v, at = x;
  }
  EXPECT_NEAR(b1, at, 2e-5);
}

TEST(Resonances, NoneForIndexMatchedSphere) {
  EXPECT_TRUE(locate_resonances(cplx(1.0, 0.0), 0.2, 2.2).entries.empty());
}

TEST(Resonances, RangeChecks) {
  EXPECT_THROW(locate_resonances(cplx(3.48, 0.0), 2.2, 0.2), DomainError);
  EXPECT_THROW(locate_resonances(cplx(3.48, 0.0), 0.2, 2.2, {Family::electric}, 0.01), DomainError);
}

TEST(Mass, SphereMass) {
  EXPECT_NEAR(mass_of(74e-9, 2200.0), 3.734e-18, 0.001e-18);
  EXPECT_THROW(mass_of(0.0, 2200.0), DomainError);
  EXPECT_NEAR(mass_of(148e-9, 2200.0) / mass_of(74e-9, 2200.0), 8.0, 1e-12);
}

TEST(Materials, TablePresets) {
  EXPECT_EQ(material_preset("Si")->density, 2200.0);
  EXPECT_EQ(material_preset("SiO2")->density, 1850.0);
  EXPECT_EQ(material_preset("silicon")->refractive_index, cplx(3.48, 5.3e-11));
  EXPECT_FALSE(material_preset("gold").has_value());
}
