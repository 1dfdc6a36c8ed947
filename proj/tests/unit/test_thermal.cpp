#include <gtest/gtest.h>

#include <sstream>

#include "levtrap/recoil.hpp"
#include "levtrap/thermal.hpp"
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

NkTable two_rows() {
  return NkTable({{1e-6, 2.0, 0.1}, {4e-6, 3.0, 0.3}}, "test");
}

}  // namespace

TEST(NkTable, InterpolatesInLogWavelength) {
  const NkTable t = two_rows();
  const NkSample mid = t.at(2e-6);
  EXPECT_NEAR(mid.index.real(), 2.5, 1e-12);
  EXPECT_NEAR(mid.index.imag(), 0.2, 1e-12);
  EXPECT_FALSE(mid.extrapolated);
  EXPECT_EQ(t.at(1e-6).index, cplx(2.0, 0.1));
}

TEST(NkTable, HoldsEndpointsOutsideRange) {
  const NkTable t = two_rows();
  const NkSample lo = t.at(0.5e-6), hi = t.at(10e-6);
  EXPECT_EQ(lo.index, cplx(2.0, 0.1));
  EXPECT_EQ(hi.index, cplx(3.0, 0.3));
  EXPECT_TRUE(lo.extrapolated);
  EXPECT_TRUE(hi.extrapolated);
}

TEST(NkTable, ParseErrorsCarryLineNumber) {
  std::istringstream bad("# header\n1.0,2.0,0.1\n2.0,abc,0.1\n");
  try {
    parse_nk(bad, "bad");
    FAIL() << "no exception";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line, 3);
  }
  std::istringstream unordered("2.0,2.0,0.1\n1.0,2.0,0.1\n");
  EXPECT_THROW(parse_nk(unordered, "u"), ParseError);
  std::istringstream negative("1.0,2.0,-0.1\n");
  EXPECT_THROW(parse_nk(negative, "n"), ParseError);
  std::istringstream fields("1.0,2.0\n");
  EXPECT_THROW(parse_nk(fields, "f"), ParseError);
  std::istringstream empty("# nothing\n");
  EXPECT_THROW(parse_nk(empty, "e"), ParseError);
}

TEST(NkTable, MissingFileIsReported) {
  EXPECT_THROW(load_nk("/nonexistent/levtrap/nk.csv"), DataFileError);
}

TEST(NkTable, BundledSiliconAtTelecomWavelength) {
  const NkTable t = load_nk(resolve_data_path(silicon().nk_table_path));
  const NkSample s = t.at(1550e-9);
  EXPECT_NEAR(s.index.real(), 3.48, 0.01);
  EXPECT_LT(s.index.imag(), 1e-8);
  EXPECT_FALSE(s.extrapolated);
}

TEST(AbsorbedPower, LosslessSphereAbsorbsNothing) {
  const AbsorbedPower p = absorbed_power(beam(BeamFamily::radial), sphere(1.1, cplx(3.48, 0.0)), {0, 0, 0.1e-6});
  EXPECT_LT(std::abs(p.value()), 1e-9 * p.extinction);
}

TEST(AbsorbedPower, BoundedByBeamPower) {
  const AbsorbedPower p = absorbed_power(beam(BeamFamily::gaussian_linear_x), sphere(1.0, cplx(3.48, 0.5)), {});
  EXPECT_GT(p.value(), 0.0);
  EXPECT_LE(p.value(), 0.5);
}

TEST(AbsorbedPower, RayleighLimitIsIntensityTimesCrossSection) {
  const AngularSpectrum s = beam(BeamFamily::gaussian_linear_x);
  const MieTable t = sphere(0.05, cplx(1.46, 0.01));
  const double I0 = local_intensity(s, {0, 0, 0}, false);
  const double sigma = t.Q_abs * pi * t.x.radius * t.x.radius;
  EXPECT_NEAR(absorbed_power(s, t, {0, 0, 0}).value(), I0 * sigma, 0.03 * I0 * sigma);
}

TEST(Blackbody, ConstantCrossSectionMatchesPlanckBand) {
  const double sigma = 1e-14;
  const BlackbodyExchange bb([&](double) { return sigma; });
  for (double T : {293.0, 800.0, 2000.0}) {
    const double ref = oracle::constant_sigma_power(sigma, T, 0.5e-6, 200e-6);
    EXPECT_NEAR(bb.power(T), ref, 0.005 * ref) << T;
  }
}

TEST(Blackbody, ColdLimitAndMonotonicity) {
  const BlackbodyExchange bb([](double) { return 1e-14; });
  EXPECT_LT(bb.power(5.0), 1e-9 * bb.power(300.0));
  double prev = 0.0;
  for (double T = 300.0; T < 3000.0; T += 100.0) {
    const double p = bb.power(T);
    EXPECT_GT(p, prev);
    prev = p;
  }
  EXPECT_THROW(bb.power(0.0), DomainError);
}

TEST(Temperature, NoAbsorptionStaysAmbient) {
  const BlackbodyExchange bb([](double) { return 1e-14; });
  const ThermalReport r = solve_temperature(0.0, bb);
  EXPECT_EQ(r.T_solution, constants::T_ambient);
  EXPECT_FALSE(r.runaway);
}

TEST(Temperature, BalanceIsSatisfied) {
  const BlackbodyExchange bb([](double) { return 1e-14; });
  const double P = 2e-9;
  const ThermalReport r = solve_temperature(P, bb);
  EXPECT_FALSE(r.runaway);
  EXPECT_GT(r.T_solution, constants::T_ambient);
  EXPECT_LT(std::abs(P + r.P_bb_absorbed - r.P_bb_emitted), 1e-4 * P);
}

TEST(Temperature, RunawayWhenNoBalanceExists) {
  const BlackbodyExchange bb([](double) { return 1e-20; });
  const ThermalReport r = solve_temperature(1.0, bb);
  EXPECT_TRUE(r.runaway);
  EXPECT_EQ(r.T_solution, 5000.0);
  EXPECT_FALSE(r.warnings.empty());
  EXPECT_THROW(solve_temperature(-1.0, bb), DomainError);
}

TEST(Thermal, MeltingFlag) {
  const AngularSpectrum s = beam(BeamFamily::gaussian_linear_x);
  const MieTable t = sphere(0.5, cplx(1.46, 0.05));
  Material m = silica();
  m.refractive_index = cplx(1.46, 0.05);
  const NkTable nk({{0.5e-6, 1.46, 0.05}, {200e-6, 1.46, 0.05}}, "flat");
  const ThermalReport hot = thermal_report(s, t, m, {}, false, nk);
  ASSERT_GT(hot.T_solution, constants::T_ambient + 10.0);
  m.melting_point = hot.T_solution - 1.0;
  EXPECT_TRUE(thermal_report(s, t, m, {}, false, nk).melting_exceeded);
  m.melting_point = hot.T_solution + 100.0;
  EXPECT_FALSE(thermal_report(s, t, m, {}, false, nk).melting_exceeded);
}

TEST(Thermal, SiliconHeatsMostOnMagneticDipoleResonance) {
  const AngularSpectrum s = beam(BeamFamily::gaussian_linear_x);
  const Material si = silicon();
  const NkTable nk = load_nk(resolve_data_path(si.nk_table_path));
  const ResonanceList res = locate_resonances(si.refractive_index, 0.5, 1.2, {Family::magnetic});
  ASSERT_FALSE(res.entries.empty());
  const double peak = res.entries.front().kR_peak;
  auto T = [&](double kR) {
    return thermal_report(s, sphere(kR, si.refractive_index), si, {}, false, nk).T_solution;
  };
  const double at = T(peak);
  EXPECT_GT(at, T(peak - 0.05));
  EXPECT_GT(at, T(peak + 0.05));
  EXPECT_TRUE(thermal_report(s, sphere(peak, si.refractive_index), si, {}, false, nk).resonance_flag);
}
