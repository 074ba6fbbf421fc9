#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ptv/analytic.hpp"
#include "ptv/bie.hpp"

using namespace ptv;
constexpr double kPi = std::numbers::pi;

namespace {
std::shared_ptr<const SphericalGrid> grid(int n) {
  return std::make_shared<const SphericalGrid>(SphericalGrid::build(n));
}
struct Solved {
  BlockSystem sys;
  Densities dens;
  PolarizationTensor pt;
};
Solved solve(const RadialSurface& core, const RadialSurface& shell, const MaterialParams& mat, int n = 12) {
  BlockSystem sys = BlockSystem::assemble(BlockGeometry(grid(n), core, shell), mat);
  Densities d = solve_densities(sys);
  PolarizationTensor pt = polarization_tensor(sys, d);
  return {std::move(sys), std::move(d), pt};
}
}  // namespace

TEST(Material, ContrastsAndNeutrality) {
  const MaterialParams m(1.0, 2.0, 1.4);
  EXPECT_NEAR(m.lambda(), -1.5, 1e-15);
  EXPECT_NEAR(m.mu(), 17.0 / 6.0, 1e-14);
  EXPECT_NEAR(m.neutrality_ratio(), 5.0 / 9.0, 1e-15);
  EXPECT_TRUE(m.feasible());
  const double rho = neutral_radius_ratio(m);
  EXPECT_NEAR(neutral_outer_radius(1.0, m), 1.216440399, 1e-9);
  EXPECT_NEAR(neutral_inner_radius(1.0, m), rho, 1e-15);
  EXPECT_NEAR(1.0 / 6.0 - rho * rho * rho * (m.mu() + 1.0 / 6.0), m.lambda(), 1e-14);
}

TEST(Material, Infeasible) {
  const MaterialParams bad(2.0, 1.0, 3.0);
  EXPECT_NEAR(bad.neutrality_ratio(), 1.6, 1e-15);
  EXPECT_FALSE(bad.feasible());
  EXPECT_THROW(neutral_radius_ratio(bad), InfeasibleMaterial);
  // sigma_c = sigma_m collapses the shell
  EXPECT_FALSE(MaterialParams(1.0, 2.0, 1.0).feasible());
  // equal neighbours are representable with an infinite contrast
  const MaterialParams eq(1.5, 1.5, 1.0);
  EXPECT_EQ(eq.inv_lambda(), 0.0);
  EXPECT_TRUE(std::isinf(eq.lambda()));
}

TEST(Material, ContrastOffset) {
  const MaterialParams m(1.0, 2.0, 1.4);
  EXPECT_NEAR(m.with_lambda_offset(0.25).lambda(), -1.25, 1e-15);
  EXPECT_NEAR(m.with_lambda_offset(0.25).mu(), m.mu(), 1e-15);
}

TEST(Solve, NeutralPairHasVanishingPt) {
  const MaterialParams m(1.0, 2.0, 1.4);
  const double re = neutral_outer_radius(1.0, m);
  const Solved s = solve(RadialSurface::sphere(1.0), RadialSurface::sphere(re), m);
  EXPECT_LT(s.pt.frobenius(), 1e-7 * re * re * re);
  EXPECT_LT(s.dens.diagnostics.max_residual, 1e-12);
  EXPECT_LT(s.dens.diagnostics.max_mean, 1e-12);
  EXPECT_FALSE(s.dens.diagnostics.ill_conditioned);
}

TEST(Solve, NeutralDensityIsLinear) {
  const MaterialParams m(1.0, 2.0, 1.4);
  const double ri = 1.0, re = neutral_outer_radius(ri, m), rho = ri / re;
  const Solved s = solve(RadialSurface::sphere(ri), RadialSurface::sphere(re), m);
  const double gamma2 = 1.0 / (rho * (0.5 + m.mu()));
  const auto& g = s.sys.grid();
  for (int l = 0; l < 3; ++l) {
    for (std::size_t p = 0; p < g.size(); ++p) {
      const double xl = g.node(p)[l];
      EXPECT_NEAR(s.dens.core(l + 1)[p], -gamma2 * re * re * xl, 1e-7);
      EXPECT_NEAR(s.dens.shell(l + 1)[p], gamma2 * re * re * rho * xl, 1e-7);
    }
  }
}

TEST(Solve, SingleBallAndConcentricOracle) {
  const double sc = 3.0;
  const MaterialParams ball(sc, sc, 1.0);
  const Solved s = solve(RadialSurface::sphere(0.8), RadialSurface::sphere(1.0), ball);
  const double expect = 4.0 * kPi * (sc - 1.0) / (sc + 2.0);
  EXPECT_NEAR(s.pt.m(0, 0) / expect, 1.0, 1e-6);
  EXPECT_NEAR(s.pt.m(0, 1), 0.0, 1e-9);

  const MaterialParams mat(0.5, 4.0, 1.0);
  const Solved c = solve(RadialSurface::sphere(0.7), RadialSurface::sphere(1.1), mat);
  const Mat3 radial = analytic::concentric_pt(0.7, 1.1, mat);
  EXPECT_LT((c.pt.m - radial).norm() / radial.norm(), 1e-7);
}

TEST(Solve, PerturbedPtIsSymmetricAndConverges) {
  const MaterialParams m(1.0, 2.0, 1.4);
  const double re = neutral_outer_radius(1.0, m);
  const RadialSurface core(1.0, {{2, 1, 0.01}, {3, -2, 0.005}});
  const Solved a = solve(core, RadialSurface::sphere(re), m, 12);
  const Solved b = solve(core, RadialSurface::sphere(re), m, 20);
  EXPECT_LT(a.pt.asymmetry, 1e-6 * a.pt.frobenius() + 1e-12);
  EXPECT_GT(a.pt.frobenius(), 1e-5);
  EXPECT_LT((a.pt.m - b.pt.m).norm(), 1e-4 * b.pt.frobenius());
}

TEST(PolarizationTensor, FlattenOrderAndJson) {
  Mat3 m;
  m << 1, 4, 5, 4, 2, 6, 5, 6, 3;
  PolarizationTensor pt;
  pt.m = m;
  const auto f = pt.flatten();
  EXPECT_EQ(f, (PolarizationTensor::Flat{1, 2, 3, 4, 5, 6}));
  EXPECT_EQ(PolarizationTensor::from_flat(f).m, m);
  const auto j = pt.to_json();
  for (const char* k : {"m", "flatten", "asymmetry"}) EXPECT_TRUE(j.contains(k)) << k;
}

TEST(FarField, DipoleDecayAndNeutrality) {
  const MaterialParams mat(0.5, 4.0, 1.0);
  const Solved c = solve(RadialSurface::sphere(0.7), RadialSurface::sphere(1.1), mat);
  const auto radii = log_radii(5.5, 55.0, 6);
  std::vector<double> amp;
  for (double r : radii) amp.push_back(far_field_rms(c.sys, c.dens, r));
  EXPECT_NEAR(loglog_slope(radii, amp), -2.0, 0.05);
  // dipole: u - a.x = -(1/4pi) <M a, x>/|x|^3
  const Vec3 x(0.0, 0.0, 11.0);
  const double expect = -c.pt.m(2, 2) * 11.0 / (4.0 * kPi * std::pow(11.0, 3));
  EXPECT_NEAR(far_field(c.sys, c.dens, Vec3::UnitZ(), x) / expect, 1.0, 1e-3);
  EXPECT_THROW(far_field(c.sys, c.dens, Vec3::UnitZ(), Vec3(1.0, 0, 0)), std::domain_error);

  const MaterialParams n(1.0, 2.0, 1.4);
  const double re = neutral_outer_radius(1.0, n);
  const Solved z = solve(RadialSurface::sphere(1.0), RadialSurface::sphere(re), n);
  EXPECT_LT(std::abs(far_field(z.sys, z.dens, Vec3::UnitX(), Vec3(10 * re, 0, 0))), 1e-8 * re);
}

TEST(Helpers, LogRadiiAndProjection) {
  const auto r = log_radii(1.0, 100.0, 3);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_NEAR(r[1], 10.0, 1e-12);
  EXPECT_NEAR(loglog_slope({1.0, 10.0, 100.0}, {1.0, 1e-2, 1e-4}), -2.0, 1e-12);

  const auto g = SphericalGrid::build(4);
  Eigen::VectorXd f = Eigen::VectorXd::Ones(2 * g.size());
  f.tail(g.size()).array() += 2.0;
  project_mean_zero(g, f);
  EXPECT_NEAR(g.integrate(f.head(g.size())), 0.0, 1e-14);
  EXPECT_NEAR(g.integrate(f.tail(g.size())), 0.0, 1e-14);
}
