#include <gtest/gtest.h>

#include <cmath>

#include "ptv/surface.hpp"

using namespace ptv;

TEST(RadialSurface, SphereAndTerms) {
  const RadialSurface s = RadialSurface::sphere(2.0);
  EXPECT_TRUE(s.is_sphere());
  EXPECT_EQ(s.max_degree(), -1);
  EXPECT_DOUBLE_EQ(s.radius(Vec3::UnitX()), 2.0);

  const RadialSurface p(1.0, {{2, 1, 0.01}, {0, 0, 0.02}});
  EXPECT_EQ(p.max_degree(), 2);
  EXPECT_DOUBLE_EQ(p.coefficient(2, 1), 0.01);
  EXPECT_DOUBLE_EQ(p.coefficient(3, 0), 0.0);
  const Vec3 x = Vec3(0.3, 0.4, 0.5).normalized();
  EXPECT_NEAR(p.perturbation(x), 0.01 * real_sh(2, 1, x) + 0.02 * real_sh(0, 0, x), 1e-15);
}

TEST(RadialSurface, W6RoundTrip) {
  const W6Coeffs b{0.01, -0.02, 0.03, 0.004, -0.005, 0.006};
  const RadialSurface s = RadialSurface::from_w6(1.5, b);
  const Vec3 x = Vec3(-0.2, 0.7, 0.1).normalized();
  double expect = 0.0;
  for (int j = 1; j <= 6; ++j) expect += b[j - 1] * w6::value(j, x);
  EXPECT_NEAR(s.perturbation(x), expect, 1e-15);
  EXPECT_NEAR(RadialSurface::sphere(1.5).plus_w6(b).perturbation(x), expect, 1e-15);
}

TEST(RadialSurface, JsonRoundTrip) {
  const RadialSurface s(1.25, {{1, -1, 0.5}, {3, 2, -0.125}});
  const auto j = s.to_json();
  EXPECT_EQ(j.at("base_radius").get<double>(), 1.25);
  ASSERT_TRUE(j.at("coeffs").is_array());
  for (const auto& t : j.at("coeffs")) {
    EXPECT_TRUE(t.contains("l") && t.contains("m") && t.contains("value"));
  }
  const RadialSurface r = RadialSurface::from_json(j);
  EXPECT_EQ(r.to_json().dump(), j.dump());
}

TEST(RadialSurface, ScaledAndRebased) {
  const RadialSurface s(1.0, {{2, 0, 0.1}});
  const Vec3 x = Vec3::UnitZ();
  EXPECT_NEAR(s.scaled(0.5).perturbation(x), 0.5 * s.perturbation(x), 1e-16);
  EXPECT_DOUBLE_EQ(s.with_base_radius(3.0).radius(x), 3.0 + s.perturbation(x));
}

TEST(SurfaceFrame, SphereNormalsAndJacobian) {
  const auto g = SphericalGrid::build(6);
  const SurfaceFrame f = surface_frame(RadialSurface::sphere(2.0), g);
  for (std::size_t p = 0; p < g.size(); ++p) {
    const Vec3 x = g.node(p);
    EXPECT_NEAR((f.normal.row(p).transpose() - x).norm(), 0.0, 1e-15);
    EXPECT_NEAR(f.jacobian[p], 4.0, 1e-14);
  }
  EXPECT_EQ(f.perturbation_sup, 0.0);
}

TEST(SurfaceFrame, AreaOfPerturbedSurfaceMatchesFineGrid) {
  const RadialSurface s(1.0, {{2, 2, 0.05}, {1, 0, 0.03}});
  auto area = [&](int n) {
    const auto g = SphericalGrid::build(n);
    const SurfaceFrame f = surface_frame(s, g);
    return g.integrate(f.jacobian);
  };
  EXPECT_NEAR(area(12), area(24), 1e-10);
}

TEST(SurfaceFrame, NormalIsOrthogonalToTangents) {
  const RadialSurface s(1.0, {{2, -1, 0.08}});
  const Vec3 x = Vec3(0.3, -0.2, 0.9).normalized();
  const LocalFrame lf = local_frame(s, x);
  const Vec3 t = x.cross(Vec3::UnitX()).normalized();
  const double h = 1e-6;
  const Vec3 tangent = (s.point((x + h * t).normalized()) - s.point((x - h * t).normalized())) / (2 * h);
  EXPECT_NEAR(lf.normal.dot(tangent), 0.0, 1e-8);
  EXPECT_NEAR(lf.normal.norm(), 1.0, 1e-15);
  EXPECT_GT(lf.normal.dot(x), 0.0);
}

TEST(SurfaceFrame, Errors) {
  const auto g = SphericalGrid::build(4);
  EXPECT_THROW(surface_frame(RadialSurface(1.0, {{0, 0, -10.0}}), g), NotStarShaped);
  EXPECT_THROW(surface_frame(RadialSurface(1.0, {{6, 0, 0.01}}), g), std::invalid_argument);
}
