#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "ptv/sphharm.hpp"

using namespace ptv;
constexpr double kPi = std::numbers::pi;

namespace {
Vec3 random_unit(std::mt19937_64& gen) {
  std::normal_distribution<double> n;
  Vec3 v(n(gen), n(gen), n(gen));
  return v.normalized();
}
}  // namespace

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  const auto [x, w] = gauss_legendre(8);
  for (int k = 0; k < 16; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], k);
    const double exact = (k % 2 == 1) ? 0.0 : 2.0 / (k + 1);
    EXPECT_NEAR(s, exact, 1e-14) << "degree " << k;
  }
  EXPECT_TRUE(std::is_sorted(x.begin(), x.end()));
}

TEST(SphericalGrid, ShapeAndWeights) {
  const auto g = SphericalGrid::build(12);
  EXPECT_EQ(g.n_phi(), 24);
  EXPECT_EQ(g.size(), 288u);
  EXPECT_EQ(g.band_limit(), 11);
  EXPECT_NEAR(g.weights().sum(), 4.0 * kPi, 1e-13);
  for (std::size_t p = 0; p < g.size(); ++p) EXPECT_NEAR(g.node(p).norm(), 1.0, 1e-15);
  EXPECT_THROW(SphericalGrid::build(3), std::invalid_argument);
}

TEST(SphericalGrid, HarmonicsAreOrthonormal) {
  const auto g = SphericalGrid::build(10);
  const Eigen::MatrixXd& y = g.harmonics();
  const Eigen::MatrixXd gram = y.transpose() * g.weights().asDiagonal() * y;
  EXPECT_LT((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SphericalGrid, AnalyzeRecoversCoefficients) {
  const auto g = SphericalGrid::build(10);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-1, 1);
  const int L = 6;
  Eigen::VectorXd c(sh_count(L));
  for (auto& v : c) v = u(gen);
  const Eigen::VectorXd f = g.harmonics().leftCols(sh_count(L)) * c;
  EXPECT_LT((g.analyze(f, L) - c).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(RealSh, LowDegreeClosedForms) {
  const Vec3 x = Vec3(0.3, -0.5, 0.8).normalized();
  const double c0 = 0.5 / std::sqrt(kPi);
  const double c1 = std::sqrt(3.0 / (4.0 * kPi));
  EXPECT_NEAR(real_sh(0, 0, x), c0, 1e-15);
  EXPECT_NEAR(real_sh(1, 0, x), c1 * x.z(), 1e-15);
  EXPECT_NEAR(real_sh(1, 1, x), c1 * x.x(), 1e-15);
  EXPECT_NEAR(real_sh(1, -1, x), c1 * x.y(), 1e-15);
  // no Condon-Shortley phase: Y_21 is +c x z
  const double c2 = 0.5 * std::sqrt(15.0 / kPi);
  EXPECT_NEAR(real_sh(2, 1, x), c2 * x.x() * x.z(), 1e-14);
  EXPECT_NEAR(real_sh(2, -2, x), c2 * x.x() * x.y(), 1e-14);
}

TEST(RealSh, GradientsMatchFiniteDifferences) {
  std::mt19937_64 gen(5);
  const int L = 5;
  std::vector<double> v(sh_count(L)), vp(sh_count(L)), vm(sh_count(L));
  std::vector<Vec3> grad(sh_count(L));
  for (int trial = 0; trial < 5; ++trial) {
    const Vec3 x = random_unit(gen);
    real_sh_values_and_gradients(L, x, v, grad);
    Vec3 t = x.cross(Vec3(0.2, 0.7, -0.4)).normalized();
    const double h = 1e-6;
    real_sh_values(L, (x + h * t).normalized(), vp);
    real_sh_values(L, (x - h * t).normalized(), vm);
    for (int k = 0; k < sh_count(L); ++k) {
      EXPECT_NEAR(grad[k].dot(t), (vp[k] - vm[k]) / (2 * h), 1e-7);
      EXPECT_NEAR(grad[k].dot(x), 0.0, 1e-13);
    }
  }
}

TEST(RealSh, RotationAboutZ) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-1, 1);
  const int L = 4;
  std::vector<double> c(sh_count(L)), cr(sh_count(L)), y(sh_count(L)), yr(sh_count(L));
  for (auto& v : c) v = u(gen);
  const double a = 0.7;
  rotate_coefficients_z(L, a, c, cr);
  const Vec3 x = random_unit(gen);
  const Eigen::Matrix3d rz = Eigen::AngleAxisd(a, Vec3::UnitZ()).toRotationMatrix();
  real_sh_values(L, x, y);
  real_sh_values(L, rz * x, yr);
  double lhs = 0, rhs = 0;
  for (int k = 0; k < sh_count(L); ++k) {
    lhs += cr[k] * y[k];
    rhs += c[k] * yr[k];
  }
  EXPECT_NEAR(lhs, rhs, 1e-13);
}

TEST(W6, NormsAndScale) {
  const auto g = SphericalGrid::build(8);
  for (int i = 1; i <= 6; ++i) {
    for (int j = 1; j <= 6; ++j) {
      Eigen::VectorXd f(g.size());
      for (std::size_t p = 0; p < g.size(); ++p) f[p] = w6::value(i, g.node(p)) * w6::value(j, g.node(p));
      EXPECT_NEAR(g.integrate(f), i == j ? 4.0 * kPi / 15.0 : 0.0, 1e-13);
    }
    const auto [l, m] = w6::degree_order(i);
    const Vec3 x = Vec3(0.1, 0.9, -0.3).normalized();
    EXPECT_NEAR(w6::value(i, x), w6::sh_scale() * real_sh(l, m, x), 1e-14);
  }
  EXPECT_THROW(w6::value(7, Vec3::UnitZ()), std::out_of_range);
}

TEST(W6, HessianTracelessAndEuler) {
  const Vec3 x = Vec3(-0.4, 0.2, 0.6).normalized();
  EXPECT_EQ(w6::hessian(1), Mat3::Zero());
  for (int j = 2; j <= 6; ++j) {
    EXPECT_NEAR(w6::hessian(j).trace(), 0.0, 1e-15);
    // degree-2 homogeneity: x . grad Y = 2 Y and x^T G x = 2 Y
    EXPECT_NEAR(x.dot(w6::gradient(j, x)), 2.0 * w6::value(j, x), 1e-14);
    EXPECT_NEAR(x.dot(w6::hessian(j) * x), 2.0 * w6::value(j, x), 1e-14);
    EXPECT_NEAR(w6::tangential_gradient(j, x).dot(x), 0.0, 1e-14);
  }
}
