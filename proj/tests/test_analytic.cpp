#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ptv/analytic.hpp"

using namespace ptv;
using namespace ptv::analytic;
constexpr double kPi = std::numbers::pi;

namespace {
const MaterialParams kMat(1.0, 2.0, 1.4);
Origin origin() { return origin_constants(kMat, 1.0, neutral_outer_radius(1.0, kMat)); }
}  // namespace

TEST(Origin, Constants) {
  const Origin o = origin();
  EXPECT_NEAR(o.gamma1, -0.2314285714285714, 1e-13);
  EXPECT_NEAR(o.gamma2, 0.3649321, 1e-6);
  EXPECT_NEAR(o.rho * o.rho * o.rho * o.gamma1, -0.1285714285714286, 1e-13);
  EXPECT_NEAR(v2_vector(o)[1], -0.521331, 1e-6);
  EXPECT_NEAR(v2_vector(o)[1], o.gamma1 * o.r_e * std::pow(o.rho, 3) * (0.5 + o.mu), 1e-14);
  EXPECT_THROW(origin_constants(kMat, 1.0, 1.3), std::invalid_argument);
  EXPECT_THROW(origin_constants(MaterialParams(2, 1, 3), 1.0, 1.3), InfeasibleMaterial);
}

TEST(Origin, InverseOfTwoByTwoAction) {
  const Origin o = origin();
  const Eigen::Matrix2d a = origin_operator(kMat, o.rho);
  EXPECT_NEAR(a(0, 0), -o.lambda + 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(a(0, 1), -o.rho * o.rho / 3.0, 1e-15);
  EXPECT_NEAR(a(1, 0), 2.0 * o.rho / 3.0, 1e-15);
  EXPECT_LT((origin_inverse(o) * a - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff(), 1e-14);
  // V1 solves the 2 x 2 system for g = -(r_i^2, r_e^2) since J nu_l = r^2 x_l
  const Eigen::Vector2d g(-o.r_i * o.r_i, -o.r_e * o.r_e);
  EXPECT_LT((a * v1_vector(o) - g).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(DerivKernel, HandValueForY4) {
  const double re = 1.3;
  const Vec3 x = Vec3::UnitZ(), y = Vec3::UnitX();
  const double hand = (9.0 / (4.0 * std::sqrt(3.0))) / (8.0 * kPi * re * std::sqrt(2.0));
  EXPECT_NEAR(deriv_kernel_b0(4, x, y, re), hand, 1e-15);
  EXPECT_EQ(deriv_kernel_b0(1, x, y, re), 0.0);
  EXPECT_THROW(deriv_kernel_b0(4, x, x, re), std::invalid_argument);
}

TEST(DerivKernel, ClosedFormsMatchKernelDifferences) {
  const Origin o = origin();
  const Vec3 x = Vec3(0.3, -0.4, 0.8).normalized(), y = Vec3(-0.5, 0.1, 0.6).normalized();
  for (int j = 1; j <= 6; ++j) {
    const double h = 1e-5;
    EXPECT_NEAR(deriv_kernel_b0(j, x, y, o.r_e), deriv_kernel_fd(Block::B, j, x, y, o.r_i, o.r_e, h), 1e-8);
    EXPECT_NEAR(deriv_kernel_b0_tangential(j, x, y, o.r_e), deriv_kernel_b0(j, x, y, o.r_e), 1e-12);
    EXPECT_NEAR(deriv_kernel_c00(j, x, y, o.r_i, o.r_e), deriv_kernel_fd(Block::C, j, x, y, o.r_i, o.r_e, h),
                1e-8);
    EXPECT_NEAR(deriv_kernel_d00(j, x, y, o.r_i, o.r_e), deriv_kernel_fd(Block::D, j, x, y, o.r_i, o.r_e, h),
                1e-8);
  }
}

TEST(DerivKernel, CrossKernelProportionalToYj) {
  const Vec3 x = Vec3(0.1, 0.2, 0.9).normalized(), y = Vec3(0.7, -0.3, 0.2).normalized();
  const double q1 = deriv_kernel_c00(1, x, y, 1.0, 1.3) / w6::value(1, y);
  for (int j = 2; j <= 6; ++j) {
    EXPECT_NEAR(deriv_kernel_c00(j, x, y, 1.0, 1.3) / w6::value(j, y), q1, 1e-12 * std::abs(q1));
  }
  EXPECT_EQ(kernel_e(1, x, y, 1.0, 1.3), 0.0);
}

TEST(Tables, MomentsAndStatedEntry) {
  // int x_1^2 Y_1 = (4 pi/3)/sqrt15; int x_1 x_2 Y_2 = 4 pi/15
  EXPECT_NEAR(table_c(1, 1, 1), 4.0 * kPi / (3.0 * std::sqrt(15.0)), 1e-15);
  EXPECT_NEAR(table_c(1, 2, 2), 4.0 * kPi / 15.0, 1e-15);
  EXPECT_EQ(table_c(1, 2, 3), 0.0);
  const double re = 1.2;
  EXPECT_NEAR(table_b(1, 1, 4, re), 4.0 * kPi / (45.0 * re) / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(table_b_corrected(1, 1, 4, re), 4.0 * kPi / (15.0 * re) * hessian_entry(1, 1, 4), 1e-15);
  for (int l = 1; l <= 3; ++l) {
    for (int lp = 1; lp <= 3; ++lp) {
      for (int j = 1; j <= 6; ++j) {
        EXPECT_EQ(table_b(l, lp, j, re), table_b(lp, l, j, re));
        EXPECT_EQ(table_f_corrected(l, lp, j, origin()), 0.0);
      }
    }
  }
}

TEST(Tables, QuadratureAgreesWithCorrectedForms) {
  const Origin o = origin();
  const PairingTables q = quadrature_pairings(o, 8, 48);
  double worst_b = 0, worst_cd = 0, worst_c = 0, worst_g = 0;
  for (int l = 1; l <= 3; ++l) {
    for (int lp = 1; lp <= 3; ++lp) {
      for (int j = 1; j <= 6; ++j) {
        worst_c = std::max(worst_c, std::abs(q.c[l - 1][lp - 1][j - 1] - table_c(l, lp, j)));
        worst_b = std::max(worst_b, std::abs(q.b[l - 1][lp - 1][j - 1] - table_b_corrected(l, lp, j, o.r_e)));
        worst_cd = std::max(worst_cd,
                            std::abs(q.cd[l - 1][lp - 1][j - 1] - table_cd(l, lp, j, o.rho, o.r_e)));
        worst_g = std::max(worst_g, std::abs(q.g[l - 1][lp - 1][j - 1] - table_g(l, lp, j, o)));
      }
    }
  }
  EXPECT_LT(worst_c, 1e-12);
  EXPECT_LT(worst_b, 1e-8);
  EXPECT_LT(worst_cd, 1e-8);
  EXPECT_LT(worst_g, 1e-8);
  EXPECT_LT((q.jacobian - corrected_origin_jacobian(o)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Jacobian, StatedAndCorrectedStructure) {
  const Origin o = origin();
  const double pre = kPi * std::pow(o.rho, 3) * o.r_e * o.r_e * o.gamma1;
  // (1/2 + 3 mu) = 9 for this material
  EXPECT_NEAR(jacobian_entry(1, 1, 1, o), pre * (-4.0 / (3.0 * std::sqrt(15.0))) * 9.0, 1e-14);
  EXPECT_NEAR(jacobian_entry(1, 2, 2, o), pre * 28.0 / 45.0, 1e-15);
  EXPECT_NEAR(jacobian_entry_corrected(1, 2, 2, o), pre * 4.0 / 15.0, 1e-15);
  EXPECT_EQ(jacobian_entry(1, 2, 3, o), 0.0);

  const Matrix6 js = origin_jacobian(o), jc = corrected_origin_jacobian(o);
  EXPECT_EQ(js.col(0), jc.col(0));
  for (int r = 0; r < 6; ++r) {
    for (int k = 0; k < 6; ++k) EXPECT_EQ(js(r, k) == 0.0, jc(r, k) == 0.0);
  }
  EXPECT_NEAR(std::abs(js.determinant()) / origin_determinant_magnitude(o), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(jc.determinant()) / corrected_determinant_magnitude(o), 1.0, 1e-12);
  EXPECT_GT(corrected_determinant_magnitude(o), 0.0);
  EXPECT_EQ(flat_index(2, 3), 5);
  EXPECT_EQ(flat_index(3, 2), 5);
}

TEST(ConcentricPt, LimitCases) {
  const double re = neutral_outer_radius(1.0, kMat);
  EXPECT_LT(concentric_pt(1.0, re, kMat).norm(), 1e-12 * re * re * re);
  const double sc = 2.5;
  const Mat3 ball = concentric_pt(0.6, 1.4, MaterialParams(sc, sc, 1.0));
  EXPECT_NEAR(ball(0, 0), 4.0 * kPi * std::pow(1.4, 3) * (sc - 1.0) / (sc + 2.0), 1e-12);
  const Mat3 hidden = concentric_pt(0.6, 1.4, MaterialParams(sc, 1.0, 1.0));
  EXPECT_NEAR(hidden(1, 1), 4.0 * kPi * std::pow(0.6, 3) * (sc - 1.0) / (sc + 2.0), 1e-12);
  EXPECT_EQ(hidden(0, 1), 0.0);
}
