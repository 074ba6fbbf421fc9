// Spherical grids, real spherical harmonics and the six-function shell basis.
#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>

#include <Eigen/Dense>

namespace ptv {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Points = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

// ---------------------------------------------------------------------------
// Real spherical harmonics
//
// Orthonormal real basis without the Condon-Shortley phase:
//   Y_{l,0}  = Pbar_l^0(cos t)
//   Y_{l,m}  = sqrt(2) Pbar_l^m(cos t) cos(m phi)     m > 0
//   Y_{l,-m} = sqrt(2) Pbar_l^m(cos t) sin(m phi)     m > 0
// with int_{S^2} Y_{l,m}^2 dS = 1. Coefficient vectors are packed by
// sh_index(l, m) = l^2 + l + m.
// ---------------------------------------------------------------------------

constexpr int sh_index(int l, int m) { return l * l + l + m; }
constexpr int sh_count(int max_degree) { return (max_degree + 1) * (max_degree + 1); }

/// Writes Y_{l,m}(x) for all l <= max_degree into `out` (size sh_count).
void real_sh_values(int max_degree, const Vec3& x, std::span<double> out);

/// Values plus the tangential gradient of every Y_{l,m} at x (|x| = 1, x not a pole).
void real_sh_values_and_gradients(int max_degree, const Vec3& x, std::span<double> values,
                                  std::span<Vec3> tangential_gradients);

/// Row p holds all harmonics evaluated at points.row(p).
Eigen::MatrixXd real_sh_table(int max_degree, const Points& points);

double real_sh(int l, int m, const Vec3& x);

/// Rotates a packed coefficient vector so that sum c'_lm Y_lm(y) = sum c_lm Y_lm(Rz(angle) y).
void rotate_coefficients_z(int max_degree, double angle, std::span<const double> in,
                           std::span<double> out);

/// Adjoint of rotate_coefficients_z: given u_lm = sum_q w_q Y_lm(y_q), returns
/// sum_q w_q Y_lm(Rz(angle) y_q).
void rotate_moments_z(int max_degree, double angle, std::span<const double> in,
                      std::span<double> out);

// ---------------------------------------------------------------------------
// SphericalGrid: Gauss-Legendre nodes in cos(theta) times uniform phi.
// ---------------------------------------------------------------------------

class SphericalGrid {
 public:
  /// n_theta Gauss-Legendre rings, 2 n_theta azimuths. Throws for n_theta < 4.
  static SphericalGrid build(int n_theta);

  int n_theta() const { return n_theta_; }
  int n_phi() const { return 2 * n_theta_; }
  std::size_t size() const { return static_cast<std::size_t>(n_theta_) * n_phi(); }

  /// Highest degree L such that all products Y_a Y_b with a, b <= L integrate exactly.
  int band_limit() const { return n_theta_ - 1; }

  std::size_t index(int ring, int azimuth) const {
    return static_cast<std::size_t>(ring) * n_phi() + azimuth;
  }

  const Points& nodes() const { return nodes_; }
  Vec3 node(std::size_t p) const { return nodes_.row(static_cast<Eigen::Index>(p)).transpose(); }
  const Eigen::VectorXd& weights() const { return weights_; }

  double ring_cos(int ring) const { return cos_theta_[ring]; }
  double ring_sin(int ring) const { return sin_theta_[ring]; }
  double azimuth(int k) const;

  /// Harmonics through band_limit() at every node (size() x sh_count(band_limit())).
  const Eigen::MatrixXd& harmonics() const { return harmonics_; }

  double integrate(const Eigen::VectorXd& values) const { return weights_.dot(values); }

  /// Discrete forward transform: c_lm = sum_p w_p Y_lm(x_p) f_p, for l <= max_degree.
  Eigen::VectorXd analyze(const Eigen::VectorXd& values, int max_degree) const;

 private:
  int n_theta_ = 0;
  std::vector<double> cos_theta_;
  std::vector<double> sin_theta_;
  Points nodes_;
  Eigen::VectorXd weights_;
  Eigen::MatrixXd harmonics_;
};

/// Gauss-Legendre nodes and weights on [-1, 1], nodes ascending.
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

// ---------------------------------------------------------------------------
// W6: the constant and the five degree-2 harmonics used for shell perturbations
//   Y1 = 1/sqrt(15), Y2 = x1 x2, Y3 = x2 x3, Y4 = (2 x3^2 - x1^2 - x2^2)/(2 sqrt 3),
//   Y5 = x1 x3, Y6 = (x1^2 - x2^2)/2,
// each with int |Y_j|^2 dS = 4 pi / 15. Indices are 1-based as in the usual notation.
// ---------------------------------------------------------------------------

using W6Coeffs = std::array<double, 6>;

namespace w6 {

/// Y_j(x) for |x| = 1. Throws std::out_of_range for j outside 1..6.
double value(int j, const Vec3& x);

/// Euclidean gradient of the homogeneous (degree 0 or 2) extension of Y_j.
Vec3 gradient(int j, const Vec3& x);

/// Constant Hessian G^j of the degree-2 extension (zero for j = 1).
Mat3 hessian(int j);

/// grad Y - (x . grad Y) x on the sphere.
Vec3 tangential_gradient(int j, const Vec3& x);

/// (l, m) of the real orthonormal harmonic proportional to Y_j.
std::pair<int, int> degree_order(int j);

/// Y_j = sh_scale() * Y_{l,m} with (l, m) = degree_order(j).
double sh_scale();

}  // namespace w6

}  // namespace ptv
