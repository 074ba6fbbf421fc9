// Core-shell transmission problem: block system, densities, polarization tensor.
#pragma once

#include <array>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "ptv/kernels.hpp"

namespace ptv {

class InfeasibleMaterial : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class SingularSystem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Conductivities of core, shell and matrix with the derived contrasts
///   lambda = (s_c + s_s) / (2 (s_c - s_s)),   mu = (s_s + s_m) / (2 (s_s - s_m)).
/// Equal neighbouring conductivities give an infinite contrast; the reciprocal is
/// stored so those cases stay representable.
class MaterialParams {
 public:
  MaterialParams(double sigma_core, double sigma_shell, double sigma_matrix);

  double sigma_core() const { return sc_; }
  double sigma_shell() const { return ss_; }
  double sigma_matrix() const { return sm_; }

  double lambda() const { return 1.0 / inv_lambda_; }
  double mu() const { return 1.0 / inv_mu_; }
  double inv_lambda() const { return inv_lambda_; }
  double inv_mu() const { return inv_mu_; }

  /// (2s_s + s_c)(s_s - s_m) / ((2s_s + s_m)(s_s - s_c)); equals rho^3 at neutrality.
  double neutrality_ratio() const;
  /// 0 < neutrality_ratio < 1.
  bool feasible() const;

  /// Copy with lambda shifted by delta (negative-control runs only).
  MaterialParams with_lambda_offset(double delta) const;

  nlohmann::json to_json() const;

 private:
  double sc_, ss_, sm_;
  double inv_lambda_, inv_mu_;
};

/// rho = r_i / r_e for a neutral concentric pair. Throws InfeasibleMaterial.
double neutral_radius_ratio(const MaterialParams& mat);
/// r_e = r_i / rho; also checks lambda = 1/6 - rho^3 (mu + 1/6).
double neutral_outer_radius(double r_i, const MaterialParams& mat);
/// r_i = rho r_e.
double neutral_inner_radius(double r_e, const MaterialParams& mat);

struct SolveDiagnostics {
  double rcond = 0.0;            // reciprocal condition estimate of the scaled system
  double max_residual = 0.0;     // max over l of |A f - g| / |g|
  double max_mean = 0.0;         // max |int f| / |f| after projection
  bool ill_conditioned = false;  // 1/rcond above kConditionWarning
};

/// The 2N x 2N operator
///   [ -lambda I + A(h)    C(h, b)        ]
///   [  D(h, b)            -mu I + B(b)   ]
/// on a grid of N nodes, unknowns ordered core then shell.
class BlockSystem {
 public:
  static constexpr double kConditionWarning = 1e10;

  /// Assembles every block. `cached_a` / `cached_b` reuse a previously assembled
  /// self block; A depends on the core surface only, B on the shell only.
  static BlockSystem assemble(BlockGeometry geometry, const MaterialParams& mat,
                              const Eigen::MatrixXd* cached_a = nullptr,
                              const Eigen::MatrixXd* cached_b = nullptr);

  const BlockGeometry& geometry() const { return geom_; }
  const SphericalGrid& grid() const { return geom_.grid(); }
  const MaterialParams& material() const { return mat_; }
  const BlockMatrices& blocks() const { return blocks_; }
  std::size_t nodes() const { return grid().size(); }

  /// The unscaled operator above. Throws if lambda or mu is infinite.
  Eigen::MatrixXd operator_matrix() const;
  /// Action of the unscaled operator (finite contrasts only).
  Eigen::VectorXd apply(const Eigen::VectorXd& f) const;
  /// Rows divided by (lambda, mu): [ -I + A/lambda, C/lambda ; D/mu, -I + B/mu ].
  Eigen::MatrixXd scaled_matrix() const;

  /// g^(l) = -( J_i nu_i^l , J_e nu_e^l ), the right-hand side for the field x_l.
  Eigen::VectorXd rhs(int l) const;

 private:
  BlockSystem(BlockGeometry g, const MaterialParams& m) : geom_(std::move(g)), mat_(m) {}
  BlockGeometry geom_;
  MaterialParams mat_;
  BlockMatrices blocks_;
};

struct Densities {
  std::array<Eigen::VectorXd, 3> f;  // stacked (core, shell) densities for l = 1, 2, 3
  SolveDiagnostics diagnostics;
  Eigen::VectorXd core(int l) const;
  Eigen::VectorXd shell(int l) const;
};

/// Solves A f = g^(l) for l = 1, 2, 3 by dense LU, projecting the right-hand side and
/// the solution onto quadrature-mean-zero densities on each surface.
Densities solve_densities(const BlockSystem& sys);

/// Subtracts the weighted mean of each half of a stacked density.
void project_mean_zero(const SphericalGrid& grid, Eigen::VectorXd& f);

struct PolarizationTensor {
  Mat3 m = Mat3::Zero();
  double asymmetry = 0.0;  // max |m_ll' - m_l'l| before symmetrization

  using Flat = std::array<double, 6>;
  /// (m11, m22, m33, m12, m13, m23)
  Flat flatten() const;
  static PolarizationTensor from_flat(const Flat& v);
  double frobenius() const { return m.norm(); }
  nlohmann::json to_json() const;
};

/// m_ll' = int (r_i + h) x_l' f_1^(l) + int (r_e + b) x_l' f_2^(l), symmetrized.
PolarizationTensor polarization_tensor(const BlockSystem& sys, const Densities& dens);

/// u(x) - a.x via the single-layer representation with G(x) = -1/(4 pi |x|).
/// Throws std::domain_error for |x| < 1.5 r_e.
double far_field(const BlockSystem& sys, const Densities& dens, const Vec3& a, const Vec3& x);

/// Far-field amplitude at radius R: root mean square of |u - a.x| over a fixed set of
/// 128 directions and the three coordinate fields.
double far_field_rms(const BlockSystem& sys, const Densities& dens, double radius,
                     std::optional<int> field = std::nullopt);

/// Least-squares slope of log(amplitude) against log(radius).
double loglog_slope(const std::vector<double>& radii, const std::vector<double>& amplitudes);

/// n logarithmically spaced radii in [lo, hi].
std::vector<double> log_radii(double lo, double hi, int n);

}  // namespace ptv
