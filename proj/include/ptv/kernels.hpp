// Integral kernels of the two-surface transmission system and their quadrature.
//
// All four kernels carry the Jacobian of the *target* point,
//   K(x, y) = (1/4pi) <X(x) - Y(y), nu(x)> / |X(x) - Y(y)|^3 * J(x),
// so they act on densities f = phi(Y(.)) J(.) pulled back to the unit sphere.
//   A: target core,  source core      B: target shell, source shell
//   C: target core,  source shell     D: target shell, source core
#pragma once

#include <functional>
#include <memory>
#include <stdexcept>

#include <Eigen/Dense>

#include "ptv/sphharm.hpp"
#include "ptv/surface.hpp"

namespace ptv {

/// Product rule in rotated polar coordinates about an arbitrary pole: Gauss-Legendre
/// in the polar angle on [0, pi] (weights include sin) and uniform azimuths. The
/// surface element cancels a 1/|x - y| singularity at the pole.
class PolarRule {
 public:
  PolarRule(int n_polar, int n_azimuth);
  /// Default resolution for a grid: 2 n_theta polar nodes, 2 n_theta azimuths.
  static PolarRule for_grid(const SphericalGrid& grid);

  int n_polar() const { return n_polar_; }
  int n_azimuth() const { return n_azimuth_; }
  std::size_t size() const { return static_cast<std::size_t>(n_polar_) * n_azimuth_; }

  /// Nodes around the north pole and their weights.
  const Points& local_nodes() const { return local_; }
  const Eigen::VectorXd& weights() const { return weights_; }

  /// Nodes around the pole `x`: R(x) applied to local_nodes(), R(x) e3 = x.
  Points nodes_around(const Vec3& x) const;

  double integrate(const Vec3& pole, const std::function<double(const Vec3&)>& f) const;

 private:
  int n_polar_;
  int n_azimuth_;
  Points local_;
  Eigen::VectorXd weights_;
};

/// Rotation taking e3 to x = (sin t cos p, sin t sin p, cos t), built as Rz(p) Ry(t).
Mat3 pole_rotation(const Vec3& x);

enum class Block { A, B, C, D };
const char* block_name(Block b);
inline bool is_singular(Block b) { return b == Block::A || b == Block::B; }

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class SurfacesIntersect : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Core and shell surfaces discretized on a common grid. The constructor enforces
/// star-shapedness, nesting, and the smallness budget
///   sup|p_core| + sup|p_shell| <= budget_fraction * (r_shell - r_core),
/// which keeps |X_core - Y_shell| >= (1 - budget_fraction)(r_shell - r_core).
class BlockGeometry {
 public:
  static constexpr double kDefaultBudget = 0.2;

  BlockGeometry(std::shared_ptr<const SphericalGrid> grid, RadialSurface core, RadialSurface shell,
                double budget_fraction = kDefaultBudget);
  BlockGeometry(std::shared_ptr<const SphericalGrid> grid, PolarRule rule, RadialSurface core,
                RadialSurface shell, double budget_fraction = kDefaultBudget);

  const SphericalGrid& grid() const { return *grid_; }
  std::shared_ptr<const SphericalGrid> grid_ptr() const { return grid_; }
  const PolarRule& rule() const { return rule_; }
  const RadialSurface& core() const { return core_; }
  const RadialSurface& shell() const { return shell_; }
  const SurfaceFrame& core_frame() const { return core_frame_; }
  const SurfaceFrame& shell_frame() const { return shell_frame_; }

  /// sup|p_core| + sup|p_shell| on the grid, compared against the budget.
  double perturbation_size() const {
    return core_frame_.perturbation_sup + shell_frame_.perturbation_sup;
  }

 private:
  std::shared_ptr<const SphericalGrid> grid_;
  PolarRule rule_;
  RadialSurface core_;
  RadialSurface shell_;
  SurfaceFrame core_frame_;
  SurfaceFrame shell_frame_;
};

/// (1/4pi) <X - Y, nu> / |X - Y|^3 * J for a target frame and a source point.
double kernel(const Vec3& target, const Vec3& normal, double jacobian, const Vec3& source);

/// Kernel at two grid nodes. Throws std::invalid_argument for x_idx == y_idx on A or B.
double kernel_value(Block which, const BlockGeometry& geom, std::size_t x_idx, std::size_t y_idx);

/// Kernel at two arbitrary unit vectors (frames evaluated from the surfaces).
double kernel_value(Block which, const RadialSurface& core, const RadialSurface& shell,
                    const Vec3& x, const Vec3& y);

/// Dense Nystrom matrices of the four blocks on the grid: (K f)(x_i) ~ sum_p K_ip f_p.
struct BlockMatrices {
  Eigen::MatrixXd a, b, c, d;
  const Eigen::MatrixXd& operator[](Block which) const;
  Eigen::MatrixXd& operator[](Block which);
};

struct BlockSelection {
  bool a = true, b = true, c = true, d = true;
};

/// Every block is applied with the rotated polar rule about each target node; the
/// density is carried to the rotated nodes by its band-limited harmonic expansion.
BlockMatrices assemble_blocks(const BlockGeometry& geom, BlockSelection which = {});

/// Operator action of one assembled block on a grid density.
Eigen::VectorXd apply_block(Block which, const BlockMatrices& blocks, const Eigen::VectorXd& density);

/// lambda_n = 2 pi int_{-1}^{1} P_n(t) f(t) dt, the Funk-Hecke eigenvalue of a zonal
/// kernel f(x . y). Adaptive tanh-sinh quadrature tolerates integrable endpoint
/// singularities; throws std::domain_error if the integral does not converge.
double funk_hecke_eigen(const std::function<double(double)>& profile, int n);
/// Same, with the profile also given 1 - t computed without cancellation; use this form
/// for profiles singular at t = 1, whose tail below double resolution is otherwise lost.
double funk_hecke_eigen(const std::function<double(double, double)>& profile, int n);

}  // namespace ptv
