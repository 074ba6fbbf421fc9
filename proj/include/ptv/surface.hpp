// Star-shaped surfaces r(x) = r0 + p(x) over the unit sphere.
#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "ptv/sphharm.hpp"

namespace ptv {

struct ShTerm {
  int l = 0;
  int m = 0;
  double value = 0.0;
};

/// Thrown when a surface is not a positive radial graph on the evaluation nodes.
class NotStarShaped : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Base radius plus a perturbation stored as real spherical-harmonic coefficients
/// (see sphharm.hpp for the convention).
class RadialSurface {
 public:
  RadialSurface() = default;
  explicit RadialSurface(double base_radius, const std::vector<ShTerm>& terms = {});

  static RadialSurface sphere(double radius) { return RadialSurface(radius); }
  /// r0 + sum_j b_j Y_j with the W6 basis.
  static RadialSurface from_w6(double base_radius, const W6Coeffs& b);

  double base_radius() const { return base_radius_; }
  /// Highest degree carrying a coefficient (-1 for the plain sphere).
  int max_degree() const { return max_degree_; }
  /// Packed coefficients, length sh_count(max_degree()).
  const Eigen::VectorXd& coefficients() const { return coeffs_; }
  double coefficient(int l, int m) const;
  bool is_sphere() const { return max_degree_ < 0; }

  double perturbation(const Vec3& x) const;
  Vec3 perturbation_tangential_gradient(const Vec3& x) const;
  double radius(const Vec3& x) const { return base_radius_ + perturbation(x); }
  Vec3 point(const Vec3& x) const { return radius(x) * x; }

  /// Same base radius, perturbation multiplied by t.
  RadialSurface scaled(double t) const;
  RadialSurface with_base_radius(double r0) const;
  /// Adds sum_j b_j Y_j to the perturbation.
  RadialSurface plus_w6(const W6Coeffs& b) const;

  std::vector<ShTerm> terms() const;

  nlohmann::json to_json() const;
  static RadialSurface from_json(const nlohmann::json& j);

 private:
  double base_radius_ = 1.0;
  int max_degree_ = -1;
  Eigen::VectorXd coeffs_;
};

/// Per-node geometry of a RadialSurface on a SphericalGrid.
struct SurfaceFrame {
  Points position;           // x_r(x) = r(x) x
  Points normal;             // outward unit normal at x_r(x)
  Points tangential_gradient;  // grad_T p(x)
  Eigen::VectorXd radius;    // r0 + p(x)
  Eigen::VectorXd jacobian;  // surface Jacobian of x -> x_r(x)
  double perturbation_sup = 0.0;  // max |p| over the nodes
};

/// Unit normal and Jacobian at one direction, from radius and grad_T p:
///   J nu = r (r x - grad_T p),   J = r sqrt(r^2 + |grad_T p|^2).
struct LocalFrame {
  Vec3 position;
  Vec3 normal;
  double jacobian;
};
LocalFrame local_frame(double radius, const Vec3& x, const Vec3& grad_t);
LocalFrame local_frame(const RadialSurface& s, const Vec3& x);

/// Throws NotStarShaped if r <= 0 at a node, std::invalid_argument if the
/// perturbation degree exceeds the grid band limit.
SurfaceFrame surface_frame(const RadialSurface& surface, const SphericalGrid& grid);

}  // namespace ptv
