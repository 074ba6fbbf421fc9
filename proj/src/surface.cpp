#include "ptv/surface.hpp"

#include <cmath>
#include <string>

namespace ptv {

namespace {

void check_lm(int l, int m) {
  if (l < 0 || m < -l || m > l) {
    throw std::invalid_argument("invalid spherical harmonic index (" + std::to_string(l) + ", " +
                                std::to_string(m) + ")");
  }
}

}  // namespace

RadialSurface::RadialSurface(double base_radius, const std::vector<ShTerm>& terms)
    : base_radius_(base_radius) {
  if (!(base_radius > 0.0)) throw std::invalid_argument("base radius must be positive");
  int lmax = -1;
  for (const auto& t : terms) {
    check_lm(t.l, t.m);
    if (t.value != 0.0) lmax = std::max(lmax, t.l);
  }
  max_degree_ = lmax;
  coeffs_ = Eigen::VectorXd::Zero(lmax >= 0 ? sh_count(lmax) : 0);
  for (const auto& t : terms) {
    if (t.l <= lmax) coeffs_(sh_index(t.l, t.m)) += t.value;
  }
}

RadialSurface RadialSurface::from_w6(double base_radius, const W6Coeffs& b) {
  return RadialSurface(base_radius).plus_w6(b);
}

RadialSurface RadialSurface::plus_w6(const W6Coeffs& b) const {
  std::vector<ShTerm> t = terms();
  for (int j = 1; j <= 6; ++j) {
    const auto [l, m] = w6::degree_order(j);
    t.push_back({l, m, w6::sh_scale() * b[static_cast<std::size_t>(j - 1)]});
  }
  return RadialSurface(base_radius_, t);
}

double RadialSurface::coefficient(int l, int m) const {
  check_lm(l, m);
  if (l > max_degree_) return 0.0;
  return coeffs_(sh_index(l, m));
}

double RadialSurface::perturbation(const Vec3& x) const {
  if (max_degree_ < 0) return 0.0;
  thread_local std::vector<double> y;
  y.resize(static_cast<std::size_t>(sh_count(max_degree_)));
  real_sh_values(max_degree_, x, y);
  return Eigen::Map<const Eigen::VectorXd>(y.data(), coeffs_.size()).dot(coeffs_);
}

Vec3 RadialSurface::perturbation_tangential_gradient(const Vec3& x) const {
  if (max_degree_ < 0) return Vec3::Zero();
  const auto n = static_cast<std::size_t>(sh_count(max_degree_));
  thread_local std::vector<double> y;
  thread_local std::vector<Vec3> g;
  y.resize(n);
  g.resize(n);
  real_sh_values_and_gradients(max_degree_, x, y, g);
  Vec3 out = Vec3::Zero();
  for (std::size_t i = 0; i < n; ++i) out += coeffs_(static_cast<Eigen::Index>(i)) * g[i];
  return out;
}

RadialSurface RadialSurface::scaled(double t) const {
  RadialSurface s = *this;
  s.coeffs_ *= t;
  if (t == 0.0) {
    s.max_degree_ = -1;
    s.coeffs_.resize(0);
  }
  return s;
}

RadialSurface RadialSurface::with_base_radius(double r0) const {
  if (!(r0 > 0.0)) throw std::invalid_argument("base radius must be positive");
  RadialSurface s = *this;
  s.base_radius_ = r0;
  return s;
}

std::vector<ShTerm> RadialSurface::terms() const {
  std::vector<ShTerm> out;
  for (int l = 0; l <= max_degree_; ++l) {
    for (int m = -l; m <= l; ++m) {
      const double v = coeffs_(sh_index(l, m));
      if (v != 0.0) out.push_back({l, m, v});
    }
  }
  return out;
}

nlohmann::json RadialSurface::to_json() const {
  nlohmann::json coeffs = nlohmann::json::array();
  for (const auto& t : terms()) coeffs.push_back({{"l", t.l}, {"m", t.m}, {"value", t.value}});
  return {{"base_radius", base_radius_}, {"coeffs", coeffs}};
}

RadialSurface RadialSurface::from_json(const nlohmann::json& j) {
  std::vector<ShTerm> terms;
  if (j.contains("coeffs")) {
    for (const auto& c : j.at("coeffs")) {
      terms.push_back({c.at("l").get<int>(), c.at("m").get<int>(), c.at("value").get<double>()});
    }
  }
  return RadialSurface(j.at("base_radius").get<double>(), terms);
}

LocalFrame local_frame(double radius, const Vec3& x, const Vec3& grad_t) {
  const double q = std::sqrt(radius * radius + grad_t.squaredNorm());
  LocalFrame f;
  f.position = radius * x;
  f.jacobian = radius * q;
  f.normal = (radius * x - grad_t) / q;
  return f;
}

LocalFrame local_frame(const RadialSurface& s, const Vec3& x) {
  return local_frame(s.radius(x), x, s.perturbation_tangential_gradient(x));
}

SurfaceFrame surface_frame(const RadialSurface& surface, const SphericalGrid& grid) {
  const int lmax = surface.max_degree();
  if (lmax > grid.band_limit()) {
    throw std::invalid_argument("surface degree " + std::to_string(lmax) +
                                " exceeds grid band limit " + std::to_string(grid.band_limit()));
  }
  const auto n = static_cast<Eigen::Index>(grid.size());
  SurfaceFrame f;
  f.position.resize(n, 3);
  f.normal.resize(n, 3);
  f.tangential_gradient.resize(n, 3);
  f.radius.resize(n);
  f.jacobian.resize(n);

  Eigen::VectorXd pert = Eigen::VectorXd::Zero(n);
  if (lmax >= 0) pert = grid.harmonics().leftCols(sh_count(lmax)) * surface.coefficients();
  f.perturbation_sup = n > 0 ? pert.cwiseAbs().maxCoeff() : 0.0;

  for (Eigen::Index p = 0; p < n; ++p) {
    const Vec3 x = grid.nodes().row(p).transpose();
    const double r = surface.base_radius() + pert(p);
    if (!(r > 0.0)) {
      throw NotStarShaped("radius is non-positive at grid node " + std::to_string(p));
    }
    const Vec3 gt = surface.perturbation_tangential_gradient(x);
    const LocalFrame lf = local_frame(r, x, gt);
    f.position.row(p) = lf.position.transpose();
    f.normal.row(p) = lf.normal.transpose();
    f.tangential_gradient.row(p) = gt.transpose();
    f.radius(p) = r;
    f.jacobian(p) = lf.jacobian;
  }
  return f;
}

}  // namespace ptv
