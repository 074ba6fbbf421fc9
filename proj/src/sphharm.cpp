#include "ptv/sphharm.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/special_functions/legendre.hpp>

namespace ptv {

namespace {

constexpr double kPi = std::numbers::pi;

// Fully normalized associated Legendre functions Pbar_l^m(t), packed as
// p[l(l+1)/2 + m]. No Condon-Shortley phase.
inline std::size_t plm_index(int l, int m) { return static_cast<std::size_t>(l * (l + 1) / 2 + m); }

void normalized_legendre(int max_degree, double t, double s, std::vector<double>& p) {
  p.assign(static_cast<std::size_t>((max_degree + 1) * (max_degree + 2) / 2), 0.0);
  p[0] = 1.0 / std::sqrt(4.0 * kPi);
  for (int m = 0; m <= max_degree; ++m) {
    if (m > 0) {
      p[plm_index(m, m)] =
          std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * p[plm_index(m - 1, m - 1)];
    }
    if (m + 1 <= max_degree) {
      p[plm_index(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * t * p[plm_index(m, m)];
    }
    for (int l = m + 2; l <= max_degree; ++l) {
      const double ll = static_cast<double>(l) * l;
      const double mm = static_cast<double>(m) * m;
      const double a = std::sqrt((4.0 * ll - 1.0) / (ll - mm));
      const double lm1 = static_cast<double>(l - 1) * (l - 1);
      const double b = std::sqrt((lm1 - mm) / (4.0 * lm1 - 1.0));
      p[plm_index(l, m)] = a * (t * p[plm_index(l - 1, m)] - b * p[plm_index(l - 2, m)]);
    }
  }
}

struct Angles {
  double t, s, cphi, sphi;
};

Angles angles_of(const Vec3& x) {
  const double rho = std::hypot(x.x(), x.y());
  const double r = x.norm();
  Angles a{x.z() / r, rho / r, 1.0, 0.0};
  if (rho > 0.0) {
    a.cphi = x.x() / rho;
    a.sphi = x.y() / rho;
  }
  return a;
}

void fill_trig(int max_degree, double c, double s, std::vector<double>& cm, std::vector<double>& sm) {
  cm.resize(static_cast<std::size_t>(max_degree + 1));
  sm.resize(static_cast<std::size_t>(max_degree + 1));
  cm[0] = 1.0;
  sm[0] = 0.0;
  for (int m = 1; m <= max_degree; ++m) {
    cm[m] = cm[m - 1] * c - sm[m - 1] * s;
    sm[m] = sm[m - 1] * c + cm[m - 1] * s;
  }
}

}  // namespace

void real_sh_values(int max_degree, const Vec3& x, std::span<double> out) {
  if (out.size() < static_cast<std::size_t>(sh_count(max_degree))) {
    throw std::invalid_argument("real_sh_values: output too small");
  }
  const Angles a = angles_of(x);
  thread_local std::vector<double> p, cm, sm;
  normalized_legendre(max_degree, a.t, a.s, p);
  fill_trig(max_degree, a.cphi, a.sphi, cm, sm);
  for (int l = 0; l <= max_degree; ++l) {
    out[sh_index(l, 0)] = p[plm_index(l, 0)];
    for (int m = 1; m <= l; ++m) {
      const double v = std::numbers::sqrt2 * p[plm_index(l, m)];
      out[sh_index(l, m)] = v * cm[m];
      out[sh_index(l, -m)] = v * sm[m];
    }
  }
}

void real_sh_values_and_gradients(int max_degree, const Vec3& x, std::span<double> values,
                                  std::span<Vec3> grads) {
  const auto n = static_cast<std::size_t>(sh_count(max_degree));
  if (values.size() < n || grads.size() < n) {
    throw std::invalid_argument("real_sh_values_and_gradients: output too small");
  }
  const Angles a = angles_of(x);
  if (a.s < 1e-12) {
    throw std::domain_error("tangential gradient requested at a coordinate pole");
  }
  thread_local std::vector<double> p, cm, sm;
  normalized_legendre(max_degree, a.t, a.s, p);
  fill_trig(max_degree, a.cphi, a.sphi, cm, sm);
  const Vec3 e_theta(a.t * a.cphi, a.t * a.sphi, -a.s);
  const Vec3 e_phi(-a.sphi, a.cphi, 0.0);
  for (int l = 0; l <= max_degree; ++l) {
    for (int m = 0; m <= l; ++m) {
      const double plm = p[plm_index(l, m)];
      const double prev = (l > m) ? p[plm_index(l - 1, m)] : 0.0;
      const double dtheta =
          (l * a.t * plm -
           std::sqrt((2.0 * l + 1.0) * (static_cast<double>(l) * l - static_cast<double>(m) * m) /
                     (2.0 * l - 1.0 > 0 ? 2.0 * l - 1.0 : 1.0)) *
               prev) /
          a.s;
      if (m == 0) {
        values[sh_index(l, 0)] = plm;
        grads[sh_index(l, 0)] = dtheta * e_theta;
        continue;
      }
      const double r2 = std::numbers::sqrt2;
      const double over_s = m * plm / a.s;
      values[sh_index(l, m)] = r2 * plm * cm[m];
      values[sh_index(l, -m)] = r2 * plm * sm[m];
      grads[sh_index(l, m)] = r2 * (dtheta * cm[m] * e_theta - over_s * sm[m] * e_phi);
      grads[sh_index(l, -m)] = r2 * (dtheta * sm[m] * e_theta + over_s * cm[m] * e_phi);
    }
  }
}

Eigen::MatrixXd real_sh_table(int max_degree, const Points& points) {
  const int n = sh_count(max_degree);
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> table(points.rows(), n);
  for (Eigen::Index p = 0; p < points.rows(); ++p) {
    real_sh_values(max_degree, points.row(p).transpose(),
                   std::span<double>(table.row(p).data(), static_cast<std::size_t>(n)));
  }
  return table;
}

double real_sh(int l, int m, const Vec3& x) {
  if (l < 0 || m < -l || m > l) throw std::out_of_range("real_sh: invalid (l, m)");
  std::vector<double> v(static_cast<std::size_t>(sh_count(l)));
  real_sh_values(l, x, v);
  return v[sh_index(l, m)];
}

void rotate_coefficients_z(int max_degree, double angle, std::span<const double> in,
                           std::span<double> out) {
  for (int l = 0; l <= max_degree; ++l) {
    out[sh_index(l, 0)] = in[sh_index(l, 0)];
    for (int m = 1; m <= l; ++m) {
      const double c = std::cos(m * angle);
      const double s = std::sin(m * angle);
      const double cp = in[sh_index(l, m)];
      const double cn = in[sh_index(l, -m)];
      out[sh_index(l, m)] = cp * c + cn * s;
      out[sh_index(l, -m)] = -cp * s + cn * c;
    }
  }
}

void rotate_moments_z(int max_degree, double angle, std::span<const double> in,
                      std::span<double> out) {
  for (int l = 0; l <= max_degree; ++l) {
    out[sh_index(l, 0)] = in[sh_index(l, 0)];
    for (int m = 1; m <= l; ++m) {
      const double c = std::cos(m * angle);
      const double s = std::sin(m * angle);
      const double up = in[sh_index(l, m)];
      const double un = in[sh_index(l, -m)];
      out[sh_index(l, m)] = c * up - s * un;
      out[sh_index(l, -m)] = c * un + s * up;
    }
  }
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  const auto zeros = boost::math::legendre_p_zeros<double>(n);
  std::vector<double> x, w;
  x.reserve(static_cast<std::size_t>(n));
  w.reserve(static_cast<std::size_t>(n));
  auto weight = [n](double z) {
    const double d = boost::math::legendre_p_prime(n, z);
    return 2.0 / ((1.0 - z * z) * d * d);
  };
  // zeros are the non-negative roots in ascending order
  for (auto it = zeros.rbegin(); it != zeros.rend(); ++it) {
    if (*it == 0.0) continue;
    x.push_back(-*it);
    w.push_back(weight(*it));
  }
  for (double z : zeros) {
    x.push_back(z);
    w.push_back(weight(z));
  }
  return {x, w};
}

SphericalGrid SphericalGrid::build(int n_theta) {
  if (n_theta < 4) {
    throw std::invalid_argument("SphericalGrid: n_theta must be >= 4, got " +
                                std::to_string(n_theta));
  }
  SphericalGrid g;
  g.n_theta_ = n_theta;
  auto [t, wt] = gauss_legendre(n_theta);
  // rings from the north pole down
  g.cos_theta_.assign(t.rbegin(), t.rend());
  std::vector<double> wring(wt.rbegin(), wt.rend());
  g.sin_theta_.resize(g.cos_theta_.size());
  for (std::size_t i = 0; i < g.cos_theta_.size(); ++i) {
    g.sin_theta_[i] = std::sqrt((1.0 - g.cos_theta_[i]) * (1.0 + g.cos_theta_[i]));
  }
  const int nphi = g.n_phi();
  const auto n = static_cast<Eigen::Index>(g.size());
  g.nodes_.resize(n, 3);
  g.weights_.resize(n);
  for (int i = 0; i < n_theta; ++i) {
    for (int k = 0; k < nphi; ++k) {
      const double phi = g.azimuth(k);
      const auto p = static_cast<Eigen::Index>(g.index(i, k));
      g.nodes_(p, 0) = g.sin_theta_[i] * std::cos(phi);
      g.nodes_(p, 1) = g.sin_theta_[i] * std::sin(phi);
      g.nodes_(p, 2) = g.cos_theta_[i];
      g.weights_(p) = wring[i] * 2.0 * kPi / nphi;
    }
  }
  g.harmonics_ = real_sh_table(g.band_limit(), g.nodes_);
  return g;
}

double SphericalGrid::azimuth(int k) const { return kPi * k / n_theta_; }

Eigen::VectorXd SphericalGrid::analyze(const Eigen::VectorXd& values, int max_degree) const {
  if (values.size() != static_cast<Eigen::Index>(size())) {
    throw std::invalid_argument("SphericalGrid::analyze: size mismatch");
  }
  if (max_degree > band_limit()) {
    throw std::invalid_argument("SphericalGrid::analyze: degree above band limit");
  }
  const int nc = sh_count(max_degree);
  return harmonics_.leftCols(nc).transpose() * weights_.cwiseProduct(values);
}

namespace w6 {

namespace {
void check_index(int j) {
  if (j < 1 || j > 6) throw std::out_of_range("W6 basis index must be in 1..6");
}
const double kInvSqrt3 = 1.0 / std::sqrt(3.0);
}  // namespace

double value(int j, const Vec3& x) {
  check_index(j);
  switch (j) {
    case 1: return 1.0 / std::sqrt(15.0);
    case 2: return x(0) * x(1);
    case 3: return x(1) * x(2);
    case 4: return (2.0 * x(2) * x(2) - x(0) * x(0) - x(1) * x(1)) * 0.5 * kInvSqrt3;
    case 5: return x(0) * x(2);
    default: return 0.5 * (x(0) * x(0) - x(1) * x(1));
  }
}

Mat3 hessian(int j) {
  check_index(j);
  Mat3 g = Mat3::Zero();
  switch (j) {
    case 1: break;
    case 2: g(0, 1) = g(1, 0) = 1.0; break;
    case 3: g(1, 2) = g(2, 1) = 1.0; break;
    case 4: g.diagonal() << -kInvSqrt3, -kInvSqrt3, 2.0 * kInvSqrt3; break;
    case 5: g(0, 2) = g(2, 0) = 1.0; break;
    default: g.diagonal() << 1.0, -1.0, 0.0; break;
  }
  return g;
}

// homogeneous of degree 2 (or constant), so the gradient is G^j x
Vec3 gradient(int j, const Vec3& x) { return hessian(j) * x; }

Vec3 tangential_gradient(int j, const Vec3& x) {
  const Vec3 g = gradient(j, x);
  return g - x.dot(g) * x;
}

std::pair<int, int> degree_order(int j) {
  check_index(j);
  static constexpr std::array<std::pair<int, int>, 6> kMap{
      {{0, 0}, {2, -2}, {2, -1}, {2, 0}, {2, 1}, {2, 2}}};
  return kMap[static_cast<std::size_t>(j - 1)];
}

double sh_scale() { return std::sqrt(4.0 * kPi / 15.0); }

}  // namespace w6

}  // namespace ptv
