#include "ptv/analytic.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace ptv::analytic {

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrt3 = std::sqrt(3.0);
const double kSqrt15 = std::sqrt(15.0);

void check_indices(int l, int lp, int j) {
  if (l < 1 || l > 3 || lp < 1 || lp > 3) throw std::out_of_range("field index must be 1..3");
  if (j < 1 || j > 6) throw std::out_of_range("W6 index must be 1..6");
}

// Every table shares one sparsity pattern; only five values differ.
struct Pattern {
  double diag1;  // (1,1,1), (2,2,1), (3,3,1)
  double d4;     // (1,1,4), (2,2,4)
  double d34;    // (3,3,4)
  double p;      // (1,1,6), (1,2,2), (1,3,5), (2,3,3)
  double n26;    // (2,2,6)
};

double lookup(int l, int lp, int j, const Pattern& v) {
  check_indices(l, lp, j);
  if (l > lp) std::swap(l, lp);
  if (l == lp && j == 1) return v.diag1;
  if (j == 4 && l == lp) return l == 3 ? v.d34 : v.d4;
  if ((l == 1 && lp == 1 && j == 6) || (l == 1 && lp == 2 && j == 2) ||
      (l == 1 && lp == 3 && j == 5) || (l == 2 && lp == 3 && j == 3)) {
    return v.p;
  }
  if (l == 2 && lp == 2 && j == 6) return v.n26;
  return 0.0;
}

double distance3(const Vec3& x, const Vec3& y, double r_i, double r_e) {
  const double d = (r_i * x - r_e * y).norm();
  return d * d * d;
}

}  // namespace

Origin origin_constants(const MaterialParams& mat, double r_i, double r_e) {
  Origin o;
  o.rho = neutral_radius_ratio(mat);
  if (!(r_i > 0.0) || !(r_e > 0.0) || std::abs(o.rho * r_e - r_i) > 1e-10 * r_i) {
    throw std::invalid_argument("closed forms require neutral radii (r_i = rho r_e)");
  }
  o.r_i = r_i;
  o.r_e = r_e;
  o.lambda = mat.lambda();
  o.mu = mat.mu();
  const double rho3 = o.rho * o.rho * o.rho;
  o.gamma1 = 1.0 / (rho3 * (0.5 + o.mu) * (0.5 - o.mu));
  o.gamma2 = 1.0 / (o.rho * (0.5 + o.mu));
  return o;
}

int flat_index(int l, int lp) {
  if (l > lp) std::swap(l, lp);
  if (l == lp) return l - 1;
  if (l == 1) return lp == 2 ? 3 : 4;
  return 5;
}

double table_c(int l, int lp, int j) {
  const double s = 4.0 * kPi / 15.0;
  return s * lookup(l, lp, j, {kSqrt15 / 3.0, -1.0 / kSqrt3, 2.0 / kSqrt3, 1.0, -1.0});
}

double table_b(int l, int lp, int j, double r_e) {
  const double s = 4.0 * kPi / (45.0 * r_e);
  return s * lookup(l, lp, j, {0.0, 1.0 / kSqrt3, -2.0 / kSqrt3, -1.0, 1.0});
}

double table_b_corrected(int l, int lp, int j, double r_e) {
  const double s = 4.0 * kPi / (15.0 * r_e);
  return s * lookup(l, lp, j, {0.0, -1.0 / kSqrt3, 2.0 / kSqrt3, 1.0, -1.0});
}

double table_cd(int l, int lp, int j, double rho, double r_e) {
  const double s = 4.0 * kPi * rho * rho / (15.0 * r_e);
  return s * lookup(l, lp, j, {0.0, -1.0 / kSqrt3, 2.0 / kSqrt3, 1.0, -1.0});
}

double table_g(int l, int lp, int j, const Origin& o) {
  const double s = 4.0 * kPi / 15.0 * o.gamma1 * o.r_e * o.r_e * std::pow(o.rho, 3) * (0.5 + o.mu);
  return s * lookup(l, lp, j, {-2.0 * kSqrt15 / 3.0, -1.0 / kSqrt3, 2.0 / kSqrt3, 1.0, -1.0});
}

double table_f(int l, int lp, int j, const Origin& o) {
  const double s = 16.0 * kPi / 45.0 * std::pow(o.rho, 3) * o.r_e * o.r_e * o.gamma1;
  return s * lookup(l, lp, j, {0.0, 1.0 / kSqrt3, -2.0 / kSqrt3, -1.0, 1.0});
}

double table_f_corrected(int l, int lp, int j, const Origin&) {
  check_indices(l, lp, j);
  return 0.0;
}

double jacobian_entry(int l, int lp, int j, const Origin& o) {
  const double s = kPi * std::pow(o.rho, 3) * o.r_e * o.r_e * o.gamma1;
  return s * lookup(l, lp, j,
                    {-4.0 / (3.0 * kSqrt15) * (0.5 + 3.0 * o.mu), -28.0 / (45.0 * kSqrt3),
                     56.0 / (45.0 * kSqrt3), 28.0 / 45.0, -28.0 / 45.0});
}

double jacobian_entry_corrected(int l, int lp, int j, const Origin& o) {
  const double s = kPi * std::pow(o.rho, 3) * o.r_e * o.r_e * o.gamma1;
  return s * lookup(l, lp, j,
                    {-4.0 / (3.0 * kSqrt15) * (0.5 + 3.0 * o.mu), -4.0 / (15.0 * kSqrt3),
                     8.0 / (15.0 * kSqrt3), 4.0 / 15.0, -4.0 / 15.0});
}

namespace {
template <class Entry>
Matrix6 fill_jacobian(Entry entry) {
  Matrix6 m = Matrix6::Zero();
  for (int l = 1; l <= 3; ++l) {
    for (int lp = l; lp <= 3; ++lp) {
      for (int j = 1; j <= 6; ++j) m(flat_index(l, lp), j - 1) = entry(l, lp, j);
    }
  }
  return m;
}
}  // namespace

Matrix6 origin_jacobian(const Origin& o) {
  return fill_jacobian([&](int l, int lp, int j) { return jacobian_entry(l, lp, j, o); });
}

Matrix6 origin_jacobian(const MaterialParams& mat, double r_i, double r_e) {
  return origin_jacobian(origin_constants(mat, r_i, r_e));
}

Matrix6 corrected_origin_jacobian(const Origin& o) {
  return fill_jacobian([&](int l, int lp, int j) { return jacobian_entry_corrected(l, lp, j, o); });
}

Matrix6 corrected_origin_jacobian(const MaterialParams& mat, double r_i, double r_e) {
  return corrected_origin_jacobian(origin_constants(mat, r_i, r_e));
}

namespace {
double determinant_tail(const Origin& o, double off = 28.0 / 45.0) {
  return 4.0 / (3.0 * kSqrt15) * std::abs(0.5 + 3.0 * o.mu) * std::pow(off, 4) * (off / kSqrt3) *
         6.0;
}
}  // namespace

double origin_determinant_magnitude(const Origin& o) {
  return std::pow(std::abs(kPi * std::pow(o.rho, 3) * o.r_e * o.r_e * o.gamma1), 6) *
         determinant_tail(o);
}

double corrected_determinant_magnitude(const Origin& o) {
  return std::pow(std::abs(kPi * std::pow(o.rho, 3) * o.r_e * o.r_e * o.gamma1), 6) *
         determinant_tail(o, 4.0 / 15.0);
}

double swapped_determinant_magnitude(const Origin& o) {
  return std::pow(std::abs(kPi * o.rho * o.r_e * o.r_e * o.gamma1), 6) * determinant_tail(o);
}

double hessian_entry(int l, int lp, int j) {
  check_indices(l, lp, j);
  return w6::hessian(j)(lp - 1, l - 1);
}

// ---------------------------------------------------------------------------

Eigen::Matrix2d origin_operator(const MaterialParams& mat, double rho) {
  Eigen::Matrix2d m;
  m << -mat.lambda() + 1.0 / 6.0, -rho * rho / 3.0, 2.0 * rho / 3.0, -mat.mu() + 1.0 / 6.0;
  return m;
}

Eigen::Matrix2d origin_inverse(const Origin& o) {
  Eigen::Matrix2d m;
  m << -o.mu + 1.0 / 6.0, o.rho * o.rho / 3.0, -2.0 * o.rho / 3.0,
      std::pow(o.rho, 3) * (o.mu + 1.0 / 6.0);
  return o.gamma1 * m;
}

Eigen::Vector2d v1_vector(const Origin& o) {
  return o.gamma2 * o.r_e * o.r_e * Eigen::Vector2d(-1.0, o.rho);
}

Eigen::Vector2d v2_vector(const Origin& o) {
  return o.gamma1 * o.r_e * o.rho * (0.5 + o.mu) * Eigen::Vector2d(-1.0, o.rho * o.rho);
}

// ---------------------------------------------------------------------------

double deriv_kernel_b0(int j, const Vec3& x, const Vec3& y, double r_e) {
  const Vec3 d = y - x;
  const double r = d.norm();
  if (r == 0.0) throw std::invalid_argument("deriv_kernel_b0: coincident points");
  if (j == 1) return 0.0;
  const double quad = d.dot(w6::hessian(j) * d);
  return ((2.5 * w6::value(j, x) - 0.5 * w6::value(j, y)) / r - quad / (r * r * r)) /
         (8.0 * kPi * r_e);
}

double deriv_kernel_b0_tangential(int j, const Vec3& x, const Vec3& y, double r_e) {
  const double r = (x - y).norm();
  if (r == 0.0) throw std::invalid_argument("deriv_kernel_b0_tangential: coincident points");
  const double dy = w6::value(j, x) - w6::value(j, y);
  return dy / (16.0 * kPi * r_e * r) +
         (dy + y.dot(w6::tangential_gradient(j, x))) / (4.0 * kPi * r_e * r * r * r);
}

namespace {
// d C00 / db_1 divided by Y_1
double c00_bracket(const Vec3& x, const Vec3& y, double r_i, double r_e) {
  const double t = x.dot(y);
  const double d = (r_i * x - r_e * y).norm();
  const double d3 = d * d * d;
  return r_i / (8.0 * kPi) *
         ((-3.0 * r_e + r_i * t) / d3 - 3.0 * (r_i * r_i - r_e * r_e) * (r_e - r_i * t) / (d3 * d * d));
}
}  // namespace

double deriv_kernel_c00(int j, const Vec3& x, const Vec3& y, double r_i, double r_e) {
  return c00_bracket(x, y, r_i, r_e) * w6::value(j, y);
}

double kernel_e(int j, const Vec3& x, const Vec3& y, double r_i, double r_e) {
  if (j == 1) return 0.0;
  return r_e / (4.0 * kPi) * r_i * y.dot(w6::tangential_gradient(j, x)) / distance3(x, y, r_i, r_e);
}

double deriv_kernel_d00(int j, const Vec3& x, const Vec3& y, double r_i, double r_e) {
  const double rho = r_i / r_e;
  return -c00_bracket(x, y, r_i, r_e) / rho * w6::value(j, x) + kernel_e(j, x, y, r_i, r_e);
}

double deriv_kernel_fd(Block which, int j, const Vec3& x, const Vec3& y, double r_i, double r_e,
                       double step) {
  if (which == Block::A) return 0.0;
  if (!(step > 0.0)) throw std::invalid_argument("deriv_kernel_fd: step must be positive");
  W6Coeffs b{};
  b[static_cast<std::size_t>(j - 1)] = step;
  const RadialSurface core = RadialSurface::sphere(r_i);
  const RadialSurface plus = RadialSurface::from_w6(r_e, b);
  b[static_cast<std::size_t>(j - 1)] = -step;
  const RadialSurface minus = RadialSurface::from_w6(r_e, b);
  return (kernel_value(which, core, plus, x, y) - kernel_value(which, core, minus, x, y)) /
         (2.0 * step);
}

// ---------------------------------------------------------------------------

PairingTables quadrature_pairings(const Origin& o, int n_outer, int n_polar) {
  const SphericalGrid outer = SphericalGrid::build(n_outer);
  const PolarRule rule(n_polar, n_polar);
  const double ri = o.r_i, re = o.r_e, rho = o.rho;

  PairingTables t;
  // inner[l][j] accumulators for each kernel
  using Inner = std::array<std::array<double, 6>, 3>;
  for (std::size_t p = 0; p < outer.size(); ++p) {
    const Vec3 x = outer.node(p);
    const double wx = outer.weights()(static_cast<Eigen::Index>(p));
    const Points ys = rule.nodes_around(x);
    Inner ib{}, ibt{}, icd{}, ie{};
    for (Eigen::Index q = 0; q < ys.rows(); ++q) {
      const Vec3 y = ys.row(q).transpose();
      const double w = rule.weights()(q);
      for (int j = 1; j <= 6; ++j) {
        const auto jj = static_cast<std::size_t>(j - 1);
        const double kb = deriv_kernel_b0(j, x, y, re);
        const double kbt = deriv_kernel_b0_tangential(j, x, y, re);
        const double kcd = deriv_kernel_c00(j, x, y, ri, re) + rho * deriv_kernel_d00(j, x, y, ri, re);
        const double ke = kernel_e(j, x, y, ri, re);
        for (int l = 0; l < 3; ++l) {
          const double wy = w * y(l);
          ib[l][jj] += kb * wy;
          ibt[l][jj] += kbt * wy;
          icd[l][jj] += kcd * wy;
          ie[l][jj] += ke * wy;
        }
      }
    }
    for (int l = 0; l < 3; ++l) {
      for (int lp = 0; lp < 3; ++lp) {
        const double wl = wx * x(lp);
        for (std::size_t jj = 0; jj < 6; ++jj) {
          t.b[l][lp][jj] += wl * ib[l][jj];
          t.b_tan[l][lp][jj] += wl * ibt[l][jj];
          t.cd[l][lp][jj] += wl * icd[l][jj];
          t.e[l][lp][jj] += wl * ie[l][jj];
          const int j = static_cast<int>(jj) + 1;
          t.c[l][lp][jj] += wl * x(l) * w6::value(j, x);
          // d g^(l) / db_j on the shell: -2 r_e Y_j x_l + r_e (grad_T Y_j)_l
          const double dg = -2.0 * re * w6::value(j, x) * x(l) + re * w6::tangential_gradient(j, x)(l);
          t.g[l][lp][jj] += wl * dg;
        }
      }
    }
  }

  const Eigen::Vector2d v2 = v2_vector(o);
  const double f_scale = o.gamma1 * re * re * re * rho * rho * (0.5 + o.mu) * o.gamma2;
  for (int l = 0; l < 3; ++l) {
    for (int lp = 0; lp < 3; ++lp) {
      for (std::size_t jj = 0; jj < 6; ++jj) {
        t.g[l][lp][jj] *= v2(1);
        t.f[l][lp][jj] = f_scale * (-t.cd[l][lp][jj] + rho * rho * t.b[l][lp][jj]);
      }
    }
  }
  for (int l = 1; l <= 3; ++l) {
    for (int lp = l; lp <= 3; ++lp) {
      for (int j = 1; j <= 6; ++j) {
        const auto jj = static_cast<std::size_t>(j - 1);
        t.jacobian(flat_index(l, lp), j - 1) = o.gamma2 * re * re * rho * t.c[l - 1][lp - 1][jj] +
                                               t.g[l - 1][lp - 1][jj] - t.f[l - 1][lp - 1][jj];
      }
    }
  }
  return t;
}

// ---------------------------------------------------------------------------

Mat3 concentric_pt(double r_i, double r_e, const MaterialParams& mat) {
  if (!(r_i > 0.0) || !(r_e > r_i)) throw std::invalid_argument("concentric_pt: need 0 < r_i < r_e");
  const double sc = mat.sigma_core(), ss = mat.sigma_shell(), sm = mat.sigma_matrix();
  Eigen::Matrix4d a;
  Eigen::Vector4d rhs;
  // unknowns (A, B, C, E)
  a << r_i, -r_i, -1.0 / (r_i * r_i), 0.0,                              //
      sc, -ss, 2.0 * ss / (r_i * r_i * r_i), 0.0,                        //
      0.0, r_e, 1.0 / (r_e * r_e), -1.0 / (r_e * r_e),                   //
      0.0, ss, -2.0 * ss / (r_e * r_e * r_e), 2.0 * sm / (r_e * r_e * r_e);
  rhs << 0.0, 0.0, r_e, sm;
  const Eigen::FullPivLU<Eigen::Matrix4d> lu(a);
  if (!lu.isInvertible()) throw std::runtime_error("concentric_pt: singular radial system");
  const Eigen::Vector4d s = lu.solve(rhs);
  return -4.0 * kPi * s(3) * Mat3::Identity();
}

}  // namespace ptv::analytic
