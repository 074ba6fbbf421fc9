#include "ptv/kernels.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/legendre.hpp>

namespace ptv {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInv4Pi = 1.0 / (4.0 * kPi);

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Mat3 rotation_y(double c, double s) {
  Mat3 r;
  r << c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c;
  return r;
}

}  // namespace

PolarRule::PolarRule(int n_polar, int n_azimuth) : n_polar_(n_polar), n_azimuth_(n_azimuth) {
  if (n_polar < 2 || n_azimuth < 3) throw std::invalid_argument("PolarRule: resolution too small");
  auto [u, wu] = gauss_legendre(n_polar);
  const auto n = static_cast<Eigen::Index>(size());
  local_.resize(n, 3);
  weights_.resize(n);
  const double dphi = 2.0 * kPi / n_azimuth;
  for (int a = 0; a < n_polar; ++a) {
    const double theta = 0.5 * kPi * (u[a] + 1.0);
    const double w = 0.5 * kPi * wu[a] * std::sin(theta) * dphi;
    for (int b = 0; b < n_azimuth; ++b) {
      const double phi = dphi * b;
      const Eigen::Index q = static_cast<Eigen::Index>(a) * n_azimuth + b;
      local_(q, 0) = std::sin(theta) * std::cos(phi);
      local_(q, 1) = std::sin(theta) * std::sin(phi);
      local_(q, 2) = std::cos(theta);
      weights_(q) = w;
    }
  }
}

PolarRule PolarRule::for_grid(const SphericalGrid& grid) {
  return PolarRule(2 * grid.n_theta(), 2 * grid.n_theta());
}

Mat3 pole_rotation(const Vec3& x) {
  const Vec3 u = x.normalized();
  const double s = std::hypot(u.x(), u.y());
  double cp = 1.0, sp = 0.0;
  if (s > 0.0) {
    cp = u.x() / s;
    sp = u.y() / s;
  }
  Mat3 rz;
  rz << cp, -sp, 0.0, sp, cp, 0.0, 0.0, 0.0, 1.0;
  return rz * rotation_y(u.z(), s);
}

Points PolarRule::nodes_around(const Vec3& x) const {
  const Mat3 r = pole_rotation(x);
  return local_ * r.transpose();
}

double PolarRule::integrate(const Vec3& pole, const std::function<double(const Vec3&)>& f) const {
  const Points y = nodes_around(pole);
  double sum = 0.0;
  for (Eigen::Index q = 0; q < y.rows(); ++q) sum += weights_(q) * f(y.row(q).transpose());
  return sum;
}

const char* block_name(Block b) {
  switch (b) {
    case Block::A: return "A";
    case Block::B: return "B";
    case Block::C: return "C";
    default: return "D";
  }
}

BlockGeometry::BlockGeometry(std::shared_ptr<const SphericalGrid> grid, RadialSurface core,
                             RadialSurface shell, double budget_fraction)
    : BlockGeometry(grid, PolarRule::for_grid(*grid), std::move(core), std::move(shell),
                    budget_fraction) {}

BlockGeometry::BlockGeometry(std::shared_ptr<const SphericalGrid> grid, PolarRule rule,
                             RadialSurface core, RadialSurface shell, double budget_fraction)
    : grid_(std::move(grid)),
      rule_(std::move(rule)),
      core_(std::move(core)),
      shell_(std::move(shell)) {
  if (!grid_) throw std::invalid_argument("BlockGeometry: null grid");
  const double gap = shell_.base_radius() - core_.base_radius();
  if (!(gap > 0.0)) {
    throw SurfacesIntersect("shell base radius must exceed core base radius");
  }
  core_frame_ = surface_frame(core_, *grid_);
  shell_frame_ = surface_frame(shell_, *grid_);
  const double size = perturbation_size();
  if (size > budget_fraction * gap) {
    throw BudgetExceeded("perturbation size " + std::to_string(size) + " exceeds budget " +
                         std::to_string(budget_fraction) + " * (r_e - r_i) = " +
                         std::to_string(budget_fraction * gap));
  }
  const double min_gap = (shell_frame_.radius - core_frame_.radius).minCoeff();
  if (!(min_gap > 0.0)) {
    throw SurfacesIntersect("core and shell surfaces touch or cross");
  }
}

double kernel(const Vec3& target, const Vec3& normal, double jacobian, const Vec3& source) {
  const Vec3 d = target - source;
  const double r2 = d.squaredNorm();
  return kInv4Pi * d.dot(normal) / (r2 * std::sqrt(r2)) * jacobian;
}

namespace {

struct Sides {
  const SurfaceFrame* target;
  const SurfaceFrame* source;
};

Sides sides_of(Block which, const BlockGeometry& g) {
  switch (which) {
    case Block::A: return {&g.core_frame(), &g.core_frame()};
    case Block::B: return {&g.shell_frame(), &g.shell_frame()};
    case Block::C: return {&g.core_frame(), &g.shell_frame()};
    default: return {&g.shell_frame(), &g.core_frame()};
  }
}

}  // namespace

double kernel_value(Block which, const BlockGeometry& geom, std::size_t x_idx, std::size_t y_idx) {
  if (x_idx >= geom.grid().size() || y_idx >= geom.grid().size()) {
    throw std::out_of_range("kernel_value: node index out of range");
  }
  if (is_singular(which) && x_idx == y_idx) {
    throw std::invalid_argument(std::string("kernel_value: coincident points on singular block ") +
                                block_name(which));
  }
  const Sides s = sides_of(which, geom);
  const auto xi = static_cast<Eigen::Index>(x_idx);
  const auto yi = static_cast<Eigen::Index>(y_idx);
  return kernel(s.target->position.row(xi).transpose(), s.target->normal.row(xi).transpose(),
                s.target->jacobian(xi), s.source->position.row(yi).transpose());
}

double kernel_value(Block which, const RadialSurface& core, const RadialSurface& shell,
                    const Vec3& x, const Vec3& y) {
  const RadialSurface& tgt = (which == Block::A || which == Block::C) ? core : shell;
  const RadialSurface& src = (which == Block::A || which == Block::D) ? core : shell;
  if (is_singular(which) && (x - y).norm() == 0.0) {
    throw std::invalid_argument(std::string("kernel_value: coincident points on singular block ") +
                                block_name(which));
  }
  const LocalFrame f = local_frame(tgt, x);
  return kernel(f.position, f.normal, f.jacobian, src.point(y));
}

const Eigen::MatrixXd& BlockMatrices::operator[](Block which) const {
  switch (which) {
    case Block::A: return a;
    case Block::B: return b;
    case Block::C: return c;
    default: return d;
  }
}

Eigen::MatrixXd& BlockMatrices::operator[](Block which) {
  return const_cast<Eigen::MatrixXd&>(std::as_const(*this)[which]);
}

BlockMatrices assemble_blocks(const BlockGeometry& geom, BlockSelection selection) {
  const SphericalGrid& grid = geom.grid();
  const PolarRule& rule = geom.rule();
  const int L = grid.band_limit();
  const int nlm = sh_count(L);
  const int nphi = grid.n_phi();
  const auto n = static_cast<Eigen::Index>(grid.size());
  const auto nq = static_cast<Eigen::Index>(rule.size());

  std::vector<Block> blocks;
  if (selection.a) blocks.push_back(Block::A);
  if (selection.b) blocks.push_back(Block::B);
  if (selection.c) blocks.push_back(Block::C);
  if (selection.d) blocks.push_back(Block::D);
  const auto nb = static_cast<Eigen::Index>(blocks.size());

  BlockMatrices out;
  for (Block b : blocks) out[b].setZero(n, n);
  if (nb == 0) return out;

  const RadialSurface& core = geom.core();
  const RadialSurface& shell = geom.shell();
  const int lc = core.max_degree();
  const int ls = shell.max_degree();

  // coefficient vectors rotated to every azimuth of the grid
  auto rotated_coeffs = [&](const RadialSurface& s) {
    const int l = s.max_degree();
    Eigen::MatrixXd c(l >= 0 ? sh_count(l) : 0, nphi);
    for (int k = 0; l >= 0 && k < nphi; ++k) {
      rotate_coefficients_z(l, grid.azimuth(k),
                            std::span<const double>(s.coefficients().data(), s.coefficients().size()),
                            std::span<double>(c.col(k).data(), static_cast<std::size_t>(c.rows())));
    }
    return c;
  };
  const Eigen::MatrixXd core_rot = rotated_coeffs(core);
  const Eigen::MatrixXd shell_rot = rotated_coeffs(shell);

  std::vector<double> cos_k(static_cast<std::size_t>(nphi)), sin_k(static_cast<std::size_t>(nphi));
  for (int k = 0; k < nphi; ++k) {
    cos_k[k] = std::cos(grid.azimuth(k));
    sin_k[k] = std::sin(grid.azimuth(k));
  }

  Eigen::MatrixXd weights(nq, nb * nphi);
  Eigen::MatrixXd moments(nlm, nb * nphi);
  Eigen::VectorXd tmp(nlm);

  for (int ring = 0; ring < grid.n_theta(); ++ring) {
    const Mat3 ry = rotation_y(grid.ring_cos(ring), grid.ring_sin(ring));
    const Points local = rule.local_nodes() * ry.transpose();
    const Eigen::MatrixXd yrot = real_sh_table(L, local);

    Eigen::MatrixXd core_r = Eigen::MatrixXd::Constant(nq, nphi, core.base_radius());
    Eigen::MatrixXd shell_r = Eigen::MatrixXd::Constant(nq, nphi, shell.base_radius());
    if (lc >= 0) core_r += yrot.leftCols(sh_count(lc)) * core_rot;
    if (ls >= 0) shell_r += yrot.leftCols(sh_count(ls)) * shell_rot;

    for (int k = 0; k < nphi; ++k) {
      const auto p = static_cast<Eigen::Index>(grid.index(ring, k));
      for (Eigen::Index bi = 0; bi < nb; ++bi) {
        const Block which = blocks[static_cast<std::size_t>(bi)];
        const Sides s = sides_of(which, geom);
        const Vec3 target = s.target->position.row(p).transpose();
        const Vec3 normal = s.target->normal.row(p).transpose();
        const double jac = s.target->jacobian(p);
        const Eigen::MatrixXd& radius =
            (which == Block::A || which == Block::D) ? core_r : shell_r;
        auto col = weights.col(bi * nphi + k);
        for (Eigen::Index q = 0; q < nq; ++q) {
          const double lx = local(q, 0), ly = local(q, 1);
          const Vec3 dir(cos_k[k] * lx - sin_k[k] * ly, sin_k[k] * lx + cos_k[k] * ly, local(q, 2));
          col(q) = kernel(target, normal, jac, radius(q, k) * dir) * rule.weights()(q);
        }
      }
    }

    moments.noalias() = yrot.transpose() * weights;
    for (Eigen::Index bi = 0; bi < nb; ++bi) {
      for (int k = 0; k < nphi; ++k) {
        auto col = moments.col(bi * nphi + k);
        tmp = col;
        rotate_moments_z(L, grid.azimuth(k), std::span<const double>(tmp.data(), tmp.size()),
                         std::span<double>(col.data(), static_cast<std::size_t>(nlm)));
      }
    }
    const Eigen::MatrixXd rows = grid.harmonics() * moments;  // n x nb*nphi
    for (Eigen::Index bi = 0; bi < nb; ++bi) {
      Eigen::MatrixXd& m = out[blocks[static_cast<std::size_t>(bi)]];
      for (int k = 0; k < nphi; ++k) {
        const auto p = static_cast<Eigen::Index>(grid.index(ring, k));
        m.row(p) = rows.col(bi * nphi + k).cwiseProduct(grid.weights()).transpose();
      }
    }
  }
  return out;
}

Eigen::VectorXd apply_block(Block which, const BlockMatrices& blocks, const Eigen::VectorXd& density) {
  const Eigen::MatrixXd& m = blocks[which];
  if (m.size() == 0) {
    throw std::invalid_argument(std::string("apply_block: block ") + block_name(which) +
                                " was not assembled");
  }
  if (density.size() != m.cols()) {
    throw std::invalid_argument("apply_block: density size does not match the grid");
  }
  return m * density;
}

double funk_hecke_eigen(const std::function<double(double, double)>& profile, int n) {
  if (n < 0) throw std::invalid_argument("funk_hecke_eigen: negative degree");
  boost::math::quadrature::tanh_sinh<double> integrator;
  double error = 0.0;
  double l1 = 0.0;
  double value = 0.0;
  try {
    // xc is the signed distance to the nearest endpoint, exact even where 1 - t rounds to 0
    value = integrator.integrate(
        [&](double t, double xc) {
          const double omt = t > 0.0 ? xc : 1.0 - t;
          return boost::math::legendre_p(n, t) * profile(t, omt);
        },
        -1.0, 1.0, std::sqrt(std::numeric_limits<double>::epsilon()) * 1e-4, &error, &l1);
  } catch (const std::exception& e) {
    throw std::domain_error(std::string("funk_hecke_eigen: quadrature failed: ") + e.what());
  }
  if (!std::isfinite(value) || !std::isfinite(l1) || error > 1e-8 * std::max(1.0, l1)) {
    throw std::domain_error("funk_hecke_eigen: profile is not integrable on (-1, 1)");
  }
  return 2.0 * kPi * value;
}

double funk_hecke_eigen(const std::function<double(double)>& profile, int n) {
  return funk_hecke_eigen([&](double t, double) { return profile(t); }, n);
}

}  // namespace ptv
