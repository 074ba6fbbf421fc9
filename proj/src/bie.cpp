#include "ptv/bie.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace ptv {

namespace {

constexpr double kPi = std::numbers::pi;

double contrast_inverse(double inner, double outer) {
  // 1 / ((inner + outer) / (2 (inner - outer)))
  return 2.0 * (inner - outer) / (inner + outer);
}

}  // namespace

MaterialParams::MaterialParams(double sigma_core, double sigma_shell, double sigma_matrix)
    : sc_(sigma_core), ss_(sigma_shell), sm_(sigma_matrix) {
  if (!(sc_ > 0.0) || !(ss_ > 0.0) || !(sm_ > 0.0) || !std::isfinite(sc_) || !std::isfinite(ss_) ||
      !std::isfinite(sm_)) {
    throw std::invalid_argument("conductivities must be positive and finite");
  }
  inv_lambda_ = contrast_inverse(sc_, ss_);
  inv_mu_ = contrast_inverse(ss_, sm_);
}

double MaterialParams::neutrality_ratio() const {
  const double den = (2.0 * ss_ + sm_) * (ss_ - sc_);
  if (den == 0.0) return std::numeric_limits<double>::infinity();
  return (2.0 * ss_ + sc_) * (ss_ - sm_) / den;
}

bool MaterialParams::feasible() const {
  const double q = neutrality_ratio();
  return std::isfinite(q) && q > 0.0 && q < 1.0;
}

MaterialParams MaterialParams::with_lambda_offset(double delta) const {
  MaterialParams out = *this;
  out.inv_lambda_ = 1.0 / (lambda() + delta);
  return out;
}

nlohmann::json MaterialParams::to_json() const {
  nlohmann::json j = {{"sigma_core", sc_}, {"sigma_shell", ss_}, {"sigma_matrix", sm_}};
  j["lambda"] = inv_lambda_ == 0.0 ? nlohmann::json(nullptr) : nlohmann::json(lambda());
  j["mu"] = inv_mu_ == 0.0 ? nlohmann::json(nullptr) : nlohmann::json(mu());
  return j;
}

double neutral_radius_ratio(const MaterialParams& mat) {
  if (!mat.feasible()) {
    throw InfeasibleMaterial("no neutral coating: (2s_s+s_c)(s_s-s_m)/((2s_s+s_m)(s_s-s_c)) = " +
                             std::to_string(mat.neutrality_ratio()) + " is not in (0, 1)");
  }
  const double rho = std::cbrt(mat.neutrality_ratio());
  // lambda = 1/6 - rho^3 (mu + 1/6) is the same condition written with the contrasts
  const double rho3 = rho * rho * rho;
  const double lhs = mat.lambda();
  const double rhs = 1.0 / 6.0 - rho3 * (mat.mu() + 1.0 / 6.0);
  if (std::abs(lhs - rhs) > 1e-12 * std::max(1.0, std::abs(lhs))) {
    throw std::logic_error("neutrality relation between lambda and mu violated");
  }
  return rho;
}

double neutral_outer_radius(double r_i, const MaterialParams& mat) {
  if (!(r_i > 0.0)) throw std::invalid_argument("core radius must be positive");
  return r_i / neutral_radius_ratio(mat);
}

double neutral_inner_radius(double r_e, const MaterialParams& mat) {
  if (!(r_e > 0.0)) throw std::invalid_argument("shell radius must be positive");
  return r_e * neutral_radius_ratio(mat);
}

// ---------------------------------------------------------------------------

BlockSystem BlockSystem::assemble(BlockGeometry geometry, const MaterialParams& mat,
                                  const Eigen::MatrixXd* cached_a,
                                  const Eigen::MatrixXd* cached_b) {
  BlockSystem sys(std::move(geometry), mat);
  const auto n = static_cast<Eigen::Index>(sys.nodes());
  for (const Eigen::MatrixXd* c : {cached_a, cached_b}) {
    if (c != nullptr && (c->rows() != n || c->cols() != n)) {
      throw std::invalid_argument("cached self block has the wrong size");
    }
  }
  BlockSelection sel;
  sel.a = cached_a == nullptr;
  sel.b = cached_b == nullptr;
  sys.blocks_ = assemble_blocks(sys.geom_, sel);
  if (cached_a != nullptr) sys.blocks_.a = *cached_a;
  if (cached_b != nullptr) sys.blocks_.b = *cached_b;
  return sys;
}

Eigen::MatrixXd BlockSystem::operator_matrix() const {
  if (mat_.inv_lambda() == 0.0 || mat_.inv_mu() == 0.0) {
    throw std::domain_error("operator_matrix: infinite contrast, use scaled_matrix()");
  }
  const auto n = static_cast<Eigen::Index>(nodes());
  Eigen::MatrixXd m(2 * n, 2 * n);
  m.topLeftCorner(n, n) = blocks_.a;
  m.topLeftCorner(n, n).diagonal().array() -= mat_.lambda();
  m.topRightCorner(n, n) = blocks_.c;
  m.bottomLeftCorner(n, n) = blocks_.d;
  m.bottomRightCorner(n, n) = blocks_.b;
  m.bottomRightCorner(n, n).diagonal().array() -= mat_.mu();
  return m;
}

Eigen::VectorXd BlockSystem::apply(const Eigen::VectorXd& f) const {
  const auto n = static_cast<Eigen::Index>(nodes());
  if (f.size() != 2 * n) throw std::invalid_argument("BlockSystem::apply: size mismatch");
  const auto f1 = f.head(n);
  const auto f2 = f.tail(n);
  Eigen::VectorXd out(2 * n);
  out.head(n) = -mat_.lambda() * f1 + blocks_.a * f1 + blocks_.c * f2;
  out.tail(n) = blocks_.d * f1 - mat_.mu() * f2 + blocks_.b * f2;
  return out;
}

Eigen::MatrixXd BlockSystem::scaled_matrix() const {
  const auto n = static_cast<Eigen::Index>(nodes());
  Eigen::MatrixXd m(2 * n, 2 * n);
  m.topLeftCorner(n, n) = mat_.inv_lambda() * blocks_.a;
  m.topLeftCorner(n, n).diagonal().array() -= 1.0;
  m.topRightCorner(n, n) = mat_.inv_lambda() * blocks_.c;
  m.bottomLeftCorner(n, n) = mat_.inv_mu() * blocks_.d;
  m.bottomRightCorner(n, n) = mat_.inv_mu() * blocks_.b;
  m.bottomRightCorner(n, n).diagonal().array() -= 1.0;
  return m;
}

Eigen::VectorXd BlockSystem::rhs(int l) const {
  if (l < 1 || l > 3) throw std::out_of_range("rhs: field index must be 1, 2 or 3");
  const auto n = static_cast<Eigen::Index>(nodes());
  const SurfaceFrame& ci = geom_.core_frame();
  const SurfaceFrame& ce = geom_.shell_frame();
  Eigen::VectorXd g(2 * n);
  g.head(n) = -ci.jacobian.cwiseProduct(ci.normal.col(l - 1));
  g.tail(n) = -ce.jacobian.cwiseProduct(ce.normal.col(l - 1));
  return g;
}

// ---------------------------------------------------------------------------

void project_mean_zero(const SphericalGrid& grid, Eigen::VectorXd& f) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  if (f.size() != 2 * n) throw std::invalid_argument("project_mean_zero: size mismatch");
  const double area = grid.weights().sum();
  for (Eigen::Index half = 0; half < 2; ++half) {
    auto seg = f.segment(half * n, n);
    seg.array() -= grid.weights().dot(seg) / area;
  }
}

Eigen::VectorXd Densities::core(int l) const {
  const Eigen::VectorXd& v = f.at(static_cast<std::size_t>(l - 1));
  return v.head(v.size() / 2);
}

Eigen::VectorXd Densities::shell(int l) const {
  const Eigen::VectorXd& v = f.at(static_cast<std::size_t>(l - 1));
  return v.tail(v.size() / 2);
}

Densities solve_densities(const BlockSystem& sys) {
  const auto n = static_cast<Eigen::Index>(sys.nodes());
  const SphericalGrid& grid = sys.grid();
  const MaterialParams& mat = sys.material();
  const Eigen::MatrixXd scaled = sys.scaled_matrix();
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(scaled);

  Densities out;
  out.diagnostics.rcond = lu.rcond();
  if (!(out.diagnostics.rcond > 0.0) || !std::isfinite(out.diagnostics.rcond)) {
    throw SingularSystem("block system is singular (rcond = " +
                         std::to_string(out.diagnostics.rcond) + ")");
  }
  out.diagnostics.ill_conditioned = 1.0 / out.diagnostics.rcond > BlockSystem::kConditionWarning;

  const double area = grid.weights().sum();
  for (int l = 1; l <= 3; ++l) {
    Eigen::VectorXd g = sys.rhs(l);
    project_mean_zero(grid, g);
    Eigen::VectorXd gs = g;
    gs.head(n) *= mat.inv_lambda();
    gs.tail(n) *= mat.inv_mu();
    Eigen::VectorXd f = lu.solve(gs);

    const double gnorm = gs.norm();
    if (gnorm > 0.0) {
      const double res = (scaled * f - gs).norm() / gnorm;
      out.diagnostics.max_residual = std::max(out.diagnostics.max_residual, res);
    }
    const double fnorm = std::sqrt(area) * f.norm() / std::sqrt(static_cast<double>(n));
    if (fnorm > 0.0) {
      for (Eigen::Index half = 0; half < 2; ++half) {
        const double mean = std::abs(grid.weights().dot(f.segment(half * n, n)));
        out.diagnostics.max_mean = std::max(out.diagnostics.max_mean, mean / fnorm);
      }
    }
    project_mean_zero(grid, f);
    out.f[static_cast<std::size_t>(l - 1)] = std::move(f);
  }
  return out;
}

// ---------------------------------------------------------------------------

PolarizationTensor::Flat PolarizationTensor::flatten() const {
  return {m(0, 0), m(1, 1), m(2, 2), m(0, 1), m(0, 2), m(1, 2)};
}

PolarizationTensor PolarizationTensor::from_flat(const Flat& v) {
  PolarizationTensor t;
  t.m << v[0], v[3], v[4], v[3], v[1], v[5], v[4], v[5], v[2];
  return t;
}

nlohmann::json PolarizationTensor::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < 3; ++i) rows.push_back({m(i, 0), m(i, 1), m(i, 2)});
  const Flat f = flatten();
  return {{"m", rows},
          {"flatten", std::vector<double>(f.begin(), f.end())},
          {"asymmetry", asymmetry}};
}

PolarizationTensor polarization_tensor(const BlockSystem& sys, const Densities& dens) {
  const SphericalGrid& grid = sys.grid();
  const SurfaceFrame& ci = sys.geometry().core_frame();
  const SurfaceFrame& ce = sys.geometry().shell_frame();
  Mat3 raw;
  for (int l = 1; l <= 3; ++l) {
    const Eigen::VectorXd f1 = dens.core(l).cwiseProduct(grid.weights());
    const Eigen::VectorXd f2 = dens.shell(l).cwiseProduct(grid.weights());
    for (int lp = 1; lp <= 3; ++lp) {
      // (r + p) x_l' is the l'-th coordinate of the surface point
      raw(l - 1, lp - 1) = ci.position.col(lp - 1).dot(f1) + ce.position.col(lp - 1).dot(f2);
    }
  }
  PolarizationTensor pt;
  pt.asymmetry = (raw - raw.transpose()).cwiseAbs().maxCoeff();
  pt.m = 0.5 * (raw + raw.transpose());
  return pt;
}

double far_field(const BlockSystem& sys, const Densities& dens, const Vec3& a, const Vec3& x) {
  const double re = sys.geometry().shell().base_radius();
  if (x.norm() < 1.5 * re) {
    throw std::domain_error("far_field: evaluation point inside 1.5 r_e");
  }
  const SphericalGrid& grid = sys.grid();
  const auto n = static_cast<Eigen::Index>(grid.size());
  const SurfaceFrame& ci = sys.geometry().core_frame();
  const SurfaceFrame& ce = sys.geometry().shell_frame();
  Eigen::VectorXd phi1 = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd phi2 = Eigen::VectorXd::Zero(n);
  for (int l = 1; l <= 3; ++l) {
    if (a(l - 1) == 0.0) continue;
    phi1 += a(l - 1) * dens.core(l);
    phi2 += a(l - 1) * dens.shell(l);
  }
  double sum = 0.0;
  for (Eigen::Index p = 0; p < n; ++p) {
    const double g1 = 1.0 / (x - ci.position.row(p).transpose()).norm();
    const double g2 = 1.0 / (x - ce.position.row(p).transpose()).norm();
    sum += grid.weights()(p) * (g1 * phi1(p) + g2 * phi2(p));
  }
  return -sum / (4.0 * kPi);
}

double far_field_rms(const BlockSystem& sys, const Densities& dens, double radius,
                     std::optional<int> field) {
  static const SphericalGrid directions = SphericalGrid::build(8);
  double sum = 0.0;
  int count = 0;
  for (int l = 1; l <= 3; ++l) {
    if (field && *field != l) continue;
    const Vec3 a = Vec3::Unit(l - 1);
    for (std::size_t p = 0; p < directions.size(); ++p) {
      const double v = far_field(sys, dens, a, radius * directions.node(p));
      sum += v * v;
      ++count;
    }
  }
  if (count == 0) throw std::invalid_argument("far_field_rms: field index must be 1, 2 or 3");
  return std::sqrt(sum / count);
}

double loglog_slope(const std::vector<double>& radii, const std::vector<double>& amplitudes) {
  if (radii.size() != amplitudes.size() || radii.size() < 2) {
    throw std::invalid_argument("loglog_slope: need at least two matching samples");
  }
  const auto n = static_cast<Eigen::Index>(radii.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (!(radii[k] > 0.0) || !(amplitudes[k] > 0.0)) {
      throw std::domain_error("loglog_slope: samples must be positive");
    }
    a(i, 0) = 1.0;
    a(i, 1) = std::log(radii[k]);
    y(i) = std::log(amplitudes[k]);
  }
  return a.colPivHouseholderQr().solve(y)(1);
}

std::vector<double> log_radii(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw std::invalid_argument("log_radii: bad range");
  std::vector<double> r(static_cast<std::size_t>(n));
  const double s = std::log(hi / lo) / (n - 1);
  for (int i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] = lo * std::exp(s * i);
  return r;
}

}  // namespace ptv
