// PT-vanishing design: given a perturbation of one interface, find the W6 coefficients of
// the other interface with M = 0, by damped chord Newton plus continuation.
#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "ptv/analytic.hpp"
#include "ptv/bie.hpp"

namespace ptv {

/// Shell: the core perturbation h is given and the shell is r_e + sum b_j Y_j.
/// Core: the shell perturbation h is given and the core is r_i + sum b_j Y_j.
enum class DesignMode { Shell, Core };
const char* mode_name(DesignMode m);

class AmplitudeRejected : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct DesignOptions {
  int n_theta = 24;
  double tol = 1e-8;                 // on |M|_F / r_e^3
  int max_iterations = 30;
  double contraction_refresh = 0.5;  // refresh the Jacobian when |M_new| / |M_old| exceeds this
  int max_halvings = 10;
  double budget_fraction = BlockGeometry::kDefaultBudget;
  double amplitude_fraction = 0.05;  // admit sup|h| <= fraction * (base radius of h)
  double fd_step = 1e-4;             // finite-difference step, relative to r_e
  bool far_field = true;             // fit far-field slopes on the result
  double far_field_min = 5.0;        // radii range in units of r_e
  double far_field_max = 50.0;
  int far_field_samples = 10;
};

struct DesignProblem {
  MaterialParams material{1.0, 2.0, 1.4};
  double r_i = 1.0;
  double r_e = 1.0;
  RadialSurface perturbation;  // h, base radius r_i (Shell) or r_e (Core)
  DesignMode mode = DesignMode::Shell;
  DesignOptions options;

  /// r_e from neutrality; h is given as terms on top of r_i.
  static DesignProblem shell(const MaterialParams& mat, double r_i, const std::vector<ShTerm>& h,
                             const DesignOptions& opt = {});
  /// r_i from neutrality; h is given as terms on top of r_e.
  static DesignProblem core(const MaterialParams& mat, double r_e, const std::vector<ShTerm>& h,
                            const DesignOptions& opt = {});

  /// Same problem with h replaced by t h.
  DesignProblem scaled(double t) const;
};

/// Random perturbation of degree <= max_degree with every coefficient uniform in [-1, 1]
/// (mt19937_64, fixed bit-to-double mapping), rescaled so sup|h| over `grid` is epsilon.
RadialSurface random_perturbation(double base_radius, int max_degree, double epsilon,
                                  std::uint64_t seed, const SphericalGrid& grid);

/// PT as a function of the designed coefficients for one problem. The self block of the
/// fixed interface is assembled once.
class PtModel {
 public:
  explicit PtModel(const DesignProblem& problem,
                   std::shared_ptr<const SphericalGrid> grid = nullptr);

  struct Evaluation {
    std::shared_ptr<BlockSystem> system;
    Densities densities;
    PolarizationTensor pt;
  };

  const DesignProblem& problem() const { return problem_; }
  std::shared_ptr<const SphericalGrid> grid() const { return grid_; }
  RadialSurface core_surface(const W6Coeffs& b) const;
  RadialSurface shell_surface(const W6Coeffs& b) const;

  /// Throws BudgetExceeded, SurfacesIntersect or NotStarShaped for inadmissible b.
  Evaluation evaluate_full(const W6Coeffs& b) const;
  PolarizationTensor evaluate(const W6Coeffs& b) const { return evaluate_full(b).pt; }
  /// |M|_F / r_e^3.
  double residual(const PolarizationTensor& pt) const;
  int evaluations() const { return evaluations_; }

 private:
  DesignProblem problem_;
  std::shared_ptr<const SphericalGrid> grid_;
  Eigen::MatrixXd fixed_block_;
  mutable int evaluations_ = 0;
};

/// Central differences of the flattened PT in each designed coefficient.
/// With check_step, the differences are repeated with twice the step and a
/// std::domain_error is thrown when the two disagree by more than 1e-3 relative
/// (step below the noise floor of the solver).
analytic::Matrix6 jacobian_fd(const PtModel& model, const W6Coeffs& b, double step,
                              bool check_step = false);

struct IterationRecord {
  double t = 1.0;            // continuation parameter of the solve
  int iteration = 0;
  double residual = 0.0;     // after the step
  double step_norm = 0.0;    // max |delta b_j|
  int halvings = 0;
  bool jacobian_refreshed = false;
};

struct PathPoint {
  double t = 0.0;
  W6Coeffs b{};
  double residual = 0.0;
  int iterations = 0;
};

struct FarFieldProfile {
  std::vector<double> radii;
  std::vector<std::array<double, 3>> per_field;  // RMS |u - a.x| over directions, a = e1, e2, e3
  std::vector<double> combined;                  // RMS over all three fields
  double slope = 0.0;                            // log-log fit of `combined`
};

FarFieldProfile far_field_profile(const PtModel::Evaluation& eval, const DesignOptions& opt);

struct DesignResult {
  bool converged = false;
  std::string message;
  W6Coeffs b{};
  double residual = 0.0;        // |M|_F / r_e^3 at b
  double initial_residual = 0.0;
  int iterations = 0;
  int evaluations = 0;
  std::vector<IterationRecord> history;
  std::vector<PathPoint> path;
  PolarizationTensor pt;
  std::optional<double> far_field_slope;        // designed structure
  std::optional<double> undesigned_slope;       // same h, b = 0
  std::optional<FarFieldProfile> profile;

  double b_sup() const;
  nlohmann::json to_json() const;
};

/// Chord Newton from `start` with the given Jacobian (origin Jacobian when null:
/// the corrected closed form in Shell mode, finite differences in Core mode).
/// Throws AmplitudeRejected when sup|h| exceeds the admission bound.
DesignResult design(const DesignProblem& problem, const W6Coeffs& start = {},
                    const analytic::Matrix6* jacobian = nullptr);

/// Solves for t h, t = 0, 1/steps, ..., 1, warm-starting each solve with a secant
/// predictor. Stops at the first failing t.
DesignResult continuation(const DesignProblem& problem, int steps);

/// The origin Jacobian used by the designer for a problem.
analytic::Matrix6 origin_design_jacobian(const DesignProblem& problem);

}  // namespace ptv
