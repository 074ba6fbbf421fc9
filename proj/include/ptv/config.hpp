// Run configuration shared by the command-line tool: JSON file plus flag overrides.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ptv/designer.hpp"
#include "ptv/verify.hpp"

namespace ptv {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RandomPerturbation {
  int degree = 3;
  double epsilon = 0.01;  // sup|h| relative to the base radius
  std::uint64_t seed = 1;
};

struct RunConfig {
  double sigma_core = 1.0, sigma_shell = 2.0, sigma_matrix = 1.4;
  // Given radius; the other one follows from neutrality unless set explicitly.
  std::optional<double> r_i;
  std::optional<double> r_e;
  int n_theta = 24;
  double tol = 1e-8;
  bool swap_roles = false;
  std::string out = "out";

  // perturbation of the given interface: explicit terms or a random draw
  std::vector<ShTerm> perturbation;
  std::optional<RandomPerturbation> random;
  W6Coeffs b{};  // designed-interface coefficients for `pt` and `jacobian`

  int continuation_steps = 0;
  int max_iterations = 30;
  double budget_fraction = BlockGeometry::kDefaultBudget;
  double amplitude_fraction = 0.05;
  double fd_step = 1e-4;
  bool far_field = true;

  std::vector<double> sweep_epsilons{0.002, 0.004, 0.006, 0.008, 0.01,
                                     0.012, 0.014, 0.016, 0.018, 0.02};
  int sweep_degree = 2;
  std::uint64_t sweep_seed = 1;

  double lambda_offset = 0.0;
  bool finite_differences = true;
  int concentric_samples = 5;
  std::uint64_t verify_seed = 20240601;

  /// Unknown keys and out-of-range values throw ConfigError.
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::string& path);
  nlohmann::json to_json() const;
  void validate() const;

  MaterialParams material() const;
  DesignMode mode() const { return swap_roles ? DesignMode::Core : DesignMode::Shell; }
  /// Radius of the interface carrying the given perturbation.
  double base_radius() const;
  /// (r_i, r_e): the given radius plus the neutral partner unless both are set.
  std::pair<double, double> radii() const;
  DesignOptions design_options() const;
  /// The given perturbation (terms, or the random draw on this config's grid).
  RadialSurface perturbation_surface() const;
  DesignProblem design_problem() const;
  VerifyConfig verify_config() const;

  /// FNV-1a 64 of the canonical JSON dump, output directory excluded; 16 hex digits.
  std::string hash() const;
};

std::uint64_t fnv1a64(const std::string& data);

}  // namespace ptv
