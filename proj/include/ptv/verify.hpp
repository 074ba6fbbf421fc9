// Analytic-vs-numeric oracle suite.
//
// Every check records the worst entry (computed and expected value), the error and the
// tolerance. Informational checks document a closed form that is known not to hold as
// written; they are reported but do not affect the verdict.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "ptv/bie.hpp"

namespace ptv {

struct OracleCheck {
  std::string name;
  std::string description;
  double computed = 0.0;
  double expected = 0.0;
  double error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  bool informational = false;

  nlohmann::json to_json() const;
};

struct OracleReport {
  std::vector<OracleCheck> checks;
  int n_theta = 0;

  /// All non-informational checks pass.
  bool passed() const;
  /// Throws std::out_of_range for unknown names.
  const OracleCheck& find(const std::string& name) const;
  nlohmann::json to_json() const;
};

struct VerifyConfig {
  MaterialParams material{1.0, 2.0, 1.4};
  double r_i = 1.0;
  int n_theta = 24;
  /// Added to lambda in the operator-action check only (negative control).
  double lambda_offset = 0.0;
  bool finite_differences = true;  // the BIE Jacobian checks (the slow part)
  int concentric_samples = 5;
  std::uint64_t seed = 20240601;
};

using CheckList = std::vector<OracleCheck>;

/// Grid weights, W6 Gram matrix, Hessian traces, Euler and Taylor identities.
CheckList basis_checks(const SphericalGrid& grid, std::uint64_t seed);
/// Funk-Hecke eigenvalues and the surface integral identities at every grid node.
CheckList identity_checks(const SphericalGrid& grid, double r_i, double r_e);
/// Block actions on x_l at the concentric configuration, the 2 x 2 origin action,
/// its closed-form inverse and the constant vectors V1, V2.
CheckList operator_checks(std::shared_ptr<const SphericalGrid> grid, const MaterialParams& mat,
                          double r_i, double lambda_offset = 0.0);
/// PT of neutral, single-ball and non-neutral concentric structures, solver contracts
/// and far-field checks.
CheckList pt_checks(std::shared_ptr<const SphericalGrid> grid, const MaterialParams& mat,
                    double r_i);
/// BIE PT against the radial solution on random non-neutral concentric configurations.
CheckList concentric_checks(std::shared_ptr<const SphericalGrid> grid, int samples,
                            std::uint64_t seed);
/// Closed-form pairing tables against quadrature of the derivative kernels.
CheckList table_checks(const MaterialParams& mat, double r_i);
/// Finite differences of the BIE PT in the shell coefficients at the origin.
CheckList jacobian_checks(std::shared_ptr<const SphericalGrid> grid, const MaterialParams& mat,
                          double r_i);

OracleReport run_oracles(const VerifyConfig& cfg);

}  // namespace ptv
