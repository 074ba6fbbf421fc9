// ptv: command-line front end for neutrality, PT evaluation, oracle checks and shell design.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "ptv/analytic.hpp"
#include "ptv/config.hpp"
#include "ptv/csv.hpp"
#include "ptv/designer.hpp"
#include "ptv/verify.hpp"

namespace {

using nlohmann::json;
using namespace ptv;

enum Exit : int { kOk = 0, kVerifyFailed = 1, kInfeasible = 2, kNotConverged = 3 };

struct Overrides {
  std::string config;
  std::optional<int> n_theta;
  std::optional<double> tol;
  std::optional<std::string> out;
  bool swap = false;
};

RunConfig resolve(const Overrides& o) {
  RunConfig c = o.config.empty() ? RunConfig{} : RunConfig::load(o.config);
  if (o.n_theta) c.n_theta = *o.n_theta;
  if (o.tol) c.tol = *o.tol;
  if (o.out) c.out = *o.out;
  if (o.swap) c.swap_roles = true;
  c.validate();
  return c;
}

json meta(const RunConfig& c, const char* command) {
  return {{"command", command},
          {"config_hash", c.hash()},
          {"n_theta", c.n_theta},
          {"n_phi", 2 * c.n_theta},
          {"tolerance", c.tol},
          {"mode", mode_name(c.mode())}};
}

std::string out_path(const RunConfig& c, const std::string& name) {
  std::filesystem::create_directories(c.out);
  return (std::filesystem::path(c.out) / name).string();
}

void write_json(const std::string& path, const json& j) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << j.dump(2) << '\n';
}

json grid_json(const SphericalGrid& g) {
  return {{"n_theta", g.n_theta()}, {"n_phi", g.n_phi()}, {"nodes", g.size()},
          {"band_limit", g.band_limit()}};
}

json matrix_json(const analytic::Matrix6& m) {
  json rows = json::array();
  for (int r = 0; r < 6; ++r) {
    json row = json::array();
    for (int k = 0; k < 6; ++k) row.push_back(m(r, k));
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------

int cmd_neutral(const RunConfig& c) {
  const MaterialParams mat = c.material();
  json rep = {{"meta", meta(c, "neutral")},
              {"material", mat.to_json()},
              {"ratio", mat.neutrality_ratio()},
              {"feasible", mat.feasible()}};
  int code = kOk;
  if (mat.feasible()) {
    const auto [ri, re] = c.radii();
    rep["rho"] = neutral_radius_ratio(mat);
    rep["r_i"] = ri;
    rep["r_e"] = re;
    rep["given"] = c.swap_roles ? "r_e" : "r_i";
  } else {
    rep["rho"] = nullptr;
    code = kInfeasible;
  }
  write_json(out_path(c, "neutral.json"), rep);
  std::cout << rep.dump(2) << '\n';
  return code;
}

std::pair<RadialSurface, RadialSurface> surfaces(const RunConfig& c) {
  const auto [ri, re] = c.radii();
  const RadialSurface h = c.perturbation_surface();
  if (c.swap_roles) return {RadialSurface::sphere(ri).plus_w6(c.b), h};
  return {h, RadialSurface::sphere(re).plus_w6(c.b)};
}

int cmd_pt(const RunConfig& c) {
  auto grid = std::make_shared<const SphericalGrid>(SphericalGrid::build(c.n_theta));
  const auto [core, shell] = surfaces(c);
  const BlockSystem sys =
      BlockSystem::assemble(BlockGeometry(grid, core, shell, c.budget_fraction), c.material());
  const Densities dens = solve_densities(sys);
  const PolarizationTensor pt = polarization_tensor(sys, dens);
  json rep = pt.to_json();
  rep["grid"] = grid_json(*grid);
  rep["meta"] = meta(c, "pt");
  rep["core"] = core.to_json();
  rep["shell"] = shell.to_json();
  rep["frobenius_over_re3"] = pt.frobenius() / std::pow(shell.base_radius(), 3);
  rep["diagnostics"] = {{"rcond", dens.diagnostics.rcond},
                        {"max_residual", dens.diagnostics.max_residual},
                        {"max_mean", dens.diagnostics.max_mean},
                        {"ill_conditioned", dens.diagnostics.ill_conditioned}};
  if (dens.diagnostics.ill_conditioned) {
    std::cerr << "warning: block system is ill conditioned; perturbations may exceed the smallness budget\n";
  }
  write_json(out_path(c, "pt.json"), rep);
  std::printf("|M|_F / r_e^3 = %.6e  (asymmetry %.2e)\n", pt.frobenius() / std::pow(shell.base_radius(), 3),
              pt.asymmetry);
  return kOk;
}

int cmd_jacobian(const RunConfig& c) {
  DesignProblem prob = c.design_problem();
  const PtModel model(prob);
  const double step = c.fd_step * prob.r_e;
  json rep = {{"meta", meta(c, "jacobian")},
              {"b", std::vector<double>(c.b.begin(), c.b.end())},
              {"step", step}};
  analytic::Matrix6 fd;
  try {
    fd = jacobian_fd(model, c.b, step, true);
  } catch (const std::domain_error& e) {
    rep["error"] = e.what();
    rep["passed"] = false;
    write_json(out_path(c, "jacobian.json"), rep);
    std::cerr << e.what() << '\n';
    return kVerifyFailed;
  }
  rep["finite_difference"] = matrix_json(fd);
  rep["determinant"] = fd.determinant();

  const bool at_origin = prob.perturbation.is_sphere() &&
                         std::all_of(c.b.begin(), c.b.end(), [](double v) { return v == 0.0; });
  bool passed = true;
  if (at_origin) {
    const analytic::Origin o = analytic::origin_constants(prob.material, prob.r_i, prob.r_e);
    const analytic::Matrix6 stated = analytic::origin_jacobian(o);
    double zero_max = 0.0;
    for (int r = 0; r < 6; ++r) {
      for (int k = 0; k < 6; ++k) {
        if (stated(r, k) == 0.0) zero_max = std::max(zero_max, std::abs(fd(r, k)));
      }
    }
    rep["zero_pattern_max"] = zero_max;
    passed = zero_max <= 1e-6 && fd.determinant() != 0.0;
    if (c.mode() == DesignMode::Shell) {
      const analytic::Matrix6 closed = analytic::corrected_origin_jacobian(o);
      const double dev = (fd - closed).cwiseAbs().maxCoeff();
      rep["closed_form"] = matrix_json(closed);
      rep["closed_form_determinant_magnitude"] = analytic::corrected_determinant_magnitude(o);
      rep["max_deviation"] = dev;
      rep["stated"] = matrix_json(stated);
      rep["stated_max_deviation"] = (fd - stated).cwiseAbs().maxCoeff();
      rep["stated_determinant_magnitude"] = analytic::origin_determinant_magnitude(o);
      passed = passed && dev <= 1e-4;
    } else {
      rep["stated_swapped_determinant_magnitude"] = analytic::swapped_determinant_magnitude(o);
    }
  }
  rep["passed"] = passed;
  write_json(out_path(c, "jacobian.json"), rep);
  std::printf("det = %.6e  %s\n", fd.determinant(), passed ? "ok" : "FAILED");
  return passed ? kOk : kVerifyFailed;
}

int cmd_design(const RunConfig& c) {
  const DesignProblem prob = c.design_problem();
  const DesignResult res =
      c.continuation_steps > 0 ? continuation(prob, c.continuation_steps) : design(prob);
  json rep = {{"meta", meta(c, "design")},
              {"problem",
               {{"mode", mode_name(prob.mode)},
                {"material", prob.material.to_json()},
                {"r_i", prob.r_i},
                {"r_e", prob.r_e},
                {"perturbation", prob.perturbation.to_json()},
                {"continuation_steps", c.continuation_steps}}},
              {"result", res.to_json()}};
  write_json(out_path(c, "design.json"), rep);
  if (!res.converged) {
    std::cerr << "design did not converge: " << res.message << " (residual " << res.residual << ")\n";
    return kNotConverged;
  }
  const double base = prob.mode == DesignMode::Shell ? prob.r_e : prob.r_i;
  write_json(out_path(c, "surface.json"), RadialSurface::from_w6(base, res.b).to_json());
  if (res.profile) {
    csv::Table t({"radius", "u_minus_ax_e1", "u_minus_ax_e2", "u_minus_ax_e3"});
    for (std::size_t k = 0; k < res.profile->radii.size(); ++k) {
      const auto& p = res.profile->per_field[k];
      t.add(std::vector<double>{res.profile->radii[k], p[0], p[1], p[2]});
    }
    t.write(out_path(c, "farfield.csv"));
  }
  std::printf("converged in %d iterations, residual %.3e, |b|_inf %.6e", res.iterations, res.residual,
              res.b_sup());
  if (res.far_field_slope) std::printf(", far-field slope %.3f", *res.far_field_slope);
  std::printf("\n");
  return kOk;
}

int cmd_verify(const RunConfig& c) {
  const OracleReport rep = run_oracles(c.verify_config());
  json j = rep.to_json();
  j["meta"] = meta(c, "verify");
  write_json(out_path(c, "verify.json"), j);
  int failed = 0;
  for (const auto& chk : rep.checks) {
    if (!chk.passed && !chk.informational) {
      ++failed;
      std::printf("FAIL %s: computed %.12g expected %.12g (error %.3e > %.1e)\n", chk.name.c_str(),
                  chk.computed, chk.expected, chk.error, chk.tolerance);
    }
  }
  std::printf("%zu checks, %d failed\n", rep.checks.size(), failed);
  return rep.passed() ? kOk : kVerifyFailed;
}

int cmd_sweep(const RunConfig& c) {
  const MaterialParams mat = c.material();
  const auto [ri, re] = c.radii();
  const double base = c.swap_roles ? re : ri;
  const SphericalGrid grid = SphericalGrid::build(c.n_theta);
  DesignOptions opt = c.design_options();
  opt.far_field = false;
  csv::Table table({"epsilon", "b_sup", "residual", "iterations", "converged"});
  json rows = json::array();
  bool all = true;
  for (double eps : c.sweep_epsilons) {
    const RadialSurface h = random_perturbation(base, c.sweep_degree, eps * base, c.sweep_seed, grid);
    const DesignProblem prob = c.swap_roles ? DesignProblem::core(mat, re, h.terms(), opt)
                                            : DesignProblem::shell(mat, ri, h.terms(), opt);
    DesignResult res;
    try {
      res = design(prob);
    } catch (const AmplitudeRejected& e) {
      res.message = e.what();
      res.residual = std::nan("");
    }
    all = all && res.converged;
    table.add({csv::number(eps), csv::number(res.b_sup()), csv::number(res.residual),
               std::to_string(res.iterations), res.converged ? "1" : "0"});
    rows.push_back({{"epsilon", eps}, {"b_sup", res.b_sup()}, {"residual", res.residual},
                    {"iterations", res.iterations}, {"converged", res.converged},
                    {"message", res.message}, {"b", std::vector<double>(res.b.begin(), res.b.end())}});
    std::printf("eps %-8g |b|_inf %.6e residual %.3e iterations %d\n", eps, res.b_sup(), res.residual,
                res.iterations);
  }
  table.write(out_path(c, "sweep.csv"));
  write_json(out_path(c, "sweep.json"), {{"meta", meta(c, "sweep")}, {"rows", rows}});
  return all ? kOk : kNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Core-shell polarization tensors and PT-vanishing shell design"};
  app.require_subcommand(1);
  app.fallthrough();
  Overrides ov;
  app.add_option("--config", ov.config, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--n-theta", ov.n_theta, "Gauss-Legendre rings of the grid (4..48)");
  app.add_option("--tol", ov.tol, "design tolerance on |M|_F / r_e^3");
  app.add_option("--out", ov.out, "output directory");
  app.add_flag("--swap-roles", ov.swap, "perturbed shell, designed core");

  using Handler = int (*)(const RunConfig&);
  const std::pair<const char*, std::pair<const char*, Handler>> commands[] = {
      {"neutral", {"neutral radius and contrast numbers", cmd_neutral}},
      {"pt", {"polarization tensor of one structure", cmd_pt}},
      {"jacobian", {"finite-difference Jacobian of the PT in the designed coefficients", cmd_jacobian}},
      {"design", {"design a PT-vanishing interface", cmd_design}},
      {"verify", {"run the analytic oracle suite", cmd_verify}},
      {"sweep", {"design over a range of perturbation amplitudes", cmd_sweep}},
  };
  Handler chosen = nullptr;
  for (const auto& [name, info] : commands) {
    CLI::App* sub = app.add_subcommand(name, info.first);
    const Handler h = info.second;
    sub->callback([&chosen, h] { chosen = h; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const RunConfig cfg = resolve(ov);
    return chosen(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kInfeasible;
  } catch (const InfeasibleMaterial& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const AmplitudeRejected& e) {
    std::cerr << "rejected: " << e.what() << '\n';
    return kInfeasible;
  } catch (const BudgetExceeded& e) {
    std::cerr << "inadmissible geometry: " << e.what() << '\n';
    return kInfeasible;
  } catch (const SurfacesIntersect& e) {
    std::cerr << "inadmissible geometry: " << e.what() << '\n';
    return kInfeasible;
  } catch (const NotStarShaped& e) {
    std::cerr << "inadmissible geometry: " << e.what() << '\n';
    return kInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kVerifyFailed;
  }
}
