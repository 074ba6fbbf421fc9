#include "ptv/designer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <utility>

namespace ptv {

namespace {

double sup_on_grid(const RadialSurface& s, const SphericalGrid& grid) {
  double sup = 0.0;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    sup = std::max(sup, std::abs(s.perturbation(grid.node(p))));
  }
  return sup;
}

double max_abs(const W6Coeffs& b) {
  double m = 0.0;
  for (double v : b) m = std::max(m, std::abs(v));
  return m;
}

Eigen::Matrix<double, 6, 1> flat_vector(const PolarizationTensor& pt) {
  const auto f = pt.flatten();
  return Eigen::Map<const Eigen::Matrix<double, 6, 1>>(f.data());
}

nlohmann::json coeffs_json(const W6Coeffs& b) { return std::vector<double>(b.begin(), b.end()); }

// Inadmissible candidates are treated as failed steps by the line search.
template <class F>
std::optional<PtModel::Evaluation> try_evaluate(const PtModel& model, const W6Coeffs& b, F&& on_fail) {
  try {
    return model.evaluate_full(b);
  } catch (const BudgetExceeded& e) {
    on_fail(e.what());
  } catch (const SurfacesIntersect& e) {
    on_fail(e.what());
  } catch (const NotStarShaped& e) {
    on_fail(e.what());
  }
  return std::nullopt;
}

}  // namespace

const char* mode_name(DesignMode m) { return m == DesignMode::Shell ? "shell" : "core"; }

DesignProblem DesignProblem::shell(const MaterialParams& mat, double r_i,
                                   const std::vector<ShTerm>& h, const DesignOptions& opt) {
  DesignProblem p;
  p.material = mat;
  p.r_i = r_i;
  p.r_e = neutral_outer_radius(r_i, mat);
  p.perturbation = RadialSurface(r_i, h);
  p.mode = DesignMode::Shell;
  p.options = opt;
  return p;
}

DesignProblem DesignProblem::core(const MaterialParams& mat, double r_e,
                                  const std::vector<ShTerm>& h, const DesignOptions& opt) {
  DesignProblem p;
  p.material = mat;
  p.r_e = r_e;
  p.r_i = neutral_inner_radius(r_e, mat);
  p.perturbation = RadialSurface(r_e, h);
  p.mode = DesignMode::Core;
  p.options = opt;
  return p;
}

DesignProblem DesignProblem::scaled(double t) const {
  DesignProblem p = *this;
  p.perturbation = perturbation.scaled(t);
  return p;
}

RadialSurface random_perturbation(double base_radius, int max_degree, double epsilon,
                                  std::uint64_t seed, const SphericalGrid& grid) {
  if (max_degree < 0) throw std::invalid_argument("random_perturbation: negative degree");
  std::mt19937_64 gen(seed);
  std::vector<ShTerm> terms;
  for (int l = 0; l <= max_degree; ++l) {
    for (int m = -l; m <= l; ++m) {
      // top 53 bits -> [0, 1), independent of the standard library's distributions
      const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
      terms.push_back({l, m, 2.0 * u - 1.0});
    }
  }
  const RadialSurface raw(base_radius, terms);
  const double sup = sup_on_grid(raw, grid);
  if (!(sup > 0.0)) throw std::domain_error("random_perturbation: degenerate draw");
  return raw.scaled(epsilon / sup);
}

// ---------------------------------------------------------------------------

PtModel::PtModel(const DesignProblem& problem, std::shared_ptr<const SphericalGrid> grid)
    : problem_(problem), grid_(std::move(grid)) {
  if (!grid_) grid_ = std::make_shared<const SphericalGrid>(SphericalGrid::build(problem.options.n_theta));
  const W6Coeffs zero{};
  const BlockGeometry geom(grid_, core_surface(zero), shell_surface(zero),
                           problem_.options.budget_fraction);
  BlockSelection sel{false, false, false, false};
  if (problem_.mode == DesignMode::Shell) {
    sel.a = true;
    fixed_block_ = std::move(assemble_blocks(geom, sel).a);
  } else {
    sel.b = true;
    fixed_block_ = std::move(assemble_blocks(geom, sel).b);
  }
}

RadialSurface PtModel::core_surface(const W6Coeffs& b) const {
  if (problem_.mode == DesignMode::Shell) return problem_.perturbation;
  return RadialSurface::sphere(problem_.r_i).plus_w6(b);
}

RadialSurface PtModel::shell_surface(const W6Coeffs& b) const {
  if (problem_.mode == DesignMode::Core) return problem_.perturbation;
  return RadialSurface::sphere(problem_.r_e).plus_w6(b);
}

PtModel::Evaluation PtModel::evaluate_full(const W6Coeffs& b) const {
  BlockGeometry geom(grid_, core_surface(b), shell_surface(b), problem_.options.budget_fraction);
  const bool shell = problem_.mode == DesignMode::Shell;
  Evaluation e;
  e.system = std::make_shared<BlockSystem>(BlockSystem::assemble(
      std::move(geom), problem_.material, shell ? &fixed_block_ : nullptr,
      shell ? nullptr : &fixed_block_));
  ++evaluations_;
  e.densities = solve_densities(*e.system);
  e.pt = polarization_tensor(*e.system, e.densities);
  return e;
}

double PtModel::residual(const PolarizationTensor& pt) const {
  return pt.frobenius() / std::pow(problem_.r_e, 3);
}

analytic::Matrix6 jacobian_fd(const PtModel& model, const W6Coeffs& b, double step, bool check_step) {
  if (!(step > 0.0)) throw std::invalid_argument("jacobian_fd: step must be positive");
  auto columns = [&](double h) {
    analytic::Matrix6 jac;
    for (int j = 0; j < 6; ++j) {
      W6Coeffs bp = b, bm = b;
      bp[static_cast<std::size_t>(j)] += h;
      bm[static_cast<std::size_t>(j)] -= h;
      jac.col(j) = (flat_vector(model.evaluate(bp)) - flat_vector(model.evaluate(bm))) / (2.0 * h);
    }
    return jac;
  };
  const analytic::Matrix6 jac = columns(step);
  if (check_step) {
    const analytic::Matrix6 coarse = columns(2.0 * step);
    const double scale = jac.cwiseAbs().maxCoeff();
    if (!(scale > 0.0) || (jac - coarse).cwiseAbs().maxCoeff() > 1e-3 * scale) {
      throw std::domain_error("jacobian_fd: differences at step and 2*step disagree; step below noise floor");
    }
  }
  return jac;
}

analytic::Matrix6 origin_design_jacobian(const DesignProblem& problem) {
  if (problem.mode == DesignMode::Shell) {
    return analytic::corrected_origin_jacobian(problem.material, problem.r_i, problem.r_e);
  }
  // no usable closed form for the core coefficients: differentiate the BIE at the origin
  const PtModel origin(problem.scaled(0.0));
  return jacobian_fd(origin, W6Coeffs{}, problem.options.fd_step * problem.r_e);
}

// ---------------------------------------------------------------------------

FarFieldProfile far_field_profile(const PtModel::Evaluation& eval, const DesignOptions& opt) {
  const double re = eval.system->geometry().shell().base_radius();
  FarFieldProfile prof;
  prof.radii = log_radii(opt.far_field_min * re, opt.far_field_max * re, opt.far_field_samples);
  for (double r : prof.radii) {
    std::array<double, 3> per{};
    double sq = 0.0;
    for (int l = 1; l <= 3; ++l) {
      per[static_cast<std::size_t>(l - 1)] = far_field_rms(*eval.system, eval.densities, r, l);
      sq += per[static_cast<std::size_t>(l - 1)] * per[static_cast<std::size_t>(l - 1)];
    }
    prof.per_field.push_back(per);
    prof.combined.push_back(std::sqrt(sq / 3.0));
  }
  prof.slope = loglog_slope(prof.radii, prof.combined);
  return prof;
}

double DesignResult::b_sup() const { return max_abs(b); }

nlohmann::json DesignResult::to_json() const {
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& h : history) {
    hist.push_back({{"t", h.t},
                    {"iteration", h.iteration},
                    {"residual", h.residual},
                    {"step_norm", h.step_norm},
                    {"halvings", h.halvings},
                    {"jacobian_refreshed", h.jacobian_refreshed}});
  }
  nlohmann::json p = nlohmann::json::array();
  for (const auto& pp : path) {
    p.push_back({{"t", pp.t}, {"b", coeffs_json(pp.b)}, {"residual", pp.residual},
                 {"iterations", pp.iterations}});
  }
  nlohmann::json j = {{"converged", converged},
                      {"message", message},
                      {"b", coeffs_json(b)},
                      {"b_sup", b_sup()},
                      {"residual", residual},
                      {"initial_residual", initial_residual},
                      {"iterations", iterations},
                      {"evaluations", evaluations},
                      {"history", hist},
                      {"path", p},
                      {"pt", pt.to_json()}};
  nlohmann::json ff = nlohmann::json::object();
  ff["slope"] = far_field_slope ? nlohmann::json(*far_field_slope) : nlohmann::json(nullptr);
  ff["undesigned_slope"] =
      undesigned_slope ? nlohmann::json(*undesigned_slope) : nlohmann::json(nullptr);
  if (profile) {
    ff["radii"] = profile->radii;
    ff["amplitude"] = profile->combined;
  }
  j["far_field"] = ff;
  return j;
}

// ---------------------------------------------------------------------------

namespace {

struct SolveState {
  analytic::Matrix6 jacobian;
  bool fresh = false;  // jacobian evaluated at a point of the current solve
};

void check_admission(const DesignProblem& problem, const SphericalGrid& grid) {
  const double sup = sup_on_grid(problem.perturbation, grid);
  const double bound = problem.options.amplitude_fraction * problem.perturbation.base_radius();
  if (sup > bound) {
    throw AmplitudeRejected("perturbation amplitude " + std::to_string(sup) +
                            " exceeds admission bound " + std::to_string(bound));
  }
}

// Damped chord Newton for one problem; `state` carries the Jacobian between solves.
DesignResult newton(const PtModel& model, const W6Coeffs& start, SolveState& state, double t,
                    std::optional<PtModel::Evaluation>* first_eval = nullptr) {
  const DesignProblem& prob = model.problem();
  const DesignOptions& opt = prob.options;
  DesignResult res;
  res.b = start;
  const int evals_before = model.evaluations();

  std::string why;
  auto cur = try_evaluate(model, start, [&](const char* w) { why = w; });
  if (!cur) {
    res.message = std::string("start point inadmissible: ") + why;
    res.residual = std::numeric_limits<double>::infinity();
    res.initial_residual = res.residual;
    return res;
  }
  if (first_eval != nullptr) *first_eval = *cur;
  double r = model.residual(cur->pt);
  res.initial_residual = r;

  Eigen::FullPivLU<analytic::Matrix6> lu(state.jacobian);
  int it = 0;
  while (r > opt.tol && it < opt.max_iterations) {
    ++it;
    IterationRecord rec;
    rec.t = t;
    rec.iteration = it;
    const Eigen::Matrix<double, 6, 1> delta = -lu.solve(flat_vector(cur->pt));
    double scale = 1.0;
    std::optional<PtModel::Evaluation> next;
    W6Coeffs cand{};
    for (int k = 0; k <= opt.max_halvings; ++k, scale *= 0.5) {
      for (std::size_t j = 0; j < 6; ++j) cand[j] = res.b[j] + scale * delta(static_cast<Eigen::Index>(j));
      next = try_evaluate(model, cand, [&](const char* w) { why = w; });
      if (next && model.residual(next->pt) < r) {
        rec.halvings = k;
        break;
      }
      next.reset();
    }
    if (!next) {
      if (!state.fresh) {
        // stale chord: rebuild at the current iterate and retry
        state.jacobian = jacobian_fd(model, res.b, opt.fd_step * prob.r_e);
        state.fresh = true;
        lu.compute(state.jacobian);
        rec.residual = r;
        rec.halvings = opt.max_halvings;
        rec.jacobian_refreshed = true;
        res.history.push_back(rec);
        continue;
      }
      res.message = "line search failed to reduce the residual";
      if (!why.empty()) res.message += " (" + why + ")";
      res.history.push_back(rec);
      break;
    }
    const double r_new = model.residual(next->pt);
    rec.step_norm = scale * delta.cwiseAbs().maxCoeff();
    rec.residual = r_new;
    const double ratio = r_new / r;
    res.b = cand;
    cur = std::move(next);
    r = r_new;
    if (ratio > opt.contraction_refresh && r > opt.tol) {
      state.jacobian = jacobian_fd(model, res.b, opt.fd_step * prob.r_e);
      state.fresh = true;
      lu.compute(state.jacobian);
      rec.jacobian_refreshed = true;
    }
    res.history.push_back(rec);
  }

  res.iterations = it;
  res.residual = r;
  res.pt = cur->pt;
  res.converged = r <= opt.tol;
  if (res.converged) {
    res.message = "converged";
  } else if (res.message.empty()) {
    res.message = "iteration limit reached";
  }
  res.evaluations = model.evaluations() - evals_before;
  return res;
}

void attach_far_field(DesignResult& res, const PtModel& model,
                      const std::optional<PtModel::Evaluation>& undesigned) {
  const DesignOptions& opt = model.problem().options;
  if (!opt.far_field || !res.converged) return;
  const PtModel::Evaluation eval = model.evaluate_full(res.b);
  res.profile = far_field_profile(eval, opt);
  res.far_field_slope = res.profile->slope;
  if (undesigned) {
    res.undesigned_slope = far_field_profile(*undesigned, opt).slope;
  }
  res.evaluations += 1;
}

}  // namespace

DesignResult design(const DesignProblem& problem, const W6Coeffs& start,
                    const analytic::Matrix6* jacobian) {
  auto grid = std::make_shared<const SphericalGrid>(SphericalGrid::build(problem.options.n_theta));
  check_admission(problem, *grid);
  const PtModel model(problem, grid);
  SolveState state{jacobian != nullptr ? *jacobian : origin_design_jacobian(problem),
                   false};
  std::optional<PtModel::Evaluation> first;
  DesignResult res = newton(model, start, state, 1.0, &first);
  const bool from_zero = std::all_of(start.begin(), start.end(), [](double v) { return v == 0.0; });
  attach_far_field(res, model, from_zero ? first : std::nullopt);
  if (!from_zero && res.converged && problem.options.far_field) {
    res.undesigned_slope = far_field_profile(model.evaluate_full(W6Coeffs{}), problem.options).slope;
  }
  res.path.push_back({1.0, res.b, res.residual, res.iterations});
  return res;
}

DesignResult continuation(const DesignProblem& problem, int steps) {
  if (steps < 1) throw std::invalid_argument("continuation: steps must be >= 1");
  auto grid = std::make_shared<const SphericalGrid>(SphericalGrid::build(problem.options.n_theta));
  check_admission(problem, *grid);
  SolveState state{origin_design_jacobian(problem), false};

  DesignResult out;
  std::vector<IterationRecord> history;
  int total_iterations = 0;
  int total_evaluations = 0;
  W6Coeffs prev{}, prev2{};
  std::optional<PtModel> last_model;
  for (int k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) / steps;
    // secant predictor once two points are known
    W6Coeffs guess = prev;
    if (k >= 2) {
      for (std::size_t j = 0; j < 6; ++j) guess[j] = 2.0 * prev[j] - prev2[j];
    }
    last_model.emplace(problem.scaled(t), grid);
    state.fresh = false;
    DesignResult step = newton(*last_model, guess, state, t);
    if (!step.converged && k >= 2) {
      // predictor may overshoot; retry from the last accepted point
      step = newton(*last_model, prev, state, t);
    }
    total_iterations += step.iterations;
    total_evaluations += step.evaluations;
    history.insert(history.end(), step.history.begin(), step.history.end());
    out.path.push_back({t, step.b, step.residual, step.iterations});
    out.b = step.b;
    out.residual = step.residual;
    out.pt = step.pt;
    if (k == 0) out.initial_residual = step.initial_residual;
    if (!step.converged) {
      out.converged = false;
      out.message = "continuation failed at t = " + std::to_string(t) + ": " + step.message;
      break;
    }
    prev2 = prev;
    prev = step.b;
    if (k == steps) {
      out.converged = true;
      out.message = "converged";
    }
  }
  out.history = std::move(history);
  out.iterations = total_iterations;
  out.evaluations = total_evaluations;
  if (out.converged && problem.options.far_field) {
    attach_far_field(out, *last_model, last_model->evaluate_full(W6Coeffs{}));
  }
  return out;
}

}  // namespace ptv
