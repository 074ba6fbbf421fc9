#include "ptv/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

namespace ptv {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (allowed.count(it.key()) == 0) throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

template <class T>
void read(const json& j, const char* key, T& dst) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

template <class T>
void read_optional(const json& j, const char* key, std::optional<T>& dst) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  T v{};
  read(j, key, v);
  dst = v;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RunConfig RunConfig::from_json(const json& j) {
  check_keys(j, {"material", "r_i", "r_e", "n_theta", "tol", "swap_roles", "out", "perturbation", "b",
                 "design", "sweep", "verify"},
             "config");
  RunConfig c;
  if (j.contains("material")) {
    const json& m = j.at("material");
    check_keys(m, {"sigma_core", "sigma_shell", "sigma_matrix"}, "material");
    read(m, "sigma_core", c.sigma_core);
    read(m, "sigma_shell", c.sigma_shell);
    read(m, "sigma_matrix", c.sigma_matrix);
  }
  read_optional(j, "r_i", c.r_i);
  read_optional(j, "r_e", c.r_e);
  read(j, "n_theta", c.n_theta);
  read(j, "tol", c.tol);
  read(j, "swap_roles", c.swap_roles);
  read(j, "out", c.out);
  if (j.contains("perturbation")) {
    const json& p = j.at("perturbation");
    check_keys(p, {"coeffs", "random"}, "perturbation");
    if (p.contains("coeffs")) {
      for (const auto& t : p.at("coeffs")) {
        check_keys(t, {"l", "m", "value"}, "perturbation.coeffs");
        ShTerm term;
        read(t, "l", term.l);
        read(t, "m", term.m);
        read(t, "value", term.value);
        c.perturbation.push_back(term);
      }
    }
    if (p.contains("random") && !p.at("random").is_null()) {
      const json& r = p.at("random");
      check_keys(r, {"degree", "epsilon", "seed"}, "perturbation.random");
      RandomPerturbation rp;
      read(r, "degree", rp.degree);
      read(r, "epsilon", rp.epsilon);
      read(r, "seed", rp.seed);
      c.random = rp;
    }
  }
  if (j.contains("b")) {
    std::vector<double> b;
    read(j, "b", b);
    if (b.size() != 6) throw ConfigError("'b' must list six coefficients");
    std::copy(b.begin(), b.end(), c.b.begin());
  }
  if (j.contains("design")) {
    const json& d = j.at("design");
    check_keys(d, {"continuation_steps", "max_iterations", "budget_fraction", "amplitude_fraction",
                   "fd_step", "far_field"},
               "design");
    read(d, "continuation_steps", c.continuation_steps);
    read(d, "max_iterations", c.max_iterations);
    read(d, "budget_fraction", c.budget_fraction);
    read(d, "amplitude_fraction", c.amplitude_fraction);
    read(d, "fd_step", c.fd_step);
    read(d, "far_field", c.far_field);
  }
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    check_keys(s, {"epsilons", "degree", "seed"}, "sweep");
    read(s, "epsilons", c.sweep_epsilons);
    read(s, "degree", c.sweep_degree);
    read(s, "seed", c.sweep_seed);
  }
  if (j.contains("verify")) {
    const json& v = j.at("verify");
    check_keys(v, {"lambda_offset", "finite_differences", "concentric_samples", "seed"}, "verify");
    read(v, "lambda_offset", c.lambda_offset);
    read(v, "finite_differences", c.finite_differences);
    read(v, "concentric_samples", c.concentric_samples);
    read(v, "seed", c.verify_seed);
  }
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
  return from_json(j);
}

json RunConfig::to_json() const {
  json coeffs = json::array();
  for (const auto& t : perturbation) coeffs.push_back({{"l", t.l}, {"m", t.m}, {"value", t.value}});
  json pert = {{"coeffs", coeffs}};
  pert["random"] = random ? json{{"degree", random->degree}, {"epsilon", random->epsilon},
                                 {"seed", random->seed}}
                          : json(nullptr);
  return {{"material",
           {{"sigma_core", sigma_core}, {"sigma_shell", sigma_shell}, {"sigma_matrix", sigma_matrix}}},
          {"r_i", r_i ? json(*r_i) : json(nullptr)},
          {"r_e", r_e ? json(*r_e) : json(nullptr)},
          {"n_theta", n_theta},
          {"tol", tol},
          {"swap_roles", swap_roles},
          {"out", out},
          {"perturbation", pert},
          {"b", std::vector<double>(b.begin(), b.end())},
          {"design",
           {{"continuation_steps", continuation_steps},
            {"max_iterations", max_iterations},
            {"budget_fraction", budget_fraction},
            {"amplitude_fraction", amplitude_fraction},
            {"fd_step", fd_step},
            {"far_field", far_field}}},
          {"sweep", {{"epsilons", sweep_epsilons}, {"degree", sweep_degree}, {"seed", sweep_seed}}},
          {"verify",
           {{"lambda_offset", lambda_offset},
            {"finite_differences", finite_differences},
            {"concentric_samples", concentric_samples},
            {"seed", verify_seed}}}};
}

void RunConfig::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(what) + " must be positive");
  };
  positive(sigma_core, "sigma_core");
  positive(sigma_shell, "sigma_shell");
  positive(sigma_matrix, "sigma_matrix");
  if (r_i) positive(*r_i, "r_i");
  if (r_e) positive(*r_e, "r_e");
  if (r_i && r_e && !(*r_i < *r_e)) throw ConfigError("r_i must be smaller than r_e");
  if (n_theta < 4 || n_theta > 48) throw ConfigError("n_theta must lie in [4, 48]");
  positive(tol, "tol");
  if (continuation_steps < 0) throw ConfigError("continuation_steps must be >= 0");
  if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
  positive(budget_fraction, "budget_fraction");
  if (!(budget_fraction < 1.0)) throw ConfigError("budget_fraction must be below 1");
  positive(amplitude_fraction, "amplitude_fraction");
  positive(fd_step, "fd_step");
  if (random) {
    if (random->degree < 0) throw ConfigError("random degree must be >= 0");
    positive(random->epsilon, "random epsilon");
  }
  for (const auto& t : perturbation) {
    if (t.l < 0 || std::abs(t.m) > t.l) throw ConfigError("perturbation term has invalid (l, m)");
  }
  if (sweep_epsilons.empty()) throw ConfigError("sweep epsilons must not be empty");
  for (double e : sweep_epsilons) positive(e, "sweep epsilon");
  if (sweep_degree < 0) throw ConfigError("sweep degree must be >= 0");
  if (concentric_samples < 1) throw ConfigError("concentric_samples must be >= 1");
}

MaterialParams RunConfig::material() const {
  return MaterialParams(sigma_core, sigma_shell, sigma_matrix);
}

std::pair<double, double> RunConfig::radii() const {
  const MaterialParams mat = material();
  if (r_i && r_e) return {*r_i, *r_e};
  if (r_e || (swap_roles && !r_i)) {
    const double re = r_e.value_or(1.0);
    return {neutral_inner_radius(re, mat), re};
  }
  const double ri = r_i.value_or(1.0);
  return {ri, neutral_outer_radius(ri, mat)};
}

double RunConfig::base_radius() const {
  const auto [ri, re] = radii();
  return swap_roles ? re : ri;
}

DesignOptions RunConfig::design_options() const {
  DesignOptions o;
  o.n_theta = n_theta;
  o.tol = tol;
  o.max_iterations = max_iterations;
  o.budget_fraction = budget_fraction;
  o.amplitude_fraction = amplitude_fraction;
  o.fd_step = fd_step;
  o.far_field = far_field;
  return o;
}

RadialSurface RunConfig::perturbation_surface() const {
  const double r0 = base_radius();
  if (random) {
    if (!perturbation.empty()) throw ConfigError("give either perturbation coeffs or random, not both");
    return random_perturbation(r0, random->degree, random->epsilon * r0, random->seed,
                               SphericalGrid::build(n_theta));
  }
  return RadialSurface(r0, perturbation);
}

DesignProblem RunConfig::design_problem() const {
  const MaterialParams mat = material();
  const RadialSurface h = perturbation_surface();
  const auto [ri, re] = radii();
  DesignProblem p = swap_roles ? DesignProblem::core(mat, re, h.terms(), design_options())
                               : DesignProblem::shell(mat, ri, h.terms(), design_options());
  // explicit radii must already be neutral
  if (std::abs(p.r_i - ri) > 1e-12 * ri || std::abs(p.r_e - re) > 1e-12 * re) {
    throw InfeasibleMaterial("design requires neutral radii; drop r_i or r_e from the config");
  }
  return p;
}

VerifyConfig RunConfig::verify_config() const {
  VerifyConfig v;
  v.material = material();
  v.r_i = radii().first;
  v.n_theta = n_theta;
  v.lambda_offset = lambda_offset;
  v.finite_differences = finite_differences;
  v.concentric_samples = concentric_samples;
  v.seed = verify_seed;
  return v;
}

std::string RunConfig::hash() const {
  json j = to_json();
  j.erase("out");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(j.dump())));
  return buf;
}

}  // namespace ptv
