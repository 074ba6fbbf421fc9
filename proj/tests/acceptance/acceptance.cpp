// Acceptance runner: `ptv_acceptance N [--corrected]` checks criterion N (1..10), or all of
// them without an argument, printing one PASS/FAIL line per criterion.
//
// Criteria 1, 5 and 6 compare against closed forms some of which do not hold as written
// (see README, "Known discrepancies"). The plain run evaluates them literally and fails;
// --corrected evaluates the same quantities against the corrected closed forms.
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "ptv/designer.hpp"
#include "ptv/verify.hpp"

#ifndef PTV_CLI
#define PTV_CLI "ptv"
#endif

namespace {

using namespace ptv;
using Clock = std::chrono::steady_clock;

const MaterialParams kMat(1.0, 2.0, 1.4);
constexpr int kNTheta = 24;
bool g_corrected = false;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::shared_ptr<const SphericalGrid> grid24() {
  static auto g = std::make_shared<const SphericalGrid>(SphericalGrid::build(kNTheta));
  return g;
}

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "NOT ") + what;
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

void report_checks(Outcome& out, const CheckList& checks, const std::vector<std::string>& names) {
  for (const auto& n : names) {
    const auto it = std::find_if(checks.begin(), checks.end(), [&](const OracleCheck& c) { return c.name == n; });
    if (it == checks.end()) {
      out.require(false, n + " present");
      continue;
    }
    out.require(it->passed, n + fmt(" err %.2e tol %.1e", it->error, it->tolerance));
  }
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
  Outcome o;
  const auto t0 = Clock::now();
  const double r_e = neutral_outer_radius(1.0, kMat);
  const CheckList checks = identity_checks(*grid24(), 1.0, r_e);
  const double dt = seconds_since(t0);
  std::vector<std::string> names;
  for (const auto& c : checks) {
    const bool stated = c.name.find("_stated") != std::string::npos;
    if (c.name.rfind("identity.", 0) != 0 && c.name.rfind("funk_hecke.", 0) != 0) continue;
    if (g_corrected ? !stated : c.name != "identity.two_radii_cubic_linear_x") names.push_back(c.name);
  }
  report_checks(o, checks, names);
  o.require(dt < 10.0, fmt("runtime %.1f s < 10 s", dt));
  return o;
}

Outcome criterion2() {
  Outcome o;
  const CheckList checks = operator_checks(grid24(), kMat, 1.0);
  report_checks(o, checks, {"operator.core_self", "operator.shell_self", "operator.core_from_shell",
                            "operator.shell_from_core"});
  return o;
}

Outcome criterion3() {
  Outcome o;
  const CheckList checks = pt_checks(grid24(), kMat, 1.0);
  report_checks(o, checks, {"pt.neutral_bie", "pt.neutral_radial"});
  return o;
}

Outcome criterion4() {
  Outcome o;
  const auto t0 = Clock::now();
  const CheckList checks = concentric_checks(grid24(), 5, 20240601);
  const double dt = seconds_since(t0);
  report_checks(o, checks, {"pt.concentric_random"});
  o.require(dt < 60.0, fmt("runtime %.1f s < 60 s", dt));
  return o;
}

Outcome criterion5() {
  Outcome o;
  const CheckList checks = jacobian_checks(grid24(), kMat, 1.0);
  report_checks(o, checks,
                {g_corrected ? "jacobian.finite_difference" : "jacobian.finite_difference_stated",
                 "jacobian.zero_pattern", "jacobian.determinant_sign"});
  const auto det = std::find_if(checks.begin(), checks.end(),
                                [](const OracleCheck& c) { return c.name == "jacobian.determinant"; });
  const double mag = det == checks.end() ? 0.0 : det->computed;
  o.require(mag > 0.0, fmt("det nonzero (|det| %.3e)", mag));
  return o;
}

Outcome criterion6() {
  Outcome o;
  const CheckList checks = table_checks(kMat, 1.0);
  report_checks(o, checks,
                {g_corrected ? "table.shell_derivative" : "table.shell_derivative_stated",
                 "table.cross_derivative"});
  return o;
}

Outcome criterion7() {
  Outcome o;
  const SphericalGrid& g = *grid24();
  int ok = 0;
  double worst_res = 0.0, worst_und = 0.0, worst_des = -1e300, worst_time = 0.0;
  int worst_it = 0;
  for (int s = 0; s < 10; ++s) {
    const auto t0 = Clock::now();
    const RadialSurface h = random_perturbation(1.0, 3, 0.01, 7000 + s, g);
    const DesignResult r = design(DesignProblem::shell(kMat, 1.0, h.terms()));
    const double dt = seconds_since(t0);
    const double und = r.undesigned_slope.value_or(NAN), des = r.far_field_slope.value_or(NAN);
    const bool pass = r.converged && r.iterations <= 10 && r.residual <= 1e-8 &&
                      std::abs(und + 2.0) <= 0.05 && des <= -2.8 && dt <= 300.0;
    ok += pass;
    std::printf("  design %d: it %d residual %.2e slope %.3f -> %.3f  %.1f s %s\n", s, r.iterations,
                r.residual, und, des, dt, pass ? "ok" : "FAILED");
    worst_res = std::max(worst_res, r.residual);
    worst_it = std::max(worst_it, r.iterations);
    worst_und = std::max(worst_und, std::abs(und + 2.0));
    worst_des = std::max(worst_des, des);
    worst_time = std::max(worst_time, dt);
  }
  o.require(ok == 10, fmt("%.0f/10 designs", ok));
  o.require(worst_it <= 10, fmt("max iterations %.0f <= 10", worst_it));
  o.require(worst_res <= 1e-8, fmt("max residual %.2e <= 1e-8", worst_res));
  o.require(worst_und <= 0.05, fmt("undesigned slope within %.3f of -2", worst_und));
  o.require(worst_des <= -2.8, fmt("max designed slope %.3f <= -2.8", worst_des));
  o.require(worst_time <= 300.0, fmt("max %.1f s per design", worst_time));
  return o;
}

Outcome criterion8() {
  Outcome o;
  const RadialSurface h = random_perturbation(1.0, 3, 0.01, 8000, *grid24());
  DesignProblem prob = DesignProblem::shell(kMat, 1.0, h.terms());
  prob.options.far_field = false;
  std::vector<double> jumps;
  for (int steps : {16, 32}) {
    const DesignResult r = continuation(prob, steps);
    double mj = 0.0;
    for (std::size_t k = 1; k < r.path.size(); ++k) {
      for (int j = 0; j < 6; ++j) mj = std::max(mj, std::abs(r.path[k].b[j] - r.path[k - 1].b[j]));
    }
    o.require(r.converged && static_cast<int>(r.path.size()) == steps + 1,
              fmt("%.0f steps converged", steps));
    double b0 = 0.0;
    if (!r.path.empty()) {
      for (double v : r.path.front().b) b0 = std::max(b0, std::abs(v));
    }
    o.require(b0 == 0.0, fmt("b(0) = 0 (|b(0)| %.1e)", b0));
    jumps.push_back(mj);
  }
  const double ratio = jumps[1] / jumps[0];
  o.require(ratio <= 0.6, fmt("jump ratio %.4f <= 0.6 (%.3e -> %.3e)", ratio, jumps[0], jumps[1]));
  return o;
}

Outcome criterion9() {
  Outcome o;
  const double r_e = neutral_outer_radius(1.0, kMat);
  for (int s = 0; s < 3; ++s) {
    const RadialSurface h = random_perturbation(r_e, 3, 0.01 * r_e, 9000 + s, *grid24());
    DesignProblem prob = DesignProblem::core(kMat, r_e, h.terms());
    prob.options.far_field = false;
    const DesignResult r = design(prob);
    o.require(r.converged && r.residual <= 1e-8,
              fmt("core design %.0f: residual %.2e in %.0f iterations", s, r.residual, r.iterations));
  }
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

Outcome criterion10() {
  Outcome o;
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / ("ptv_accept_" + std::to_string(::getpid()));
  fs::create_directories(root);
  const fs::path cfg = root / "config.json";
  std::ofstream(cfg) << R"({"perturbation":{"random":{"degree":3,"epsilon":0.01,"seed":10}}})";
  for (const char* cmd : {"verify", "design"}) {
    std::vector<fs::path> dirs;
    for (int run = 0; run < 2; ++run) {
      const fs::path d = root / (std::string(cmd) + std::to_string(run));
      const std::string line = std::string(PTV_CLI) + " " + cmd + " --config " + cfg.string() +
                               " --out " + d.string() + " > " + (root / "log").string() + " 2>&1";
      const int rc = std::system(line.c_str());
      o.require(rc == 0, std::string(cmd) + " run " + std::to_string(run) + " exit 0");
      dirs.push_back(d);
    }
    int files = 0;
    bool same = true;
    for (const auto& e : fs::directory_iterator(dirs[0])) {
      ++files;
      same = same && slurp(e.path()) == slurp(dirs[1] / e.path().filename());
    }
    o.require(files > 0 && same, std::string(cmd) + " outputs byte-identical (" + std::to_string(files) + " files)");
  }
  fs::remove_all(root);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria = {criterion1, criterion2, criterion3, criterion4,
                                                          criterion5, criterion6, criterion7, criterion8,
                                                          criterion9, criterion10};
  std::vector<int> which;
  for (int a = 1; a < argc; ++a) {
    const std::string arg = argv[a];
    if (arg == "--corrected") {
      g_corrected = true;
    } else {
      const int n = std::atoi(arg.c_str());
      if (n < 1 || n > 10) {
        std::fprintf(stderr, "usage: %s [1..10]... [--corrected]\n", argv[0]);
        return 2;
      }
      which.push_back(n);
    }
  }
  if (which.empty()) {
    for (int n = 1; n <= 10; ++n) which.push_back(n);
  }
  bool all = true;
  for (int n : which) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[n - 1]();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    std::printf("criterion %d%s: %s (%.1f s) %s\n", n, g_corrected ? " (corrected)" : "",
                o.pass ? "PASS" : "FAIL", seconds_since(t0), o.detail.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
