// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include "commands.hpp"
#include "monolab/asymptotics.hpp"
#include "monolab/config.hpp"
#include "monolab/numerics.hpp"
#include "monolab/order.hpp"
#include "monolab/prevalence.hpp"
#include "monolab/report.hpp"
#include "monolab/rng.hpp"
#include "monolab/symmetry.hpp"
#include "monolab/systems.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <unistd.h>
#include <vector>

using namespace monolab;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;
const fs::path kConfigs = MONOLAB_CONFIG_DIR;

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void note(const std::string& what) { details.push_back("     " + what); }
};

std::string fmt(double v) { return format_value(v); }

int worker_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

StateVector scalar(double v) { return StateVector::constant(GridDescriptor::euclidean(1), v); }

std::string verdict_counts(const std::map<Verdict, long>& counts) {
  std::string s;
  for (Verdict v : {Verdict::StableCycle, Verdict::UnstableCycle, Verdict::Unresolved, Verdict::Escaped}) {
    const auto it = counts.find(v);
    s += std::string(to_string(v)) + "=" + std::to_string(it == counts.end() ? 0 : it->second) + " ";
  }
  return s;
}

std::map<Verdict, long> tally(const std::vector<Classification>& cls) {
  std::map<Verdict, long> counts;
  for (const auto& c : cls) ++counts[c.verdict];
  return counts;
}

// --- 1 ---------------------------------------------------------------------

Outcome analytic_oracles() {
  Outcome out;
  const SystemSpec cubic = catalog::scalar_cubic(0.1);
  const ClassifyBudget cb = ClassifyBudget::defaults_for(cubic);

  const Classification stable = classify_orbit(cubic, scalar(0.5), cb);
  out.require(stable.verdict == Verdict::StableCycle && stable.cycle && stable.cycle->period == 1 &&
                  std::abs(stable.cycle->rho - 0.8) < 1e-6,
              "cubic u=1: rho " + (stable.cycle ? fmt(stable.cycle->rho) : "none") + " vs 1-2h = 0.8");

  const Classification unstable = classify_orbit(cubic, scalar(0.0), cb);
  out.require(unstable.verdict == Verdict::UnstableCycle && unstable.cycle && unstable.cycle->period == 1 &&
                  std::abs(unstable.cycle->rho - 1.1) < 1e-6,
              "cubic u=0: rho " + (unstable.cycle ? fmt(unstable.cycle->rho) : "none") + " vs 1+h = 1.1");

  const double r = 3.2;
  const SystemSpec logistic = catalog::logistic(r);
  const Classification two = classify_orbit(logistic, scalar(0.3), ClassifyBudget::defaults_for(logistic));
  const double multiplier = std::abs(4 + 2 * r - r * r);
  out.require(two.cycle && two.cycle->period == 2 && std::abs(two.cycle->rho - multiplier) < 1e-6,
              "logistic r=3.2: period " + std::to_string(two.cycle ? two.cycle->period : 0) + ", rho " +
                  (two.cycle ? fmt(two.cycle->rho) : "none") + " vs |4+2r-r^2| = " + fmt(multiplier));

  const SystemSpec lin = catalog::linear_cooperative();
  const StateVector x0(Eigen::Vector2d(0.3, -0.2), lin.grid());
  const Classification fixed = classify_orbit(lin, x0, ClassifyBudget::defaults_for(lin));
  out.require(fixed.verdict == Verdict::StableCycle && fixed.cycle && std::abs(fixed.cycle->rho - 0.7) < 1e-8,
              "linear cooperative: rho " + (fixed.cycle ? fmt(fixed.cycle->rho) : "none") + " vs 0.7");
  return out;
}

// --- 2 ---------------------------------------------------------------------

ParabolicSpec pure_diffusion(GridDescriptor grid, int steps) {
  ParabolicSpec spec;
  spec.grid = grid;
  spec.reaction.kind = ReactionKind::Linear;
  spec.reaction.lambda = 0.0;
  spec.scheme.steps_per_period = steps;
  return spec;
}

Eigen::VectorXd sine_mode(const GridDescriptor& g) {
  Eigen::VectorXd v(g.n);
  for (int i = 0; i < g.n; ++i) v[i] = std::sin(pi * g.coordinate(i));
  return v;
}

bool order_two(const std::vector<double>& err, Outcome& out, const std::string& label) {
  bool ok = true;
  std::string ratios;
  for (std::size_t k = 0; k + 1 < err.size(); ++k) {
    const double ratio = err[k] / err[k + 1];
    ratios += fmt(ratio) + " ";
    ok = ok && ratio >= 3.2 && ratio <= 4.8;
  }
  out.require(ok, label + " ratios " + ratios + "in [3.2, 4.8]");
  return ok;
}

Outcome discretization_fidelity() {
  Outcome out;
  {
    const GridDescriptor g = GridDescriptor::dirichlet(32);
    const int m = 200;
    const double dt = 1.0 / m;
    const double mu1 = 2.0 / (g.h * g.h) * (1.0 - std::cos(pi * g.h));
    const double cn = std::pow((1.0 - 0.5 * dt * mu1) / (1.0 + 0.5 * dt * mu1), m);
    const Eigen::VectorXd v = sine_mode(g);
    const StateVector image = propagate_period(StateVector(v, g), pure_diffusion(g, m));
    const double err = (image.values() - cn * v).cwiseAbs().maxCoeff();
    out.require(err < 1e-10, "sine mode vs Crank-Nicolson factor: error " + fmt(err));
    const double rel = std::abs(cn / std::exp(-mu1) - 1.0);
    out.require(rel < 0.005, "factor vs exp(-mu1 tau) at M=200: relative " + fmt(rel));
  }
  {
    // Time refinement on the nonlinear forced problem against a fine reference.
    ParabolicSpec spec = *catalog::dirichlet_cubic(15.0, 32).parabolic_spec();
    const GridDescriptor g = spec.grid;
    Eigen::VectorXd x0(g.n);
    for (int i = 0; i < g.n; ++i) {
      const double x = g.coordinate(i);
      x0[i] = 0.5 * std::sin(pi * x) + 0.2 * std::sin(2 * pi * x);
    }
    spec.scheme.steps_per_period = 6400;
    const StateVector ref = propagate_period(StateVector(x0, g), spec);
    std::vector<double> err;
    for (int m : {50, 100, 200, 400}) {
      spec.scheme.steps_per_period = m;
      err.push_back(sup_distance(propagate_period(StateVector(x0, g), spec), ref));
    }
    order_two(err, out, "time refinement M=50..400");
  }
  {
    // Space refinement: halve h under pure diffusion and compare with exp(-pi^2).
    std::vector<double> err;
    for (int cells : {8, 16, 32, 64}) {
      const GridDescriptor g = GridDescriptor::dirichlet(cells - 1);
      const Eigen::VectorXd v = sine_mode(g);
      const StateVector image = propagate_period(StateVector(v, g), pure_diffusion(g, 20000));
      const int mid = g.n / 2;
      err.push_back(std::abs(image[mid] / v[mid] - std::exp(-pi * pi)));
    }
    order_two(err, out, "space refinement h=1/8..1/64");
  }
  return out;
}

// --- 3 ---------------------------------------------------------------------

Outcome jacobian_correctness() {
  Outcome out;
  for (const SystemSpec& sys : catalog::shipped_parabolic()) {
    const ParabolicSpec& spec = *sys.parabolic_spec();
    const GridDescriptor g = spec.grid;
    double worst = 0.0;
    for (std::uint64_t k = 0; k < 20; ++k) {
      auto rng = SplitMix64::stream(2024, k);
      Eigen::VectorXd x(g.n), v(g.n);
      for (int i = 0; i < g.n; ++i) x[i] = rng.uniform(-1.0, 1.0);
      for (int i = 0; i < g.n; ++i) v[i] = rng.uniform(-1.0, 1.0);
      const double eps = 1e-6;
      const Eigen::VectorXd fd = (propagate_period(StateVector(x + eps * v, g), spec).values() -
                                  propagate_period(StateVector(x - eps * v, g), spec).values()) /
                                 (2 * eps);
      const Eigen::VectorXd tangent = propagate_tangent(StateVector(x, g), StateVector(v, g), spec).second.values();
      worst = std::max(worst, (tangent - fd).norm() / fd.norm());
    }
    out.require(worst < 1e-4, sys.name() + ": worst relative error over 20 (x,v) " + fmt(worst));
  }
  return out;
}

// --- 4 ---------------------------------------------------------------------

GroupActionSpec natural_action(const SystemSpec& sys) {
  switch (sys.grid().kind) {
    case DomainKind::IntervalDirichlet:
    case DomainKind::IntervalNeumann:
      return GroupActionSpec::interval_reflection(sys.dimension());
    case DomainKind::Ring:
      return GroupActionSpec::ring_rotation(sys.dimension());
    default:
      return GroupActionSpec::trivial(sys.dimension());
  }
}

Outcome standing_assumptions() {
  Outcome out;
  const std::uint64_t seed = 1;
  for (const SystemSpec& sys : catalog::shipped_parabolic()) {
    const GroupActionSpec action = natural_action(sys);
    const std::vector<PropertyReport> reports = {
        check_monotone(sys, 200, seed),
        check_strong_monotone(sys, 200, seed),
        check_strong_positivity(sys, 40, seed),
        validate_dissipativity(sys, 200, seed),
        trapping_check(sys, 50, 200, seed),
        check_equivariance(sys, action, 20, seed, 1e-10),
    };
    std::string line = sys.name() + " [" + std::string(to_string(action.kind())) + "]:";
    bool ok = true;
    for (const auto& r : reports) {
      line += " " + r.check_name + "=" + std::to_string(r.violations) + "/" + std::to_string(r.pairs_tested);
      // The trivial group has no generators, so its equivariance check is empty.
      const bool vacuous = r.check_name == "equivariance" && action.generators().empty();
      ok = ok && r.passed() && (r.pairs_tested > 0 || vacuous);
    }
    out.require(ok, line);
    if (action.generators().empty()) out.note("  symmetry is built into the radial encoding; equivariance is vacuous");
    for (const auto& r : reports) {
      for (const auto& n : r.notes) out.note("  " + r.check_name + ": " + n);
    }
  }
  return out;
}

// --- 5 to 8 ----------------------------------------------------------------

struct Experiment {
  SystemSpec system;
  SamplerSpec sampler;
  ClassifyBudget budget;
};

Experiment experiment(const std::string& config) {
  const ExperimentConfig c = ExperimentConfig::load(kConfigs / config);
  SystemSpec sys = build_system(c);
  ClassifyBudget budget = build_budget(c, sys);
  return {std::move(sys), build_sampler(c), budget};
}

Outcome prevalence_dirichlet() {
  Outcome out;
  const Experiment e = experiment("dirichlet_cubic_l15.conf");
  out.require(e.sampler.strategy == SamplingStrategy::SmoothField && e.system == catalog::dirichlet_cubic(15.0, 32),
              "system " + e.system.name() + ", smooth sampler with " + std::to_string(e.sampler.modes) + " modes");
  const PrevalenceReport r = estimate_prevalence(e.system, e.sampler, 500, e.budget, {worker_threads()});
  out.note(verdict_counts(r.counts));
  out.require(r.fractions_defined && r.stable_fraction >= 0.95,
              "stable fraction " + fmt(r.stable_fraction) + " (Wilson 95% [" + fmt(r.stable_interval.low) + ", " +
                  fmt(r.stable_interval.high) + "]) >= 0.95");
  out.note("unresolved fraction " + fmt(r.unresolved_fraction));
  std::string hist = "period histogram (k):";
  long recorded = 0;
  for (const auto& [k, n] : r.period_histogram) {
    hist += " " + std::to_string(k) + ":" + std::to_string(n);
    recorded += n;
  }
  out.require(recorded == r.count(Verdict::StableCycle), hist);
  return out;
}

Outcome neumann_homogeneous() {
  Outcome out;
  const Experiment e = experiment("neumann_cubic_l5.conf");
  const NonlinearitySpec& f = e.system.parabolic_spec()->reaction;
  out.require(f.profile_amplitude == 0.0 && f.gradient_coeff == 0.0, "reaction is x-independent");
  const auto cls = classify_ensemble(e.system, e.sampler, 200, e.budget, {worker_threads()});
  out.note(verdict_counts(tally(cls)));
  double worst_var = 0.0;
  long stable = 0, bad_period = 0, inhomogeneous = 0;
  for (const auto& c : cls) {
    if (!c.stable()) continue;
    ++stable;
    if (c.cycle->period != 1) ++bad_period;
    for (const auto& p : c.cycle->points) {
      const double var = spatial_variance(p);
      worst_var = std::max(worst_var, var);
      if (!(var < 1e-6)) ++inhomogeneous;
    }
  }
  out.require(stable > 0, std::to_string(stable) + " stable limits");
  out.require(inhomogeneous == 0, "max spatial variance " + fmt(worst_var) + " < 1e-6");
  out.require(bad_period == 0, std::to_string(bad_period) + " stable limits with p != 1");
  return out;
}

Outcome ring_symmetric() {
  Outcome out;
  const Experiment e = experiment("ring_cubic_l5.conf");
  const GroupActionSpec action = GroupActionSpec::ring_rotation(e.system.dimension());
  out.require(action.order() == e.system.dimension(), "full rotation group of order " + std::to_string(action.order()));
  const SymmetryReport r = symmetry_experiment(e.system, action, e.sampler, 100, e.budget, 1e-5, {worker_threads()});
  out.note(verdict_counts(r.counts));
  out.require(r.symmetric_fraction >= 0.98, "symmetric-limit fraction " + fmt(r.symmetric_fraction) + " >= 0.98");
  out.require(r.max_deviation < 1e-5, "max deviation at cycle points " + fmt(r.max_deviation) + " < 1e-5");
  return out;
}

Outcome radial_fixed_points() {
  Outcome out;
  const Experiment e = experiment("radial3_cubic_l15.conf");
  out.require(e.system.grid().kind == DomainKind::Radial && e.system.grid().radial_dim == 3,
              "radial grid, ambient dimension 3");
  const auto cls = classify_ensemble(e.system, e.sampler, 100, e.budget, {worker_threads()});
  out.note(verdict_counts(tally(cls)));
  long stable = 0, bad_period = 0;
  for (const auto& c : cls) {
    if (!c.stable()) continue;
    ++stable;
    if (c.cycle->period != 1) ++bad_period;
  }
  out.require(stable > 0, std::to_string(stable) + " stable limits");
  out.require(bad_period == 0, std::to_string(bad_period) + " stable limits with p != 1");
  return out;
}

// --- 9 ---------------------------------------------------------------------

Outcome line_probe_shy() {
  Outcome out;
  const Experiment e = experiment("scalar_cubic.conf");
  SamplerSpec scan = e.sampler;
  scan.strategy = SamplingStrategy::LineScan;
  out.note("line u = " + fmt(scan.base.at(0)) + " + s, s in [" + fmt(scan.s_min) + ", " + fmt(scan.s_max) + "]");

  // Doubling the resolution of the full scan: at every level the bad set fits
  // in one cell of the current grid and that cell lies inside the previous one.
  double lo = -INFINITY, hi = INFINITY;
  for (int r = 101; r <= 801; r = 2 * r - 1) {
    scan.resolution = r;
    const LineReport rep = line_probe(e.system, scan, e.budget, {worker_threads()});
    const double spacing = (scan.s_max - scan.s_min) / (r - 1);
    std::string what = "R=" + std::to_string(r) + ": " + std::to_string(rep.bad_s.size()) + " non-stable";
    bool ok = (r != 101 || rep.bad_s.size() <= 1);
    if (!rep.bad_s.empty()) {
      const auto [a, b] = std::minmax_element(rep.bad_s.begin(), rep.bad_s.end());
      const double cell_lo = *a - spacing, cell_hi = *b + spacing;
      ok = ok && (*b - *a) <= spacing * (1 + 1e-9) && cell_lo >= lo - 1e-12 && cell_hi <= hi + 1e-12;
      what += " in [" + fmt(cell_lo) + ", " + fmt(cell_hi) + "]";
      lo = cell_lo;
      hi = cell_hi;
    }
    out.require(ok, what);
  }

  // Line through the exact basin boundary: nested refinement keeps one bad point.
  scan.base = {-0.5};
  scan.s_max = 1.0;
  scan.resolution = 101;
  const auto levels = refine_line_probe(e.system, scan, e.budget, 4, {worker_threads()});
  bool ok = levels.size() == 5;
  std::string widths;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    ok = ok && levels[k].bad_s.size() <= 1 && levels[k].consistent;
    if (k > 0) ok = ok && levels[k].b - levels[k].a < levels[k - 1].b - levels[k - 1].a;
    widths += fmt(levels[k].b - levels[k].a) + " ";
  }
  out.require(ok, "refinement through u=0: intervals " + widths + "each with <= 1 non-stable point");
  return out;
}

// --- 10 --------------------------------------------------------------------

Outcome omega_probes() {
  Outcome out;
  const SystemSpec cubic = catalog::scalar_cubic();
  const ClassifyBudget b = ClassifyBudget::defaults_for(cubic);
  const std::vector<double> eps = {1e-2, 1e-3, 1e-4};
  const ProbeReport p = omega_plus_probe(cubic, scalar(0.0), scalar(1.0), eps, b);
  out.require(p.in_upper_unstable, "x=0 in U+");
  bool all_one = p.upper.limits.size() == eps.size();
  for (const auto& lim : p.upper.limits) all_one = all_one && lim.size() == 1 && std::abs(lim[0][0] - 1.0) < b.tol_set;
  out.require(all_one && p.upper.consistent && p.upper.stabilized.size() == 1 &&
                  std::abs(p.upper.stabilized[0][0] - 1.0) < b.tol_set,
              "omega+ = {1} at eps 1e-2, 1e-3, 1e-4");
  const double d0 = separation_probe(cubic, scalar(0.0), eps, b).delta_est;
  out.require(d0 >= 0.9, "delta_est at x=0: " + fmt(d0) + " >= 0.9");
  const double d1 = separation_probe(cubic, scalar(1.0), eps, b).delta_est;
  out.require(d1 < 1e-4, "delta_est at x=1: " + fmt(d1) + " < 1e-4");
  return out;
}

// --- 11 --------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string without_wall_time(const std::string& text) {
  std::istringstream in(text);
  std::string line, kept;
  while (std::getline(in, line)) {
    if (line.find("\"wall_time_seconds\"") == std::string::npos) kept += line + "\n";
  }
  return kept;
}

Outcome determinism() {
  Outcome out;
  const fs::path dir = fs::temp_directory_path() / ("monolab_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::vector<std::string> reports, tables;
  for (const char* threads : {"1", "8"}) {
    const fs::path json = dir / (std::string("prevalence_t") + threads + ".json");
    const fs::path csv = dir / (std::string("prevalence_t") + threads + ".csv");
    const int code = cli::run({"monolab", "prevalence", (kConfigs / "dirichlet_cubic_l15.conf").string(), "--samples",
                               "24", "--seed", "7", "--threads", threads, "--out", json.string(), "--csv",
                               csv.string()});
    out.require(code == 0, std::string("prevalence --threads ") + threads + " exit " + std::to_string(code));
    reports.push_back(slurp(json));
    tables.push_back(slurp(csv));
  }
  fs::remove_all(dir);
  out.require(!reports[0].empty() && without_wall_time(reports[0]) == without_wall_time(reports[1]),
              "JSON reports byte-identical apart from wall time");
  out.require(!tables[0].empty() && tables[0] == tables[1], "CSV summaries byte-identical");
  return out;
}

struct Criterion {
  int id;
  std::string title;
  double runtime_limit;  // seconds, 0 when none is stated
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "analytic oracles", 1.0, analytic_oracles},
      {2, "discretization fidelity", 10.0, discretization_fidelity},
      {3, "Jacobian correctness", 30.0, jacobian_correctness},
      {4, "standing assumptions on shipped systems", 300.0, standing_assumptions},
      {5, "prevalence of stable cycles, Dirichlet cubic", 900.0, prevalence_dirichlet},
      {6, "Neumann limits are homogeneous and tau-periodic", 0.0, neumann_homogeneous},
      {7, "ring limits are rotation invariant", 0.0, ring_symmetric},
      {8, "radial limits are fixed points", 0.0, radial_fixed_points},
      {9, "line probe through the basin boundary", 0.0, line_probe_shy},
      {10, "omega+ and separation probes", 0.0, omega_probes},
      {11, "thread-count determinism", 0.0, determinism},
  };

  int failures = 0;
  std::vector<std::string> summary;
  for (const auto& c : criteria) {
    std::printf("== AC%d %s\n", c.id, c.title.c_str());
    std::fflush(stdout);
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& ex) {
      o.require(false, std::string("exception: ") + ex.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.runtime_limit > 0) {
      o.require(secs < c.runtime_limit, "runtime " + fmt(secs) + " s < " + fmt(c.runtime_limit) + " s");
    }
    for (const auto& d : o.details) std::printf("   %s\n", d.c_str());
    char line[160];
    std::snprintf(line, sizeof line, "AC%-2d %s  %s (%.1f s)", c.id, o.pass ? "PASS" : "FAIL", c.title.c_str(), secs);
    std::printf("%s\n", line);
    std::fflush(stdout);
    summary.push_back(line);
    if (!o.pass) ++failures;
  }
  std::printf("\n== summary\n");
  for (const auto& s : summary) std::printf("%s\n", s.c_str());
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
