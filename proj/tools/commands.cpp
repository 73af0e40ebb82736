#include "commands.hpp"

#include "monolab/asymptotics.hpp"
#include "monolab/config.hpp"
#include "monolab/errors.hpp"
#include "monolab/order.hpp"
#include "monolab/prevalence.hpp"
#include "monolab/report_json.hpp"
#include "monolab/symmetry.hpp"
#include "monolab/systems.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace monolab::cli {

namespace {

namespace fs = std::filesystem;

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw ConfigError("cannot write '" + path + "'");
}

std::vector<double> parse_number_list(const std::string& text, const std::string& what) {
  std::string t = text;
  for (char& c : t) {
    if (c == ',' || c == ';' || c == '\n' || c == '\t') c = ' ';
  }
  std::istringstream in(t);
  std::vector<double> out;
  std::string token;
  while (in >> token) {
    try {
      out.push_back(parse_double(token));
    } catch (const ConfigError&) {
      throw ConfigError(what + ": not a number '" + token + "'");
    }
  }
  return out;
}

/// A state given as `const:v`, the path of a file with n numbers, or an
/// inline comma list; a single number is broadcast to every node.
StateVector parse_state(const std::string& spec, const GridDescriptor& grid, const std::string& what) {
  std::vector<double> values;
  if (spec.rfind("const:", 0) == 0) {
    values = {parse_double(spec.substr(6))};
  } else if (fs::is_regular_file(spec)) {
    std::ifstream in(spec);
    std::ostringstream buf;
    buf << in.rdbuf();
    values = parse_number_list(buf.str(), what);
    if (static_cast<int>(values.size()) != grid.n) {
      throw ConfigError(what + " file '" + spec + "' holds " + std::to_string(values.size()) +
                        " values, the grid has " + std::to_string(grid.n) + " nodes");
    }
  } else {
    values = parse_number_list(spec, what);
  }
  if (values.empty()) throw ConfigError(what + " is empty");
  if (values.size() == 1) return StateVector::constant(grid, values.front());
  if (static_cast<int>(values.size()) != grid.n) {
    throw ConfigError(what + " has " + std::to_string(values.size()) + " values, the grid has " +
                      std::to_string(grid.n) + " nodes");
  }
  return StateVector(Eigen::Map<const Eigen::VectorXd>(values.data(), grid.n), grid);
}

struct Loaded {
  ExperimentConfig config;
  SystemSpec system;
};

Loaded load(const std::string& path) {
  ExperimentConfig config = ExperimentConfig::load(path);
  SystemSpec system = build_system(config);
  return {std::move(config), std::move(system)};
}

StateVector initial_state(const Loaded& l, const std::string& x0) {
  if (!x0.empty()) return parse_state(x0, l.system.grid(), "--x0");
  const SamplerSpec sampler = build_sampler(l.config);
  sampler.validate(l.system);
  return sample_initial(sampler, 0, l.system.grid());
}

Json header(const std::string& format, const SystemSpec& system) {
  Json j;
  j["format"] = format;
  j["schema_version"] = 1;
  j["system"] = describe(system);
  return j;
}

// validate ------------------------------------------------------------------

struct ValidateArgs {
  std::string config;
  std::string out;
  bool report_only = false;
  int pairs = 200;
  int probes = 40;
  int dissipativity_probes = 200;
  int trap_samples = 50;
  int horizon = 200;
  int equivariance_samples = 20;
  std::uint64_t seed = 1;
};

int cmd_validate(const ValidateArgs& a) {
  const Loaded l = load(a.config);
  const GroupActionSpec action = build_action(l.config, l.system);
  std::vector<PropertyReport> checks;
  // A check that blows up (escape, non-finite state) counts as failed.
  auto run_check = [&](const std::string& name, auto&& check) {
    try {
      checks.push_back(check());
    } catch (const Error& e) {
      PropertyReport failed{.check_name = name, .violations = 1};
      failed.notes.push_back(e.what());
      checks.push_back(failed);
    }
  };
  run_check("monotone", [&] { return check_monotone(l.system, a.pairs, a.seed); });
  run_check("strong_monotone", [&] { return check_strong_monotone(l.system, a.pairs, a.seed + 1); });
  run_check("strong_positivity", [&] { return check_strong_positivity(l.system, a.probes, a.seed + 2); });
  if (std::holds_alternative<LinearCooperativeSystem>(l.system.kind())) {
    PropertyReport skipped{.check_name = "dissipativity", .seed = a.seed + 3};
    skipped.notes.push_back("not applicable to linear maps");
    checks.push_back(skipped);
  } else {
    run_check("dissipativity", [&] { return validate_dissipativity(l.system, a.dissipativity_probes, a.seed + 3); });
  }
  run_check("trapping", [&] { return trapping_check(l.system, a.trap_samples, a.horizon, a.seed + 4); });
  run_check("equivariance", [&] {
    return check_equivariance(l.system, action, a.equivariance_samples, a.seed + 5, equivariance_tolerance(l.config));
  });

  bool pass = true;
  Json j = header("monolab.validate", l.system);
  j["action"] = std::string(to_string(action.kind()));
  j["checks"] = Json::array();
  for (const auto& c : checks) {
    pass = pass && c.passed();
    j["checks"].push_back(to_json(c));
  }
  j["overall"] = pass ? "PASS" : "FAIL";
  write_text(a.out, dump(j));
  if (!pass) {
    std::cerr << "monolab validate: " << l.system.name() << ": FAIL";
    for (const auto& c : checks) {
      if (!c.passed()) std::cerr << " " << c.check_name << "(" << c.violations << ")";
    }
    std::cerr << "\n";
  }
  return pass || a.report_only ? kOk : kNumericalError;
}

// simulate ------------------------------------------------------------------

struct SimulateArgs {
  std::string config;
  std::string x0;
  long iters = 100;
  long thin = 1;
  std::string out;
  std::string dat;
};

int cmd_simulate(const SimulateArgs& a) {
  const Loaded l = load(a.config);
  const StateVector x0 = initial_state(l, a.x0);
  if (a.iters < 0) throw ConfigError("--iters must be >= 0");
  if (a.thin < 1) throw ConfigError("--thin must be >= 1");
  const OrbitRecord orbit = iterate_orbit(l.system, x0, a.iters, a.thin);
  write_text(a.out, orbit_csv(orbit, l.system.dimension()));
  std::string dat = a.dat;
  if (dat.empty() && !a.out.empty() && a.out != "-") dat = fs::path(a.out).replace_extension(".dat").string();
  if (!dat.empty()) write_text(dat, orbit_sup_norm_dat(orbit));
  if (orbit.escaped) {
    std::cerr << "monolab simulate: orbit escaped at iteration " << orbit.escape_iteration << "\n";
    return kNumericalError;
  }
  return kOk;
}

// classify ------------------------------------------------------------------

struct ClassifyArgs {
  std::string config;
  std::string x0;
  std::string json;
};

int cmd_classify(const ClassifyArgs& a) {
  const Loaded l = load(a.config);
  const ClassifyBudget budget = build_budget(l.config, l.system);
  const StateVector x0 = initial_state(l, a.x0);
  const GroupActionSpec action = build_action(l.config, l.system);
  const Classification c = classify_orbit(l.system, x0, budget);

  Json j = header("monolab.classification", l.system);
  j["budget"] = to_json(budget);
  j["x0"] = to_json(x0);
  j["classification"] = to_json(c);
  Json sym = Json::array();
  for (const auto& p : limit_points(c)) sym.push_back(to_json(symmetry_deviation(p, action, symmetry_tolerance(l.config))));
  j["symmetry"] = sym;
  write_text(a.json, dump(j));
  return kOk;
}

// prevalence ----------------------------------------------------------------

struct EnsembleArgs {
  std::string config;
  long samples = -1;
  long long seed = -1;
  int threads = 0;
  std::string out;
  std::string csv;
};

SamplerSpec ensemble_sampler(const Loaded& l, const EnsembleArgs& a) {
  SamplerSpec sampler = build_sampler(l.config);
  if (a.seed >= 0) sampler.seed = static_cast<std::uint64_t>(a.seed);
  return sampler;
}

long ensemble_count(const Loaded& l, const EnsembleArgs& a) {
  const long n = a.samples >= 0 ? a.samples : l.config.get_long("sampling", "count");
  if (n < 0) throw ConfigError("sample count must be >= 0");
  return n;
}

int cmd_prevalence(const EnsembleArgs& a) {
  const Loaded l = load(a.config);
  const ClassifyBudget budget = build_budget(l.config, l.system);
  const SamplerSpec sampler = ensemble_sampler(l, a);
  const PrevalenceReport report =
      estimate_prevalence(l.system, sampler, ensemble_count(l, a), budget, {resolve_threads(a.threads)});
  write_text(a.out, dump(to_json(report)));
  if (!a.csv.empty()) write_text(a.csv, prevalence_csv(report));
  return kOk;
}

// probe-line ----------------------------------------------------------------

struct LineArgs {
  std::string config;
  std::string base;
  std::string direction;
  std::string range;
  int resolution = -1;
  int refine = 0;
  int threads = 0;
  std::string out;
};

int cmd_probe_line(const LineArgs& a) {
  const Loaded l = load(a.config);
  const ClassifyBudget budget = build_budget(l.config, l.system);
  SamplerSpec scan = build_sampler(l.config);
  scan.strategy = SamplingStrategy::LineScan;
  if (!a.base.empty()) scan.base = parse_number_list(a.base, "--base");
  if (!a.direction.empty()) scan.direction = parse_number_list(a.direction, "--direction");
  if (!a.range.empty()) {
    const auto colon = a.range.find(':');
    if (colon == std::string::npos) throw ConfigError("--range expects a:b");
    scan.s_min = parse_double(a.range.substr(0, colon));
    scan.s_max = parse_double(a.range.substr(colon + 1));
  }
  if (a.resolution >= 0) scan.resolution = a.resolution;
  const ParallelOptions parallel{resolve_threads(a.threads)};

  Json j = header("monolab.line", l.system);
  j["sampler"] = to_json(scan);
  j["line"] = to_json(line_probe(l.system, scan, budget, parallel));
  if (a.refine > 0) j["refinement"] = to_json(refine_line_probe(l.system, scan, budget, a.refine, parallel));
  write_text(a.out, dump(j));
  return kOk;
}

// probe-omega ---------------------------------------------------------------

struct OmegaArgs {
  std::string config;
  std::string x0;
  std::string direction;
  std::string eps = "1e-2,1e-3,1e-4";
  std::vector<std::string> extra;
  std::string separation;
  std::string out;
};

int cmd_probe_omega(const OmegaArgs& a) {
  const Loaded l = load(a.config);
  const ClassifyBudget budget = build_budget(l.config, l.system);
  const StateVector x = initial_state(l, a.x0);
  const StateVector v = a.direction.empty() ? StateVector::constant(l.system.grid(), 1.0)
                                            : parse_state(a.direction, l.system.grid(), "--direction");
  std::vector<StateVector> extra;
  for (const auto& e : a.extra) extra.push_back(parse_state(e, l.system.grid(), "--extra-direction"));
  const ProbeReport report = omega_plus_probe(l.system, x, v, parse_number_list(a.eps, "--eps"), budget, extra);

  Json j = header("monolab.omega_probe", l.system);
  j["budget"] = to_json(budget);
  j["probe"] = to_json(report);
  if (!a.separation.empty()) {
    j["separation"] =
        to_json(separation_probe(l.system, x, parse_number_list(a.separation, "--separation"), budget, v));
  }
  write_text(a.out, dump(j));
  return kOk;
}

// symmetry ------------------------------------------------------------------

struct SymmetryArgs : EnsembleArgs {
  int equivariance_samples = 20;
};

int cmd_symmetry(const SymmetryArgs& a) {
  const Loaded l = load(a.config);
  const ClassifyBudget budget = build_budget(l.config, l.system);
  const GroupActionSpec action = build_action(l.config, l.system);
  const SamplerSpec sampler = ensemble_sampler(l, a);
  const PropertyReport eq =
      check_equivariance(l.system, action, a.equivariance_samples, sampler.seed, equivariance_tolerance(l.config));
  Json j = header("monolab.symmetry", l.system);
  j["action"] = {{"kind", std::string(to_string(action.kind()))}, {"order", action.order()}};
  j["equivariance"] = to_json(eq);
  if (!eq.passed()) {
    write_text(a.out, dump(j));
    std::cerr << "monolab symmetry: system is not equivariant under " << to_string(action.kind())
              << " (worst |F(gu) - gF(u)| = " << eq.worst_margin << "); refusing to run\n";
    return kNumericalError;
  }
  const SymmetryReport report = symmetry_experiment(l.system, action, sampler, ensemble_count(l, a), budget,
                                                    symmetry_tolerance(l.config), {resolve_threads(a.threads)});
  j["report"] = to_json(report);
  write_text(a.out, dump(j));
  return kOk;
}

}  // namespace

int resolve_threads(int requested) {
  if (const char* env = std::getenv("MONOTONE_LAB_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 0) throw ConfigError("MONOTONE_LAB_THREADS must be a non-negative integer");
    return static_cast<int>(v);
  }
  if (requested < 0) throw ConfigError("--threads must be >= 0");
  return requested;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  for (const auto& s : args) argv.push_back(s.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

int run(int argc, const char* const* argv) {
  CLI::App app{"monolab: experiments on monotone discrete-time systems and periodic parabolic Poincare maps"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "monolab 1.0");

  ValidateArgs va;
  auto* validate = app.add_subcommand("validate", "run the standing-assumption checks on a system");
  validate->add_option("config", va.config, "config file")->required();
  validate->add_option("--out", va.out, "report path (default stdout)");
  validate->add_flag("--report-only", va.report_only, "exit 0 even when checks fail");
  validate->add_option("--pairs", va.pairs, "ordered pairs per monotonicity check")->capture_default_str();
  validate->add_option("--probes", va.probes, "strong positivity probes")->capture_default_str();
  validate->add_option("--dissipativity-probes", va.dissipativity_probes)->capture_default_str();
  validate->add_option("--trap-samples", va.trap_samples)->capture_default_str();
  validate->add_option("--horizon", va.horizon, "trapping horizon in periods")->capture_default_str();
  validate->add_option("--equivariance-samples", va.equivariance_samples)->capture_default_str();
  validate->add_option("--seed", va.seed)->capture_default_str();

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "iterate the map and write the orbit");
  simulate->add_option("config", sa.config)->required();
  simulate->add_option("--x0", sa.x0, "initial state: const:v, file, or comma list");
  simulate->add_option("--iters", sa.iters)->capture_default_str();
  simulate->add_option("--thin", sa.thin, "record every k-th iterate")->capture_default_str();
  simulate->add_option("--out", sa.out, "orbit CSV path (default stdout)");
  simulate->add_option("--dat", sa.dat, "sup-norm data path (default: --out with .dat)");

  ClassifyArgs ca;
  auto* classify = app.add_subcommand("classify", "classify the orbit of one initial state");
  classify->add_option("config", ca.config)->required();
  classify->add_option("--x0", ca.x0);
  classify->add_option("--json", ca.json, "report path (default stdout)");

  EnsembleArgs pa;
  auto* prevalence = app.add_subcommand("prevalence", "Monte Carlo prevalence estimate");
  prevalence->add_option("config", pa.config)->required();
  prevalence->add_option("--samples", pa.samples, "sample count (default [sampling] count)");
  prevalence->add_option("--seed", pa.seed);
  prevalence->add_option("--threads", pa.threads, "workers, 0 = all cores")->capture_default_str();
  prevalence->add_option("--out", pa.out, "JSON report path (default stdout)");
  prevalence->add_option("--csv", pa.csv, "CSV summary path");

  LineArgs la;
  auto* line = app.add_subcommand("probe-line", "classify states along a line base + s*v");
  line->add_option("config", la.config)->required();
  line->add_option("--base", la.base, "comma list, one value broadcasts");
  line->add_option("--direction", la.direction, "comma list, must be >> 0");
  line->add_option("--range", la.range, "a:b");
  line->add_option("--resolution", la.resolution);
  line->add_option("--refine", la.refine, "refinement levels around bad points")->capture_default_str();
  line->add_option("--threads", la.threads)->capture_default_str();
  line->add_option("--out", la.out);

  OmegaArgs oa;
  auto* omega = app.add_subcommand("probe-omega", "estimate upper/lower limit sets near x0");
  omega->add_option("config", oa.config)->required();
  omega->add_option("--x0", oa.x0);
  omega->add_option("--direction", oa.direction, "v >> 0 (default all ones)");
  omega->add_option("--eps", oa.eps, "comma list of offsets")->capture_default_str();
  omega->add_option("--extra-direction", oa.extra, "further directions to compare (repeatable)");
  omega->add_option("--separation", oa.separation, "also run the separation probe at these scales");
  omega->add_option("--out", oa.out);

  SymmetryArgs ya;
  auto* symmetry = app.add_subcommand("symmetry", "symmetry of limits over an ensemble");
  symmetry->add_option("config", ya.config)->required();
  symmetry->add_option("--samples", ya.samples);
  symmetry->add_option("--seed", ya.seed);
  symmetry->add_option("--threads", ya.threads)->capture_default_str();
  symmetry->add_option("--equivariance-samples", ya.equivariance_samples)->capture_default_str();
  symmetry->add_option("--out", ya.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (*validate) return cmd_validate(va);
    if (*simulate) return cmd_simulate(sa);
    if (*classify) return cmd_classify(ca);
    if (*prevalence) return cmd_prevalence(pa);
    if (*line) return cmd_probe_line(la);
    if (*omega) return cmd_probe_omega(oa);
    if (*symmetry) return cmd_symmetry(ya);
  } catch (const ConfigError& e) {
    std::cerr << "monolab " << name << ": config error: " << e.what() << "\n";
    return kUsageError;
  } catch (const ParameterError& e) {
    std::cerr << "monolab " << name << ": invalid parameter: " << e.what() << "\n";
    return kUsageError;
  } catch (const GridError& e) {
    std::cerr << "monolab " << name << ": invalid grid: " << e.what() << "\n";
    return kUsageError;
  } catch (const DimensionError& e) {
    std::cerr << "monolab " << name << ": dimension mismatch: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "monolab " << name << ": " << e.what() << "\n";
    return kNumericalError;
  }
  return kUsageError;
}

}  // namespace monolab::cli
