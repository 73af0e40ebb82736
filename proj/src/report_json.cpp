#include "monolab/report_json.hpp"

#include "monolab/config.hpp"
#include "monolab/errors.hpp"

#include <cmath>
#include <type_traits>

namespace monolab {

namespace {

// NaN and infinities have no JSON literal; they become null.
Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json verdict_counts(const std::map<Verdict, long>& counts) {
  Json j = Json::object();
  for (Verdict v : {Verdict::StableCycle, Verdict::UnstableCycle, Verdict::Unresolved, Verdict::Escaped}) {
    const auto it = counts.find(v);
    j[std::string(to_string(v))] = it == counts.end() ? 0L : it->second;
  }
  return j;
}

Json int_histogram(const std::map<int, long>& h) {
  Json j = Json::object();
  for (const auto& [k, n] : h) j[std::to_string(k)] = n;
  return j;
}

Json point_list(const std::vector<StateVector>& points) {
  Json j = Json::array();
  for (const auto& p : points) j.push_back(to_json(p));
  return j;
}

Json directional(const DirectionalProbe& d) {
  Json j;
  j["eps"] = d.eps;
  Json verdicts = Json::array();
  for (Verdict v : d.verdicts) verdicts.push_back(std::string(to_string(v)));
  j["verdicts"] = verdicts;
  Json limits = Json::array();
  for (const auto& l : d.limits) limits.push_back(point_list(l));
  j["limits"] = limits;
  j["stabilized"] = point_list(d.stabilized);
  j["consistent"] = d.consistent;
  j["conclusive"] = d.conclusive;
  j["direction"] = d.direction ? to_json(*d.direction) : Json(nullptr);
  return j;
}

}  // namespace

Json to_json(const StateVector& x) {
  Json j = Json::array();
  for (int i = 0; i < x.size(); ++i) j.push_back(number(x[i]));
  return j;
}

Json to_json(const PropertyReport& r) {
  Json j;
  j["check_name"] = r.check_name;
  j["pairs_tested"] = r.pairs_tested;
  j["violations"] = r.violations;
  j["worst_margin"] = number(r.worst_margin);
  j["seed"] = r.seed;
  j["passed"] = r.passed();
  j["notes"] = r.notes;
  return j;
}

Json to_json(const ClassifyBudget& b) {
  Json j;
  j["transient"] = b.transient;
  j["p_max"] = b.p_max;
  j["max_iterations"] = b.max_iterations;
  j["check_interval"] = b.check_interval;
  j["tol_cyc"] = b.tol_cyc;
  j["tol_stab"] = b.tol_stab;
  j["tol_set"] = b.tol_set;
  j["newton_tol"] = b.newton_tol;
  j["newton_max_iter"] = b.newton_max_iter;
  return j;
}

ClassifyBudget budget_from_json(const Json& j) {
  ClassifyBudget b;
  b.transient = j.at("transient").get<long>();
  b.p_max = j.at("p_max").get<int>();
  b.max_iterations = j.at("max_iterations").get<long>();
  b.check_interval = j.at("check_interval").get<long>();
  b.tol_cyc = j.at("tol_cyc").get<double>();
  b.tol_stab = j.at("tol_stab").get<double>();
  b.tol_set = j.at("tol_set").get<double>();
  b.newton_tol = j.at("newton_tol").get<double>();
  b.newton_max_iter = j.at("newton_max_iter").get<int>();
  return b;
}

Json to_json(const SamplerSpec& s) {
  Json j;
  j["strategy"] = std::string(to_string(s.strategy));
  j["modes"] = s.modes;
  j["amplitude"] = s.amplitude;
  j["base"] = s.base;
  j["direction"] = s.direction;
  j["s_min"] = s.s_min;
  j["s_max"] = s.s_max;
  j["resolution"] = s.resolution;
  j["seed"] = s.seed;
  return j;
}

SamplerSpec sampler_from_json(const Json& j) {
  SamplerSpec s;
  s.strategy = sampling_strategy_from_string(j.at("strategy").get<std::string>());
  s.modes = j.at("modes").get<int>();
  s.amplitude = j.at("amplitude").get<double>();
  s.base = j.at("base").get<std::vector<double>>();
  s.direction = j.at("direction").get<std::vector<double>>();
  s.s_min = j.at("s_min").get<double>();
  s.s_max = j.at("s_max").get<double>();
  s.resolution = j.at("resolution").get<int>();
  s.seed = j.at("seed").get<std::uint64_t>();
  return s;
}

Json to_json(const CycleRecord& c) {
  Json j;
  j["period"] = c.period;
  j["rho"] = number(c.rho);
  j["stability"] = std::string(to_string(c.stability));
  j["residual"] = number(c.residual);
  j["spectral_method"] = c.spectral_method;
  j["refined"] = c.refined;
  j["points"] = point_list(c.points);
  return j;
}

Json to_json(const Classification& c) {
  Json j;
  j["verdict"] = std::string(to_string(c.verdict));
  j["iterations_used"] = c.iterations_used;
  j["cycle"] = c.cycle ? to_json(*c.cycle) : Json(nullptr);
  j["diagnostics"] = c.diagnostics;
  return j;
}

Json to_json(const ProbeReport& r) {
  Json j;
  j["x"] = to_json(r.x);
  j["base"] = to_json(r.base);
  j["omega_x"] = point_list(r.omega_x);
  j["upper"] = directional(r.upper);
  j["lower"] = directional(r.lower);
  j["in_upper_unstable"] = r.in_upper_unstable;
  j["in_lower_unstable"] = r.in_lower_unstable;
  j["conclusive"] = r.conclusive;
  j["tol_set"] = r.tol_set;
  Json extra = Json::array();
  for (const auto& d : r.extra_upper) extra.push_back(directional(d));
  j["extra_upper"] = extra;
  j["directions_agree"] = r.directions_agree;
  return j;
}

Json to_json(const SeparationReport& r) {
  Json j;
  j["delta_est"] = number(r.delta_est);
  j["horizon"] = r.horizon;
  Json probes = Json::array();
  for (const auto& p : r.probes) {
    Json q;
    q["scale"] = p.scale;
    q["sign"] = p.sign;
    q["tail_max"] = number(p.tail_max);
    q["escaped"] = p.escaped;
    probes.push_back(q);
  }
  j["probes"] = probes;
  return j;
}

Json to_json(const SymmetryVerdict& v) {
  Json j;
  j["deviation"] = number(v.deviation);
  j["symmetric"] = v.symmetric;
  j["per_generator"] = Json::array();
  for (double d : v.per_generator) j["per_generator"].push_back(number(d));
  return j;
}

Json to_json(const SymmetryReport& r) {
  Json j;
  j["format"] = "monolab.symmetry";
  j["schema_version"] = 1;
  j["samples"] = r.samples;
  j["counts"] = verdict_counts(r.counts);
  j["symmetric_limits"] = r.symmetric_limits;
  j["symmetric_fraction"] = r.symmetric_fraction;
  j["max_deviation"] = number(r.max_deviation);
  j["tol_sym"] = r.tol_sym;
  j["period_histogram"] = int_histogram(r.period_histogram);
  j["deviations"] = Json::array();
  for (double d : r.deviations) j["deviations"].push_back(number(d));
  return j;
}

Json to_json(const LineReport& r) {
  Json j;
  j["format"] = "monolab.line";
  j["schema_version"] = 1;
  j["s_values"] = r.s_values;
  Json verdicts = Json::array();
  for (Verdict v : r.verdicts) verdicts.push_back(std::string(to_string(v)));
  j["verdicts"] = verdicts;
  j["bad_s"] = r.bad_s;
  j["bad_count"] = r.bad_s.size();
  j["bad_fraction"] = r.bad_fraction;
  j["counts"] = verdict_counts(r.counts);
  return j;
}

Json to_json(const std::vector<LineRefinementLevel>& levels) {
  Json j = Json::array();
  for (const auto& l : levels) {
    Json q;
    q["a"] = l.a;
    q["b"] = l.b;
    q["spacing"] = l.spacing;
    q["resolution"] = l.resolution;
    q["bad_s"] = l.bad_s;
    q["consistent"] = l.consistent;
    j.push_back(q);
  }
  return j;
}

Json to_json(const PrevalenceReport& r) {
  Json j;
  j["format"] = "monolab.prevalence";
  j["schema_version"] = r.schema_version;
  j["system"] = r.system_name;
  j["sampler"] = to_json(r.sampler);
  j["budget"] = to_json(r.budget);
  j["sample_count"] = r.sample_count;
  j["counts"] = verdict_counts(r.counts);
  j["fractions_defined"] = r.fractions_defined;
  j["stable_fraction"] = r.fractions_defined ? Json(r.stable_fraction) : Json(nullptr);
  j["unresolved_fraction"] = r.fractions_defined ? Json(r.unresolved_fraction) : Json(nullptr);
  j["stable_wilson_95"] =
      r.fractions_defined ? Json::array({r.stable_interval.low, r.stable_interval.high}) : Json(nullptr);
  j["period_histogram"] = int_histogram(r.period_histogram);
  Json rho;
  rho["bin_width"] = kRhoBinWidth;
  rho["counts"] = r.rho_histogram;
  j["rho_histogram"] = rho;
  j["caveat"] = r.caveat;
  j["wall_time_seconds"] = r.wall_time_seconds;
  return j;
}

PrevalenceReport prevalence_from_json(const Json& j) {
  if (j.value("format", "") != "monolab.prevalence") throw ConfigError("not a prevalence report");
  PrevalenceReport r;
  r.schema_version = j.at("schema_version").get<int>();
  if (r.schema_version != kPrevalenceSchemaVersion) {
    throw ConfigError("unsupported prevalence schema version " + std::to_string(r.schema_version));
  }
  r.system_name = j.at("system").get<std::string>();
  r.sampler = sampler_from_json(j.at("sampler"));
  r.budget = budget_from_json(j.at("budget"));
  r.sample_count = j.at("sample_count").get<long>();
  for (const auto& [name, n] : j.at("counts").items()) r.counts[verdict_from_string(name)] = n.get<long>();
  r.fractions_defined = j.at("fractions_defined").get<bool>();
  if (r.fractions_defined) {
    r.stable_fraction = j.at("stable_fraction").get<double>();
    r.unresolved_fraction = j.at("unresolved_fraction").get<double>();
    r.stable_interval = {j.at("stable_wilson_95").at(0).get<double>(), j.at("stable_wilson_95").at(1).get<double>()};
  }
  for (const auto& [k, n] : j.at("period_histogram").items()) r.period_histogram[std::stoi(k)] = n.get<long>();
  r.rho_histogram = j.at("rho_histogram").at("counts").get<std::vector<long>>();
  r.caveat = j.at("caveat").get<std::string>();
  r.wall_time_seconds = j.at("wall_time_seconds").get<double>();
  return r;
}

Json describe(const SystemSpec& system) {
  Json j;
  j["name"] = system.name();
  j["kappa"] = system.kappa();
  j["monotone_expected"] = system.monotone_expected();
  j["dimension"] = system.dimension();
  j["grid"] = std::string(to_string(system.grid().kind));
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, AnalyticScalarSystem>) {
          j["kind"] = "analytic";
          j["map"] = std::string(to_string(k.map));
          j["parameter"] = k.parameter;
        } else if constexpr (std::is_same_v<T, LinearCooperativeSystem>) {
          j["kind"] = "linear";
          Json rows = Json::array();
          for (int i = 0; i < k.matrix.rows(); ++i) {
            Json row = Json::array();
            for (int c = 0; c < k.matrix.cols(); ++c) row.push_back(k.matrix(i, c));
            rows.push_back(row);
          }
          j["matrix"] = rows;
        } else {
          j["kind"] = "parabolic";
          j["nonlinearity"] = std::string(to_string(k.reaction.kind));
          j["lambda"] = k.reaction.lambda;
          j["modulation"] = k.reaction.modulation;
          j["profile_amplitude"] = k.reaction.profile_amplitude;
          j["gradient_coeff"] = k.reaction.gradient_coeff;
          j["period"] = k.period;
          j["phase"] = k.phase;
          j["diffusivity"] = k.diffusivity;
          j["steps_per_period"] = k.scheme.steps_per_period;
          j["theta"] = k.scheme.theta;
          if (k.grid.kind == DomainKind::Radial) j["radial_dim"] = k.grid.radial_dim;
        }
      },
      system.kind());
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string prevalence_csv(const PrevalenceReport& r) {
  std::string out = "category,count,fraction\n";
  const double n = static_cast<double>(r.sample_count);
  auto frac = [&](double v) { return r.sample_count > 0 ? format_double(v) : std::string(); };
  for (Verdict v : {Verdict::StableCycle, Verdict::UnstableCycle, Verdict::Unresolved, Verdict::Escaped}) {
    out += std::string(to_string(v)) + "," + std::to_string(r.count(v)) + "," + frac(r.count(v) / n) + "\n";
  }
  out += "total," + std::to_string(r.sample_count) + "," + frac(1.0) + "\n";
  out += "wilson_low,," + (r.fractions_defined ? format_double(r.stable_interval.low) : std::string()) + "\n";
  out += "wilson_high,," + (r.fractions_defined ? format_double(r.stable_interval.high) : std::string()) + "\n";
  return out;
}

std::string orbit_csv(const OrbitRecord& orbit, int dimension) {
  std::string out = "iter";
  for (int i = 0; i < dimension; ++i) out += ",node_" + std::to_string(i);
  out += '\n';
  for (std::size_t k = 0; k < orbit.samples.size(); ++k) {
    out += std::to_string(orbit.indices[k]);
    const StateVector& x = orbit.samples[k];
    for (int i = 0; i < x.size(); ++i) out += "," + format_double(x[i]);
    out += '\n';
  }
  return out;
}

std::string orbit_sup_norm_dat(const OrbitRecord& orbit) {
  std::string out = "# iter sup_norm\n";
  for (std::size_t k = 0; k < orbit.samples.size(); ++k) {
    out += std::to_string(orbit.indices[k]) + " " + format_double(orbit.samples[k].sup_norm()) + "\n";
  }
  return out;
}

}  // namespace monolab
