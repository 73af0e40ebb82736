#include "monolab/config.hpp"

#include "monolab/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <type_traits>
#include <utility>

namespace monolab {

namespace {

using KeyList = std::vector<std::pair<std::string, std::string>>;

// Canonical section and key order with defaults; serialize() follows it.
const std::vector<std::pair<std::string, KeyList>>& schema() {
  static const std::vector<std::pair<std::string, KeyList>> s = {
      {"system",
       {{"kind", "parabolic"},
        {"name", ""},
        {"map", "cubic"},
        {"map_parameter", "0.1"},
        {"matrix", "0.5 0.2; 0.2 0.5"},
        {"kappa", "1.5"},
        {"monotone_expected", "auto"},
        {"nonlinearity", "cubic"},
        {"lambda", "15"},
        {"modulation", "0.3"},
        {"profile_amplitude", "0"},
        {"gradient_coeff", "0"},
        {"table_u", ""},
        {"table_f", ""},
        {"period", "1"},
        {"phase", "0"},
        {"diffusivity", "1"}}},
      {"grid", {{"domain", "dirichlet"}, {"n", "32"}, {"radial_dim", "3"}}},
      {"time", {{"steps_per_period", "200"}, {"theta", "0.5"}, {"newton_tol", "1e-10"}, {"newton_max_iter", "20"}}},
      {"classify",
       {{"transient", "500"},
        {"p_max", "64"},
        {"max_iterations", "5000"},
        {"check_interval", "50"},
        {"tol_cyc", "auto"},
        {"tol_stab", "1e-06"},
        {"tol_set", "0.0001"},
        {"newton_tol", "auto"},
        {"newton_max_iter", "20"}}},
      {"sampling",
       {{"strategy", "smooth"},
        {"modes", "5"},
        {"amplitude", "1"},
        {"seed", "1"},
        {"count", "100"},
        {"base", ""},
        {"direction", ""},
        {"s_min", "0"},
        {"s_max", "1"},
        {"resolution", "101"}}},
      {"symmetry", {{"action", "trivial"}, {"order", "0"}, {"tol_sym", "1e-05"}, {"tol_equivariance", "1e-10"}}},
  };
  return s;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

bool known_key(const std::string& section, const std::string& key) {
  for (const auto& [name, keys] : schema()) {
    if (name != section) continue;
    return std::any_of(keys.begin(), keys.end(), [&](const auto& kv) { return kv.first == key; });
  }
  return false;
}

bool known_section(const std::string& section) {
  return std::any_of(schema().begin(), schema().end(), [&](const auto& s) { return s.first == section; });
}

[[noreturn]] void bad_value(const std::string& section, const std::string& key, const std::string& value,
                            const char* expected) {
  throw ConfigError("[" + section + "] " + key + " = '" + value + "': expected " + expected);
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  const std::string t = trim(text);
  double value = 0.0;
  const char* begin = t.data();
  if (!t.empty() && t.front() == '+') ++begin;
  const auto res = std::from_chars(begin, t.data() + t.size(), value);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw ConfigError("not a number: '" + t + "'");
  }
  return value;
}

ExperimentConfig ExperimentConfig::defaults() {
  ExperimentConfig c;
  for (const auto& [section, keys] : schema()) {
    for (const auto& [key, value] : keys) c.table_[section][key] = value;
  }
  return c;
}

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
  ExperimentConfig c = defaults();
  std::map<std::string, std::map<std::string, bool>> seen;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "malformed section header '" + line + "'");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!known_section(section)) throw ConfigError(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value', got '" + line + "'");
    if (section.empty()) throw ConfigError(where + "key outside of any section");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    if (!known_key(section, key)) throw ConfigError(where + "unknown key '" + key + "' in [" + section + "]");
    if (seen[section][key]) throw ConfigError(where + "duplicate key '" + key + "' in [" + section + "]");
    seen[section][key] = true;
    c.table_[section][key] = trim(std::string_view(line).substr(eq + 1));
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string ExperimentConfig::serialize() const {
  std::string out;
  for (const auto& [section, keys] : schema()) {
    if (!out.empty()) out += '\n';
    out += "[" + section + "]\n";
    for (const auto& kv : keys) out += kv.first + " = " + table_.at(section).at(kv.first) + "\n";
  }
  return out;
}

const std::string& ExperimentConfig::get(const std::string& section, const std::string& key) const {
  const auto s = table_.find(section);
  if (s != table_.end()) {
    const auto k = s->second.find(key);
    if (k != s->second.end()) return k->second;
  }
  throw ConfigError("unknown config key [" + section + "] " + key);
}

double ExperimentConfig::get_double(const std::string& section, const std::string& key) const {
  const std::string& v = get(section, key);
  try {
    return parse_double(v);
  } catch (const ConfigError&) {
    bad_value(section, key, v, "a number");
  }
}

long ExperimentConfig::get_long(const std::string& section, const std::string& key) const {
  const std::string& v = get(section, key);
  long value = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), value);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size()) bad_value(section, key, v, "an integer");
  return value;
}

bool ExperimentConfig::get_bool(const std::string& section, const std::string& key) const {
  const std::string& v = get(section, key);
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  bad_value(section, key, v, "true or false");
}

std::vector<double> ExperimentConfig::get_list(const std::string& section, const std::string& key) const {
  std::string v = get(section, key);
  std::replace(v.begin(), v.end(), ',', ' ');
  std::istringstream in(v);
  std::vector<double> out;
  std::string token;
  while (in >> token) {
    try {
      out.push_back(parse_double(token));
    } catch (const ConfigError&) {
      bad_value(section, key, get(section, key), "a list of numbers");
    }
  }
  return out;
}

void ExperimentConfig::set(const std::string& section, const std::string& key, std::string value) {
  if (!known_key(section, key)) throw ConfigError("unknown config key [" + section + "] " + key);
  table_[section][key] = trim(value);
}

namespace {

Eigen::MatrixXd parse_matrix(const ExperimentConfig& c) {
  const std::string text = c.get("system", "matrix");
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string row;
  while (std::getline(in, row, ';')) {
    std::replace(row.begin(), row.end(), ',', ' ');
    std::istringstream rs(row);
    std::vector<double> r;
    std::string tok;
    while (rs >> tok) r.push_back(parse_double(tok));
    if (!r.empty()) rows.push_back(std::move(r));
  }
  if (rows.empty()) throw ConfigError("[system] matrix is empty");
  const int n = static_cast<int>(rows.size());
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != n) throw ConfigError("[system] matrix must be square");
    for (int j = 0; j < n; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

GridDescriptor build_grid(const ExperimentConfig& c) {
  const std::string domain = c.get("grid", "domain");
  const int n = static_cast<int>(c.get_long("grid", "n"));
  if (domain == "dirichlet") return GridDescriptor::dirichlet(n);
  if (domain == "neumann") return GridDescriptor::neumann(n);
  if (domain == "ring") return GridDescriptor::ring(n);
  if (domain == "radial") return GridDescriptor::radial(n, static_cast<int>(c.get_long("grid", "radial_dim")));
  bad_value("grid", "domain", domain, "dirichlet, neumann, ring or radial");
}

std::string default_name(const ExperimentConfig& c, const std::string& kind) {
  if (kind == "analytic") return c.get("system", "map");
  if (kind == "linear") return "linear";
  std::string name = c.get("grid", "domain") + "_" + c.get("system", "nonlinearity");
  const double lambda = c.get_double("system", "lambda");
  if (lambda == std::round(lambda)) {
    name += "_l" + std::to_string(static_cast<long>(lambda));
  } else {
    name += "_l" + format_double(lambda);
  }
  return name;
}

}  // namespace

SystemSpec build_system(const ExperimentConfig& c) {
  const std::string kind = c.get("system", "kind");
  std::string name = c.get("system", "name");
  if (name.empty()) name = default_name(c, kind);
  const double kappa = c.get_double("system", "kappa");
  if (kind == "analytic") {
    AnalyticScalarSystem a{analytic_map_from_string(c.get("system", "map")), c.get_double("system", "map_parameter")};
    return SystemSpec::analytic(a, kappa, name);
  }
  if (kind == "linear") {
    const Eigen::MatrixXd m = parse_matrix(c);
    const std::string flag = c.get("system", "monotone_expected");
    const bool monotone = flag == "auto" ? true : c.get_bool("system", "monotone_expected");
    return SystemSpec::linear(m, kappa, monotone, name);
  }
  if (kind == "parabolic") {
    ParabolicSpec spec;
    spec.grid = build_grid(c);
    spec.reaction.kind = reaction_kind_from_string(c.get("system", "nonlinearity"));
    spec.reaction.lambda = c.get_double("system", "lambda");
    spec.reaction.modulation = c.get_double("system", "modulation");
    spec.reaction.profile_amplitude = c.get_double("system", "profile_amplitude");
    spec.reaction.gradient_coeff = c.get_double("system", "gradient_coeff");
    spec.reaction.table_u = c.get_list("system", "table_u");
    spec.reaction.table_f = c.get_list("system", "table_f");
    spec.period = c.get_double("system", "period");
    spec.phase = c.get_double("system", "phase");
    spec.diffusivity = c.get_double("system", "diffusivity");
    spec.scheme.steps_per_period = static_cast<int>(c.get_long("time", "steps_per_period"));
    spec.scheme.theta = c.get_double("time", "theta");
    spec.scheme.newton_tol = c.get_double("time", "newton_tol");
    spec.scheme.newton_max_iter = static_cast<int>(c.get_long("time", "newton_max_iter"));
    return SystemSpec::parabolic(spec, kappa, name);
  }
  bad_value("system", "kind", kind, "analytic, linear or parabolic");
}

ClassifyBudget build_budget(const ExperimentConfig& c, const SystemSpec& system) {
  ClassifyBudget b = ClassifyBudget::defaults_for(system);
  b.transient = c.get_long("classify", "transient");
  b.p_max = static_cast<int>(c.get_long("classify", "p_max"));
  b.max_iterations = c.get_long("classify", "max_iterations");
  b.check_interval = c.get_long("classify", "check_interval");
  if (c.get("classify", "tol_cyc") != "auto") b.tol_cyc = c.get_double("classify", "tol_cyc");
  b.tol_stab = c.get_double("classify", "tol_stab");
  b.tol_set = c.get_double("classify", "tol_set");
  if (c.get("classify", "newton_tol") != "auto") b.newton_tol = c.get_double("classify", "newton_tol");
  b.newton_max_iter = static_cast<int>(c.get_long("classify", "newton_max_iter"));
  b.validate();
  return b;
}

SamplerSpec build_sampler(const ExperimentConfig& c) {
  SamplerSpec s;
  s.strategy = sampling_strategy_from_string(c.get("sampling", "strategy"));
  s.modes = static_cast<int>(c.get_long("sampling", "modes"));
  s.amplitude = c.get_double("sampling", "amplitude");
  const std::string& seed = c.get("sampling", "seed");
  const auto res = std::from_chars(seed.data(), seed.data() + seed.size(), s.seed);
  if (seed.empty() || res.ec != std::errc() || res.ptr != seed.data() + seed.size()) {
    bad_value("sampling", "seed", seed, "a non-negative integer");
  }
  s.base = c.get_list("sampling", "base");
  s.direction = c.get_list("sampling", "direction");
  s.s_min = c.get_double("sampling", "s_min");
  s.s_max = c.get_double("sampling", "s_max");
  s.resolution = static_cast<int>(c.get_long("sampling", "resolution"));
  return s;
}

GroupActionSpec build_action(const ExperimentConfig& c, const SystemSpec& system) {
  const ActionKind kind = action_kind_from_string(c.get("symmetry", "action"));
  const int n = system.dimension();
  switch (kind) {
    case ActionKind::Trivial: return GroupActionSpec::trivial(n);
    case ActionKind::RingRotation:
      return GroupActionSpec::ring_rotation(n, static_cast<int>(c.get_long("symmetry", "order")));
    case ActionKind::IntervalReflection: return GroupActionSpec::interval_reflection(n);
  }
  throw ConfigError("unknown group action");
}

double symmetry_tolerance(const ExperimentConfig& c) { return c.get_double("symmetry", "tol_sym"); }
double equivariance_tolerance(const ExperimentConfig& c) { return c.get_double("symmetry", "tol_equivariance"); }

void store_system(ExperimentConfig& c, const SystemSpec& system) {
  c.set("system", "name", system.name());
  c.set("system", "kappa", format_double(system.kappa()));
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, AnalyticScalarSystem>) {
          c.set("system", "kind", "analytic");
          c.set("system", "map", std::string(to_string(k.map)));
          c.set("system", "map_parameter", format_double(k.parameter));
        } else if constexpr (std::is_same_v<T, LinearCooperativeSystem>) {
          c.set("system", "kind", "linear");
          std::string text;
          for (int i = 0; i < k.matrix.rows(); ++i) {
            if (i > 0) text += "; ";
            for (int j = 0; j < k.matrix.cols(); ++j) text += (j > 0 ? " " : "") + format_double(k.matrix(i, j));
          }
          c.set("system", "matrix", text);
          c.set("system", "monotone_expected", system.monotone_expected() ? "true" : "false");
        } else {
          c.set("system", "kind", "parabolic");
          const NonlinearitySpec& r = k.reaction;
          c.set("system", "nonlinearity", std::string(to_string(r.kind)));
          c.set("system", "lambda", format_double(r.lambda));
          c.set("system", "modulation", format_double(r.modulation));
          c.set("system", "profile_amplitude", format_double(r.profile_amplitude));
          c.set("system", "gradient_coeff", format_double(r.gradient_coeff));
          auto list = [](const std::vector<double>& v) {
            std::string s;
            for (std::size_t i = 0; i < v.size(); ++i) s += (i > 0 ? ", " : "") + format_double(v[i]);
            return s;
          };
          c.set("system", "table_u", list(r.table_u));
          c.set("system", "table_f", list(r.table_f));
          c.set("system", "period", format_double(k.period));
          c.set("system", "phase", format_double(k.phase));
          c.set("system", "diffusivity", format_double(k.diffusivity));
          c.set("grid", "domain", std::string(to_string(k.grid.kind)));
          c.set("grid", "n", std::to_string(k.grid.n));
          if (k.grid.kind == DomainKind::Radial) c.set("grid", "radial_dim", std::to_string(k.grid.radial_dim));
          c.set("time", "steps_per_period", std::to_string(k.scheme.steps_per_period));
          c.set("time", "theta", format_double(k.scheme.theta));
          c.set("time", "newton_tol", format_double(k.scheme.newton_tol));
          c.set("time", "newton_max_iter", std::to_string(k.scheme.newton_max_iter));
        }
      },
      system.kind());
}

}  // namespace monolab
