#pragma once

#include "monolab/asymptotics.hpp"
#include "monolab/prevalence.hpp"
#include "monolab/symmetry.hpp"
#include "monolab/systems.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace monolab {

/// Experiment configuration: `[section]` headers followed by `key = value`
/// lines, `#` starts a comment. Every section and key is documented in
/// docs/config.md; anything unknown is rejected.
///
/// Values are kept as the trimmed source text. After parsing, every known
/// key is present (defaults filled in), so serialize() followed by parse()
/// reproduces the same table exactly.
class ExperimentConfig {
 public:
  using Table = std::map<std::string, std::map<std::string, std::string>>;

  static ExperimentConfig parse(std::string_view text);
  static ExperimentConfig load(const std::filesystem::path& path);
  static ExperimentConfig defaults();

  std::string serialize() const;

  const std::string& get(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key) const;
  long get_long(const std::string& section, const std::string& key) const;
  bool get_bool(const std::string& section, const std::string& key) const;
  std::vector<double> get_list(const std::string& section, const std::string& key) const;

  /// Overrides one value (used by the CLI for flags). Unknown keys throw.
  void set(const std::string& section, const std::string& key, std::string value);

  const Table& table() const { return table_; }
  bool operator==(const ExperimentConfig&) const = default;

 private:
  Table table_;
};

SystemSpec build_system(const ExperimentConfig& config);
ClassifyBudget build_budget(const ExperimentConfig& config, const SystemSpec& system);
SamplerSpec build_sampler(const ExperimentConfig& config);
GroupActionSpec build_action(const ExperimentConfig& config, const SystemSpec& system);
double symmetry_tolerance(const ExperimentConfig& config);
double equivariance_tolerance(const ExperimentConfig& config);

/// Writes the [system] and [grid]/[time] values that reproduce `system`.
void store_system(ExperimentConfig& config, const SystemSpec& system);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);
double parse_double(std::string_view text);

}  // namespace monolab
