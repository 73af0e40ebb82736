#pragma once

#include "monolab/asymptotics.hpp"
#include "monolab/state.hpp"
#include "monolab/systems.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace monolab {

enum class SamplingStrategy { BoxUniform, SmoothField, LineScan };
std::string_view to_string(SamplingStrategy s);
SamplingStrategy sampling_strategy_from_string(std::string_view name);

/// How initial data are drawn. BoxUniform draws nodal values independently
/// in (−amplitude, amplitude); SmoothField sums `modes` low-frequency
/// eigenfunctions of the grid with coefficients uniform in [−1,1], scaled by
/// amplitude/modes so max|u₀| ≤ amplitude; LineScan walks base + s·v.
struct SamplerSpec {
  SamplingStrategy strategy = SamplingStrategy::SmoothField;
  int modes = 5;
  double amplitude = 1.0;
  std::vector<double> base;
  std::vector<double> direction;  // empty means the all-ones vector
  double s_min = 0.0;
  double s_max = 1.0;
  int resolution = 101;
  std::uint64_t seed = 1;

  /// Checks the invariants against a system: amplitude keeps samples in the
  /// κ-box, line direction ≫ 0 and line endpoints inside the box.
  void validate(const SystemSpec& system) const;

  /// s_i = s_min + (s_max − s_min)·i/(R − 1); s_min when R = 1.
  double line_parameter(int i) const;
  StateVector line_direction(const GridDescriptor& grid) const;
  StateVector line_base(const GridDescriptor& grid) const;

  bool operator==(const SamplerSpec&) const = default;
};

/// Deterministic function of (seed, index).
StateVector sample_initial(const SamplerSpec& sampler, std::uint64_t index, const GridDescriptor& grid);

/// Low-frequency eigenfunction k (k = 0, 1, …) of the grid's diffusion
/// operator evaluated at the nodes, bounded by one in magnitude.
Eigen::VectorXd smooth_mode(const GridDescriptor& grid, int k);

/// Worker count: 0 picks hardware concurrency.
struct ParallelOptions {
  int threads = 1;
};

/// Classifications of samples 0..count−1 in index order, independent of the
/// thread count.
std::vector<Classification> classify_ensemble(const SystemSpec& system, const SamplerSpec& sampler, long count,
                                              const ClassifyBudget& budget, ParallelOptions parallel = {});

struct WilsonInterval {
  double low = 0.0;
  double high = 0.0;
  bool operator==(const WilsonInterval&) const = default;
};

/// 95% Wilson score interval for `successes` out of `trials` (trials > 0).
WilsonInterval wilson_interval(long successes, long trials, double z = 1.959963984540054);

constexpr int kPrevalenceSchemaVersion = 1;
constexpr double kRhoBinWidth = 0.05;
constexpr int kRhoBins = 30;  // [0, 1.5) plus one overflow bin

struct PrevalenceReport {
  int schema_version = kPrevalenceSchemaVersion;
  std::string system_name;
  SamplerSpec sampler;
  ClassifyBudget budget;
  long sample_count = 0;
  std::map<Verdict, long> counts;
  bool fractions_defined = false;
  double stable_fraction = 0.0;
  double unresolved_fraction = 0.0;
  WilsonInterval stable_interval;
  std::map<int, long> period_histogram;  // stable cycles, key p (= k for parabolic systems)
  std::vector<long> rho_histogram;       // all detected cycles
  std::string caveat;
  double wall_time_seconds = 0.0;

  long count(Verdict v) const;
  bool operator==(const PrevalenceReport&) const = default;
};

/// Folds classifications in index order into a report.
PrevalenceReport aggregate_prevalence(const SystemSpec& system, const SamplerSpec& sampler,
                                      const ClassifyBudget& budget, const std::vector<Classification>& results);

PrevalenceReport estimate_prevalence(const SystemSpec& system, const SamplerSpec& sampler, long count,
                                     const ClassifyBudget& budget, ParallelOptions parallel = {});

struct LineReport {
  std::vector<double> s_values;
  std::vector<Verdict> verdicts;
  std::vector<double> bad_s;  // parameters whose verdict is not StableCycle
  double bad_fraction = 0.0;
  std::map<Verdict, long> counts;
};

/// Classifies base + s_i·v for the R points of a LineScan sampler.
LineReport line_probe(const SystemSpec& system, const SamplerSpec& scan, const ClassifyBudget& budget,
                      ParallelOptions parallel = {});

struct LineRefinementLevel {
  double a = 0.0;
  double b = 0.0;
  double spacing = 0.0;
  int resolution = 0;
  std::vector<double> bad_s;
  /// Bad count in [a,b] did not grow by more than the number of new points
  /// landing within one old spacing of a previously found bad point.
  bool consistent = true;
};

/// Level 0 is the full scan. Each further level halves the spacing on the
/// sub-interval [min bad − Δ, max bad + Δ] of the previous level, with the
/// new grid nested in the old one. Stops when no bad point remains.
std::vector<LineRefinementLevel> refine_line_probe(const SystemSpec& system, const SamplerSpec& scan,
                                                   const ClassifyBudget& budget, int levels,
                                                   ParallelOptions parallel = {});

std::string_view prevalence_caveat();

}  // namespace monolab
