#pragma once

#include "monolab/state.hpp"
#include "monolab/systems.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace monolab {

struct OrbitRecord {
  std::vector<StateVector> samples;
  std::vector<long> indices;  // iterate number n of each sample (Fⁿx₀), strictly increasing
  bool escaped = false;
  long escape_iteration = -1;
};

/// Records every `thinning`-th iterate F¹x₀ … F^{n_iter}x₀; stops at escape.
OrbitRecord iterate_orbit(const SystemSpec& system, const StateVector& x0, long n_iter, long thinning = 1);

struct CycleCandidate {
  int period = 0;
  std::vector<StateVector> points;  // points[j+1] ≈ F(points[j])
  double window_error = 0.0;
};

/// Smallest p ≤ p_max with ‖tail[i+p] − tail[i]‖_∞ < tol over the last
/// 2·p_max entries. Requires tail.size() ≥ 3·p_max.
std::optional<CycleCandidate> detect_cycle(std::span<const StateVector> tail, int p_max, double tol_cyc);

enum class Stability { LinearlyStable, Unstable };
std::string_view to_string(Stability s);

struct CycleRecord {
  std::vector<StateVector> points;
  int period = 0;
  double rho = 0.0;
  Stability stability = Stability::Unstable;
  double residual = 0.0;  // max_i ‖F(point_i) − point_{i+1 mod p}‖_∞
  std::string spectral_method;
  bool refined = false;
};

struct RefinedCycle {
  std::vector<StateVector> points;
  int period = 0;
  double residual = 0.0;
  bool refined = false;
  int newton_iterations = 0;
  std::string warning;
};

/// Damped Newton on G(z) = F^p(z) − z from the first candidate point.
RefinedCycle refine_cycle(const SystemSpec& system, const CycleCandidate& candidate, double newton_tol,
                          int max_iter = 20);

/// max_i ‖F(point_i) − point_{i+1 mod p}‖_∞
double cycle_residual(const SystemSpec& system, std::span<const StateVector> points);

struct SpectralEstimate {
  double rho = 0.0;
  std::string method;  // "power" or "dense"
  int iterations = 0;
};

/// Spectral radius of DF^p along the cycle: power iteration on the
/// monodromy product from the all-ones vector, falling back to a dense
/// eigensolve of the explicit product when it does not settle.
SpectralEstimate cycle_spectral_radius(const SystemSpec& system, std::span<const StateVector> cycle_points,
                                       double tol = 1e-8, int max_iter = 10000);

/// Dense route: eigenvalues of the explicitly multiplied monodromy matrix.
double monodromy_spectral_radius_dense(const SystemSpec& system, std::span<const StateVector> cycle_points);

struct ClassifyBudget {
  long transient = 500;
  int p_max = 64;
  long max_iterations = 5000;
  long check_interval = 50;
  double tol_cyc = 1e-8;
  double tol_stab = 1e-6;
  double tol_set = 1e-4;
  double newton_tol = 1e-12;
  int newton_max_iter = 20;

  /// Per-kind defaults (tol_cyc 1e-8 for maps, 1e-6 for parabolic systems).
  static ClassifyBudget defaults_for(const SystemSpec& system);
  void validate() const;
  bool operator==(const ClassifyBudget&) const = default;
};

enum class Verdict { StableCycle, UnstableCycle, Unresolved, Escaped };
std::string_view to_string(Verdict v);
Verdict verdict_from_string(std::string_view name);

struct Classification {
  Verdict verdict = Verdict::Unresolved;
  std::optional<CycleRecord> cycle;
  long iterations_used = 0;
  std::string diagnostics;

  bool stable() const { return verdict == Verdict::StableCycle; }
};

/// Iterates past the transient, runs cycle detection every check_interval
/// iterations, refines the cycle and decides stability by ρ(DF^p).
/// Never throws for numerical trouble: escape and failures become verdicts.
Classification classify_orbit(const SystemSpec& system, const StateVector& x0, const ClassifyBudget& budget);

/// De-duplicated tail points (last `tail_fraction` of the orbit).
std::vector<StateVector> omega_set(const OrbitRecord& orbit, double tail_fraction, double tol);

/// Symmetric Hausdorff distance in the sup norm.
double set_distance(std::span<const StateVector> a, std::span<const StateVector> b);

/// Limit set approximation carried by a classification (its cycle points).
std::vector<StateVector> limit_points(const Classification& c);

struct DirectionalProbe {
  std::vector<double> eps;
  std::vector<Verdict> verdicts;
  std::vector<std::vector<StateVector>> limits;  // ω(x ± εv) per ε
  std::vector<StateVector> stabilized;            // estimate of ω₊ / ω₋
  bool consistent = false;                        // all converged limits agree within tol_set
  bool conclusive = false;
  std::optional<StateVector> direction;
};

struct ProbeReport {
  StateVector x;
  Classification base;
  std::vector<StateVector> omega_x;
  DirectionalProbe upper;  // along +v (ω₊)
  DirectionalProbe lower;  // along −v (ω₋)
  bool in_upper_unstable = false;  // x ∈ 𝒰₊
  bool in_lower_unstable = false;  // x ∈ 𝒰₋
  bool conclusive = false;
  double tol_set = 0.0;
  /// Multi-direction mode: ω₊ estimates along further directions and
  /// whether they agree with the primary one.
  std::vector<DirectionalProbe> extra_upper;
  bool directions_agree = true;
};

ProbeReport omega_plus_probe(const SystemSpec& system, const StateVector& x, const StateVector& v,
                             std::vector<double> eps_list, const ClassifyBudget& budget,
                             const std::vector<StateVector>& extra_directions = {});

struct SeparationProbeRecord {
  double scale = 0.0;
  int sign = 1;
  double tail_max = 0.0;
  bool escaped = false;
};

struct SeparationReport {
  double delta_est = 0.0;
  long horizon = 0;
  std::vector<SeparationProbeRecord> probes;
};

/// For y = x ± s·v, the largest ‖Fⁿy − Fⁿx‖_∞ over the second half of the
/// horizon (a limsup surrogate); δ_est is the minimum over probes.
/// Escaped probes are reported and excluded from the minimum.
SeparationReport separation_probe(const SystemSpec& system, const StateVector& x,
                                  const std::vector<double>& scales, const ClassifyBudget& budget,
                                  std::optional<StateVector> direction = std::nullopt, long horizon = 0);

}  // namespace monolab
