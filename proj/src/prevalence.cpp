#include "monolab/prevalence.hpp"

#include "monolab/errors.hpp"
#include "monolab/rng.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

namespace monolab {

std::string_view to_string(SamplingStrategy s) {
  switch (s) {
    case SamplingStrategy::BoxUniform: return "box";
    case SamplingStrategy::SmoothField: return "smooth";
    case SamplingStrategy::LineScan: return "line";
  }
  return "unknown";
}

SamplingStrategy sampling_strategy_from_string(std::string_view name) {
  if (name == "box") return SamplingStrategy::BoxUniform;
  if (name == "smooth") return SamplingStrategy::SmoothField;
  if (name == "line") return SamplingStrategy::LineScan;
  throw ParameterError("unknown sampling strategy '" + std::string(name) + "'");
}

namespace {

Eigen::VectorXd broadcast(const std::vector<double>& values, int n, double fill, const char* what) {
  if (values.empty()) return Eigen::VectorXd::Constant(n, fill);
  if (values.size() == 1) return Eigen::VectorXd::Constant(n, values.front());
  if (static_cast<int>(values.size()) != n) {
    throw DimensionError(std::string(what) + " has " + std::to_string(values.size()) + " entries, grid has " +
                         std::to_string(n));
  }
  return Eigen::Map<const Eigen::VectorXd>(values.data(), n);
}

}  // namespace

double SamplerSpec::line_parameter(int i) const {
  if (resolution <= 1) return s_min;
  return s_min + (s_max - s_min) * i / (resolution - 1);
}

StateVector SamplerSpec::line_direction(const GridDescriptor& grid) const {
  return StateVector(broadcast(direction, grid.n, 1.0, "line direction"), grid);
}

StateVector SamplerSpec::line_base(const GridDescriptor& grid) const {
  return StateVector(broadcast(base, grid.n, 0.0, "line base"), grid);
}

void SamplerSpec::validate(const SystemSpec& system) const {
  const GridDescriptor& grid = system.grid();
  if (strategy == SamplingStrategy::LineScan) {
    if (resolution < 1) throw ParameterError("line resolution must be >= 1");
    if (!(s_max >= s_min)) throw ParameterError("line range needs s_min <= s_max");
    const StateVector v = line_direction(grid);
    if (!strongly_less(StateVector::constant(grid, 0.0), v)) throw ParameterError("line direction must be >> 0");
    const StateVector b = line_base(grid);
    for (double s : {s_min, s_max}) {
      const Eigen::ArrayXd x = b.values().array() + s * v.values().array();
      if ((x < system.box_lower()).any() || (x > system.box_upper()).any()) {
        throw ParameterError("line base + s*v leaves the trapping box");
      }
    }
    return;
  }
  if (!(amplitude > 0.0)) throw ParameterError("sampler amplitude must be positive");
  if (amplitude > std::min(-system.box_lower(), system.box_upper())) {
    throw ParameterError("sampler amplitude exceeds the trapping box");
  }
  if (strategy == SamplingStrategy::SmoothField && modes < 1) throw ParameterError("smooth sampler needs modes >= 1");
}

Eigen::VectorXd smooth_mode(const GridDescriptor& grid, int k) {
  constexpr double pi = std::numbers::pi;
  Eigen::VectorXd phi(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    const double x = grid.coordinate(i);
    switch (grid.kind) {
      case DomainKind::IntervalDirichlet: phi[i] = std::sin((k + 1) * pi * x); break;
      case DomainKind::IntervalNeumann: phi[i] = std::cos(k * pi * x); break;
      case DomainKind::Ring: {
        const int freq = (k + 1) / 2;
        phi[i] = (k % 2 == 1 || k == 0) ? std::cos(2.0 * pi * freq * x) : std::sin(2.0 * pi * freq * x);
        break;
      }
      case DomainKind::Radial: phi[i] = std::cos((k + 0.5) * pi * x); break;
      case DomainKind::Euclidean: phi[i] = std::cos(k * pi * i / grid.n); break;
    }
  }
  return phi;
}

StateVector sample_initial(const SamplerSpec& sampler, std::uint64_t index, const GridDescriptor& grid) {
  switch (sampler.strategy) {
    case SamplingStrategy::LineScan: {
      if (index >= static_cast<std::uint64_t>(std::max(sampler.resolution, 0))) {
        throw ContractError("line sample index beyond resolution");
      }
      const double s = sampler.line_parameter(static_cast<int>(index));
      return StateVector(sampler.line_base(grid).values() + s * sampler.line_direction(grid).values(), grid);
    }
    case SamplingStrategy::BoxUniform: {
      auto rng = SplitMix64::stream(sampler.seed, index);
      Eigen::VectorXd v(grid.n);
      for (int i = 0; i < grid.n; ++i) v[i] = sampler.amplitude * (2.0 * rng.uniform_open() - 1.0);
      return StateVector(v, grid);
    }
    case SamplingStrategy::SmoothField: {
      auto rng = SplitMix64::stream(sampler.seed, index);
      Eigen::VectorXd v = Eigen::VectorXd::Zero(grid.n);
      const double scale = sampler.amplitude / sampler.modes;
      for (int k = 0; k < sampler.modes; ++k) v += scale * (2.0 * rng.uniform_open() - 1.0) * smooth_mode(grid, k);
      return StateVector(v, grid);
    }
  }
  throw ContractError("unknown sampling strategy");
}

namespace {

int resolve_threads(ParallelOptions parallel, long work) {
  int t = parallel.threads;
  if (t <= 0) t = static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
  return static_cast<int>(std::clamp<long>(work, 1, t));
}

/// Runs job(i) for i in [0, count) over a worker pool; results land at their
/// index so the output does not depend on scheduling.
template <typename Job>
auto parallel_map(long count, ParallelOptions parallel, Job job) {
  using Result = decltype(job(0L));
  std::vector<std::optional<Result>> slots(static_cast<std::size_t>(std::max(count, 0L)));
  std::atomic<long> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const long i = next.fetch_add(1);
      if (i >= count) return;
      try {
        slots[static_cast<std::size_t>(i)].emplace(job(i));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  const int threads = resolve_threads(parallel, count);
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  std::vector<Result> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

std::map<Verdict, long> empty_counts() {
  return {{Verdict::StableCycle, 0}, {Verdict::UnstableCycle, 0}, {Verdict::Unresolved, 0}, {Verdict::Escaped, 0}};
}

}  // namespace

std::vector<Classification> classify_ensemble(const SystemSpec& system, const SamplerSpec& sampler, long count,
                                              const ClassifyBudget& budget, ParallelOptions parallel) {
  sampler.validate(system);
  budget.validate();
  if (count < 0) throw ContractError("sample count must be >= 0");
  return parallel_map(count, parallel, [&](long i) {
    return classify_orbit(system, sample_initial(sampler, static_cast<std::uint64_t>(i), system.grid()), budget);
  });
}

WilsonInterval wilson_interval(long successes, long trials, double z) {
  if (trials <= 0) throw ContractError("Wilson interval needs trials > 0");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

long PrevalenceReport::count(Verdict v) const {
  const auto it = counts.find(v);
  return it == counts.end() ? 0 : it->second;
}

std::string_view prevalence_caveat() {
  return "Sampling evidence only: a set is prevalent when its complement is null for some compactly supported "
         "probe measure and every translate, which finite Monte Carlo sampling under one sampler cannot certify.";
}

PrevalenceReport aggregate_prevalence(const SystemSpec& system, const SamplerSpec& sampler,
                                      const ClassifyBudget& budget, const std::vector<Classification>& results) {
  PrevalenceReport report;
  report.system_name = system.name();
  report.sampler = sampler;
  report.budget = budget;
  report.sample_count = static_cast<long>(results.size());
  report.counts = empty_counts();
  report.rho_histogram.assign(kRhoBins + 1, 0);
  report.caveat = std::string(prevalence_caveat());
  for (const auto& c : results) {
    ++report.counts[c.verdict];
    if (c.cycle) {
      const int bin = std::min(kRhoBins, static_cast<int>(std::floor(c.cycle->rho / kRhoBinWidth)));
      ++report.rho_histogram[static_cast<std::size_t>(std::max(bin, 0))];
      if (c.verdict == Verdict::StableCycle) ++report.period_histogram[c.cycle->period];
    }
  }
  if (report.sample_count > 0) {
    report.fractions_defined = true;
    const double n = static_cast<double>(report.sample_count);
    report.stable_fraction = report.count(Verdict::StableCycle) / n;
    report.unresolved_fraction = report.count(Verdict::Unresolved) / n;
    report.stable_interval = wilson_interval(report.count(Verdict::StableCycle), report.sample_count);
  }
  return report;
}

PrevalenceReport estimate_prevalence(const SystemSpec& system, const SamplerSpec& sampler, long count,
                                     const ClassifyBudget& budget, ParallelOptions parallel) {
  if (!system.monotone_expected()) {
    throw ContractError("prevalence experiments are restricted to monotone systems");
  }
  const auto start = std::chrono::steady_clock::now();
  const auto results = classify_ensemble(system, sampler, count, budget, parallel);
  PrevalenceReport report = aggregate_prevalence(system, sampler, budget, results);
  report.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

namespace {

std::vector<Classification> classify_line_points(const SystemSpec& system, const StateVector& base,
                                                 const StateVector& direction, const std::vector<double>& s_values,
                                                 const ClassifyBudget& budget, ParallelOptions parallel) {
  return parallel_map(static_cast<long>(s_values.size()), parallel, [&](long i) {
    const double s = s_values[static_cast<std::size_t>(i)];
    return classify_orbit(system, base.with_values(base.values() + s * direction.values()), budget);
  });
}

std::vector<double> bad_parameters(const std::vector<double>& s_values, const std::vector<Classification>& cls) {
  std::vector<double> bad;
  for (std::size_t i = 0; i < s_values.size(); ++i) {
    if (cls[i].verdict != Verdict::StableCycle) bad.push_back(s_values[i]);
  }
  return bad;
}

}  // namespace

LineReport line_probe(const SystemSpec& system, const SamplerSpec& scan, const ClassifyBudget& budget,
                      ParallelOptions parallel) {
  if (scan.strategy != SamplingStrategy::LineScan) throw ContractError("line_probe needs a LineScan sampler");
  scan.validate(system);
  budget.validate();
  LineReport report;
  report.counts = empty_counts();
  for (int i = 0; i < scan.resolution; ++i) report.s_values.push_back(scan.line_parameter(i));
  const auto cls = classify_line_points(system, scan.line_base(system.grid()), scan.line_direction(system.grid()),
                                        report.s_values, budget, parallel);
  for (const auto& c : cls) {
    report.verdicts.push_back(c.verdict);
    ++report.counts[c.verdict];
  }
  report.bad_s = bad_parameters(report.s_values, cls);
  report.bad_fraction = report.s_values.empty() ? 0.0
                                                : static_cast<double>(report.bad_s.size()) / report.s_values.size();
  return report;
}

std::vector<LineRefinementLevel> refine_line_probe(const SystemSpec& system, const SamplerSpec& scan,
                                                   const ClassifyBudget& budget, int levels,
                                                   ParallelOptions parallel) {
  const LineReport first = line_probe(system, scan, budget, parallel);
  std::vector<LineRefinementLevel> out;
  LineRefinementLevel level0;
  level0.a = scan.s_min;
  level0.b = scan.s_max;
  level0.resolution = scan.resolution;
  level0.spacing = scan.resolution > 1 ? (scan.s_max - scan.s_min) / (scan.resolution - 1) : 0.0;
  level0.bad_s = first.bad_s;
  out.push_back(level0);

  const StateVector base = scan.line_base(system.grid());
  const StateVector direction = scan.line_direction(system.grid());
  for (int k = 1; k <= levels; ++k) {
    const LineRefinementLevel& prev = out.back();
    if (prev.bad_s.empty() || !(prev.spacing > 0.0)) break;
    const auto [lo_it, hi_it] = std::minmax_element(prev.bad_s.begin(), prev.bad_s.end());
    const double anchor = *lo_it;
    const double spacing = prev.spacing / 2.0;
    // Grid anchored on the lowest bad point so it is reproduced exactly.
    const int below = 2;
    const int above = 2 + static_cast<int>(std::lround((*hi_it - anchor) / spacing));
    std::vector<double> s_values;
    for (int j = -below; j <= above; ++j) s_values.push_back(anchor + j * spacing);
    const auto cls = classify_line_points(system, base, direction, s_values, budget, parallel);

    LineRefinementLevel level;
    level.a = s_values.front();
    level.b = s_values.back();
    level.spacing = spacing;
    level.resolution = static_cast<int>(s_values.size());
    level.bad_s = bad_parameters(s_values, cls);
    // New points are the odd offsets from the anchor.
    long new_near_old_bad = 0;
    for (int j = -below; j <= above; ++j) {
      if ((j % 2) == 0) continue;
      const double s = anchor + j * spacing;
      for (double b : prev.bad_s) {
        if (std::abs(s - b) <= prev.spacing) {
          ++new_near_old_bad;
          break;
        }
      }
    }
    const long old_in_range = std::count_if(prev.bad_s.begin(), prev.bad_s.end(), [&](double b) {
      return b >= level.a && b <= level.b;
    });
    level.consistent = static_cast<long>(level.bad_s.size()) <= old_in_range + new_near_old_bad;
    out.push_back(std::move(level));
  }
  return out;
}

}  // namespace monolab
