#pragma once
//
// Experiment harness: scenarios and presets, seeded instance generation,
// trial execution, success-rate / SNR / iteration aggregation and RIP surveys.
//

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "rmspi/analysis.hpp"
#include "rmspi/matcore.hpp"
#include "rmspi/operators.hpp"
#include "rmspi/solver.hpp"
#include "rmspi/weighting.hpp"

namespace rmspi::bench {

inline constexpr double kSuccessError = 1e-2;
inline constexpr int kSuccessIterations = 20;

enum class PriorMode { none, close_close, far_far, close_far, far_close };

inline std::string to_string(PriorMode m) {
  switch (m) {
    case PriorMode::none: return "none";
    case PriorMode::close_close: return "close_close";
    case PriorMode::far_far: return "far_far";
    case PriorMode::close_far: return "close_far";
    case PriorMode::far_close: return "far_close";
  }
  return "unknown";
}

inline PriorMode prior_mode_from_string(const std::string& s) {
  for (PriorMode m : {PriorMode::none, PriorMode::close_close, PriorMode::far_far, PriorMode::close_far,
                      PriorMode::far_close})
    if (to_string(m) == s) return m;
  throw InvalidArgument("unknown prior mode '" + s + "'");
}

/// Column-side (Q_U~) and row-side (Q_V~) weights for one solver.
struct SideWeights {
  WeightSpec column;
  WeightSpec row;
  bool operator==(const SideWeights&) const = default;
};

struct Scenario {
  std::string name = "custom";
  Index n = 30;
  Index rank = 3;
  OperatorKind operator_kind = OperatorKind::gaussian;
  std::vector<double> sampling_ratios{0.2, 0.4, 0.6, 0.8};
  double noise_level = 0.0;
  PriorMode prior_mode = PriorMode::close_close;
  std::vector<double> theta_u{2.3307, 3.1302, 3.8852};
  std::vector<double> theta_v{2.4493, 2.9559, 4.1325};
  SideWeights rmspi_weights{WeightSpec::single(0.18, 0.999), WeightSpec::single(0.18, 0.999)};
  SideWeights grmspi_weights{WeightSpec::per_direction({0.17, 0.19, 0.21}, {0.99, 0.98, 0.97}),
                             WeightSpec::per_direction({0.17, 0.19, 0.21}, {0.99, 0.98, 0.97})};
  int trials = 50;
  std::vector<Method> solvers{Method::admira, Method::rmspi, Method::grmspi};
  std::uint64_t master_seed = 20190101;

  bool uses_priors() const {
    return std::any_of(solvers.begin(), solvers.end(), [](Method m) { return m != Method::admira; });
  }

  void validate() const {
    rmspi::detail::require(n >= 1, "scenario: n must be >= 1");
    rmspi::detail::require(rank >= 1 && rank <= n, "scenario: rank must lie in [1, n]");
    rmspi::detail::require(!sampling_ratios.empty(), "scenario: no sampling ratios");
    for (double r : sampling_ratios) rmspi::detail::require(r > 0.0 && r <= 1.0, "scenario: sampling ratios must lie in (0, 1]");
    rmspi::detail::require(noise_level >= 0.0 && std::isfinite(noise_level), "scenario: noise_level must be >= 0");
    rmspi::detail::require(trials >= 1, "scenario: trials must be >= 1");
    rmspi::detail::require(!solvers.empty(), "scenario: no solvers");
    if (prior_mode == PriorMode::none) {
      rmspi::detail::require(!uses_priors(), "scenario: prior_mode 'none' only supports the admira solver");
      return;
    }
    rmspi::detail::require(n >= 2 * rank, "scenario: priors need n >= 2 * rank");
    rmspi::detail::require(static_cast<Index>(theta_u.size()) == rank && static_cast<Index>(theta_v.size()) == rank,
                    "scenario: theta_u and theta_v need one angle per rank direction");
    const bool u_close = prior_mode == PriorMode::close_close || prior_mode == PriorMode::close_far;
    const bool v_close = prior_mode == PriorMode::close_close || prior_mode == PriorMode::far_close;
    auto check = [](const std::vector<double>& th, bool close, const char* side) {
      for (double a : th) {
        rmspi::detail::require(a >= 0.0 && a <= 90.0, std::string("scenario: ") + side + " angles must lie in [0, 90]");
        rmspi::detail::require(close ? a <= 45.0 : a >= 45.0,
                        std::string("scenario: ") + side + " angles disagree with prior_mode");
      }
    };
    check(theta_u, u_close, "theta_u");
    check(theta_v, v_close, "theta_v");
    rmspi_weights.column.validate(rank);
    rmspi_weights.row.validate(rank);
    grmspi_weights.column.validate(rank);
    grmspi_weights.row.validate(rank);
    rmspi::detail::require(rmspi_weights.column.mode == WeightMode::single && rmspi_weights.row.mode == WeightMode::single,
                    "scenario: rmspi weights must be single-weight");
    rmspi::detail::require(grmspi_weights.column.mode == WeightMode::per_direction &&
                        grmspi_weights.row.mode == WeightMode::per_direction,
                    "scenario: grmspi weights must be per-direction");
  }

  Index measurements(double ratio) const {
    return static_cast<Index>(std::llround(ratio * static_cast<double>(n * n)));
  }
};

namespace detail {

// Resamples a preset vector to `len` entries by linear interpolation over its index range.
inline std::vector<double> resample(const std::vector<double>& v, Index len) {
  if (static_cast<Index>(v.size()) == len || v.empty()) return v;
  std::vector<double> out(static_cast<std::size_t>(len));
  for (Index i = 0; i < len; ++i) {
    const double t = len == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(len - 1);
    const double pos = t * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    out[static_cast<std::size_t>(i)] = v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  }
  return out;
}

inline WeightSpec resample(const WeightSpec& w, Index len) {
  if (w.mode == WeightMode::single) return w;
  return WeightSpec::per_direction(resample(w.span_weights, len), resample(w.complement_weights, len));
}

}  // namespace detail

/// Same scenario at another rank; per-direction presets are interpolated
/// over their range to the new length.
inline Scenario with_rank(Scenario s, Index rank) {
  s.rank = rank;
  s.theta_u = detail::resample(s.theta_u, rank);
  s.theta_v = detail::resample(s.theta_v, rank);
  s.grmspi_weights.column = detail::resample(s.grmspi_weights.column, rank);
  s.grmspi_weights.row = detail::resample(s.grmspi_weights.row, rank);
  return s;
}

struct Preset {
  std::string name;
  std::string description;
  std::vector<Scenario> scenarios;  // one per rank
};

namespace detail {

inline Scenario figure_base(int fig) {
  Scenario s;
  using W = WeightSpec;
  switch (fig) {
    case 1:
      s.prior_mode = PriorMode::close_close;
      s.theta_u = {2.3307, 3.1302, 3.8852};
      s.theta_v = {2.4493, 2.9559, 4.1325};
      s.rmspi_weights = {W::single(0.18, 0.999), W::single(0.18, 0.999)};
      s.grmspi_weights = {W::per_direction({0.17, 0.19, 0.21}, {0.99, 0.98, 0.97}),
                          W::per_direction({0.17, 0.19, 0.21}, {0.99, 0.98, 0.97})};
      break;
    case 2:
      s.prior_mode = PriorMode::far_far;
      s.theta_u = {89.8334, 89.9545, 89.9670};
      s.theta_v = {89.7879, 89.8493, 89.9653};
      s.rmspi_weights = {W::single(0.999, 0.18), W::single(0.999, 0.18)};
      s.grmspi_weights = {W::per_direction({0.97, 0.98, 0.99}, {0.17, 0.19, 0.2}),
                          W::per_direction({0.96, 0.97, 0.99}, {0.17, 0.19, 0.2})};
      break;
    case 3:
      s.prior_mode = PriorMode::close_far;
      s.theta_u = {2.5395, 3.5460, 3.6290};
      s.theta_v = {89.8745, 89.9585, 89.9854};
      s.rmspi_weights = {W::single(0.18, 0.9556), W::single(0.999, 0.18)};
      s.grmspi_weights = {W::per_direction({0.17, 0.19, 0.21}, {0.93, 0.94, 0.95}),
                          W::per_direction({0.97, 0.98, 0.99}, {0.17, 0.19, 0.21})};
      break;
    case 4:
      s.prior_mode = PriorMode::far_close;
      s.theta_u = {89.8622, 89.9070, 89.9940};
      s.theta_v = {2.4270, 3.0595, 3.6860};
      s.rmspi_weights = {W::single(0.999, 0.18), W::single(0.18, 0.9576)};
      s.grmspi_weights = {W::per_direction({0.97, 0.98, 0.99}, {0.17, 0.19, 0.21}),
                          W::per_direction({0.17, 0.19, 0.21}, {0.93, 0.94, 0.95})};
      break;
    default:
      throw InvalidArgument("no figure preset " + std::to_string(fig));
  }
  return s;
}

}  // namespace detail

inline constexpr double kDefaultNoise = 1e-3;

/// Built-in scenarios: figN{a,b,c} (noiseless Gaussian, noisy Gaussian,
/// noiseless completion) and tableN (figNa over ranks 2, 5, 10).
inline std::vector<Preset> presets() {
  static const char* prior_text[] = {"", "priors close to both column and row spaces",
                                     "priors close to both orthogonal complements",
                                     "column prior close, row prior far", "column prior far, row prior close"};
  std::vector<Preset> out;
  for (int fig = 1; fig <= 4; ++fig) {
    const std::string tag = "fig" + std::to_string(fig);
    Scenario a = detail::figure_base(fig);
    a.name = tag + "a";
    Scenario b = a;
    b.name = tag + "b";
    b.noise_level = kDefaultNoise;
    Scenario c = a;
    c.name = tag + "c";
    c.operator_kind = OperatorKind::completion;
    out.push_back({a.name, std::string("noiseless Gaussian recovery, ") + prior_text[fig], {a}});
    out.push_back({b.name, std::string("noisy Gaussian recovery, ") + prior_text[fig], {b}});
    out.push_back({c.name, std::string("noiseless matrix completion, ") + prior_text[fig], {c}});
  }
  for (int t = 1; t <= 4; ++t) {
    Preset p{"table" + std::to_string(t), std::string("SNR and iterations over ranks 2, 5, 10, ") + prior_text[t], {}};
    for (Index r : {2, 5, 10}) {
      Scenario s = with_rank(detail::figure_base(t), r);
      s.name = p.name;
      if (t >= 3) s.solvers = {Method::rmspi, Method::grmspi};
      p.scenarios.push_back(s);
    }
    out.push_back(std::move(p));
  }
  return out;
}

inline Preset find_preset(const std::string& name) {
  for (Preset& p : presets())
    if (p.name == name) return p;
  throw InvalidArgument("unknown preset '" + name + "'");
}

// ---------------------------------------------------------------- seeding

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) { return splitmix64(a ^ splitmix64(b)); }

inline std::uint64_t ratio_key(double ratio) { return static_cast<std::uint64_t>(std::llround(ratio * 1e6)); }

/// Ground truth and priors depend on (master_seed, trial) so every ratio sees
/// the same matrices; the operator and noise also depend on the ratio.
inline std::uint64_t instance_seed(std::uint64_t master, int trial) {
  return mix_seed(mix_seed(master, 0x7472696170ULL), static_cast<std::uint64_t>(trial));
}

inline std::uint64_t operator_seed(std::uint64_t master, double ratio, int trial) {
  return mix_seed(mix_seed(master, ratio_key(ratio)), static_cast<std::uint64_t>(trial) + 0x100000000ULL);
}

/// Reconstructs an experiment operator from its persisted fields.
inline MeasurementOperator make_operator(OperatorKind kind, Index n, Index p, std::uint64_t seed) {
  Rng rng(seed);
  switch (kind) {
    case OperatorKind::gaussian: return make_gaussian(n, p, rng);
    case OperatorKind::completion: return make_completion(n, p, rng);
    default: throw InvalidArgument("make_operator: only gaussian and completion operators are reproducible");
  }
}

// ---------------------------------------------------------------- instances

struct Instance {
  Matrix truth;
  SubspaceBasis left, right;  // U_r, V_r
  MeasurementOperator op;
  std::uint64_t op_seed = 0;
  Vector clean;  // A(X)
  Vector y;
  std::optional<SubspaceBasis> prior_u, prior_v;
  std::optional<SubspaceBasis> complement_u, complement_v;  // weighted complement directions
  double ratio = 0.0;
  int trial = 0;
};

inline Instance generate_instance(const Scenario& sc, double ratio, int trial) {
  sc.validate();
  const Index p = sc.measurements(ratio);
  rmspi::detail::require(p >= 1, "generate_instance: sampling ratio yields no measurements");
  rmspi::detail::require(p <= sc.n * sc.n, "generate_instance: more measurements than entries");

  Instance inst;
  inst.ratio = ratio;
  inst.trial = trial;

  Rng rng(instance_seed(sc.master_seed, trial));
  inst.left = random_orthonormal(sc.n, sc.rank, rng);
  inst.right = random_orthonormal(sc.n, sc.rank, rng);
  std::uniform_real_distribution<double> sv(1.0, 2.0);
  Vector s(sc.rank);
  for (Index i = 0; i < sc.rank; ++i) s(i) = sv(rng);
  std::sort(s.begin(), s.end(), std::greater<>());
  inst.truth = inst.left.matrix() * s.asDiagonal() * inst.right.matrix().transpose();
  if (sc.prior_mode != PriorMode::none) {
    inst.prior_u = perturb_subspace(inst.left, sc.theta_u, rng);
    inst.prior_v = perturb_subspace(inst.right, sc.theta_v, rng);
    inst.complement_u = aligned_complement_directions(*inst.prior_u, inst.left, rng);
    inst.complement_v = aligned_complement_directions(*inst.prior_v, inst.right, rng);
  }

  inst.op_seed = operator_seed(sc.master_seed, ratio, trial);
  inst.op = make_operator(sc.operator_kind, sc.n, p, inst.op_seed);
  inst.clean = inst.op.apply(inst.truth);
  inst.y = inst.clean;
  if (sc.noise_level > 0.0) {
    Rng noise_rng(mix_seed(inst.op_seed, 0x6e6f697365ULL));
    Vector g = gaussian_matrix(p, 1, noise_rng);
    inst.y += sc.noise_level * inst.clean.norm() * g / g.norm();
  }
  return inst;
}

/// Weighting operators for `method` on this instance.
inline Weighting instance_weighting(const Scenario& sc, const Instance& inst, Method method) {
  if (method == Method::admira) return Weighting::none();
  rmspi::detail::require(inst.prior_u.has_value(), "instance has no priors for a prior-aware solver");
  const SideWeights& w = method == Method::rmspi ? sc.rmspi_weights : sc.grmspi_weights;
  return Weighting::with(method, build_weight_operator(*inst.prior_u, w.column, *inst.complement_u),
                         build_weight_operator(*inst.prior_v, w.row, *inst.complement_v));
}

// ---------------------------------------------------------------- trials

struct TrialResult {
  Method solver = Method::admira;
  Index rank = 0;
  double ratio = 0.0;
  Index measurements = 0;
  int trial = 0;
  std::uint64_t op_seed = 0;
  bool success = false;
  int iterations = 0;
  std::optional<int> iterations_to_success;
  StopReason stop_reason = StopReason::max_iter;
  double normalized_error = 1.0;
  double snr_db = 0.0;
  double wall_time = 0.0;
  std::string diagnostic;

  /// Equality ignoring wall time.
  bool same_outcome(const TrialResult& o) const {
    auto same = [](double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); };
    return solver == o.solver && rank == o.rank && ratio == o.ratio && measurements == o.measurements &&
           trial == o.trial && op_seed == o.op_seed && success == o.success && iterations == o.iterations &&
           iterations_to_success == o.iterations_to_success && stop_reason == o.stop_reason &&
           same(normalized_error, o.normalized_error) && same(snr_db, o.snr_db) && diagnostic == o.diagnostic;
  }
};

/// Runs one solver for at most 20 iterations; success means a final
/// normalized error <= 1e-2.
inline TrialResult run_trial(const Scenario& sc, const Instance& inst, Method method) {
  TrialResult tr;
  tr.solver = method;
  tr.rank = sc.rank;
  tr.ratio = inst.ratio;
  tr.measurements = inst.op.measurements();
  tr.trial = inst.trial;
  tr.op_seed = inst.op_seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    SolverConfig cfg;
    cfg.rank = sc.rank;
    cfg.max_iterations = kSuccessIterations;
    cfg.weighting = instance_weighting(sc, inst, method);
    const SolverRun run = solve(inst.op, inst.y, cfg);
    tr.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    tr.iterations = run.iterations;
    tr.stop_reason = run.stop_reason;
    tr.normalized_error = normalized_error(inst.truth, run.estimate);
    tr.snr_db = snr_db(inst.truth, run.estimate);
    tr.success = tr.normalized_error <= kSuccessError;
    if (tr.success) {
      for (std::size_t k = 0; k < run.trace.size(); ++k) {
        if (normalized_error(inst.truth, run.trace[k].estimate) <= kSuccessError) {
          tr.iterations_to_success = static_cast<int>(k) + 1;
          break;
        }
      }
    }
  } catch (const std::exception& e) {
    tr.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    tr.success = false;
    tr.normalized_error = std::numeric_limits<double>::quiet_NaN();
    tr.snr_db = std::numeric_limits<double>::quiet_NaN();
    tr.diagnostic = e.what();
  }
  return tr;
}

// ---------------------------------------------------------------- grids

struct Aggregate {
  Method solver = Method::admira;
  Index rank = 0;
  double ratio = 0.0;
  Index measurements = 0;
  int trials = 0;
  int successes = 0;
  double success_rate = 0.0;
  std::optional<double> mean_snr_db;        // over successful trials
  std::optional<double> median_iterations;  // iterations to success, over successful trials
};

struct Report {
  std::vector<Scenario> scenarios;
  std::vector<Aggregate> aggregates;
  std::vector<TrialResult> trials;
};

/// Default worker count: RMSPI_THREADS if set, else the hardware concurrency.
inline int default_threads() {
  if (const char* env = std::getenv("RMSPI_THREADS")) {
    try {
      const int t = std::stoi(env);
      if (t >= 1) return t;
    } catch (const std::exception&) {
    }
  }
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

/// Runs `job(i)` for i in [0, count) on `threads` workers.
template <typename Job>
void parallel_for(std::size_t count, int threads, Job&& job) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, count); ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) job(i);
    });
  for (std::thread& t : pool) t.join();
}

inline std::vector<Aggregate> aggregate(const std::vector<TrialResult>& rows) {
  std::map<std::tuple<Index, double, int>, std::vector<const TrialResult*>> groups;
  std::vector<std::tuple<Index, double, int>> order;
  for (const TrialResult& t : rows) {
    const auto key = std::make_tuple(t.rank, t.ratio, static_cast<int>(t.solver));
    if (groups.find(key) == groups.end()) order.push_back(key);
    groups[key].push_back(&t);
  }
  std::vector<Aggregate> out;
  for (const auto& key : order) {
    const auto& g = groups[key];
    Aggregate a;
    a.solver = g.front()->solver;
    a.rank = g.front()->rank;
    a.ratio = g.front()->ratio;
    a.measurements = g.front()->measurements;
    a.trials = static_cast<int>(g.size());
    double snr_sum = 0.0;
    std::vector<int> iters;
    for (const TrialResult* t : g) {
      if (!t->success) continue;
      ++a.successes;
      snr_sum += t->snr_db;
      if (t->iterations_to_success) iters.push_back(*t->iterations_to_success);
    }
    a.success_rate = static_cast<double>(a.successes) / static_cast<double>(a.trials);
    if (a.successes > 0) a.mean_snr_db = snr_sum / a.successes;
    if (!iters.empty()) {
      std::sort(iters.begin(), iters.end());
      const std::size_t m = iters.size() / 2;
      a.median_iterations = iters.size() % 2 ? iters[m] : 0.5 * (iters[m - 1] + iters[m]);
    }
    out.push_back(a);
  }
  return out;
}

/// Executes the full (ratio, trial, solver) cross product. Each trial's
/// randomness is derived from its own seeds, so the report does not depend on
/// the thread count.
inline Report run_grid(const std::vector<Scenario>& scenarios, int threads = 1) {
  struct Task {
    std::size_t scenario;
    double ratio;
    int trial;
  };
  std::vector<Task> tasks;
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    scenarios[s].validate();
    for (double ratio : scenarios[s].sampling_ratios)
      for (int t = 0; t < scenarios[s].trials; ++t) tasks.push_back({s, ratio, t});
  }
  std::vector<std::vector<TrialResult>> slots(tasks.size());
  parallel_for(tasks.size(), threads, [&](std::size_t i) {
    const Task& task = tasks[i];
    const Scenario& sc = scenarios[task.scenario];
    std::optional<Instance> inst;
    std::string failure;
    try {
      inst = generate_instance(sc, task.ratio, task.trial);
    } catch (const std::exception& e) {
      failure = e.what();
    }
    for (Method m : sc.solvers) {
      if (inst) {
        slots[i].push_back(run_trial(sc, *inst, m));
      } else {
        TrialResult tr;
        tr.solver = m;
        tr.rank = sc.rank;
        tr.ratio = task.ratio;
        tr.measurements = sc.measurements(task.ratio);
        tr.trial = task.trial;
        tr.normalized_error = std::numeric_limits<double>::quiet_NaN();
        tr.snr_db = std::numeric_limits<double>::quiet_NaN();
        tr.diagnostic = failure;
        slots[i].push_back(tr);
      }
    }
  });

  Report rep;
  rep.scenarios = scenarios;
  // Rows ordered by (scenario, solver, ratio, trial).
  for (std::size_t s = 0; s < scenarios.size(); ++s)
    for (std::size_t m = 0; m < scenarios[s].solvers.size(); ++m)
      for (std::size_t i = 0; i < tasks.size(); ++i)
        if (tasks[i].scenario == s) rep.trials.push_back(slots[i][m]);
  rep.aggregates = aggregate(rep.trials);
  return rep;
}

inline Report run_grid(const Scenario& sc, int threads = 1) { return run_grid(std::vector<Scenario>{sc}, threads); }

inline const Aggregate* find_aggregate(const Report& rep, Method m, double ratio, Index rank = -1) {
  for (const Aggregate& a : rep.aggregates)
    if (a.solver == m && a.ratio == ratio && (rank < 0 || a.rank == rank)) return &a;
  return nullptr;
}

// ---------------------------------------------------------------- RIP survey

struct RipCell {
  Index rank = 0;
  double ratio = 0.0;
  Index measurements = 0;
  RipEstimate plain;     // A over {Z_i}
  RipEstimate weighted;  // B over {Qu Z_i Qv}
};

/// p x n^2 sensing matrix with orthonormal rows scaled by n / sqrt(p), so that
/// at p = n^2 the operator is an exact isometry.
inline MeasurementOperator make_orthogonal_sensing(Index n, Index p, Rng& rng) {
  const Index dim = n * n;
  rmspi::detail::require(p >= 1 && p <= dim, "make_orthogonal_sensing: need 1 <= p <= n^2");
  const Matrix g = gaussian_matrix(dim, p, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, p);
  const double scale = static_cast<double>(n) / std::sqrt(static_cast<double>(p));
  return MeasurementOperator::dense(n, n, scale * q.transpose().eval());
}

/// Empirical isometry constants of A and of the scenario's weighted B on
/// shared samples. Priors are random subspaces of the scenario's rank; the
/// GRMSPI weights of the scenario (RMSPI weights if GRMSPI is absent) define Q.
/// Ratio 1 uses an orthonormalized full sensing matrix, other ratios Gaussian A.
inline std::vector<RipCell> rip_survey(const Scenario& sc, const std::vector<Index>& ranks,
                                       const std::vector<double>& ratios, Index samples, std::uint64_t seed) {
  rmspi::detail::require(samples >= 1, "rip_survey: need samples >= 1");
  rmspi::detail::require(sc.n >= 2 * sc.rank, "rip_survey: priors need n >= 2 * rank");
  const bool use_g = std::find(sc.solvers.begin(), sc.solvers.end(), Method::grmspi) != sc.solvers.end() ||
                     std::find(sc.solvers.begin(), sc.solvers.end(), Method::rmspi) == sc.solvers.end();
  const SideWeights& w = use_g ? sc.grmspi_weights : sc.rmspi_weights;
  std::vector<RipCell> out;
  for (Index rank : ranks) {
    rmspi::detail::require(rank >= 1 && rank <= sc.n, "rip_survey: rank out of range");
    for (double ratio : ratios) {
      rmspi::detail::require(ratio > 0.0 && ratio <= 1.0, "rip_survey: ratios must lie in (0, 1]");
      Rng rng(mix_seed(mix_seed(seed, ratio_key(ratio)), static_cast<std::uint64_t>(rank)));
      const Index p = sc.measurements(ratio);
      const MeasurementOperator a =
          p == sc.n * sc.n ? make_orthogonal_sensing(sc.n, p, rng) : make_gaussian(sc.n, p, rng);
      const SubspaceBasis pu = random_orthonormal(sc.n, sc.rank, rng);
      const SubspaceBasis pv = random_orthonormal(sc.n, sc.rank, rng);
      const WeightOperator qu = build_weight_operator(pu, w.column, rng);
      const WeightOperator qv = build_weight_operator(pv, w.row, rng);
      const WeightedOperator b(a, qu.q_inv, qv.q_inv);
      const std::vector<Matrix> zs = rip_samples(sc.n, sc.n, rank, samples, rng);
      std::vector<Matrix> weighted;
      weighted.reserve(zs.size());
      for (const Matrix& z : zs) weighted.push_back(qu.q * z * qv.q);
      out.push_back({rank, ratio, p, rip_from_samples(a, zs, rank), rip_from_samples(b, weighted, rank)});
    }
  }
  return out;
}

}  // namespace rmspi::bench
