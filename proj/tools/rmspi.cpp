// rmspi command line: recover / bench / rip / presets.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rmspi/io.hpp"
#include "rmspi/rmspi.hpp"

namespace {

using namespace rmspi;
using namespace rmspi::bench;

struct ScenarioSource {
  std::string preset;
  std::string file;

  void attach(CLI::App* app) {
    auto* p = app->add_option("--preset", preset, "built-in scenario (see `rmspi presets`)");
    auto* f = app->add_option("--scenario", file, "scenario JSON file")->check(CLI::ExistingFile);
    p->excludes(f);
  }

  std::vector<Scenario> load(const std::string& fallback) const {
    if (!file.empty()) return {io::load_scenario(file)};
    return find_preset(preset.empty() ? fallback : preset).scenarios;
  }
};

void emit(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
  } else {
    io::write_file(path, text);
  }
}

// ---------------------------------------------------------------- presets

struct PresetsCmd {
  bool json = false;

  void attach(CLI::App* app) {
    app->add_flag("--json", json, "print every preset as scenario JSON");
  }

  int run() const {
    if (json) {
      io::Json out = io::Json::array();
      for (const Preset& p : presets())
        for (const Scenario& s : p.scenarios) out.push_back(io::to_json(s));
      std::cout << out.dump(2) << "\n";
      return 0;
    }
    for (const Preset& p : presets()) {
      std::string ranks;
      for (const Scenario& s : p.scenarios) ranks += (ranks.empty() ? "" : ",") + std::to_string(s.rank);
      std::printf("%-8s rank %-7s %-10s %s\n", p.name.c_str(), ranks.c_str(),
                  to_string(p.scenarios.front().operator_kind).c_str(), p.description.c_str());
    }
    return 0;
  }
};

// ---------------------------------------------------------------- bench

struct BenchCmd {
  ScenarioSource source;
  std::string json_out, csv_out = "-";
  int threads = 0;
  int trials = 0;
  std::optional<std::uint64_t> seed;
  std::vector<double> ratios;

  void attach(CLI::App* app) {
    source.attach(app);
    app->add_option("--json", json_out, "write the full report (with per-trial rows) as JSON");
    app->add_option("--csv", csv_out, "write the per-(solver, ratio) table as CSV ('-' = stdout)")->capture_default_str();
    app->add_option("--threads", threads, "worker threads (default: $RMSPI_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
    app->add_option("--trials", trials, "override the trial count")->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "override the master seed");
    app->add_option("--ratios", ratios, "override the sampling ratios");
  }

  int run() const {
    std::vector<Scenario> scenarios = source.load("fig1a");
    for (Scenario& s : scenarios) {
      if (trials > 0) s.trials = trials;
      if (seed) s.master_seed = *seed;
      if (!ratios.empty()) s.sampling_ratios = ratios;
      s.validate();
    }
    const Report rep = run_grid(scenarios, threads > 0 ? threads : default_threads());
    if (!json_out.empty()) emit(json_out, io::to_json(rep).dump(2) + "\n");
    if (!csv_out.empty()) emit(csv_out, io::report_csv(rep));
    return 0;
  }
};

// ---------------------------------------------------------------- rip

struct RipCmd {
  ScenarioSource source;
  std::vector<Index> ranks{1, 2, 3};
  std::vector<double> ratios{0.2, 0.4, 0.6, 0.8, 1.0};
  Index samples = 200;
  std::uint64_t seed = 1;
  std::string json_out, csv_out = "-";

  void attach(CLI::App* app) {
    source.attach(app);
    app->add_option("--ranks", ranks, "ranks of the sampled matrices")->capture_default_str();
    app->add_option("--ratios", ratios, "sampling ratios")->capture_default_str();
    app->add_option("--samples", samples, "random low-rank samples per cell")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "survey seed")->capture_default_str();
    app->add_option("--json", json_out, "write the table as JSON");
    app->add_option("--csv", csv_out, "write the table as CSV ('-' = stdout)")->capture_default_str();
  }

  int run() const {
    const std::vector<Scenario> scenarios = source.load("fig1a");
    const auto cells = rip_survey(scenarios.front(), ranks, ratios, samples, seed);
    if (!json_out.empty()) emit(json_out, io::to_json(cells).dump(2) + "\n");
    if (!csv_out.empty()) emit(csv_out, io::rip_csv(cells));
    return 0;
  }
};

// ---------------------------------------------------------------- recover

struct RecoverCmd {
  ScenarioSource source;
  std::string solver = "grmspi";
  double ratio = 0.6;
  int trial = 0;
  std::string truth_file, prior_u_file, prior_v_file, out_file;
  std::optional<std::uint64_t> seed;
  std::optional<double> noise;
  int max_iterations = kSuccessIterations;

  void attach(CLI::App* app) {
    source.attach(app);
    app->add_option("--solver", solver, "admira | rmspi | grmspi")->capture_default_str()
        ->check(CLI::IsMember({"admira", "rmspi", "grmspi"}));
    app->add_option("--ratio", ratio, "sampling ratio p / n^2")->capture_default_str();
    app->add_option("--trial", trial, "trial index of the seeded instance")->capture_default_str()->check(CLI::NonNegativeNumber);
    app->add_option("--seed", seed, "override the master seed");
    app->add_option("--noise", noise, "override the relative noise level");
    app->add_option("--max-iter", max_iterations, "iteration cap")->capture_default_str()->check(CLI::PositiveNumber);
    auto* t = app->add_option("--truth", truth_file, "ground-truth matrix CSV (replaces the seeded matrix)")
                  ->check(CLI::ExistingFile);
    app->add_option("--prior-u", prior_u_file, "column-space prior basis CSV (n x r)")
        ->check(CLI::ExistingFile)
        ->needs(t);
    app->add_option("--prior-v", prior_v_file, "row-space prior basis CSV (n x r)")
        ->check(CLI::ExistingFile)
        ->needs(t);
    app->add_option("--out", out_file, "write the recovered matrix as CSV");
  }

  static SubspaceBasis basis_from(const Matrix& m, const char* what) {
    const SubspaceBasis b = orthonormalize(m);
    rmspi::detail::require(b.rank() == m.cols(), std::string(what) + " has dependent columns");
    return b;
  }

  // Instance built around a user-supplied truth; priors default to the
  // scenario's angle presets applied to the truth's singular subspaces.
  Instance file_instance(Scenario& sc) const {
    const Matrix truth = io::load_matrix(truth_file);
    rmspi::detail::require(truth.rows() == truth.cols(), "recover: the truth matrix must be square");
    Instance inst;
    inst.ratio = ratio;
    inst.trial = trial;
    inst.truth = truth;
    if (!prior_u_file.empty() || !prior_v_file.empty()) {
      rmspi::detail::require(!prior_u_file.empty() && !prior_v_file.empty(),
                             "recover: --prior-u and --prior-v must be given together");
      inst.prior_u = basis_from(io::load_matrix(prior_u_file), "--prior-u");
      inst.prior_v = basis_from(io::load_matrix(prior_v_file), "--prior-v");
      rmspi::detail::require(inst.prior_u->rank() == inst.prior_v->rank(), "recover: prior ranks differ");
      if (inst.prior_u->rank() != sc.rank) sc = with_rank(sc, inst.prior_u->rank());
    }
    sc.n = truth.rows();
    sc.validate();
    const SvdResult s = svd(truth);
    inst.left = s.left.leading(sc.rank);
    inst.right = s.right.leading(sc.rank);

    Rng rng(instance_seed(sc.master_seed, trial));
    if (!inst.prior_u && sc.prior_mode != PriorMode::none) {
      inst.prior_u = perturb_subspace(inst.left, sc.theta_u, rng);
      inst.prior_v = perturb_subspace(inst.right, sc.theta_v, rng);
    }
    if (inst.prior_u) {
      rmspi::detail::require(inst.prior_u->ambient_dim() == sc.n && inst.prior_v->ambient_dim() == sc.n,
                             "recover: prior bases must have one row per matrix row");
      inst.complement_u = aligned_complement_directions(*inst.prior_u, inst.left, rng);
      inst.complement_v = aligned_complement_directions(*inst.prior_v, inst.right, rng);
    }
    const Index p = sc.measurements(ratio);
    rmspi::detail::require(p >= 1 && p <= sc.n * sc.n, "recover: sampling ratio gives an infeasible measurement count");
    inst.op_seed = operator_seed(sc.master_seed, ratio, trial);
    inst.op = make_operator(sc.operator_kind, sc.n, p, inst.op_seed);
    inst.clean = inst.op.apply(truth);
    inst.y = inst.clean;
    if (sc.noise_level > 0.0) {
      Rng noise_rng(mix_seed(inst.op_seed, 0x6e6f697365ULL));
      const Vector g = gaussian_matrix(p, 1, noise_rng);
      inst.y += sc.noise_level * inst.clean.norm() * g / g.norm();
    }
    return inst;
  }

  int run() const {
    const std::vector<Scenario> all = source.load("fig1a");
    rmspi::detail::require(all.size() == 1, "recover: pick a single-rank scenario");
    Scenario sc = all.front();
    if (seed) sc.master_seed = *seed;
    if (noise) sc.noise_level = *noise;
    sc.sampling_ratios = {ratio};
    const Method method = method_from_string(solver);
    if (std::find(sc.solvers.begin(), sc.solvers.end(), method) == sc.solvers.end()) sc.solvers.push_back(method);
    sc.validate();

    const Instance inst = truth_file.empty() ? generate_instance(sc, ratio, trial) : file_instance(sc);
    SolverConfig cfg;
    cfg.rank = sc.rank;
    cfg.max_iterations = max_iterations;
    cfg.weighting = instance_weighting(sc, inst, method);
    const SolverRun run = solve(inst.op, inst.y, cfg);
    const double err = normalized_error(inst.truth, run.estimate);
    std::printf("solver            %s\n", solver.c_str());
    std::printf("n, rank           %ld, %ld\n", static_cast<long>(sc.n), static_cast<long>(sc.rank));
    std::printf("measurements      %ld (ratio %g)\n", static_cast<long>(inst.op.measurements()), ratio);
    std::printf("iterations        %d (%s)\n", run.iterations, to_string(run.stop_reason).c_str());
    std::printf("normalized_error  %.6e\n", err);
    std::printf("snr_db            %.4f\n", snr_db(inst.truth, run.estimate));
    std::printf("success           %s\n", err <= kSuccessError ? "yes" : "no");
    if (!out_file.empty()) emit(out_file, io::matrix_csv(run.estimate));
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-rank matrix recovery with subspace priors: experiments and tools"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "rmspi 0.1.0");

  PresetsCmd presets_cmd;
  BenchCmd bench_cmd;
  RipCmd rip_cmd;
  RecoverCmd recover_cmd;
  auto* presets_app = app.add_subcommand("presets", "list the built-in scenarios");
  auto* bench_app = app.add_subcommand("bench", "run a scenario grid and write a report");
  auto* rip_app = app.add_subcommand("rip", "empirical isometry constants of A and the weighted B");
  auto* recover_app = app.add_subcommand("recover", "recover one instance and print its SNR");
  presets_cmd.attach(presets_app);
  bench_cmd.attach(bench_app);
  rip_cmd.attach(rip_app);
  recover_cmd.attach(recover_app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*presets_app) return presets_cmd.run();
    if (*bench_app) return bench_cmd.run();
    if (*rip_app) return rip_cmd.run();
    return recover_cmd.run();
  } catch (const rmspi::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
}
