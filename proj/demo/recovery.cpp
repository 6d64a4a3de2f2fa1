// Recovers one seeded 30x30 rank-3 matrix from Gaussian measurements with
// and without subspace priors, printing the error after every iteration.
//
//   demo_recovery [ratio] [trial]

#include <cstdio>
#include <cstdlib>

#include "rmspi/rmspi.hpp"

int main(int argc, char** argv) {
  using namespace rmspi;
  using namespace rmspi::bench;

  const double ratio = argc > 1 ? std::atof(argv[1]) : 0.4;
  const int trial = argc > 2 ? std::atoi(argv[2]) : 0;

  Scenario sc = find_preset("fig1a").scenarios.front();
  const Instance inst = generate_instance(sc, ratio, trial);

  const auto angles_u = principal_angles(inst.left, *inst.prior_u);
  std::printf("n=%ld r=%ld p=%ld, column prior angles %.3f %.3f %.3f deg\n", static_cast<long>(sc.n),
              static_cast<long>(sc.rank), static_cast<long>(inst.op.measurements()), angles_u[0], angles_u[1],
              angles_u[2]);

  for (Method m : {Method::admira, Method::rmspi, Method::grmspi}) {
    SolverConfig cfg;
    cfg.rank = sc.rank;
    cfg.weighting = instance_weighting(sc, inst, m);
    const SolverRun run = solve(inst.op, inst.y, cfg);
    std::printf("%-7s", to_string(m).c_str());
    for (const IterationRecord& rec : run.trace) std::printf(" %.1e", normalized_error(inst.truth, rec.estimate));
    std::printf("\n        snr %.1f dB after %d iterations (%s)\n", snr_db(inst.truth, run.estimate), run.iterations,
                to_string(run.stop_reason).c_str());
  }
}
