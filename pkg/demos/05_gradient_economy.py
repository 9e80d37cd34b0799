"""Gradient-evaluation economy versus plain gradient sampling.

Plain gradient sampling needs a fresh sample of ~2n gradients at every
iterate to approximate the steepest-descent direction.  The bundle variant
keeps a compressed memory of past cuts, so a handful of samples per iterate
(here n/10) plus one gradient per model improvement is enough.
"""

from bundlegs.harness import ExperimentSpec, run_experiment

PROBLEMS = ["TiltedNorm", "ChainedLQ", "ChainedCB3II", "PartlySmooth"]

print(f"{'problem':>14} | {'bundle g_eval':>13} | {'plain GS g_eval':>15} | ratio")
print("-" * 58)
for name in PROBLEMS:
    row = {}
    for solver, opts in (("bgs", {"m": 5}), ("gs", {})):
        spec = ExperimentSpec(solver=solver, problem=name, n=50, replications=5,
                              stop_rel_err=5e-4, seed_base=0, solver_options=opts)
        _, agg = run_experiment(spec)
        row[solver] = agg["g_eval"]
    print(f"{name:>14} | {row['bgs']:>13.0f} | {row['gs']:>15.0f} "
          f"| {row['gs'] / row['bgs']:5.1f}x")
