"""Finite-convergence behavior on a piecewise-linear objective.

On the Goffin problem (n = 50) the bundle eventually captures every active
facet of the graph around the solution, and the next serious step jumps
essentially straight onto the minimizer: the error drops by many orders of
magnitude in a single step.
"""

import numpy as np

from bundlegs import SolverConfig, StepKind, bgs, make_problem
from bundlegs.harness import perturb_start

oracle = make_problem("Goffin")
start = perturb_start(oracle.x0, 50, np.random.default_rng([0, 1]))
config = SolverConfig(seed=0, m=100, max_outer=1000)
result = bgs.run(oracle, config, start,
                 stop_callback=lambda rec: rec.f_val - oracle.f_star <= 1e-10)

print(f"stopped: {result.stop_reason}, f - f* = {result.f - oracle.f_star:.3e}, "
      f"{result.outer_iters} outer iterations\n")

serious = [(rec.k, rec.f_val - oracle.f_star) for rec in result.trace
           if rec.kind == StepKind.SERIOUS_STEP]
print("last serious steps (k, error, drop factor):")
for (k0, e0), (k1, e1) in zip(serious[-7:], serious[-6:]):
    factor = e0 / e1 if e1 > 0 else float("inf")
    print(f"  k={k1:4d}  err={e1:11.3e}  drop {factor:9.2e}x")
