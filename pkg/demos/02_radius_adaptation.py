"""How the sampling radius adapts when the initial choice is too large.

Run the MAXQ problem with an oversized initial radius (4.0) and a small one
(1/8).  Null steps halve the radius whenever a new linearization cannot
improve the model; with the oversized radius those cuts happen early, after
which the method descends to the target accuracy.
"""

import numpy as np

from bundlegs import SolverConfig, bgs, make_problem
from bundlegs.harness import perturb_start

oracle = make_problem("MAXQ")
start = perturb_start(oracle.x0, 20, np.random.default_rng([0, 1]))

for eps0 in (4.0, 0.125):
    config = SolverConfig(seed=0, m=40, eps0=eps0, max_outer=1000)
    result = bgs.run(oracle, config, start,
                     stop_callback=lambda rec: rec.f_val <= 1e-8)
    nulls = [rec for rec in result.trace if rec.kind.value == "null"]
    print(f"\neps0 = {eps0}: reached f = {result.f:.2e} in "
          f"{result.outer_iters} outer iterations, {result.grad_evals} gradient evals")
    print(f"  radius cuts: {len(nulls)} "
          f"(final radius {result.trace[-1].radius:.4g})")
    print("  first records (k, kind, f, radius):")
    for rec in result.trace[:12]:
        print(f"    k={rec.k:3d}  {rec.kind.value:8s} f={rec.f_val:12.5g} "
              f"eps={rec.radius:.4g}")
