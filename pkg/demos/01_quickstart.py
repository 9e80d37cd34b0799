"""Quickstart: minimize a nonsmooth convex benchmark with the bundle solver.

The solver builds a local piecewise-linear model of the objective from
gradients sampled in a shrinking ball around the iterate, and turns the
model's dual simplex QP into a search direction.
"""

import numpy as np

from bundlegs import SolverConfig, bgs, make_problem

oracle = make_problem("ChainedLQ", 50)
print(f"problem: {oracle.name}, n = {oracle.dimension}, f* = {oracle.f_star:.6f}")
print(f"start:   f(x0) = {oracle.f(oracle.x0):.6f}")

config = SolverConfig(seed=0, m=10, max_outer=300)
target = oracle.f_star + 1e-4 * (abs(oracle.f_star) + 1.0)
result = bgs.run(oracle, config, stop_callback=lambda rec: rec.f_val <= target)

print(f"\nstopped: {result.stop_reason} after {result.outer_iters} outer iterations")
print(f"final:   f = {result.f:.9f}  (error {result.f - oracle.f_star:.2e})")
print(f"cost:    {result.grad_evals} gradient evaluations")

kinds = {}
for rec in result.trace:
    kinds[rec.kind.value] = kinds.get(rec.kind.value, 0) + 1
print(f"steps:   {kinds}")

x = result.x
print(f"\nsolution head: {np.round(x[:6], 4)}  (optimum is 1/sqrt(2) = {2 ** -0.5:.4f})")
