"""Shared test utilities: independent brute-force oracles and tiny fixtures."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from bundlegs.problems import ObjectiveOracle


@lru_cache(maxsize=None)
def simplex_grid(parts: int, steps: int) -> np.ndarray:
    """All weight vectors with entries k_i/steps on the simplex, shape (N, parts)."""
    if parts == 1:
        k = np.array([[steps]])
    elif parts == 2:
        a = np.arange(steps + 1)
        k = np.stack([a, steps - a], axis=1)
    elif parts == 3:
        a, b = np.meshgrid(np.arange(steps + 1), np.arange(steps + 1), indexing="ij")
        m = a + b <= steps
        k = np.stack([a[m], b[m], steps - a[m] - b[m]], axis=1)
    elif parts == 4:
        a, b, c = np.meshgrid(*(np.arange(steps + 1),) * 3, indexing="ij")
        m = a + b + c <= steps
        k = np.stack([a[m], b[m], c[m], steps - a[m] - b[m] - c[m]], axis=1)
    else:
        raise ValueError("grids with more than 4 parts are not supported")
    return k.astype(float) / steps


def _objective(lam2d: np.ndarray, G: np.ndarray, c: np.ndarray) -> np.ndarray:
    gt = lam2d @ G
    return 0.5 * np.einsum("ij,ij->i", gt, gt) + lam2d @ c


def _refine(G, c, k_best, steps_old, steps_new, radius_units=8):
    # integer grid around k_best rescaled to steps_new, within +-radius_units
    scale = steps_new // steps_old
    center = k_best * scale
    p = center.size
    offs = np.arange(-radius_units, radius_units + 1)
    grids = np.meshgrid(*(offs,) * p, indexing="ij")
    k = np.stack([g.ravel() for g in grids], axis=1) + center
    k = k[(k >= 0).all(axis=1) & (k.sum(axis=1) == steps_new)]
    lam = k.astype(float) / steps_new
    vals = _objective(lam, G, c)
    j = int(np.argmin(vals))
    return float(vals[j]), k[j]


def grid_min_objective(atoms: np.ndarray, errors: np.ndarray, penalty_scale: float,
                       step: float = 1e-3) -> float:
    """Brute-force simplex grid minimum of 0.5*||lam G||^2 + scale * lam.e.

    For up to 3 atoms this is the full Cartesian grid at the requested step.
    For 4 atoms a full grid at step 1e-3 is ~1.7e8 points, so a full coarse
    grid (step 0.02) is refined twice down to the requested resolution; the
    objective is convex, so the minimizer stays within a cell of the coarse
    optimum and the refinement windows cover it with margin.
    """
    G = np.atleast_2d(np.asarray(atoms, float))
    c = penalty_scale * np.asarray(errors, float).ravel()
    p = G.shape[0]
    if p <= 3:
        lam = simplex_grid(p, round(1.0 / step))
        return float(_objective(lam, G, c).min())
    lam = simplex_grid(4, 50)
    vals = _objective(lam, G, c)
    j = int(np.argmin(vals))
    best, k_best = float(vals[j]), np.round(lam[j] * 50).astype(int)
    v1, k1 = _refine(G, c, k_best, 50, 250)
    v2, _ = _refine(G, c, k1, 250, 1000)
    return min(best, v1, v2)


def quadratic_oracle(n: int = 2) -> ObjectiveOracle:
    """Smooth strongly convex f(x) = ||x||^2 with minimum 0 at the origin."""
    return ObjectiveOracle(
        name="sq",
        dimension=n,
        f_star=0.0,
        x0=np.ones(n),
        eval_f=lambda x: float(x @ x),
        eval_grad=lambda x: 2.0 * x,
    )


def abs_oracle() -> ObjectiveOracle:
    """One-dimensional f(x) = |x|."""
    return ObjectiveOracle(
        name="abs1d",
        dimension=1,
        f_star=0.0,
        x0=np.array([1.0]),
        eval_f=lambda x: float(abs(x[0])),
        eval_grad=lambda x: np.array([np.sign(x[0])]),
        smooth_at=lambda x: bool(abs(x[0]) > 1e-12),
    )


def relative_err(f_val: float, f_star: float) -> float:
    return (f_val - f_star) / (abs(f_star) + 1.0)
