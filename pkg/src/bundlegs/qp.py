"""Convex quadratic minimization over the probability simplex.

Solves

    min_lam  0.5 * || sum_j lam_j g_j ||^2  +  penalty_scale * sum_j lam_j e_j
    s.t.     lam >= 0,  sum_j lam_j = 1

for a small dense set of atoms g_j with attached nonnegative weights e_j.
The search-direction subproblems of the bundle solver and the minimum-norm
hull point of the gradient-sampling baseline are both instances of this
problem (the latter with all e_j = 0 and unit scale).

The solver is a primal active-set method on the simplex with a projected
gradient fallback; instances here are tiny and dense, so no sparse or
large-scale machinery is used.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

_NEG_ERR_TOL = 1e-12


@dataclass
class SimplexQpInstance:
    """Atoms (one per row), aligned nonnegative weights, and the penalty scale."""

    atoms: np.ndarray
    errors: np.ndarray
    penalty_scale: float

    def __post_init__(self) -> None:
        atoms = np.atleast_2d(np.asarray(self.atoms, dtype=float))
        errors = np.asarray(self.errors, dtype=float).ravel()
        if atoms.shape[0] == 0:
            raise ValueError("instance needs at least one atom")
        if errors.shape[0] != atoms.shape[0]:
            raise ValueError(
                f"errors length {errors.shape[0]} does not match atom count {atoms.shape[0]}"
            )
        if not (np.all(np.isfinite(atoms)) and np.all(np.isfinite(errors))):
            raise ValueError("non-finite input")
        if float(errors.min(initial=0.0)) < -_NEG_ERR_TOL:
            raise ValueError(f"negative error {errors.min()} below -{_NEG_ERR_TOL}")
        errors = np.where(errors < 0.0, 0.0, errors)
        if not self.penalty_scale > 0:
            raise ValueError("penalty_scale must be positive")
        self.atoms = atoms
        self.errors = errors
        self.penalty_scale = float(self.penalty_scale)

    @property
    def n_atoms(self) -> int:
        return self.atoms.shape[0]

    @property
    def dimension(self) -> int:
        return self.atoms.shape[1]

    def to_text(self) -> str:
        """Plain-text dump: a header line, then one `e g_1 ... g_n` line per atom."""
        lines = [f"simplex-qp v1 atoms={self.n_atoms} dim={self.dimension} "
                 f"penalty_scale={self.penalty_scale!r}"]
        for e, g in zip(self.errors, self.atoms):
            lines.append(" ".join([repr(float(e))] + [repr(float(v)) for v in g]))
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_text(text: str) -> "SimplexQpInstance":
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        header = dict(tok.split("=") for tok in lines[0].split()[2:])
        rows = [[float(v) for v in ln.split()] for ln in lines[1:]]
        data = np.asarray(rows)
        return SimplexQpInstance(data[:, 1:], data[:, 0], float(header["penalty_scale"]))


@dataclass
class SimplexQpSolution:
    lam: np.ndarray
    g_tilde: np.ndarray
    e_tilde: float
    w: float
    kkt_residual: float
    iterations: int
    converged: bool


def _project_simplex(v: np.ndarray) -> np.ndarray:
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    rho = np.nonzero(u * np.arange(1, v.size + 1) > css)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.clip(v - theta, 0.0, None)


def _solve_restricted(H: np.ndarray, c: np.ndarray, mask: np.ndarray, delta: float) -> np.ndarray:
    # equality-constrained subproblem on the working set:
    #   (H + delta I) y - mu 1 = -c,  1' y = 1
    idx = np.flatnonzero(mask)
    k = idx.size
    kkt = np.zeros((k + 1, k + 1))
    kkt[:k, :k] = H[np.ix_(idx, idx)]
    kkt[:k, :k][np.diag_indices(k)] += delta
    kkt[:k, k] = -1.0
    kkt[k, :k] = 1.0
    rhs = np.concatenate([-c[idx], [1.0]])
    try:
        sol = np.linalg.solve(kkt, rhs)
    except np.linalg.LinAlgError:
        sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
    if not np.all(np.isfinite(sol)):
        sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
    return sol[:k]


def _projected_gradient(H: np.ndarray, c: np.ndarray, lam0: np.ndarray,
                        stop_tol: float, max_iter: int = 20000) -> tuple[np.ndarray, int]:
    # FISTA with simplex projection; polish path when the active set stalls.
    lip = max(float(np.linalg.norm(H, ord="fro")), 1e-12)
    x = lam0.copy()
    y = lam0.copy()
    t = 1.0
    for it in range(1, max_iter + 1):
        x_new = _project_simplex(y - (H @ y + c) / lip)
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        y = x_new + (t - 1.0) / t_new * (x_new - x)
        x, t = x_new, t_new
        if it % 50 == 0:
            grad = H @ x + c
            if float(x @ grad) - float(grad.min()) <= stop_tol:
                return x, it
    return x, max_iter


def solve_simplex_qp(
    instance: SimplexQpInstance,
    tol: float = 1e-10,
    warm_start: np.ndarray | None = None,
    max_iter: int | None = None,
    dump_to: str | Path | None = None,
) -> SimplexQpSolution:
    """Return the global minimizer over the simplex.

    `tol` bounds the accepted KKT violation (scaled by the multiplier
    magnitude for badly scaled data).  `warm_start` is any point on the
    simplex; the result does not depend on it beyond round-off.  `dump_to`
    writes the instance in the documented text form before solving.
    """
    if dump_to is not None:
        Path(dump_to).write_text(instance.to_text())
    G = instance.atoms
    e = instance.errors
    p = instance.n_atoms
    c = instance.penalty_scale * e
    H = G @ G.T
    delta = 1e-14 * max(1.0, float(H.diagonal().max()))
    if max_iter is None:
        max_iter = max(20, 10 * p * p)

    lam = None
    if warm_start is not None:
        ws = np.clip(np.asarray(warm_start, dtype=float).ravel(), 0.0, None)
        s = ws.sum()
        if ws.size == p and np.all(np.isfinite(ws)) and s > 0:
            lam = ws / s
    if lam is None:
        j0 = int(np.argmin(0.5 * H.diagonal() + c))
        lam = np.zeros(p)
        lam[j0] = 1.0
    active = lam > 0.0

    stop_tol = lambda mu: tol * max(1.0, abs(mu))  # noqa: E731
    iterations = 0
    converged = False
    while iterations < max_iter:
        iterations += 1
        y = _solve_restricted(H, c, active, delta)
        if y.min(initial=0.0) >= -1e-12:
            lam = np.zeros(p)
            lam[active] = np.clip(y, 0.0, None)
            grad = H @ lam + c
            mu = float(lam @ grad)
            j = int(np.argmin(grad))
            if mu - float(grad[j]) <= stop_tol(mu):
                converged = True
                break
            if active[j]:
                break  # numerical stall; polish below
            active[j] = True
        else:
            idx = np.flatnonzero(active)
            cur = lam[idx]
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(y < 0.0, cur / (cur - y), np.inf)
            b = int(np.argmin(ratios))
            step = float(ratios[b])
            cur = cur + step * (y - cur)
            cur[b] = 0.0
            lam[:] = 0.0
            lam[idx] = np.clip(cur, 0.0, None)
            active[idx[b]] = False
            if not active.any():  # degenerate; restart from best vertex
                j0 = int(np.argmin(0.5 * H.diagonal() + c))
                lam[:] = 0.0
                lam[j0] = 1.0
                active[j0] = True

    if not converged:
        grad = H @ lam + c
        mu = float(lam @ grad)
        if mu - float(grad.min()) > stop_tol(mu):
            lam, pg_iters = _projected_gradient(H, c, lam, stop_tol(mu))
            iterations += pg_iters
        grad = H @ lam + c
        mu = float(lam @ grad)
        converged = mu - float(grad.min()) <= stop_tol(mu)

    lam = np.clip(lam, 0.0, None)
    lam /= lam.sum()
    g_tilde = lam @ G
    e_tilde = float(lam @ e)
    w = 0.5 * float(g_tilde @ g_tilde) + instance.penalty_scale * e_tilde
    grad = H @ lam + c
    mu = float(lam @ grad)
    residual = max(0.0, mu - float(grad.min()))
    support = lam > tol
    if support.any():
        residual = max(residual, float(np.abs(grad[support] - mu).max()))
    return SimplexQpSolution(
        lam=lam,
        g_tilde=g_tilde,
        e_tilde=e_tilde,
        w=w,
        kkt_residual=residual,
        iterations=iterations,
        converged=converged,
    )
