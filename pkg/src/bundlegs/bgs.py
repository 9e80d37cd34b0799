"""Bundle solver whose polyhedral model is built by gradient sampling.

Each outer iteration samples m points from the ball B(x_k, eps_k), builds the
polyhedral model from the gradients there (plus the gradient at x_k itself),
and solves the dual search-direction subproblem over the simplex.  If the
resulting direction fails the sufficient-decrease test, an inner improvement
process either enriches the model one linearization at a time, compressing
the old constraints into a single aggregated pair via the dual multipliers,
or gives up and shrinks the sampling radius (a null step).
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .problems import EvaluationError, GradientMode, ObjectiveOracle, gradient
from .qp import SimplexQpInstance, SimplexQpSolution, solve_simplex_qp
from .sampling import sample_ball


class ConvexityError(RuntimeError):
    """A linearization error came out significantly negative."""


class QpFailureError(RuntimeError):
    """A search-direction subproblem did not reach its tolerance."""


class StepKind(enum.Enum):
    SERIOUS_STEP = "serious"
    NULL_STEP = "null"
    INNER_ENRICH = "enrich"
    CONVERGED = "converged"


@dataclass
class SolverConfig:
    """All user parameters of the solver.

    The defaults are the safe practical values: eps0=1, mu=0.5, alpha=0.5,
    gamma=0.9, beta=1e-6, theta=0.9.  When `m` is None it resolves to 2n for
    n <= 20 and ceil(n/10) otherwise.
    """

    eps0: float = 1.0
    mu: float = 0.5
    m: Optional[int] = None
    beta: float = 1e-6
    sigma: float = 1e-8
    alpha: float = 0.5
    gamma: float = 0.9
    theta: float = 0.9
    eps_tol: float = 1e-16
    seed: int = 0
    max_outer: int = 1000
    min_radius: float = 1e-12
    differentiability_checks: bool = False
    inner_limit_factor: int = 500
    qp_tol: float = 1e-10
    collect_diagnostics: bool = False

    def __post_init__(self) -> None:
        if not self.eps0 > 0:
            raise ValueError("eps0 must be positive")
        if not 0.0 < self.mu < 1.0:
            raise ValueError("mu must be in (0, 1)")
        if self.m is not None and self.m < 0:
            raise ValueError("m must be nonnegative")
        if not 0.0 < self.beta < 1.0:
            raise ValueError("beta must be in (0, 1)")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if not 0.0 < self.gamma < 1.0:
            raise ValueError("gamma must be in (0, 1)")
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError("theta must be in [0, 1]")
        if self.eps_tol < 0:
            raise ValueError("eps_tol must be nonnegative")
        if not self.min_radius > 0:
            raise ValueError("min_radius must be positive")
        if self.max_outer < 1:
            raise ValueError("max_outer must be at least 1")

    def resolve_m(self, n: int) -> int:
        if self.m is not None:
            return int(self.m)
        return 2 * n if n <= 20 else math.ceil(n / 10)


@dataclass
class BundleAtom:
    """One linearization: its source point, gradient there, and error at x_k."""

    source: np.ndarray
    grad: np.ndarray
    err: float


@dataclass
class AggregateAtom:
    """The compressed pair (g_tilde, e_tilde) produced by aggregation."""

    g_tilde: np.ndarray
    e_tilde: float


@dataclass
class StepOutcome:
    """Direction and the scalars derived from the dual solution.

    Identities: direction = -eps^alpha * g_tilde, z = -eps^alpha*||g_tilde||^2
    - e_tilde <= 0, v = 0.5*||g_tilde||^2 + e_tilde (the stationarity
    measure), w = 0.5*||g_tilde||^2 + e_tilde/eps^alpha (the dual optimal
    value, non-increasing along the inner loop).
    """

    kind: Optional[StepKind]
    direction: np.ndarray
    z: float
    v: float
    w: float


@dataclass
class StepDiagnostics:
    """Optional per-record payload for auditing the dual identities."""

    x_k: np.ndarray
    f_xk: float
    g_tilde: np.ndarray
    e_tilde: float
    d: np.ndarray
    z: float
    eps_alpha: float
    grad_xk: np.ndarray
    new_atom_grad: Optional[np.ndarray] = None
    new_atom_err: Optional[float] = None
    d_prev: Optional[np.ndarray] = None
    z_prev: Optional[float] = None
    model_z_max: Optional[float] = None


@dataclass
class IterationTrace:
    """Per-step record: outer index k, inner index i, f value, v, w, radius, kind."""

    k: int
    i: int
    f_val: float
    v: float
    w: float
    radius: float
    kind: StepKind
    grad_evals_cum: int
    diag: Optional[StepDiagnostics] = None


@dataclass
class RunResult:
    x: np.ndarray
    f: float
    trace: list
    stop_reason: str
    outer_iters: int
    grad_evals: int


# ---------------------------------------------------------------------------
# elementary operations
# ---------------------------------------------------------------------------


def linearization_error(
    oracle: ObjectiveOracle,
    x_k: np.ndarray,
    f_xk: float,
    s: np.ndarray,
    mode: GradientMode | None = None,
    strict: bool = True,
) -> float:
    """Gap at x_k between f and the tangent plane built at s; >= 0 for convex f.

    Tiny negative values from round-off are clamped to zero.  In strict mode a
    value below the floating-point noise floor raises ConvexityError; with
    inexact gradients (strict=False) any negative value is clamped.
    """
    mode = mode or GradientMode.exact()
    x_k = np.asarray(x_k, dtype=float)
    s = np.asarray(s, dtype=float)
    f_s = oracle.f(s)
    g_s = gradient(oracle, mode, s)
    return _lin_err(f_xk, f_s, g_s, x_k, s, strict=strict)


def _lin_err(f_xk: float, f_s: float, g_s: np.ndarray, x_k: np.ndarray,
             s: np.ndarray, strict: bool) -> float:
    plane = f_s + float(g_s @ (x_k - s))
    e = f_xk - plane
    if e >= 0.0:
        return e
    if not strict:
        return 0.0
    # noise floor scaled by the magnitudes entering the cancellation
    floor = 1e-12 * max(1.0, abs(f_xk), abs(f_s) + abs(float(g_s @ (x_k - s))))
    if e < -floor:
        raise ConvexityError(
            f"linearization error {e} below -{floor}: non-convex or broken oracle"
        )
    return 0.0


def build_initial_model(
    oracle: ObjectiveOracle,
    x_k: np.ndarray,
    eps_k: float,
    m: int,
    rng: np.random.Generator,
    f_xk: float | None = None,
    mode: GradientMode | None = None,
) -> list[BundleAtom]:
    """Atom 0 at x_k (error 0) plus m sampled atoms; m+1 gradient evaluations."""
    mode = mode or GradientMode.exact()
    strict = mode.kind == "exact"
    x_k = np.asarray(x_k, dtype=float)
    if f_xk is None:
        f_xk = oracle.f(x_k)
    atoms = [BundleAtom(x_k.copy(), gradient(oracle, mode, x_k), 0.0)]
    points = sample_ball(x_k, eps_k, m, rng)
    for s in points:
        for attempt in range(2):
            try:
                g_s = gradient(oracle, mode, s)
                e_s = _lin_err(f_xk, oracle.f(s), g_s, x_k, s, strict=strict)
                break
            except EvaluationError:
                if attempt == 1:
                    raise
                s = sample_ball(x_k, eps_k, 1, rng)[0]
        atoms.append(BundleAtom(np.asarray(s, dtype=float), g_s, e_s))
    return atoms


def _step_from_pair(g: np.ndarray, e: float, eps_k: float, alpha: float) -> StepOutcome:
    scale = eps_k ** alpha
    gg = float(g @ g)
    return StepOutcome(
        kind=None,
        direction=-scale * g,
        z=-scale * gg - e,
        v=0.5 * gg + e,
        w=0.5 * gg + e / scale,
    )


def direction_from_dual(solution: SimplexQpSolution, eps_k: float, alpha: float) -> StepOutcome:
    """Recover (d, z, v, w) from the dual solution via the duality identities."""
    return _step_from_pair(solution.g_tilde, solution.e_tilde, eps_k, alpha)


def sufficient_decrease(
    oracle: ObjectiveOracle,
    x_k: np.ndarray,
    f_xk: float,
    d: np.ndarray,
    z: float,
    beta: float,
    f_trial: float | None = None,
) -> bool:
    """True iff f(x_k + d) - f(x_k) <= beta * z."""
    if f_trial is None:
        f_trial = oracle.f(np.asarray(x_k, dtype=float) + np.asarray(d, dtype=float))
    return f_trial - f_xk <= beta * z


def fdp_perturb(
    oracle: ObjectiveOracle,
    x: np.ndarray,
    d: np.ndarray,
    beta: float,
    z: float,
    sigma: float,
    mode: str,
    rng: np.random.Generator,
    checks_enabled: bool = True,
    max_halvings: int = 64,
) -> np.ndarray:
    """Differentiable perturbation of x + d that preserves the step's status.

    mode "FDP1" requires (and preserves) f(x+d) - f(x) <= beta*z on entry;
    "FDP2" the strict opposite.  x_hat is resampled from B(x, sigma_hat) with
    sigma_hat halved per trial until x_hat + d is a differentiable point with
    the mode's inequality intact, so the output stays within sigma of x + d.
    With checks disabled this returns x + d unchanged.
    """
    x = np.asarray(x, dtype=float)
    d = np.asarray(d, dtype=float)
    if not checks_enabled:
        return x + d
    if mode not in ("FDP1", "FDP2"):
        raise ValueError(f"unknown perturbation mode {mode!r}")
    f_x = oracle.f(x)

    def acceptable(point: np.ndarray) -> bool:
        if not oracle.differentiable_at(point):
            return False
        gap = oracle.f(point) - f_x
        return gap <= beta * z if mode == "FDP1" else gap > beta * z

    x_hat = x
    sigma_hat = sigma
    for _ in range(max_halvings):
        if acceptable(x_hat + d):
            return x_hat + d
        x_hat = sample_ball(x, sigma_hat, 1, rng)[0]
        sigma_hat *= 0.5
    warnings.warn(f"{mode}: no acceptable perturbation within {max_halvings} trials")
    return x_hat + d


def improvement_criterion(e_new: float, agg: AggregateAtom, f_gap: float, gamma: float) -> bool:
    """True iff the new linearization should enrich the model.

    Either its error is small against the aggregated error (e_new <= gamma *
    e_tilde), or the function gap at the trial point is within the model's
    own measure (|f(x_k+d) - f(x_k)| <= 0.5*||g_tilde||^2 + e_tilde).  False
    means a null step: shrink the radius and rebuild.
    """
    if e_new <= gamma * agg.e_tilde:
        return True
    return f_gap <= 0.5 * float(agg.g_tilde @ agg.g_tilde) + agg.e_tilde


def select_indices(lam: np.ndarray, theta: float, forced: tuple[int, ...] = ()) -> list[int]:
    """Positions of the largest multipliers with cumulative weight up to theta.

    Weights are normalized by the total of `lam`, so theta=1 keeps every
    position and theta=0 keeps none.  `forced` positions are always included.
    Ties sort by lowest position.
    """
    lam = np.asarray(lam, dtype=float)
    total = float(lam.sum())
    keep: set[int] = set(int(j) for j in forced)
    if total > 0.0:
        order = sorted(range(lam.size), key=lambda j: (-lam[j], j))
        cum = 0.0
        slack = 1e-12 * max(1.0, total)
        for j in order:
            cum += float(lam[j])
            if cum <= theta * total + slack:
                keep.add(j)
            else:
                break
    return sorted(keep)


def aggregate(lam: np.ndarray, atoms: list[BundleAtom], prior: AggregateAtom | None = None) -> AggregateAtom:
    """Convex combination of the atoms (and the prior aggregate, if present).

    With a prior, `lam` carries one trailing weight for it:
    g_tilde = sum_j lam_j grad_j + lam[-1] * prior.g_tilde, same for e_tilde.
    """
    lam = np.asarray(lam, dtype=float)
    expected = len(atoms) + (1 if prior is not None else 0)
    if lam.size != expected:
        raise ValueError(f"lambda length {lam.size} does not match {expected} columns")
    g = np.zeros_like(atoms[0].grad) if atoms else np.zeros_like(prior.g_tilde)
    e = 0.0
    for w, atom in zip(lam, atoms):
        g = g + w * atom.grad
        e += w * atom.err
    if prior is not None:
        g = g + lam[-1] * prior.g_tilde
        e += lam[-1] * prior.e_tilde
    return AggregateAtom(g_tilde=g, e_tilde=max(e, 0.0))


# ---------------------------------------------------------------------------
# the full solver
# ---------------------------------------------------------------------------


def run(
    oracle: ObjectiveOracle,
    config: SolverConfig,
    x0: np.ndarray | None = None,
    grad_mode: GradientMode | None = None,
    stop_callback: Optional[Callable[[IterationTrace], bool]] = None,
) -> RunResult:
    """Minimize the oracle's objective from x0.

    Stops when the stationarity measure v falls to config.eps_tol, the outer
    budget runs out, the sampling radius drops below config.min_radius, or
    `stop_callback` (called with every emitted trace record) returns True.
    Every gradient evaluation is counted in the trace.
    """
    mode = grad_mode or GradientMode.exact()
    strict = mode.kind == "exact"
    checks = config.differentiability_checks
    x = np.array(x0 if x0 is not None else oracle.x0, dtype=float)
    if x.size != oracle.dimension or not np.all(np.isfinite(x)):
        raise ValueError("x0 must be a finite vector of the oracle's dimension")
    n = oracle.dimension
    m = config.resolve_m(n)
    rng = np.random.default_rng(config.seed)
    eps = float(config.eps0)
    g_evals = 0
    trace: list[IterationTrace] = []
    inner_cap = config.inner_limit_factor * (m + 1)
    stop_reason: str | None = None

    def emit(k, i, f_val, step, kind, diag=None) -> bool:
        rec = IterationTrace(
            k=k, i=i, f_val=f_val, v=step.v, w=step.w, radius=eps,
            kind=kind, grad_evals_cum=g_evals, diag=diag,
        )
        trace.append(rec)
        return bool(stop_callback(rec)) if stop_callback is not None else False

    def make_diag(step, agg, f_xk_val, grad_xk, **extra):
        if not config.collect_diagnostics:
            return None
        return StepDiagnostics(
            x_k=x.copy(), f_xk=f_xk_val, g_tilde=agg.g_tilde.copy(),
            e_tilde=agg.e_tilde, d=step.direction.copy(), z=step.z,
            eps_alpha=eps ** config.alpha, grad_xk=grad_xk.copy(), **extra,
        )

    f_x = oracle.f(x)
    outer = 0
    k = 0
    while stop_reason is None:
        if k >= config.max_outer:
            stop_reason = "budget"
            break
        if eps < config.min_radius:
            stop_reason = "radius_floor"
            break
        outer += 1

        pool = {j: atom for j, atom in enumerate(
            build_initial_model(oracle, x, eps, m, rng, f_xk=f_x, mode=mode))}
        g_evals += m + 1
        grad_xk = pool[0].grad
        scale = eps ** (-config.alpha)

        inst = SimplexQpInstance(
            np.array([pool[j].grad for j in range(m + 1)]),
            np.array([pool[j].err for j in range(m + 1)]),
            scale,
        )
        sol = solve_simplex_qp(inst, tol=config.qp_tol)
        if not sol.converged:
            raise QpFailureError(
                f"initial subproblem at k={k} stalled (residual {sol.kkt_residual:.3e})")
        agg = AggregateAtom(sol.g_tilde.copy(), max(float(sol.e_tilde), 0.0))
        step = direction_from_dual(sol, eps, config.alpha)
        J = select_indices(sol.lam, config.theta, forced=(0,))
        lam_by_label = {j: float(sol.lam[j]) for j in range(m + 1)}
        next_label = m + 1

        i = 0
        while True:
            if i > inner_cap:
                # near-stationary stall: w decreases like w^2 per enrichment,
                # which can underflow practical budgets; stop with the iterate
                warnings.warn(
                    f"improvement process exceeded {inner_cap} steps at k={k} "
                    f"(v={step.v:.3e}, w={step.w:.3e}, eps={eps:.3e}); stopping")
                stop_reason = "inner_limit"
                break
            if step.v <= config.eps_tol:
                step.kind = StepKind.CONVERGED
                emit(k, i, f_x, step, StepKind.CONVERGED,
                     make_diag(step, agg, f_x, grad_xk))
                stop_reason = "converged"
                break

            trial = x + step.direction
            f_trial = oracle.f(trial)
            if f_trial - f_x <= config.beta * step.z:
                # serious step: radius unchanged
                step.kind = StepKind.SERIOUS_STEP
                if checks:
                    x_next = fdp_perturb(oracle, x, step.direction, config.beta,
                                         step.z, config.sigma, "FDP1", rng,
                                         checks_enabled=True)
                    f_next = f_trial if np.array_equal(x_next, trial) else oracle.f(x_next)
                else:
                    x_next, f_next = trial, f_trial
                diag = make_diag(step, agg, f_x, grad_xk)
                hit = emit(k, i, f_next, step, StepKind.SERIOUS_STEP, diag)
                x, f_x = x_next, f_next
                if hit:
                    stop_reason = "callback"
                break

            # improvement process: new auxiliary point and linearization
            if checks:
                s_new = fdp_perturb(oracle, x, step.direction, config.beta,
                                    step.z, config.sigma, "FDP2", rng,
                                    checks_enabled=True)
                f_s = f_trial if np.array_equal(s_new, trial) else oracle.f(s_new)
            else:
                s_new, f_s = trial, f_trial
            g_new = gradient(oracle, mode, s_new)
            g_evals += 1
            e_new = _lin_err(f_x, f_s, g_new, x, s_new, strict=strict)
            f_gap = abs(f_trial - f_x)

            if not improvement_criterion(e_new, agg, f_gap, config.gamma):
                # null step: shrink the sampling region, keep the iterate
                step.kind = StepKind.NULL_STEP
                hit = emit(k, i, f_x, step, StepKind.NULL_STEP,
                           make_diag(step, agg, f_x, grad_xk))
                eps = config.mu * eps
                if hit:
                    stop_reason = "callback"
                break

            pool[next_label] = BundleAtom(np.asarray(s_new, dtype=float), g_new, e_new)
            labels = sorted(set(J) | {next_label})
            d_prev, z_prev = step.direction, step.z
            warm = np.array([lam_by_label.get(l, 0.0) for l in labels] + [0.0])
            warm[-1] = max(0.0, 1.0 - warm.sum())
            inst = SimplexQpInstance(
                np.vstack([np.array([pool[l].grad for l in labels]), agg.g_tilde]),
                np.array([pool[l].err for l in labels] + [agg.e_tilde]),
                scale,
            )
            sol = solve_simplex_qp(inst, tol=config.qp_tol, warm_start=warm)
            if not sol.converged:
                raise QpFailureError(
                    f"subproblem at k={k}, i={i} stalled (residual {sol.kkt_residual:.3e})")
            agg = aggregate(sol.lam, [pool[l] for l in labels], prior=agg)
            step = _step_from_pair(agg.g_tilde, agg.e_tilde, eps, config.alpha)
            step.kind = StepKind.INNER_ENRICH
            atom_lams = sol.lam[:-1]
            J = [labels[p] for p in select_indices(atom_lams, config.theta)]
            J = sorted(set(J) | {0})
            lam_by_label = {l: float(v) for l, v in zip(labels, atom_lams)}

            diag = None
            if config.collect_diagnostics:
                model_z = max(
                    max(float(pool[l].grad @ step.direction) - pool[l].err for l in labels),
                    float(inst.atoms[-1] @ step.direction) - float(inst.errors[-1]),
                )
                diag = make_diag(step, agg, f_x, grad_xk,
                                 new_atom_grad=g_new.copy(), new_atom_err=e_new,
                                 d_prev=d_prev.copy(), z_prev=z_prev,
                                 model_z_max=model_z)
            hit = emit(k, i, f_x, step, StepKind.INNER_ENRICH, diag)
            if hit:
                stop_reason = "callback"
                break
            next_label += 1
            i += 1

        k += 1

    return RunResult(x=x, f=f_x, trace=trace,
                     stop_reason=stop_reason or "budget",
                     outer_iters=outer, grad_evals=g_evals)
