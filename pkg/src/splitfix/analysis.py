"""Displacement-vector estimation, normal solutions and numerical checks of
the structural identities satisfied by the splitting operator."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .geometry import Box, as_vector
from .operators import ResolventOperator
from .splitting import IterationTrace, SplittingOperator, StopRule, iterate

TAIL = 10
MIN_TRACE = 20


class NoConvergenceError(RuntimeError):
    """The shifted fixed-point iteration did not settle within its budget."""

    def __init__(self, message: str, iterations: int, last_step: float, last_point: np.ndarray):
        super().__init__(message)
        self.iterations = iterations
        self.last_step = last_step
        self.last_point = last_point


@dataclass(frozen=True)
class DisplacementEstimate:
    v: np.ndarray
    lam: float
    tail_residual: float

    @property
    def v_lambda(self) -> np.ndarray:
        """Minimal displacement of ``T_lam`` itself, ``2 lam v``."""
        return 2.0 * self.lam * self.v


@dataclass(frozen=True)
class NormalSolution:
    xbar: np.ndarray
    y: np.ndarray
    residual: float
    iterations: int


def estimate_displacement(trace: IterationTrace, lam: float | None = None) -> DisplacementEstimate:
    """Estimate ``v`` from the tail of ``(x_n - x_{n+1}) / (2 lam)``.

    The last ten normalised differences are averaged; ``tail_residual`` is
    their largest deviation from that average.  Requires an averaged operator,
    so ``lam = 1`` is rejected.
    """
    lam = trace.lam if lam is None else lam
    if not (0.0 < lam < 1.0):
        raise ValueError(f"displacement estimation needs lambda in (0, 1), got {lam!r}")
    if len(trace) < MIN_TRACE:
        raise ValueError(f"trace too short ({len(trace)} rows, need {MIN_TRACE})")
    tail = trace.step_diff[-TAIL:] / (2.0 * lam)
    v = tail.mean(axis=0)
    resid = float(np.max(np.linalg.norm(tail - v, axis=1)))
    return DisplacementEstimate(v, lam, resid)


@dataclass(frozen=True)
class ScalingReport:
    lambdas: tuple
    estimates: tuple
    max_deviation: float

    @property
    def normalized(self) -> np.ndarray:
        return np.array([e.v for e in self.estimates])


def scaling_law_check(A, B, x0, lambdas, stop: StopRule | None = None) -> ScalingReport:
    """Estimate ``v_lam / (2 lam)`` for each ``lam`` and report the largest
    pairwise disagreement; the scaling law says they all coincide."""
    stop = stop or StopRule(max_iters=10_000, min_iters=MIN_TRACE)
    estimates = []
    for lam in lambdas:
        if not (0.0 < lam < 1.0):
            raise ValueError(f"lambda must lie in (0, 1), got {lam!r}")
        trace = iterate(SplittingOperator(A, B, lam), x0, stop)
        estimates.append(estimate_displacement(trace))
    dev = 0.0
    for e1, e2 in itertools.combinations(estimates, 2):
        dev = max(dev, float(np.linalg.norm(e1.v - e2.v)))
    return ScalingReport(tuple(lambdas), tuple(estimates), dev)


def solve_shifted_fixed_point(
    A: ResolventOperator,
    B: ResolventOperator,
    lam: float,
    v,
    x0,
    stop: StopRule | None = None,
    tol: float = 1e-11,
) -> NormalSolution:
    """Find ``y`` in Fix(v + T) by iterating ``x -> 2 lam v + T_lam x``.

    The normal solution is ``xbar = J_A y``.  Raises
    :class:`NoConvergenceError` when the step never drops below ``tol``,
    which is what happens when the normal problem has no solution.
    """
    if not (0.0 < lam < 1.0):
        raise ValueError(f"shifted iteration needs lambda in (0, 1), got {lam!r}")
    stop = stop or StopRule()
    split = SplittingOperator(A, B, lam)
    v = as_vector(v, split.dim, "v")
    x = as_vector(x0, split.dim, "x0")
    shift = 2.0 * lam * v
    step = np.inf
    for k in range(1, stop.max_iters + 1):
        x_next = shift + split.step(x)[0]
        if not np.all(np.isfinite(x_next)):
            raise NoConvergenceError(f"non-finite iterate at step {k}", k, np.inf, x)
        step = float(np.linalg.norm(x_next - x))
        x = x_next
        if step < tol:
            break
    else:
        raise NoConvergenceError(
            f"no fixed point of v + T found in {stop.max_iters} steps (last step {step:.3e})",
            stop.max_iters,
            step,
            x,
        )
    dr = split.with_lambda(0.5)
    residual = float(np.linalg.norm(v + dr(x) - x))
    return NormalSolution(A(x), x, residual, k)


def translation_identity_check(split: SplittingOperator, y, v, N: int) -> float:
    """``max_{n <= N} ||T^n y - (y - 2 lam n v)||`` for ``y`` in Fix(v + T)."""
    y = as_vector(y, split.dim, "y")
    v = as_vector(v, split.dim, "v")
    x = y
    worst = 0.0
    for n in range(1, N + 1):
        x = split.step(x)[0]
        worst = max(worst, float(np.linalg.norm(x - (y - 2.0 * split.lam * n * v))))
    return worst


def shadow_spread(split: SplittingOperator, y, N: int) -> float:
    """``max_{n <= N} ||J_A T^n y - J_A y||``; zero when ``y`` is in Fix(v + T)."""
    x = as_vector(y, split.dim, "y")
    x_bar = split.A(x)
    worst = 0.0
    for _ in range(N):
        x = split.step(x)[0]
        worst = max(worst, float(np.linalg.norm(split.A(x) - x_bar)))
    return worst


@dataclass(frozen=True)
class TelescopingTerms:
    """Both sides of the per-step energy identity for a pair of points.

    ``a_product`` and ``b_product`` are the Minty inner products for A and B;
    each is nonnegative by monotonicity.
    """

    lhs: float
    a_product: float
    b_product: float
    gap: float
    lam: float
    scale: float

    @property
    def rhs(self) -> float:
        return 4.0 * self.lam**2 * (self.a_product + self.b_product)

    @property
    def relative_residual(self) -> float:
        return abs(self.lhs - self.rhs) / self.scale if self.scale > 0 else abs(self.lhs - self.rhs)

    @property
    def a_slack(self) -> float:
        return self.gap - 4.0 * self.lam * self.a_product

    @property
    def b_slack(self) -> float:
        return self.gap - 4.0 * self.lam * self.b_product


def telescoping_terms(split: SplittingOperator, x, y) -> TelescopingTerms:
    x = as_vector(x, split.dim)
    y = as_vector(y, split.dim)
    lam = split.lam
    Tx, sx, tx = split.step(x)
    Ty, sy, ty = split.step(y)
    rx, ry = 2.0 * sx - x, 2.0 * sy - y
    dxy = x - y
    dT = Tx - Ty
    dI = (x - Tx) - (y - Ty)
    lhs = lam * (dxy @ dxy) - lam * (dT @ dT) - (1.0 - lam) * (dI @ dI)
    a_prod = (sx - sy) @ ((x - sx) - (y - sy))
    b_prod = (tx - ty) @ ((rx - tx) - (ry - ty))
    return TelescopingTerms(
        lhs=float(lhs),
        a_product=float(a_prod),
        b_product=float(b_prod),
        gap=float(dxy @ dxy - dT @ dT),
        lam=lam,
        scale=float(dxy @ dxy),
    )


def shadow_products(split: SplittingOperator, x, y, n: int) -> np.ndarray:
    """Minty products ``<J_A T^k x - J_A T^k y, J_{A^-1} T^k x - J_{A^-1} T^k y>``
    for ``k = 0..n-1``.  They are summable, hence tend to zero."""
    x = as_vector(x, split.dim)
    y = as_vector(y, split.dim)
    out = np.empty(n)
    for k in range(n):
        Tx, sx, _ = split.step(x)
        Ty, sy, _ = split.step(y)
        out[k] = (sx - sy) @ ((x - sx) - (y - sy))
        x, y = Tx, Ty
    return out


@dataclass(frozen=True)
class CycleViolation:
    points: np.ndarray
    duals: np.ndarray
    cyclic_sum: float
    trial: int


def cyclic_sum(points: np.ndarray, duals: np.ndarray) -> float:
    """``sum_i <x_{i+1} - x_i, x_i*>`` with indices taken cyclically."""
    return float(np.sum((np.roll(points, -1, axis=0) - points) * duals))


def cyclic_monotonicity_search(
    op: ResolventOperator,
    cycle_len: int = 3,
    trials: int = 100_000,
    sample_box: Box | None = None,
    seed: int = 0,
    threshold: float = 1e-6,
    climb_steps: int = 200,
) -> CycleViolation | None:
    """Look for a cycle on gra(op) whose cyclic sum exceeds ``threshold``.

    Graph points come from the Minty map ``z -> (Jz, z - Jz)`` with ``z`` in
    ``sample_box``.  Each trial is one candidate cycle: random restarts are
    followed by hill climbing that moves one ``z`` at a time.  Returns ``None``
    when the budget is exhausted without a violation.
    """
    if cycle_len < 3:
        raise ValueError("cycle_len must be at least 3")
    if sample_box is None:
        sample_box = Box(-5.0 * np.ones(op.dim), 5.0 * np.ones(op.dim))
    lo, hi = sample_box.lo, sample_box.hi
    width = float(np.max(hi - lo))
    rng = np.random.default_rng(seed)

    trial = 0
    while trial < trials:
        zs = rng.uniform(lo, hi, size=(cycle_len, op.dim))
        pts = np.array([op.evaluator(z) for z in zs])
        duals = zs - pts
        best = cyclic_sum(pts, duals)
        trial += 1
        sigma = 0.1 * width
        for _ in range(climb_steps):
            if best > threshold or trial >= trials:
                break
            i = rng.integers(cycle_len)
            z_new = np.clip(zs[i] + rng.normal(0.0, sigma, op.dim), lo, hi)
            p_new = op.evaluator(z_new)
            old = zs[i].copy(), pts[i].copy(), duals[i].copy()
            zs[i], pts[i], duals[i] = z_new, p_new, z_new - p_new
            val = cyclic_sum(pts, duals)
            trial += 1
            if val > best:
                best = val
                sigma *= 1.5
            else:
                zs[i], pts[i], duals[i] = old
                sigma = max(sigma * 0.8, 1e-9 * width)
        if best > threshold:
            return CycleViolation(pts.copy(), duals.copy(), best, trial)
    return None


def monotonicity_certificate(
    op: ResolventOperator,
    pairs: int = 1000,
    sample_box: Box | None = None,
    seed: int = 0,
    modulus: float = 0.0,
) -> float:
    """Smallest ``<x - y, x* - y*> - modulus ||x - y||^2`` over sampled graph pairs.

    With ``modulus = 0`` a monotone operator gives a value ``>= 0`` (up to
    rounding); a strongly monotone one stays nonnegative for its constant.
    """
    if sample_box is None:
        sample_box = Box(-5.0 * np.ones(op.dim), 5.0 * np.ones(op.dim))
    rng = np.random.default_rng(seed)
    worst = np.inf
    for _ in range(pairs):
        z1, z2 = rng.uniform(sample_box.lo, sample_box.hi, size=(2, op.dim))
        x1, x2 = op.evaluator(z1), op.evaluator(z2)
        dx = x1 - x2
        val = dx @ ((z1 - x1) - (z2 - x2)) - modulus * (dx @ dx)
        worst = min(worst, float(val))
    return worst
