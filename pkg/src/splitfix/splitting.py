"""Relaxed Douglas-Rachford / Peaceman-Rachford splitting operator and its
iteration."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import as_vector
from .operators import ResolventOperator

STALL_COUNT = 10


class DivergenceError(ArithmeticError):
    """An iterate became non-finite."""

    def __init__(self, step: int, message: str | None = None):
        self.step = step
        super().__init__(message or f"non-finite iterate at step {step}")


@dataclass(frozen=True)
class SplittingOperator:
    """``T_lam = (1 - lam) Id + lam R_B R_A`` for ``lam`` in (0, 1].

    ``lam = 1/2`` is classical Douglas-Rachford, ``lam = 1`` Peaceman-Rachford.
    """

    A: ResolventOperator
    B: ResolventOperator
    lam: float = 0.5

    def __post_init__(self):
        if not (0.0 < self.lam <= 1.0):
            raise ValueError(f"lambda must lie in (0, 1], got {self.lam!r}")
        if self.A.dim != self.B.dim:
            raise ValueError(f"operator dimensions differ: {self.A.dim} vs {self.B.dim}")

    @property
    def dim(self) -> int:
        return self.A.dim

    def with_lambda(self, lam: float) -> "SplittingOperator":
        return SplittingOperator(self.A, self.B, lam)

    def step(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """One application on a validated vector: returns ``(Tx, J_A x, J_B R_A x)``."""
        s = self.A.evaluator(x)
        t = self.B.evaluator(2.0 * s - x)
        return x - 2.0 * self.lam * (s - t), s, t

    def __call__(self, x) -> np.ndarray:
        return self.step(as_vector(x, self.dim))[0]


def evaluate_T(split: SplittingOperator, x) -> np.ndarray:
    return split(x)


@dataclass(frozen=True)
class StopRule:
    """Stop once the shadow moves less than ``shadow_tol`` for 10 consecutive
    steps, or after ``max_iters`` steps.  No shadow stop before ``min_iters``."""

    max_iters: int = 100_000
    shadow_tol: float = 1e-10
    min_iters: int = 0

    def __post_init__(self):
        if int(self.max_iters) != self.max_iters or self.max_iters <= 0:
            raise ValueError(f"max_iters must be a positive integer, got {self.max_iters!r}")
        if not self.shadow_tol > 0:
            raise ValueError(f"shadow_tol must be positive, got {self.shadow_tol!r}")


@dataclass
class IterationTrace:
    """Row ``n`` holds ``x_n``, ``J_A x_n``, ``J_B R_A x_n`` and ``x_n - x_{n+1}``."""

    governing: np.ndarray
    shadow: np.ndarray
    reflected_shadow: np.ndarray
    step_diff: np.ndarray
    final: np.ndarray
    lam: float
    stop_reason: str

    def __len__(self) -> int:
        return self.governing.shape[0]

    @property
    def dim(self) -> int:
        return self.governing.shape[1]

    @property
    def iterations(self) -> int:
        return len(self)


def iterate(split: SplittingOperator, x0, stop: StopRule | None = None) -> IterationTrace:
    """Run the governing sequence from ``x0`` and record the shadows.

    Only the shadow is watched for stopping: in the inconsistent case the
    governing sequence drifts off to infinity and never settles.
    """
    stop = stop or StopRule()
    x = as_vector(x0, split.dim, "x0")
    xs, ss, ts, ds = [], [], [], []
    calm = 0
    reason = "max_iters"
    for n in range(stop.max_iters):
        x_next, s, t = split.step(x)
        if not np.all(np.isfinite(x_next)):
            raise DivergenceError(n + 1)
        xs.append(x)
        ss.append(s)
        ts.append(t)
        ds.append(x - x_next)
        x = x_next
        if n > 0:
            calm = calm + 1 if np.linalg.norm(s - ss[-2]) < stop.shadow_tol else 0
            if calm >= STALL_COUNT and n + 1 >= stop.min_iters:
                reason = "shadow_tol"
                break
    return IterationTrace(
        governing=np.array(xs),
        shadow=np.array(ss),
        reflected_shadow=np.array(ts),
        step_diff=np.array(ds),
        final=x,
        lam=split.lam,
        stop_reason=reason,
    )


def orbit(split: SplittingOperator, x0, n: int) -> np.ndarray:
    """``[x0, T x0, ..., T^n x0]`` with no stopping rule."""
    x = as_vector(x0, split.dim, "x0")
    out = np.empty((n + 1, split.dim))
    out[0] = x
    for k in range(1, n + 1):
        x = split.step(x)[0]
        if not np.all(np.isfinite(x)):
            raise DivergenceError(k)
        out[k] = x
    return out
