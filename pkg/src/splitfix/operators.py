"""Maximally monotone operators, each represented by its resolvent.

Every constructor returns a :class:`ResolventOperator` whose call evaluates
``J = (Id + A)^-1`` in closed form.  The reflected resolvent ``2J - Id`` and
the inverse resolvent ``J_{A^-1} = Id - J`` are derived generically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .geometry import ROT90, Ball, Box, Line, as_matrix2, as_vector, rotation

SQRT_CLAMP = 1e-12


@dataclass(frozen=True)
class ResolventOperator:
    """A maximally monotone operator known through its resolvent map."""

    evaluator: Callable[[np.ndarray], np.ndarray]
    label: str
    dim: int
    params: dict = field(default_factory=dict, compare=False)

    def __call__(self, x) -> np.ndarray:
        return self.evaluator(as_vector(x, self.dim))

    def reflected(self, x) -> np.ndarray:
        return reflected(self, x)

    def inverse(self, x) -> np.ndarray:
        return inverse_resolvent(self, x)

    def graph_point(self, z) -> tuple[np.ndarray, np.ndarray]:
        """Minty parametrisation: ``z -> (Jz, z - Jz)`` lands on gra A."""
        z = as_vector(z, self.dim)
        u = self.evaluator(z)
        return u, z - u


def reflected(op: ResolventOperator, x) -> np.ndarray:
    x = as_vector(x, op.dim)
    return 2.0 * op.evaluator(x) - x


def inverse_resolvent(op: ResolventOperator, x) -> np.ndarray:
    x = as_vector(x, op.dim)
    return x - op.evaluator(x)


def zero_operator(dim: int = 2) -> ResolventOperator:
    return ResolventOperator(lambda x: x.copy(), "0", dim)


@dataclass(frozen=True)
class SkewLinearSpec:
    """Parameters of ``A = alpha Id + beta S`` with ``S`` skew and ``S^2 = -gamma Id``.

    When ``S`` is omitted the planar choice ``sqrt(gamma) * ROT90`` is used,
    which satisfies the constraint for every ``gamma >= 0``.
    """

    alpha: float
    beta: float
    gamma: float
    S: np.ndarray | None = None

    def __post_init__(self):
        if self.S is None:
            S = np.sqrt(max(self.gamma, 0.0)) * ROT90
        else:
            S = np.asarray(self.S, dtype=float)
        if S.ndim != 2 or S.shape[0] != S.shape[1]:
            raise ValueError(f"S must be square, got shape {S.shape}")
        if self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if np.max(np.abs(S + S.T)) > 1e-12:
            raise ValueError("S must be skew-symmetric (S and -S monotone)")
        if np.max(np.abs(S @ S + self.gamma * np.eye(S.shape[0]))) > 1e-12:
            raise ValueError(f"S^2 must equal -gamma Id with gamma={self.gamma}")
        object.__setattr__(self, "S", S)

    @property
    def dim(self) -> int:
        return self.S.shape[0]

    @property
    def denominator(self) -> float:
        return (1.0 + self.alpha) ** 2 + self.beta**2 * self.gamma

    def operator_matrix(self) -> np.ndarray:
        return self.alpha * np.eye(self.dim) + self.beta * self.S

    def resolvent_matrix(self) -> np.ndarray:
        return ((1.0 + self.alpha) * np.eye(self.dim) - self.beta * self.S) / self.denominator

    def reflected_matrix(self) -> np.ndarray:
        d = self.denominator
        a, b, g = self.alpha, self.beta, self.gamma
        return ((1.0 - a**2 - b**2 * g) / d) * np.eye(self.dim) - (2.0 * b / d) * self.S


def resolvent_skew_linear(spec: SkewLinearSpec) -> ResolventOperator:
    M = spec.resolvent_matrix()
    return ResolventOperator(
        lambda x: M @ x,
        f"{spec.alpha:g} Id + {spec.beta:g} S",
        spec.dim,
        {"alpha": spec.alpha, "beta": spec.beta, "gamma": spec.gamma},
    )


def resolvent_skew_linear_ball(spec: SkewLinearSpec) -> ResolventOperator:
    """Resolvent of ``alpha Id + beta S + N_ball(0,1)``."""
    M = spec.resolvent_matrix()
    S = spec.S
    b = spec.beta
    gb2 = spec.gamma * b * b
    radius2 = spec.denominator

    def J(x):
        n2 = x @ x
        if n2 <= radius2:
            return M @ x
        # the unconstrained point would leave the ball; land on the sphere
        arg = n2 - gb2
        if arg < 0:
            if arg < -SQRT_CLAMP:
                raise ArithmeticError(f"negative radicand {arg!r}")
            arg = 0.0
        return (np.sqrt(arg) * x - b * (S @ x)) / n2

    return ResolventOperator(
        J,
        f"{spec.alpha:g} Id + {spec.beta:g} S + N_ball(0,1)",
        spec.dim,
        {"alpha": spec.alpha, "beta": spec.beta, "gamma": spec.gamma},
    )


def resolvent_rotation_ball(theta: float) -> ResolventOperator:
    """Resolvent of ``R_theta + N_ball(0,1)`` on the plane, ``theta`` in [0, pi/2)."""
    if not (0.0 <= theta < np.pi / 2):
        raise ValueError(f"theta must lie in [0, pi/2), got {theta!r}")
    op = resolvent_skew_linear_ball(SkewLinearSpec(np.cos(theta), np.sin(theta), 1.0))
    return ResolventOperator(
        op.evaluator, f"R_{theta:.6g} + N_ball(0,1)", 2, {"theta": theta, "ball": Ball([0.0, 0.0], 1.0)}
    )


def is_monotone_matrix2(L, tol: float = 1e-12) -> bool:
    (a, b), (c, d) = as_matrix2(L, "L")
    return a >= -tol and d >= -tol and 4 * a * d - (b + c) ** 2 >= -tol


def resolvent_linear_halfspace(L, u) -> ResolventOperator:
    """Resolvent of ``L + N_K`` with ``K = {x : <x, u> <= 0}`` in the plane.

    ``J_L`` is the exact inverse of ``Id + L``.  The active branch is chosen by
    the sign of ``<J_L x, u>``; on the boundary the face branch is taken.
    """
    L = as_matrix2(L, "L")
    if not is_monotone_matrix2(L):
        raise ValueError(f"L is not monotone: {L.tolist()}")
    u = as_vector(u, 2, "u")
    if abs(np.linalg.norm(u) - 1.0) > 1e-12:
        raise ValueError("u must have unit norm")
    u_perp = ROT90 @ u
    JL = np.linalg.inv(np.eye(2) + L)
    kappa = 1.0 + u_perp @ (L @ u_perp)

    def J(x):
        z = JL @ x
        if z @ u < 0:
            return z
        return ((x @ u_perp) / kappa) * u_perp

    return ResolventOperator(J, "L + N_K", 2, {"L": L, "u": u})


def resolvent_shifted_ball_normal(b, c, r: float) -> ResolventOperator:
    """Resolvent of ``b + N_ball(c, r)``, i.e. ``x -> P_ball(c,r)(x - b)``."""
    ball = Ball(c, r)
    b = as_vector(b, ball.dim, "b")

    def J(x):
        return ball._project(x - b)

    return ResolventOperator(J, "b + N_ball(c,r)", ball.dim, {"b": b, "ball": ball})


def prox_quadratic_on_line(gamma: float, w, U: Line) -> ResolventOperator:
    """Prox of ``(gamma/2)||x - w||^2 + indicator(U)`` for a line ``U`` through 0.

    Evaluated as ``P_U((x + gamma w) / (1 + gamma))``.
    """
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma!r}")
    w = as_vector(w, U.dim, "w")
    if U.violation(w) > 1e-9:
        raise ValueError(f"w={w} does not lie on the line U")
    scale = 1.0 / (1.0 + gamma)

    def J(x):
        return U._project((x + gamma * w) * scale)

    return ResolventOperator(J, "prox[(g/2)|x-w|^2 + i_U]", U.dim, {"gamma": gamma, "w": w, "line": U})


def prox_box_indicator(lo, hi) -> ResolventOperator:
    box = Box(lo, hi)
    return ResolventOperator(box._project, "N_box", box.dim, {"box": box})


def rotation_halfspace_example(theta: float = np.pi / 3) -> ResolventOperator:
    """``R_theta + N_K`` with ``K = R_- x R`` (left half-plane)."""
    return resolvent_linear_halfspace(rotation(theta), [1.0, 0.0])
