"""Worked examples with closed-form reference values.

Two presets are registered:

``two_balls``
    ``A = R_theta + N_ball(0,1)`` and ``B = (0, beta) + N_ball((gamma, 0), r)``.
    The range of ``Id - T`` is the ball ``ball(-c, r + 1)``, so the pair is
    inconsistent exactly when ``|gamma| > r + 1``.  A normal solution exists
    iff ``beta = -sign(gamma) sin(theta)`` in the far-apart regime.

``line_box``
    ``f = (gamma/2)||x - w||^2 + i_U`` on the x-axis ``U`` and ``g = i_V`` for a
    box ``V = [a1, b1] x [a2, b2]``; the normal solution is
    ``(clip(w1, a1, b1), 0)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import Ball, Box, Line, PrimitiveSet, as_vector
from .operators import (
    ResolventOperator,
    prox_box_indicator,
    prox_quadratic_on_line,
    resolvent_rotation_ball,
    resolvent_shifted_ball_normal,
)
from .splitting import SplittingOperator

# beta values quoted to seven decimals (0.7071068 for sin(pi/4)) count as the
# matching case; at that distance the two regimes cannot be told apart numerically
BETA_MATCH_TOL = 1e-7


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    A: ResolventOperator
    B: ResolventOperator
    lam: float
    x0: np.ndarray
    params: dict
    sets: tuple = ()

    def __post_init__(self):
        if self.A.dim != self.B.dim:
            raise ValueError("operator dimensions differ")
        if not (0.0 < self.lam <= 1.0):
            raise ValueError(f"lambda must lie in (0, 1], got {self.lam!r}")
        object.__setattr__(self, "x0", as_vector(self.x0, self.A.dim, "x0"))

    @property
    def split(self) -> SplittingOperator:
        return SplittingOperator(self.A, self.B, self.lam)


@dataclass(frozen=True)
class ScenarioReference:
    """Ground truth for a preset.  ``xbar`` is ``None`` when no closed form is
    known (or when the normal problem has no solution)."""

    v: np.ndarray
    consistent: bool
    z_nonempty: bool
    xbar: np.ndarray | None = None
    reflected_shadow_limit: np.ndarray | None = None
    difference_set: PrimitiveSet | None = field(default=None, compare=False)


def _sign(x: float) -> float:
    return 1.0 if x > 0 else -1.0


def preset_two_balls(
    theta: float = math.pi / 4,
    beta: float = math.sin(math.pi / 4),
    gamma: float = -3.5,
    r: float = 1.5,
    lam: float = 0.5,
    x0=(0.0, 0.0),
) -> tuple[ScenarioSpec, ScenarioReference]:
    if not (0.0 <= theta < math.pi / 2):
        raise ValueError(f"theta must lie in [0, pi/2), got {theta!r}")
    if not r > 0:
        raise ValueError(f"r must be positive, got {r!r}")
    if gamma == 0:
        raise ValueError("gamma must be nonzero: the reference formulas need sign(gamma)")
    if not all(map(math.isfinite, (beta, gamma, r))):
        raise ValueError("scenario parameters must be finite")

    b = np.array([0.0, beta])
    c = np.array([gamma, 0.0])
    A = resolvent_rotation_ball(theta)
    B = resolvent_shifted_ball_normal(b, c, r)
    params = {"theta": theta, "beta": beta, "gamma": gamma, "r": r}
    spec = ScenarioSpec("two_balls", A, B, lam, x0, params, sets=(Ball([0.0, 0.0], 1.0), Ball(c, r)))

    sg = _sign(gamma)
    v = np.array([sg * min(0.0, r + 1.0 - abs(gamma)), 0.0])
    diff_set = Ball(-c, r + 1.0)
    if abs(gamma) < r + 1.0:
        # balls overlap in their interiors: zer(A+B) is a singleton, no closed form
        ref = ScenarioReference(v, consistent=True, z_nonempty=True, difference_set=diff_set)
    else:
        z_nonempty = abs(beta + sg * math.sin(theta)) <= BETA_MATCH_TOL
        xbar = rsl = None
        if z_nonempty:
            xbar = np.array([sg, 0.0])
            rsl = np.array([gamma - sg * r, 0.0])
        ref = ScenarioReference(
            v,
            consistent=z_nonempty and not np.any(v),
            z_nonempty=z_nonempty,
            xbar=xbar,
            reflected_shadow_limit=rsl,
            difference_set=diff_set,
        )
    return spec, ref


def preset_line_box(
    gamma: float = 1.0,
    w1: float = 1.0,
    a1: float = -1.0,
    b1: float = 1.0,
    a2: float = 1.0,
    b2: float = 3.0,
    lam: float = 0.5,
    x0=(0.0, 0.0),
) -> tuple[ScenarioSpec, ScenarioReference]:
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma!r}")
    if a1 > b1 or a2 > b2:
        raise ValueError(f"box bounds must satisfy a_i <= b_i, got [{a1},{b1}] x [{a2},{b2}]")

    U = Line([1.0, 0.0])
    w = np.array([w1, 0.0])
    A = prox_quadratic_on_line(gamma, w, U)
    B = prox_box_indicator([a1, a2], [b1, b2])
    params = {"gamma": gamma, "w1": w1, "a1": a1, "b1": b1, "a2": a2, "b2": b2}
    spec = ScenarioSpec("line_box", A, B, lam, x0, params, sets=(U, Box([a1, a2], [b1, b2])))

    v = np.array([0.0, min(max(0.0, -b2), -a2)])
    xbar = np.array([min(max(w1, a1), b1), 0.0])
    ref = ScenarioReference(
        v,
        consistent=not np.any(v),
        z_nonempty=True,
        xbar=xbar,
        reflected_shadow_limit=xbar - v,
        difference_set=Box([-np.inf, -b2], [np.inf, -a2]),
    )
    return spec, ref


def _two_balls_from_params(lam, x0, p):
    p = dict(p)
    if "beta" not in p:
        p["beta"] = -_sign(p["gamma"]) * math.sin(p["theta"])
    return preset_two_balls(lam=lam, x0=x0, **p)


SCENARIOS = {
    "two_balls": {
        "defaults": {"theta": math.pi / 4, "gamma": -3.5, "r": 1.5},
        "optional": ("beta",),
        "build": _two_balls_from_params,
    },
    "line_box": {
        "defaults": {"gamma": 1.0, "w1": 1.0, "a1": -1.0, "b1": 1.0, "a2": 1.0, "b2": 3.0},
        "optional": (),
        "build": lambda lam, x0, p: preset_line_box(lam=lam, x0=x0, **p),
    },
}


def build_scenario(name: str, lam: float = 0.5, x0=(0.0, 0.0), overrides: dict | None = None):
    """Look up a registered preset and apply parameter overrides.

    Unknown scenario or parameter names raise ``KeyError``.
    """
    if name not in SCENARIOS:
        raise KeyError(f"unknown scenario {name!r}; choose from {sorted(SCENARIOS)}")
    entry = SCENARIOS[name]
    params = dict(entry["defaults"])
    for key, value in (overrides or {}).items():
        if key not in params and key not in entry["optional"]:
            allowed = sorted([*entry["defaults"], *entry["optional"]])
            raise KeyError(f"unknown parameter {key!r} for {name}; allowed: {allowed}")
        params[key] = float(value)
    return entry["build"](lam, x0, params)
