"""Euclidean projections onto a handful of primitive sets, plus small
vector/matrix helpers shared by the resolvent formulas."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

UNIT_TOL = 1e-12

# Quarter turn; with this S every planar rotation is cos(t) Id + sin(t) S.
ROT90 = np.array([[0.0, -1.0], [1.0, 0.0]])


def as_vector(x, dim: int | None = None, name: str = "x") -> np.ndarray:
    """Coerce ``x`` to a 1-D float array, rejecting NaN/Inf and wrong sizes."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-D vector, got shape {arr.shape}")
    if dim is not None and arr.size != dim:
        raise ValueError(f"{name} has dimension {arr.size}, expected {dim}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries: {arr}")
    return arr


def as_matrix2(M, name: str = "M") -> np.ndarray:
    arr = np.asarray(M, dtype=float)
    if arr.shape != (2, 2):
        raise ValueError(f"{name} must be 2x2, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def rotation(theta: float) -> np.ndarray:
    """Counter-clockwise rotation matrix R_theta."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def apply_matrix(M, x) -> np.ndarray:
    """Matrix-vector product for a 2x2 matrix and a planar vector."""
    return as_matrix2(M) @ as_vector(x, 2)


def _unit(vec, name: str) -> np.ndarray:
    u = as_vector(vec, name=name)
    if abs(np.linalg.norm(u) - 1.0) > UNIT_TOL:
        raise ValueError(f"{name} must have unit norm, got {np.linalg.norm(u)!r}")
    return u


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_vector(self.center, name="center"))
        r = float(self.radius)
        if not np.isfinite(r) or r <= 0:
            raise ValueError(f"ball radius must be positive, got {self.radius!r}")
        object.__setattr__(self, "radius", r)

    @property
    def dim(self) -> int:
        return self.center.size

    def _project(self, x: np.ndarray) -> np.ndarray:
        d = x - self.center
        dist = np.linalg.norm(d)
        if dist <= self.radius:
            return x.copy()
        return self.center + (self.radius / dist) * d

    def violation(self, x: np.ndarray) -> float:
        return max(0.0, np.linalg.norm(x - self.center) - self.radius)


@dataclass(frozen=True)
class Box:
    """Axis-aligned box ``lo <= x <= hi``.

    Bounds may be infinite (e.g. ``R x [a, b]``); NaN is rejected.
    """

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=float)
        hi = np.asarray(self.hi, dtype=float)
        if lo.ndim != 1 or lo.shape != hi.shape or lo.size == 0:
            raise ValueError(f"box bounds must be 1-D of equal length, got {lo.shape} and {hi.shape}")
        if np.any(np.isnan(lo)) or np.any(np.isnan(hi)):
            raise ValueError("box bounds contain NaN")
        if np.any(lo > hi):
            raise ValueError(f"box requires lo <= hi componentwise, got lo={lo}, hi={hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self) -> int:
        return self.lo.size

    def _project(self, x: np.ndarray) -> np.ndarray:
        return np.minimum(np.maximum(x, self.lo), self.hi)

    def violation(self, x: np.ndarray) -> float:
        return float(max(0.0, np.max(self.lo - x), np.max(x - self.hi)))


@dataclass(frozen=True)
class Halfspace:
    """The closed halfspace ``{x : <x, normal> <= 0}`` through the origin."""

    normal: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "normal", _unit(self.normal, "normal"))

    @property
    def dim(self) -> int:
        return self.normal.size

    def _project(self, x: np.ndarray) -> np.ndarray:
        t = x @ self.normal
        if t <= 0:
            return x.copy()
        return x - t * self.normal

    def violation(self, x: np.ndarray) -> float:
        return max(0.0, float(x @ self.normal))


@dataclass(frozen=True)
class Line:
    """The line ``R * direction`` through the origin."""

    direction: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "direction", _unit(self.direction, "direction"))

    @property
    def dim(self) -> int:
        return self.direction.size

    def _project(self, x: np.ndarray) -> np.ndarray:
        return (x @ self.direction) * self.direction

    def violation(self, x: np.ndarray) -> float:
        return float(np.linalg.norm(x - self._project(x)))


PrimitiveSet = Ball | Box | Halfspace | Line


def project(s: PrimitiveSet, x) -> np.ndarray:
    """Nearest point of ``s`` to ``x``.

    At the centre of a ball the projection is the centre itself; no snapping
    to boundaries is done.
    """
    return s._project(as_vector(x, s.dim))


def contains(s: PrimitiveSet, x, tol: float = 0.0) -> bool:
    return s.violation(as_vector(x, s.dim)) <= tol
