"""Containers shared across the package: frames, sampled curves, rigid motions."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "FrenetFrame",
    "SampledCurve",
    "RigidMotion",
    "orthonormalize",
    "uniform_grid",
]

FRAME_TOL = 1e-9


def orthonormalize(t, n):
    """Modified Gram-Schmidt on ``(t, n)``; returns ``(t, n, t x n)``.

    Works on single vectors of shape (3,) or stacks of shape (N, 3).
    """
    t = np.asarray(t, dtype=float)
    n = np.asarray(n, dtype=float)
    t = t / np.linalg.norm(t, axis=-1, keepdims=True)
    n = n - np.sum(n * t, axis=-1, keepdims=True) * t
    n = n / np.linalg.norm(n, axis=-1, keepdims=True)
    return t, n, np.cross(t, n)


@dataclass(frozen=True)
class FrenetFrame:
    """Orthonormal right-handed triad (tangent, normal, binormal)."""

    t: np.ndarray
    n: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        for name in ("t", "n", "b"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float).reshape(3))

    @classmethod
    def from_vectors(cls, t, n, tol=1e-6) -> FrenetFrame:
        """Build a frame from approximately orthonormal ``t``, ``n``.

        The pair is re-orthonormalized; the binormal is ``t x n``.  Inputs
        further than ``tol`` from orthonormal are rejected.
        """
        t = np.asarray(t, dtype=float)
        n = np.asarray(n, dtype=float)
        if (
            abs(np.linalg.norm(t) - 1.0) > tol
            or abs(np.linalg.norm(n) - 1.0) > tol
            or abs(np.dot(t, n)) > tol
        ):
            raise ValueError("tangent and normal are not orthonormal")
        return cls(*orthonormalize(t, n))

    @classmethod
    def from_values(cls, values, tol=1e-6) -> FrenetFrame:
        """Frame from nine reals ``tx ty tz nx ny nz bx by bz``."""
        v = np.asarray(values, dtype=float).reshape(3, 3)
        frame = cls.from_vectors(v[0], v[1], tol)
        if np.linalg.norm(frame.b - v[2]) > tol:
            raise ValueError("binormal is not t x n")
        return frame

    @property
    def matrix(self) -> np.ndarray:
        """3x3 matrix with columns t, n, b."""
        return np.column_stack([self.t, self.n, self.b])

    def is_valid(self, tol=FRAME_TOL) -> bool:
        m = self.matrix
        return bool(
            np.allclose(m.T @ m, np.eye(3), atol=tol, rtol=0.0)
            and np.allclose(np.cross(self.t, self.n), self.b, atol=tol, rtol=0.0)
        )

    def rotated(self, R) -> FrenetFrame:
        R = np.asarray(R, dtype=float)
        return FrenetFrame(R @ self.t, R @ self.n, R @ self.b)


@dataclass(frozen=True)
class RigidMotion:
    """``x -> R x + c`` with ``R`` a proper rotation."""

    R: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        R = np.asarray(self.R, dtype=float).reshape(3, 3)
        c = np.asarray(self.c, dtype=float).reshape(3)
        if not np.allclose(R.T @ R, np.eye(3), atol=FRAME_TOL, rtol=0.0):
            raise ValueError("R is not orthogonal")
        if abs(np.linalg.det(R) - 1.0) > FRAME_TOL:
            raise ValueError("R is not a proper rotation")
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "c", c)

    @classmethod
    def identity(cls) -> RigidMotion:
        return cls(np.eye(3), np.zeros(3))

    def apply(self, points) -> np.ndarray:
        return np.asarray(points, dtype=float) @ self.R.T + self.c

    def inverse(self) -> RigidMotion:
        return RigidMotion(self.R.T, -self.R.T @ self.c)


@dataclass
class SampledCurve:
    """Positions (and optionally Frenet frames) on an arc-length grid.

    ``frames`` has shape (N, 3, 3) with ``frames[i] = [t_i, n_i, b_i]``
    stored as rows.  ``events`` records noteworthy things that happened
    while the curve was produced (chart exits, restarts, sign choices).
    """

    s: np.ndarray
    points: np.ndarray
    frames: np.ndarray | None = None
    events: list = field(default_factory=list)

    def __post_init__(self):
        self.s = np.asarray(self.s, dtype=float)
        self.points = np.asarray(self.points, dtype=float)
        if self.points.shape != (len(self.s), 3):
            raise ValueError("points must have shape (len(s), 3)")
        if self.frames is not None:
            self.frames = np.asarray(self.frames, dtype=float)
            if self.frames.shape != (len(self.s), 3, 3):
                raise ValueError("frames must have shape (len(s), 3, 3)")

    def __len__(self) -> int:
        return len(self.s)

    @property
    def h(self) -> float:
        """Nominal grid step (median spacing)."""
        return float(np.median(np.diff(self.s)))

    @property
    def tangents(self) -> np.ndarray:
        return self.frames[:, 0]

    @property
    def normals(self) -> np.ndarray:
        return self.frames[:, 1]

    @property
    def binormals(self) -> np.ndarray:
        return self.frames[:, 2]

    def frame(self, i: int) -> FrenetFrame:
        f = self.frames[i]
        return FrenetFrame(f[0], f[1], f[2])

    def index_of(self, s: float) -> int:
        """Index of the grid point closest to ``s``."""
        return int(np.argmin(np.abs(self.s - s)))

    def transformed(self, motion: RigidMotion) -> SampledCurve:
        frames = None
        if self.frames is not None:
            frames = self.frames @ motion.R.T
        return SampledCurve(self.s.copy(), motion.apply(self.points), frames, list(self.events))

    def restricted(self, smin: float, smax: float, atol: float = 1e-9) -> SampledCurve:
        """Samples with ``smin <= s <= smax`` (up to ``atol``)."""
        mask = (self.s >= smin - atol) & (self.s <= smax + atol)
        frames = None if self.frames is None else self.frames[mask]
        return SampledCurve(self.s[mask], self.points[mask], frames, list(self.events))

    def speed_deviation(self) -> float:
        """Max deviation of the centered-difference speed from 1 (interior)."""
        ds = self.s[2:] - self.s[:-2]
        v = (self.points[2:] - self.points[:-2]) / ds[:, None]
        return float(np.max(np.abs(np.linalg.norm(v, axis=1) - 1.0)))


def uniform_grid(s0: float, end: float, h: float) -> np.ndarray:
    """Points ``s0 + k*h`` (signed toward ``end``) finishing exactly at ``end``.

    The last step may be short.  A remainder below ``1e-6*h`` is absorbed
    into the previous step so that no sliver interval is produced.
    """
    if h <= 0:
        raise ValueError("step must be positive")
    length = abs(end - s0)
    if length == 0.0:
        return np.array([s0], dtype=float)
    direction = 1.0 if end > s0 else -1.0
    n = int(np.floor(length / h))
    if n == 0:
        return np.array([s0, end], dtype=float)
    grid = s0 + direction * h * np.arange(n + 1, dtype=float)
    if length - n * h > 1e-6 * h:
        grid = np.append(grid, end)
    else:
        grid[-1] = end
    return grid
