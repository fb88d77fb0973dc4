"""Classical Frenet-Serret integration, curvature/torsion estimation and alignment.

These routines are deliberately independent of the ``w``-equation pipeline
in :mod:`curveforge.reconstruct` so that they can serve as its oracle.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import FrenetFrame, RigidMotion, SampledCurve, orthonormalize, uniform_grid
from .errors import ChartBoundaryError, DegenerateCurveError, GridMismatchError
from .ode import DEFAULT_STEP, IntrinsicProfile

__all__ = [
    "frenet_integrate",
    "CurvatureEstimate",
    "estimate_kappa_tau",
    "estimate_frames",
    "kabsch_align",
    "initial_conditions_from_frame",
    "EDGE",
]

#: samples excluded at each end by the finite-difference estimators
EDGE = 3


def _frenet_rhs(kappa, tau, y):
    # y = (p, t, n, b) flattened
    t = y[3:6]
    n = y[6:9]
    b = y[9:12]
    return np.concatenate([t, kappa * n, -kappa * t + tau * b, -tau * n])


def _sweep(profile, grid, y0):
    ys = np.empty((len(grid), 12))
    ys[0] = y0
    kt = lambda s: (profile.kappa(s), profile.tau(s))  # noqa: E731
    c0 = kt(grid[0])
    for j in range(1, len(grid)):
        s = grid[j - 1]
        dt = grid[j] - s
        cm = kt(s + 0.5 * dt)
        c1 = kt(grid[j])
        y = ys[j - 1]
        k1 = _frenet_rhs(*c0, y)
        k2 = _frenet_rhs(*cm, y + 0.5 * dt * k1)
        k3 = _frenet_rhs(*cm, y + 0.5 * dt * k2)
        k4 = _frenet_rhs(*c1, y + dt * k3)
        y = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t, n, b = orthonormalize(y[3:6], y[6:9])
        ys[j, :3] = y[:3]
        ys[j, 3:6] = t
        ys[j, 6:9] = n
        ys[j, 9:12] = b
        c0 = c1
    return ys


def frenet_integrate(
    profile: IntrinsicProfile,
    frame0: FrenetFrame,
    p0=(0.0, 0.0, 0.0),
    h: float = DEFAULT_STEP,
    s0: float | None = None,
) -> SampledCurve:
    """Integrate ``t' = k n, n' = -k t + tau b, b' = -tau n, p' = t`` with RK4.

    The frame is re-orthonormalized (modified Gram-Schmidt, ``b = t x n``)
    after every step.  Integration runs from ``s0`` (default: the start of
    the profile domain) to both ends of the domain on the grid
    ``s0 + k*h``, the same grid used by :func:`curveforge.ode.solve_w`.
    """
    if h <= 0:
        raise ValueError("step must be positive")
    if not frame0.is_valid(1e-9):
        raise ValueError("initial frame is not orthonormal and right-handed")
    s0 = profile.a if s0 is None else float(s0)
    if not profile.contains(s0):
        raise ValueError(f"s0={s0!r} outside [{profile.a}, {profile.b}]")
    y0 = np.concatenate([np.asarray(p0, dtype=float), frame0.t, frame0.n, frame0.b])
    parts = []
    if s0 > profile.a:
        parts.append((uniform_grid(s0, profile.a, h), True))
    if s0 < profile.b:
        parts.append((uniform_grid(s0, profile.b, h), False))
    s_list, y_list = [], []
    for grid, backward in parts:
        ys = _sweep(profile, grid, y0)
        if backward:
            s_list.append(grid[::-1])
            y_list.append(ys[::-1])
        else:
            skip = 1 if s_list else 0
            s_list.append(grid[skip:])
            y_list.append(ys[skip:])
    s = np.concatenate(s_list)
    y = np.concatenate(y_list)
    frames = np.stack([y[:, 3:6], y[:, 6:9], y[:, 9:12]], axis=1)
    return SampledCurve(s, y[:, :3], frames)


@dataclass
class CurvatureEstimate:
    """Finite-difference curvature and torsion on interior samples.

    ``s``, ``kappa`` and ``tau`` cover the samples ``EDGE .. N-EDGE-1`` of the
    source curve; the ``EDGE`` samples at each end are not estimated.
    """

    s: np.ndarray
    kappa: np.ndarray
    tau: np.ndarray
    index: slice


def _check_grid(s: np.ndarray) -> float:
    if len(s) < 2 * EDGE + 1:
        raise ValueError(f"need at least {2 * EDGE + 1} samples, got {len(s)}")
    # the short first/last step of a grid never enters an interior stencil
    steps = np.diff(s)[1:-1]
    h = float(np.median(steps))
    if not np.allclose(steps, h, rtol=1e-6, atol=0.0):
        raise ValueError("samples are not on a uniform grid")
    return h


def _derivatives(p: np.ndarray, h: float):
    i = slice(EDGE, len(p) - EDGE)
    pm2, pm1 = p[EDGE - 2 : len(p) - EDGE - 2], p[EDGE - 1 : len(p) - EDGE - 1]
    pp1, pp2 = p[EDGE + 1 : len(p) - EDGE + 1], p[EDGE + 2 : len(p) - EDGE + 2]
    d1 = (pp1 - pm1) / (2.0 * h)
    d2 = (pp1 - 2.0 * p[i] + pm1) / (h * h)
    d3 = (pp2 - 2.0 * pp1 + 2.0 * pm1 - pm2) / (2.0 * h**3)
    return i, d1, d2, d3


def estimate_kappa_tau(curve: SampledCurve) -> CurvatureEstimate:
    """Curvature ``|a' x a''| / |a'|^3`` and torsion ``(a' x a'').a''' / |a' x a''|^2``.

    Derivatives come from second-order centered differences (five-point
    stencil for the third derivative).  For a unit-speed curve the
    curvature formula reduces to ``|a''|``.

    Raises
    ------
    DegenerateCurveError
        If ``|a' x a''|^2 < 1e-14`` at an interior sample (vanishing curvature).
    """
    h = _check_grid(curve.s)
    i, d1, d2, d3 = _derivatives(curve.points, h)
    cross = np.cross(d1, d2)
    cross2 = np.sum(cross * cross, axis=1)
    if np.any(cross2 < 1e-14):
        j = int(np.argmin(cross2)) + EDGE
        raise DegenerateCurveError(f"vanishing curvature near s={curve.s[j]!r}")
    speed = np.linalg.norm(d1, axis=1)
    kappa = np.sqrt(cross2) / speed**3
    tau = np.sum(cross * d3, axis=1) / cross2
    return CurvatureEstimate(curve.s[i].copy(), kappa, tau, i)


def estimate_frames(curve: SampledCurve) -> tuple[slice, np.ndarray]:
    """Frenet frames from finite differences on interior samples.

    Returns the index slice and an array of shape (M, 3, 3) of rows
    ``t, n, b``.
    """
    h = _check_grid(curve.s)
    i, d1, d2, _ = _derivatives(curve.points, h)
    t = d1 / np.linalg.norm(d1, axis=1, keepdims=True)
    b = np.cross(d1, d2)
    norm_b = np.linalg.norm(b, axis=1, keepdims=True)
    if np.any(norm_b < 1e-7):
        raise DegenerateCurveError("vanishing curvature; normal undefined")
    b = b / norm_b
    n = np.cross(b, t)
    return i, np.stack([t, n, b], axis=1)


def kabsch_align(A: SampledCurve, B: SampledCurve) -> tuple[RigidMotion, float]:
    """Least-squares proper rigid motion taking the points of ``A`` onto ``B``.

    Returns the motion ``x -> R x + c`` and the root-mean-square deviation
    of ``R A + c`` from ``B``.  Reflections are excluded.
    """
    if len(A) != len(B):
        raise GridMismatchError(f"sample counts differ: {len(A)} vs {len(B)}")
    scale = 1.0 + np.maximum(np.abs(A.s), np.abs(B.s))
    if not np.all(np.abs(A.s - B.s) <= 1e-9 * scale):
        raise GridMismatchError("arc-length grids differ")
    P = A.points
    Q = B.points
    mp = P.mean(axis=0)
    mq = Q.mean(axis=0)
    H = (P - mp).T @ (Q - mq)
    U, _, Vt = np.linalg.svd(H)
    d = np.sign(np.linalg.det(Vt.T @ U.T))
    if d == 0:
        d = 1.0
    D = np.diag([1.0, 1.0, d])
    R = Vt.T @ D @ U.T
    c = mq - R @ mp
    resid = P @ R.T + c - Q
    rmsd = float(np.sqrt(np.mean(np.sum(resid * resid, axis=1))))
    return RigidMotion(R, c), rmsd


def initial_conditions_from_frame(frame: FrenetFrame, kappa0: float, sign: int = 1):
    """Initial data ``(w0, v0) = (<t, e3>, kappa0 <n, e3>)`` for a frame.

    Raises
    ------
    ChartBoundaryError
        If the state is on or outside the admissible ellipse, i.e. the
        binormal is (nearly) horizontal, or if the binormal points into the
        hemisphere opposite to the requested square-root branch.  Rotate
        the frame before retrying.
    """
    if not kappa0 > 0:
        raise ValueError("curvature must be positive")
    w0 = float(frame.t[2])
    v0 = float(kappa0 * frame.n[2])
    ellipse = w0 * w0 + (v0 / kappa0) ** 2
    if ellipse >= 1.0 - 1e-12:
        raise ChartBoundaryError(
            f"frame lies on the chart boundary: w0^2 + (v0/kappa0)^2 = {ellipse!r}, <b, e3> = {frame.b[2]!r}"
        )
    if sign * frame.b[2] < 0:
        raise ChartBoundaryError(
            f"<b, e3> = {frame.b[2]!r} has the wrong sign for the {'+' if sign > 0 else '-'} branch"
        )
    return w0, v0
