"""Space curves from solutions of the ``w`` equation.

Given ``xi = w = <t, e3>`` and its derivative, the tangent in polar form is
``t = (sin(phi) cos(theta), sin(phi) sin(theta), cos(phi))`` with
``phi = arccos(xi)`` and

    theta' = kappa * sqrt(1 - xi^2 - (xi'/kappa)^2) / (1 - xi^2)

Integrating ``theta'`` and then ``t`` yields the curve.  All integrals use the
cumulative trapezoid rule on the solver grid, normalized so that
``theta(s0) = theta0`` and ``p(s0) = start``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .curves import FrenetFrame, SampledCurve, orthonormalize
from .errors import ChartBoundaryError, PoleError, RestartLimitError
from .frenet import EDGE, estimate_kappa_tau, initial_conditions_from_frame
from .ode import DEFAULT_GUARD, DEFAULT_STEP, IntrinsicProfile, WSolution, solve_w

__all__ = [
    "ThetaSeries",
    "Reconstruction",
    "theta_integral",
    "position",
    "frames_from_w",
    "reconstruct",
    "rotation_between",
    "check_invariants",
    "POLE_BOUND",
    "MAX_RESTARTS",
    "RESTART_RADICAND",
]

POLE_BOUND = 1e-12
MAX_RESTARTS = 16
#: radicand below which a chart is abandoned when restarts are enabled
RESTART_RADICAND = 1e-3
#: direction the binormal is rotated onto when re-charting
CHART_AXIS = np.ones(3) / math.sqrt(3.0)


@dataclass
class ThetaSeries:
    """Azimuth ``theta`` of the tangent and its rate ``theta'`` on the grid."""

    s: np.ndarray
    theta: np.ndarray
    rate: np.ndarray


@dataclass
class Reconstruction:
    curve: SampledCurve
    events: list = field(default_factory=list)
    solutions: list = field(default_factory=list)


def _cumulative(y, s, i0):
    c = cumulative_trapezoid(y, s, axis=0, initial=0.0)
    return c - c[i0]


def _sin_phi_sq(wsol: WSolution) -> np.ndarray:
    q = 1.0 - wsol.w**2
    if np.any(q < POLE_BOUND):
        j = int(np.argmin(q))
        raise PoleError(f"tangent parallel to e3 at s={wsol.s[j]!r} (1 - xi^2 = {q[j]!r})")
    return q


def theta_integral(wsol: WSolution, profile: IntrinsicProfile, theta0: float = 0.0) -> ThetaSeries:
    """Cumulative trapezoid of ``theta'`` with ``theta(s0) = theta0``."""
    q = _sin_phi_sq(wsol)
    k = np.array([profile.kappa(float(s)) for s in wsol.s])
    r = np.maximum(1.0 - wsol.w**2 - (wsol.v / k) ** 2, 0.0)
    rate = wsol.sign * k * np.sqrt(r) / q
    theta = theta0 + _cumulative(rate, wsol.s, wsol.i0)
    return ThetaSeries(wsol.s.copy(), theta, rate)


def frames_from_w(wsol: WSolution, theta: ThetaSeries, profile: IntrinsicProfile) -> np.ndarray:
    """Frenet frames in polar form, shape (N, 3, 3) with rows ``t, n, b``.

    ``n`` and ``b`` follow from ``phi' = -xi'/sin(phi)`` and ``theta'``;
    the triad is then re-orthonormalized with ``b = t x n``.
    """
    q = _sin_phi_sq(wsol)
    k = np.array([profile.kappa(float(s)) for s in wsol.s])
    sp = np.sqrt(q)
    cp = wsol.w
    dphi = -wsol.v / sp
    th = theta.theta
    dth = theta.rate
    ct, st = np.cos(th), np.sin(th)
    t = np.column_stack([sp * ct, sp * st, cp])
    n = np.column_stack(
        [
            (dphi * cp * ct - dth * sp * st) / k,
            (dphi * cp * st + dth * sp * ct) / k,
            -dphi * sp / k,
        ]
    )
    t, n, b = orthonormalize(t, n)
    return np.stack([t, n, b], axis=1)


def position(
    wsol: WSolution,
    profile: IntrinsicProfile,
    start=(0.0, 0.0, 0.0),
    theta: ThetaSeries | None = None,
) -> SampledCurve:
    """Integrate the polar tangent; frames are attached."""
    if theta is None:
        theta = theta_integral(wsol, profile)
    sp = np.sqrt(_sin_phi_sq(wsol))
    tangent = np.column_stack([sp * np.cos(theta.theta), sp * np.sin(theta.theta), wsol.w])
    points = np.asarray(start, dtype=float) + _cumulative(tangent, wsol.s, wsol.i0)
    frames = frames_from_w(wsol, theta, profile)
    return SampledCurve(wsol.s.copy(), points, frames)


def rotation_between(a, b) -> np.ndarray:
    """Proper rotation taking unit vector ``a`` onto unit vector ``b``."""
    a = np.asarray(a, dtype=float) / np.linalg.norm(a)
    b = np.asarray(b, dtype=float) / np.linalg.norm(b)
    axis = np.cross(a, b)
    s = np.linalg.norm(axis)
    c = float(np.dot(a, b))
    if s < 1e-14:
        if c > 0:
            return np.eye(3)
        # antiparallel: half turn about any axis orthogonal to a
        e = np.eye(3)[int(np.argmin(np.abs(a)))]
        u = np.cross(a, e)
        u /= np.linalg.norm(u)
        return 2.0 * np.outer(u, u) - np.eye(3)
    K = np.array([[0.0, -axis[2], axis[1]], [axis[2], 0.0, -axis[0]], [-axis[1], axis[0], 0.0]])
    return np.eye(3) + K + K @ K * ((1.0 - c) / (s * s))


def _place(curve: SampledCurve, i: int, frame: FrenetFrame, point) -> SampledCurve:
    """Rigidly move ``curve`` so that sample ``i`` carries ``frame`` at ``point``."""
    M = frame.matrix @ curve.frame(i).matrix.T
    points = (curve.points - curve.points[i]) @ M.T + np.asarray(point, dtype=float)
    frames = curve.frames @ M.T
    return SampledCurve(curve.s, points, frames)


def _chart_piece(profile, s_start, frame, point, direction, h, guard):
    """Re-chart: rotate ``frame`` so its binormal is in the positive octant,
    solve there, and map the piece back onto ``frame`` at ``point``."""
    Q = rotation_between(frame.b, CHART_AXIS)
    local = frame.rotated(Q)
    k0 = profile.kappa(s_start)
    w0, v0 = initial_conditions_from_frame(local, k0)
    wsol = solve_w(profile, s_start, w0, v0, h=h, guard=guard, direction=direction)
    theta0 = math.atan2(local.t[1], local.t[0])
    chart = position(wsol, profile, (0.0, 0.0, 0.0), theta_integral(wsol, profile, theta0))
    return wsol, _place(chart, wsol.i0, frame, point)


def reconstruct(
    profile: IntrinsicProfile,
    s0: float,
    w0: float | None = None,
    v0: float | None = None,
    start=(0.0, 0.0, 0.0),
    *,
    frame: FrenetFrame | None = None,
    theta0: float = 0.0,
    h: float = DEFAULT_STEP,
    guard: float = DEFAULT_GUARD,
    restart: bool = False,
    max_restarts: int = MAX_RESTARTS,
    restart_radicand: float = RESTART_RADICAND,
    sign: int = 1,
) -> Reconstruction:
    """Curve with curvature ``profile.kappa`` and torsion ``profile.tau``.

    Initial data is either ``(w0, v0)`` -- the ``e3`` components of the
    tangent and of ``kappa(s0)`` times the normal -- together with the
    azimuth ``theta0`` of the tangent, or a full Frenet ``frame`` at ``s0``.
    The curve passes through ``start`` at ``s0``.

    When the ``w`` solution reaches the chart boundary (binormal orthogonal
    to ``e3``) the curve is truncated there and a ``domain_exit`` event is
    recorded.  With ``restart=True`` the integration instead continues in a
    rotated coordinate system and the pieces are stitched together; each
    re-charting is recorded as a ``restart`` event.  Because the ``w``
    equation loses accuracy close to the boundary, a chart is then abandoned
    as soon as the radicand falls below ``restart_radicand`` rather than
    ``guard``.
    """
    events: list = []
    solutions: list = []
    first_guard = guard
    if restart:
        guard = max(guard, restart_radicand)
        if w0 is not None and v0 is not None:
            r0 = 1.0 - w0 * w0 - (v0 / profile.kappa(s0)) ** 2
            first_guard = max(first_guard, min(guard, 0.5 * r0))
        else:
            first_guard = guard
    if frame is not None:
        frame = FrenetFrame(*orthonormalize(frame.t, frame.n))
        try:
            w0, v0 = initial_conditions_from_frame(frame, profile.kappa(s0), sign)
            if 1.0 - w0 * w0 - (v0 / profile.kappa(s0)) ** 2 < max(1e-6, 2.0 * first_guard):
                raise ChartBoundaryError("binormal too close to the chart boundary")
        except ChartBoundaryError:
            wsol, curve = _chart_piece(profile, s0, frame, start, "both", h, guard)
            events.append({"event": "initial_rechart", "s": float(s0)})
        else:
            wsol = solve_w(profile, s0, w0, v0, h=h, guard=first_guard, sign=sign)
            th0 = math.atan2(frame.t[1], frame.t[0])
            chart = position(wsol, profile, (0.0, 0.0, 0.0), theta_integral(wsol, profile, th0))
            curve = _place(chart, wsol.i0, frame, start)
    else:
        if w0 is None or v0 is None:
            raise ValueError("give either (w0, v0) or frame")
        wsol = solve_w(profile, s0, w0, v0, h=h, guard=first_guard, sign=sign)
        curve = position(wsol, profile, start, theta_integral(wsol, profile, theta0))
    solutions.append(wsol)

    restarts = 0
    pieces = {"lower": [], "upper": []}
    for side in ("lower", "upper"):
        term = getattr(wsol, side)
        current = curve
        while term is not None and term.exited:
            events.append(
                {
                    "event": "domain_exit",
                    "side": side,
                    "s": term.s,
                    "radicand": term.radicand,
                    "bracket": term.bracket,
                }
            )
            if not restart:
                break
            if restarts >= max_restarts:
                raise RestartLimitError(f"more than {max_restarts} restarts needed")
            i = 0 if side == "lower" else len(current) - 1
            s_k = float(current.s[i])
            direction = "backward" if side == "lower" else "forward"
            piece_sol, piece = _chart_piece(
                profile, s_k, current.frame(i), current.points[i], direction, h, guard
            )
            if len(piece_sol) < 2:
                raise ChartBoundaryError(f"no progress after re-charting at s={s_k!r}")
            restarts += 1
            events.append({"event": "restart", "side": side, "s": s_k, "count": restarts})
            solutions.append(piece_sol)
            pieces[side].append(piece)
            current = piece
            term = getattr(piece_sol, side)

    parts = [(p.s[:-1], p.points[:-1], p.frames[:-1]) for p in reversed(pieces["lower"])]
    parts.append((curve.s, curve.points, curve.frames))
    parts += [(p.s[1:], p.points[1:], p.frames[1:]) for p in pieces["upper"]]
    stitched = SampledCurve(
        np.concatenate([p[0] for p in parts]),
        np.concatenate([p[1] for p in parts]),
        np.concatenate([p[2] for p in parts]),
        list(events),
    )
    return Reconstruction(stitched, events, solutions)


def check_invariants(curve: SampledCurve, profile: IntrinsicProfile) -> dict:
    """Compare finite-difference curvature/torsion of ``curve`` with the profile.

    Returns max relative curvature error, max absolute torsion error (both
    on interior samples) and the unit-speed deviation.
    """
    est = estimate_kappa_tau(curve)
    k = np.array([profile.kappa(float(s)) for s in est.s])
    t = np.array([profile.tau(float(s)) for s in est.s])
    return {
        "max_kappa_error": float(np.max(np.abs(est.kappa - k) / k)),
        "max_tau_error": float(np.max(np.abs(est.tau - t))),
        "unit_speed_deviation": curve.speed_deviation(),
        "interior_points": int(len(est.s)),
        "edge_points_excluded": EDGE,
    }
