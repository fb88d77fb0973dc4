"""The scalar second-order equation for ``w = <t, e3>``.

Writing ``v = w'``, a unit-speed curve with curvature ``kappa`` and torsion
``tau`` whose binormal has positive ``e3`` component satisfies

    w' = v
    v' = (kappa'/kappa) v - kappa^2 w + tau * sqrt(kappa^2 (1 - w^2) - v^2)

The admissible states form the open ellipse ``w^2 + (v/kappa)^2 < 1``.  The
solver here is a fixed-step classical Runge-Kutta integrator that refuses to
leave that ellipse: it stops at the last grid point whose radicand stays
above a guard threshold and reports where the exit happened.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .curves import uniform_grid
from .errors import InitialConditionError, NegativeRadicandError, ProfileError
from .expr import ScalarExpr, parse

__all__ = [
    "IntrinsicProfile",
    "WState",
    "Termination",
    "WSolution",
    "radicand",
    "w_rhs",
    "solve_w",
    "DEFAULT_STEP",
    "DEFAULT_GUARD",
]

DEFAULT_STEP = 1e-3
DEFAULT_GUARD = 1e-10

REACHED_END = "reached_end"
DOMAIN_EXIT = "domain_exit"


def _stencil_derivative(f, x, delta, lo=-math.inf, hi=math.inf):
    """Second-order finite difference of ``f`` at ``x`` that stays in [lo, hi]."""
    if x - delta >= lo and x + delta <= hi:
        return (f(x + delta) - f(x - delta)) / (2.0 * delta)
    if x + 2.0 * delta <= hi:
        return (-3.0 * f(x) + 4.0 * f(x + delta) - f(x + 2.0 * delta)) / (2.0 * delta)
    return (3.0 * f(x) - 4.0 * f(x - delta) + f(x - 2.0 * delta)) / (2.0 * delta)


@dataclass(frozen=True)
class IntrinsicProfile:
    """Curvature and torsion as functions of arc length on ``[a, b]``.

    ``kappa`` and ``tau`` may be any callables of one float, or formula
    strings (parsed with :func:`curveforge.expr.parse`).  Curvature must be
    strictly positive; this is checked on ``samples`` evenly spaced points.
    ``dkappa`` optionally supplies an exact curvature derivative; otherwise
    a central difference with stencil ``1e-6*max(1, |s|)`` is used.
    """

    kappa: Callable[[float], float]
    tau: Callable[[float], float]
    a: float
    b: float
    dkappa: Callable[[float], float] | None = None
    samples: int = 1001
    kappa_min: float = field(init=False, repr=False)

    def __post_init__(self):
        if isinstance(self.kappa, str):
            object.__setattr__(self, "kappa", parse(self.kappa))
        if isinstance(self.tau, str):
            object.__setattr__(self, "tau", parse(self.tau))
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b) and a < b):
            raise ProfileError(f"invalid domain [{self.a}, {self.b}]")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        kmin = math.inf
        for s in np.linspace(a, b, self.samples):
            k = self.kappa(float(s))
            t = self.tau(float(s))
            if not (math.isfinite(k) and math.isfinite(t)):
                raise ProfileError(f"non-finite curvature or torsion at s={s!r}")
            if k <= 0.0:
                raise ProfileError(f"curvature must be positive; kappa({s!r}) = {k!r}")
            kmin = min(kmin, k)
        object.__setattr__(self, "kappa_min", kmin)

    @classmethod
    def from_text(cls, kappa: str, tau: str, a: float, b: float) -> IntrinsicProfile:
        return cls(parse(kappa), parse(tau), a, b)

    @property
    def length(self) -> float:
        return self.b - self.a

    def kappa_prime(self, s: float) -> float:
        if self.dkappa is not None:
            return self.dkappa(s)
        delta = 1e-6 * max(1.0, abs(s))
        return _stencil_derivative(self.kappa, s, delta, self.a, self.b)

    def coefficients(self, s: float) -> tuple[float, float, float]:
        """``(kappa, kappa'/kappa, tau)`` at ``s``."""
        k = self.kappa(s)
        return k, self.kappa_prime(s) / k, self.tau(s)

    def contains(self, s: float) -> bool:
        return self.a <= s <= self.b

    def describe(self) -> dict:
        def text(f):
            return f.source if isinstance(f, ScalarExpr) else repr(f)

        return {"kappa": text(self.kappa), "tau": text(self.tau), "smin": self.a, "smax": self.b}


@dataclass(frozen=True)
class WState:
    s: float
    w: float
    v: float


@dataclass(frozen=True)
class Termination:
    """How one side of an integration ended.

    ``kind`` is ``"reached_end"`` or ``"domain_exit"``.  For an exit, ``s``
    is the refined exit location (last admissible position found by
    bisection), ``radicand`` the radicand there and ``bracket`` the
    remaining uncertainty in ``s``.
    """

    kind: str
    s: float
    radicand: float
    bracket: float = 0.0

    @property
    def exited(self) -> bool:
        return self.kind == DOMAIN_EXIT


@dataclass
class WSolution:
    """Grid samples of ``w`` and ``v = w'`` around the initial point.

    ``lower``/``upper`` describe how the backward/forward sweeps ended
    (``None`` when that side was not integrated).  ``i0`` indexes ``s0``.
    """

    s: np.ndarray
    w: np.ndarray
    v: np.ndarray
    h: float
    i0: int
    sign: int = 1
    lower: Termination | None = None
    upper: Termination | None = None

    def __len__(self) -> int:
        return len(self.s)

    @property
    def s0(self) -> float:
        return float(self.s[self.i0])

    @property
    def terminations(self) -> list[Termination]:
        return [t for t in (self.lower, self.upper) if t is not None]

    @property
    def exited(self) -> bool:
        return any(t.exited for t in self.terminations)

    def states(self) -> list[WState]:
        return [WState(float(s), float(w), float(v)) for s, w, v in zip(self.s, self.w, self.v)]

    def radicands(self, profile: IntrinsicProfile) -> np.ndarray:
        k = np.array([profile.kappa(float(s)) for s in self.s])
        return 1.0 - self.w**2 - (self.v / k) ** 2


def radicand(state: WState, profile: IntrinsicProfile) -> float:
    """``1 - w^2 - (v/kappa(s))^2``; non-positive outside the admissible ellipse."""
    k = profile.kappa(state.s)
    return 1.0 - state.w * state.w - (state.v / k) ** 2


def w_rhs(s, w, v, profile: IntrinsicProfile, sign: int = 1):
    """Vector field ``(w', v')`` of the first-order system.

    Raises :class:`NegativeRadicandError` if ``kappa^2 (1 - w^2) - v^2 < 0``.
    """
    k, dlog_k, tau = profile.coefficients(s)
    q = k * k * (1.0 - w * w) - v * v
    if q < 0.0:
        raise NegativeRadicandError(f"negative radicand {q!r} at s={s!r} (w={w!r}, v={v!r})")
    return v, dlog_k * v - k * k * w + sign * tau * math.sqrt(q)


def _field(coef, w, v, sign):
    """Vector field from precomputed coefficients; ``None`` outside the ellipse."""
    k, dlog_k, tau = coef
    q = k * k * (1.0 - w * w) - v * v
    if q < 0.0:
        return None
    return v, dlog_k * v - k * k * w + sign * tau * math.sqrt(q)


def _rk4(c0, cm, c1, w, v, dt, sign):
    """One RK4 step; coefficients at start, midpoint and end of the step."""
    k1 = _field(c0, w, v, sign)
    if k1 is None:
        return None
    k2 = _field(cm, w + 0.5 * dt * k1[0], v + 0.5 * dt * k1[1], sign)
    if k2 is None:
        return None
    k3 = _field(cm, w + 0.5 * dt * k2[0], v + 0.5 * dt * k2[1], sign)
    if k3 is None:
        return None
    k4 = _field(c1, w + dt * k3[0], v + dt * k3[1], sign)
    if k4 is None:
        return None
    w_new = w + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
    v_new = v + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
    return w_new, v_new


def _admissible_step(profile, s, coef, w, v, dt, sign, guard, c1=None):
    """Try a step of signed length ``dt``; return the new state or ``None``."""
    cm = profile.coefficients(s + 0.5 * dt)
    if c1 is None:
        c1 = profile.coefficients(s + dt)
    out = _rk4(coef, cm, c1, w, v, dt, sign)
    if out is None:
        return None
    w_new, v_new = out
    r = 1.0 - w_new * w_new - (v_new / c1[0]) ** 2
    if not r >= guard:
        return None
    return w_new, v_new, c1, r


def _sweep(profile, grid, w0, v0, sign, guard, h):
    """Integrate along ``grid`` (monotone, starting at s0)."""
    ws = [w0]
    vs = [v0]
    coef = profile.coefficients(grid[0])
    for j in range(1, len(grid)):
        s = grid[j - 1]
        dt = grid[j] - s
        step = _admissible_step(profile, s, coef, ws[-1], vs[-1], dt, sign, guard)
        if step is None:
            return ws, vs, _refine_exit(profile, s, coef, ws[-1], vs[-1], dt, sign, guard, h)
        w_new, v_new, coef, _ = step
        ws.append(w_new)
        vs.append(v_new)
    end = grid[-1]
    k = coef[0]
    return ws, vs, Termination(REACHED_END, float(end), 1.0 - ws[-1] ** 2 - (vs[-1] / k) ** 2)


def _refine_exit(profile, s, coef, w, v, dt, sign, guard, h):
    """Bisect the failed step down to ``h/100`` to locate the chart exit."""
    lo, hi = 0.0, abs(dt)
    direction = 1.0 if dt > 0 else -1.0
    r_lo = 1.0 - w * w - (v / coef[0]) ** 2
    while hi - lo > h / 100.0:
        mid = 0.5 * (lo + hi)
        step = _admissible_step(profile, s, coef, w, v, direction * mid, sign, guard)
        if step is None:
            hi = mid
        else:
            lo = mid
            r_lo = step[3]
    return Termination(DOMAIN_EXIT, float(s + direction * lo), float(r_lo), float(hi - lo))


def solve_w(
    profile: IntrinsicProfile,
    s0: float,
    w0: float,
    v0: float,
    *,
    h: float = DEFAULT_STEP,
    guard: float = DEFAULT_GUARD,
    direction: str = "both",
    sign: int = 1,
) -> WSolution:
    """Integrate the ``w`` equation from ``(s0, w0, v0)`` with fixed-step RK4.

    Parameters
    ----------
    profile : IntrinsicProfile
    s0, w0, v0 : float
        Initial point, ``a <= s0 <= b``; ``(w0, v0)`` must lie strictly
        inside the ellipse ``w^2 + (v/kappa(s0))^2 < 1``.
    h : float
        Grid step.  The grid is ``s0 + k*h``; the final step to an endpoint
        of the domain may be shorter.
    guard : float
        Smallest radicand a retained state may have.
    direction : {"forward", "backward", "both"}
    sign : {+1, -1}
        Branch of the square root (``+1`` for ``<b, e3> > 0``).

    Returns
    -------
    WSolution
        Samples up to the domain ends or to the last grid point before the
        state would leave the admissible region.
    """
    if direction not in ("forward", "backward", "both"):
        raise ValueError(f"unknown direction {direction!r}")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if h <= 0:
        raise ValueError("step must be positive")
    if not profile.a <= s0 <= profile.b:
        raise InitialConditionError(f"s0={s0!r} lies outside [{profile.a}, {profile.b}]")
    if (direction == "forward" and s0 == profile.b) or (direction == "backward" and s0 == profile.a):
        raise InitialConditionError(f"nothing to integrate {direction} from s0={s0!r}")
    k0 = profile.kappa(s0)
    ellipse = w0 * w0 + (v0 / k0) ** 2
    if not ellipse < 1.0:
        raise InitialConditionError(
            f"initial state (w0={w0!r}, v0={v0!r}) lies outside the admissible ellipse "
            f"(w0^2 + (v0/kappa)^2 = {ellipse!r})"
        )
    if 1.0 - ellipse < guard:
        raise InitialConditionError(f"initial radicand {1.0 - ellipse!r} is below the guard {guard!r}")

    lower = upper = None
    s_parts, w_parts, v_parts = [], [], []
    # an endpoint s0 leaves nothing to do on that side
    if direction == "both" and s0 == profile.a:
        direction = "forward"
        lower = Termination(REACHED_END, float(s0), 1.0 - ellipse)
    elif direction == "both" and s0 == profile.b:
        direction = "backward"
        upper = Termination(REACHED_END, float(s0), 1.0 - ellipse)
    if direction in ("backward", "both"):
        grid = uniform_grid(s0, profile.a, h)
        ws, vs, lower = _sweep(profile, grid, w0, v0, sign, guard, h)
        n = len(ws)
        s_parts.append(grid[:n][::-1])
        w_parts.append(np.array(ws[::-1]))
        v_parts.append(np.array(vs[::-1]))
    i0 = len(s_parts[0]) - 1 if s_parts else 0
    if direction in ("forward", "both"):
        grid = uniform_grid(s0, profile.b, h)
        ws, vs, upper = _sweep(profile, grid, w0, v0, sign, guard, h)
        n = len(ws)
        skip = 1 if s_parts else 0
        s_parts.append(grid[skip:n])
        w_parts.append(np.array(ws[skip:]))
        v_parts.append(np.array(vs[skip:]))
    return WSolution(
        s=np.concatenate(s_parts),
        w=np.concatenate(w_parts),
        v=np.concatenate(v_parts),
        h=float(h),
        i0=i0,
        sign=sign,
        lower=lower,
        upper=upper,
    )
