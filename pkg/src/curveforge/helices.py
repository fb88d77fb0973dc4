"""General helices, slant helices and a profile classifier.

A general helix has ``tau/kappa == m`` constant; its tangent makes the
constant angle ``arccos(m / sqrt(1 + m^2))`` with ``e3``.  A slant helix has
constant

    sigma = kappa^2 / (kappa^2 + tau^2)^(3/2) * (tau/kappa)'

and its principal normal makes a constant angle with ``e3``.  With
``S(s) = int_0^s kappa`` and ``u = m S + A`` the slant-helix torsion is
``tau = kappa * u / sqrt(1 - u^2)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid, quad
from scipy.interpolate import CubicHermiteSpline

from .curves import SampledCurve, orthonormalize, uniform_grid
from .errors import SlantDomainError
from .frenet import kabsch_align
from .ode import DEFAULT_STEP, IntrinsicProfile, _stencil_derivative
from .reconstruct import reconstruct

__all__ = [
    "HelixClass",
    "SlantTorsion",
    "general_helix",
    "slant_tau",
    "slant_helix",
    "sigma_invariant",
    "sigma_from_samples",
    "classify",
    "SLANT_CHECK_RMSD",
]

#: alignment rmsd above which the slant-helix orientation is rejected
SLANT_CHECK_RMSD = 1e-4

_GL_X, _GL_W = np.polynomial.legendre.leggauss(5)


def _anchor(a: float, b: float) -> float:
    return 0.0 if a < 0.0 < b else 0.5 * (a + b)


def _anchored_grid(a: float, b: float, anchor: float, h: float):
    """Grid ``anchor + k*h`` over [a, b] and the index of ``anchor``."""
    lower = uniform_grid(anchor, a, h)[::-1] if anchor > a else np.array([anchor])
    upper = uniform_grid(anchor, b, h)[1:] if anchor < b else np.array([])
    return np.concatenate([lower, upper]), len(lower) - 1


def _kappa_on(kappa, s):
    return np.array([kappa(float(x)) for x in s])


class SlantTorsion:
    """Torsion ``kappa * u / sqrt(1 - u^2)`` with ``u = m int_0^s kappa + A``.

    ``int_0^s kappa`` is tabulated once on a grid over ``domain`` (extended to
    contain 0) with five-point Gauss-Legendre per cell and interpolated by
    cubic Hermite splines, so the returned torsion is smooth enough to be
    differentiated numerically.  Instances are immutable after construction.
    """

    def __init__(self, m, A, kappa, domain=None, h=DEFAULT_STEP):
        self.m = float(m)
        self.A = float(A)
        self.kappa = kappa
        if domain is None:
            domain = (-self._extent(-1.0), self._extent(1.0))
        lo = min(float(domain[0]), 0.0)
        hi = max(float(domain[1]), 0.0)
        nodes, i0 = _anchored_grid(lo, hi, 0.0, h)
        left, right = nodes[:-1], nodes[1:]
        half = 0.5 * (right - left)
        mid = 0.5 * (right + left)
        pts = mid[:, None] + half[:, None] * _GL_X[None, :]
        vals = np.array([[kappa(float(x)) for x in row] for row in pts])
        cells = half * (vals @ _GL_W)
        S = np.concatenate([[0.0], np.cumsum(cells)])
        S -= S[i0]
        self.lo, self.hi = lo, hi
        self._spline = CubicHermiteSpline(nodes, S, _kappa_on(kappa, nodes))

    def _extent(self, direction, cap=1024.0):
        """Distance from 0 at which ``|u|`` first reaches 1 (doubling search)."""
        length = 1.0
        while length < cap:
            S, _ = quad(self.kappa, 0.0, direction * length)
            if abs(self.m * S + self.A) >= 1.0:
                break
            length *= 2.0
        return length

    def integral(self, s: float) -> float:
        """``int_0^s kappa``."""
        if not self.lo <= s <= self.hi:
            raise SlantDomainError(f"s={s!r} outside the tabulated range [{self.lo}, {self.hi}]")
        return float(self._spline(s))

    def u(self, s: float) -> float:
        return self.m * self.integral(s) + self.A

    def __call__(self, s: float) -> float:
        u = self.u(s)
        # the tabulated integral carries rounding error; treat that as the boundary
        if not abs(u) < 1.0 - 1e-12:
            raise SlantDomainError(f"|m*int(kappa) + A| = {abs(u)!r} >= 1 at s={s!r}")
        return self.kappa(s) * u / math.sqrt(1.0 - u * u)

    def __repr__(self):
        return f"SlantTorsion(m={self.m!r}, A={self.A!r})"


def slant_tau(m, A, kappa, domain=None, h=DEFAULT_STEP) -> SlantTorsion:
    """Torsion function of the slant helix with invariant ``m``; see :class:`SlantTorsion`.

    Without ``domain`` the tabulation covers the whole range around 0 where
    ``|m int_0^s kappa + A| < 1`` (up to a distance of 1024).
    """
    return SlantTorsion(m, A, kappa, domain, h)


@dataclass(frozen=True)
class HelixClass:
    """``kind`` is ``"general-helix"``, ``"slant-helix"`` or ``"generic"``."""

    kind: str
    m: float | None = None

    def __str__(self):
        if self.m is None:
            return self.kind
        return f"{self.kind} m={self.m:.12g}"


def general_helix(m: float, kappa, domain, h: float = DEFAULT_STEP) -> SampledCurve:
    """General helix with ``tau = m*kappa`` in closed form.

    ``Theta = sqrt(1+m^2) int kappa``; ``x = int cos(Theta)/sqrt(1+m^2)``,
    ``y = int sin(Theta)/sqrt(1+m^2)``, ``z = m s / sqrt(1+m^2)``.
    """
    a, b = map(float, domain)
    c = math.sqrt(1.0 + m * m)
    anchor = _anchor(a, b)
    s, i0 = _anchored_grid(a, b, anchor, h)
    k = _kappa_on(kappa, s)
    if np.any(k <= 0):
        raise ValueError("curvature must be positive")
    K = cumulative_trapezoid(k, s, initial=0.0)
    theta = c * (K - K[i0])
    ct, st = np.cos(theta), np.sin(theta)
    xy = cumulative_trapezoid(np.column_stack([ct, st]) / c, s, axis=0, initial=0.0)
    xy -= xy[i0]
    points = np.column_stack([xy, m * s / c])
    t = np.column_stack([ct / c, st / c, np.full_like(s, m / c)])
    n = np.column_stack([-st, ct, np.zeros_like(s)])
    t, n, bn = orthonormalize(t, n)
    return SampledCurve(s, points, np.stack([t, n, bn], axis=1))


def _slant_curve(m, s, i0, S, k, y_sign):
    c = math.sqrt(1.0 + m * m)
    u = m * S
    psi = c * np.arccos(u) / m
    sq = np.sqrt(1.0 - u * u)
    # inner integration constants make the tangent a unit vector
    cx = sq[i0] * math.cos(psi[i0]) - m * m / c * S[i0] * math.sin(psi[i0])
    cy = -sq[i0] * math.sin(psi[i0]) - m * m / c * S[i0] * math.cos(psi[i0])
    tx = cumulative_trapezoid(k * np.sin(psi) / c, s, initial=0.0)
    ty = cumulative_trapezoid(k * np.cos(psi) / c, s, initial=0.0)
    tx += cx - tx[i0]
    ty += cy - ty[i0]
    tz = abs(m) / c * S
    tangent = np.column_stack([tx, y_sign * ty, tz])
    points = cumulative_trapezoid(tangent, s, axis=0, initial=0.0)
    points -= points[i0]
    n = np.column_stack([np.sin(psi), y_sign * np.cos(psi), np.full_like(s, abs(m))]) / c
    t, n, b = orthonormalize(tangent, n)
    return SampledCurve(s, points, np.stack([t, n, b], axis=1))


def slant_helix(m: float, kappa, domain, h: float = DEFAULT_STEP) -> SampledCurve:
    """Slant helix with invariant ``m`` (and ``A = 0``) from its closed form.

    The tangent components are the inner integrals of the closed form
    (``sin``/``cos`` of ``sqrt(1+m^2) arccos(m S)/m`` weighted by ``kappa``),
    ``z = |m|/sqrt(1+m^2) int S``.  The orientation of the ``y`` axis is
    settled by comparing against :func:`curveforge.reconstruct.reconstruct`
    fed with the same curvature and :func:`slant_tau`; the outcome is
    recorded in ``curve.events``.
    """
    if m == 0:
        raise ValueError("slant helices need m != 0")
    a, b = map(float, domain)
    anchor = _anchor(a, b)
    s, i0 = _anchored_grid(a, b, anchor, h)
    tau = slant_tau(m, 0.0, kappa, (a, b), h)
    S = np.array([tau.integral(float(x)) for x in s])
    if np.any(np.abs(m * S) >= 1.0 - 1e-9):
        j = int(np.argmax(np.abs(m * S)))
        raise SlantDomainError(f"|m*int(kappa)| reaches {abs(m * S[j])!r} at s={s[j]!r}")
    k = _kappa_on(kappa, s)

    profile = IntrinsicProfile(kappa, tau, a, b)
    rmsds = {}
    for y_sign in (1.0, -1.0):
        curve = _slant_curve(m, s, i0, S, k, y_sign)
        ref = reconstruct(profile, anchor, start=curve.points[i0], frame=curve.frame(i0), h=h).curve
        if len(ref) != len(curve):
            ref_curve = curve.restricted(ref.s[0], ref.s[-1])
        else:
            ref_curve = curve
        rmsd = kabsch_align(ref_curve, ref)[1]
        rmsds[y_sign] = rmsd
        if rmsd <= SLANT_CHECK_RMSD:
            curve.events.append(
                {"event": "sign_branch", "y_sign": int(y_sign), "flipped": y_sign < 0, "check_rmsd": rmsd}
            )
            return curve
    raise ArithmeticError(f"slant-helix closed form disagrees with reconstruction: rmsd {rmsds}")


def sigma_invariant(profile: IntrinsicProfile, samples: int = 201, delta: float = 1e-5):
    """``sigma`` on a uniform grid; ``(tau/kappa)'`` by central differences.

    Returns ``(s, sigma)``.
    """
    samples = max(int(samples), 201)
    s = np.linspace(profile.a, profile.b, samples)

    def ratio(x):
        return profile.tau(x) / profile.kappa(x)

    sigma = np.empty_like(s)
    for i, x in enumerate(s):
        x = float(x)
        k = profile.kappa(x)
        t = profile.tau(x)
        d = _stencil_derivative(ratio, x, delta, profile.a, profile.b)
        sigma[i] = k * k / (k * k + t * t) ** 1.5 * d
    return s, sigma


def sigma_from_samples(s, kappa, tau) -> np.ndarray:
    """``sigma`` from sampled curvature/torsion (e.g. estimates of a curve)."""
    s = np.asarray(s, dtype=float)
    kappa = np.asarray(kappa, dtype=float)
    tau = np.asarray(tau, dtype=float)
    d = np.gradient(tau / kappa, s)
    return kappa**2 / (kappa**2 + tau**2) ** 1.5 * d


def _nearly_constant(values, tol):
    mean = float(np.mean(values))
    return float(np.ptp(values)) <= tol * (1.0 + abs(mean)), mean


def classify(profile: IntrinsicProfile, tol: float = 1e-6, samples: int = 201) -> HelixClass:
    """General helix if ``tau/kappa`` is constant, else slant helix if
    ``sigma`` is constant and nonzero, else generic.  Constancy means a
    sampled range at most ``tol * (1 + |mean|)``."""
    s = np.linspace(profile.a, profile.b, max(int(samples), 201))
    ratio = np.array([profile.tau(float(x)) / profile.kappa(float(x)) for x in s])
    flat, mean = _nearly_constant(ratio, tol)
    if flat:
        return HelixClass("general-helix", mean)
    _, sigma = sigma_invariant(profile, samples)
    flat, mean = _nearly_constant(sigma, tol)
    if flat and abs(mean) > tol:
        return HelixClass("slant-helix", mean)
    return HelixClass("generic")
