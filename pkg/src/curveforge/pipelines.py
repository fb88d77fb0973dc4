"""Run-level pipelines shared by the command line and the acceptance suite.

Each pipeline takes a plain ``dict`` describing a profile and initial data
(the same shape as the ``inputs`` echo of a run report) and returns plain
results, so that batches can be farmed out to worker processes.
"""
from __future__ import annotations

import time

import numpy as np

from .curves import FrenetFrame
from .errors import ChartBoundaryError, CurveForgeError
from .frenet import frenet_integrate, kabsch_align
from .ode import DEFAULT_STEP, IntrinsicProfile
from .reconstruct import check_invariants, reconstruct

__all__ = ["random_profile_specs", "profile_from_spec", "run_reconstruct", "run_verify", "run_compare"]

SPEC_DEFAULTS = {"step": DEFAULT_STEP, "restart": False, "theta0": 0.0, "start": [0.0, 0.0, 0.0]}


def random_profile_specs(count: int, seed: int = 0) -> list[dict]:
    """Seeded profiles ``kappa = 1 + a sin(omega s)``, constant ``tau``.

    ``a`` in [0, 0.5], ``omega`` in [0.5, 2], ``tau`` in [-1, 1]; domain
    [0, 2] with ``(w0, v0) = (0, 0)`` at ``s0 = 1``.
    """
    rng = np.random.default_rng(seed)
    specs = []
    for _ in range(count):
        a = float(rng.uniform(0.0, 0.5))
        omega = float(rng.uniform(0.5, 2.0))
        tau = float(rng.uniform(-1.0, 1.0))
        specs.append(
            {
                "kappa": f"1 + {a!r}*sin({omega!r}*s)",
                "tau": repr(tau),
                "smin": 0.0,
                "smax": 2.0,
                "s0": 1.0,
                "w0": 0.0,
                "v0": 0.0,
            }
        )
    return specs


def _complete(spec: dict) -> dict:
    full = dict(SPEC_DEFAULTS)
    full.update(spec)
    for key in ("kappa", "tau", "smin", "smax", "s0"):
        if key not in full:
            raise ValueError(f"profile is missing {key!r}")
    if full.get("frame") is None and ("w0" not in full or "v0" not in full):
        raise ValueError("profile needs either w0 and v0 or a frame")
    return full


def profile_from_spec(spec: dict) -> IntrinsicProfile:
    return IntrinsicProfile(str(spec["kappa"]), str(spec["tau"]), float(spec["smin"]), float(spec["smax"]))


def run_reconstruct(spec: dict):
    """Reconstruct the curve described by ``spec``.

    Returns ``(spec, profile, Reconstruction)``.  A chart exit without
    ``restart`` raises :class:`ChartBoundaryError`.
    """
    spec = _complete(spec)
    profile = profile_from_spec(spec)
    frame = None
    if spec.get("frame") is not None:
        frame = FrenetFrame.from_values(spec["frame"])
    rec = reconstruct(
        profile,
        float(spec["s0"]),
        None if frame is not None else float(spec["w0"]),
        None if frame is not None else float(spec["v0"]),
        spec["start"],
        frame=frame,
        theta0=float(spec["theta0"]),
        h=float(spec["step"]),
        restart=bool(spec["restart"]),
    )
    exits = [e for e in rec.events if e["event"] == "domain_exit"]
    if exits and not spec["restart"]:
        e = exits[0]
        raise ChartBoundaryError(
            f"chart boundary reached at s={e['s']!r} (radicand {e['radicand']:.3g}); rerun with --restart"
        )
    return spec, profile, rec


def run_verify(spec: dict) -> dict:
    """Reconstruct, re-estimate curvature/torsion and compare with the inputs."""
    t0 = time.perf_counter()
    try:
        spec, profile, rec = run_reconstruct(spec)
        t1 = time.perf_counter()
        metrics = check_invariants(rec.curve, profile)
    except CurveForgeError as exc:
        return {"inputs": spec, "error": {"stage": exc.stage, "message": str(exc)}}
    t2 = time.perf_counter()
    return {
        "inputs": spec,
        "metrics": metrics,
        "events": rec.events,
        "timing_ms": {"reconstruct": 1e3 * (t1 - t0), "estimate": 1e3 * (t2 - t1)},
    }


def run_compare(spec: dict) -> dict:
    """Reconstruct and compare against the Frenet-Serret oracle started from
    the reconstructed frame at ``s0``."""
    t0 = time.perf_counter()
    spec, profile, rec = run_reconstruct(spec)
    curve = rec.curve
    t1 = time.perf_counter()
    i0 = curve.index_of(float(spec["s0"]))
    sub = IntrinsicProfile(profile.kappa, profile.tau, float(curve.s[0]), float(curve.s[-1]))
    oracle = frenet_integrate(sub, curve.frame(i0), curve.points[i0], h=float(spec["step"]), s0=float(curve.s[i0]))
    t2 = time.perf_counter()
    _, rmsd = kabsch_align(curve, oracle)
    raw = float(np.max(np.linalg.norm(curve.points - oracle.points, axis=1)))
    return {
        "inputs": spec,
        "metrics": {"oracle_rmsd": rmsd, "max_raw_deviation": raw, "unit_speed_deviation": curve.speed_deviation()},
        "events": rec.events,
        "timing_ms": {"reconstruct": 1e3 * (t1 - t0), "oracle": 1e3 * (t2 - t1)},
    }
