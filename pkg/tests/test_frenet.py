import math

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from curveforge.curves import FrenetFrame, RigidMotion, SampledCurve
from curveforge.errors import ChartBoundaryError, DegenerateCurveError, GridMismatchError
from curveforge.frenet import (
    EDGE,
    estimate_frames,
    estimate_kappa_tau,
    frenet_integrate,
    initial_conditions_from_frame,
    kabsch_align,
)
from curveforge.ode import IntrinsicProfile
from curveforge.reconstruct import reconstruct

E = FrenetFrame(np.eye(3)[0], np.eye(3)[1], np.eye(3)[2])
R0 = Rotation.from_euler("zyx", [0.7, -0.4, 1.9]).as_matrix()


def helix(a, b, h=1e-3, n=2001):
    s = h * np.arange(n)
    c = math.hypot(a, b)
    pts = np.column_stack([a * np.cos(s / c), a * np.sin(s / c), b * s / c])
    return SampledCurve(s, pts)


def test_oracle_circle_closes():
    p = IntrinsicProfile("1", "0", 0.0, 2 * math.pi)
    curve = frenet_integrate(p, E)
    assert np.linalg.norm(curve.points[-1] - curve.points[0]) <= 1e-6
    np.testing.assert_allclose(curve.points[:, 2], 0.0, atol=1e-15)


def test_oracle_frames_stay_orthonormal():
    p = IntrinsicProfile("1 + 0.3*sin(2*s)", "cos(s)", 0.0, 3.0)
    curve = frenet_integrate(p, E)
    F = curve.frames
    gram = np.einsum("nij,nkj->nik", F, F)
    assert np.max(np.abs(gram - np.eye(3))) <= 1e-12


def test_oracle_starts_inside_domain():
    p = IntrinsicProfile("1", "0.5", 0.0, 2.0)
    curve = frenet_integrate(p, E, (1.0, 2.0, 3.0), s0=0.7)
    i = curve.index_of(0.7)
    assert curve.s[i] == 0.7
    np.testing.assert_array_equal(curve.points[i], [1.0, 2.0, 3.0])
    assert curve.s[0] == 0.0 and curve.s[-1] == 2.0


def test_oracle_estimates_match_profile():
    p = IntrinsicProfile("1", "1", 0.0, 4.0)
    est = estimate_kappa_tau(frenet_integrate(p, E))
    assert np.max(np.abs(est.kappa - 1)) <= 1e-3
    assert np.max(np.abs(est.tau - 1)) <= 1e-3


def test_estimate_helix():
    est = estimate_kappa_tau(helix(1.0, 1.0))
    assert np.max(np.abs(est.kappa - 0.5)) <= 1e-4
    assert np.max(np.abs(est.tau - 0.5)) <= 1e-4
    assert len(est.s) == 2001 - 2 * EDGE
    assert est.s[0] == helix(1.0, 1.0).s[EDGE]


def test_estimate_circle():
    est = estimate_kappa_tau(helix(1.0, 0.0))
    assert np.max(np.abs(est.kappa - 1)) <= 1e-4
    assert np.max(np.abs(est.tau)) <= 1e-4


def test_estimate_non_unit_speed():
    # the general curvature formula does not assume unit speed
    base = helix(1.0, 1.0, h=1e-2, n=300)
    scaled = SampledCurve(base.s * 0.5, base.points)
    est = estimate_kappa_tau(scaled)
    assert np.max(np.abs(est.kappa - 0.5)) <= 1e-4


def test_estimate_line_is_degenerate():
    s = 1e-3 * np.arange(100)
    line = SampledCurve(s, np.column_stack([s, 2 * s, -s]) / math.sqrt(6))
    with pytest.raises(DegenerateCurveError):
        estimate_kappa_tau(line)


def test_estimate_rejects_irregular_grid():
    c = helix(1.0, 1.0, n=50)
    s = c.s.copy()
    s[20] += 1e-4
    with pytest.raises(ValueError):
        estimate_kappa_tau(SampledCurve(s, c.points))


def test_estimates_invariant_under_rigid_motion():
    c = helix(1.0, 0.7, h=0.05, n=80)
    motion = RigidMotion(R0, [3.0, -7.0, 10.0])
    a = estimate_kappa_tau(c)
    b = estimate_kappa_tau(c.transformed(motion))
    np.testing.assert_allclose(b.kappa, a.kappa, rtol=0, atol=1e-10)
    np.testing.assert_allclose(b.tau, a.tau, rtol=0, atol=1e-10)


def test_estimate_frames_on_helix():
    c = helix(1.0, 1.0)
    idx, F = estimate_frames(c)
    s = c.s[idx] / math.sqrt(2)
    np.testing.assert_allclose(F[:, 1], np.column_stack([-np.cos(s), -np.sin(s), 0 * s]), atol=1e-6)
    np.testing.assert_allclose(F[:, 2, 2], 1 / math.sqrt(2), atol=1e-6)


def test_kabsch_identity():
    c = helix(1.0, 1.0, n=200)
    motion, rmsd = kabsch_align(c, c)
    assert rmsd <= 1e-14
    np.testing.assert_allclose(motion.R, np.eye(3), atol=1e-12)
    np.testing.assert_allclose(motion.c, 0.0, atol=1e-12)


def test_kabsch_recovers_motion():
    c = helix(1.0, 0.3, n=500)
    c0 = np.array([0.5, -2.0, 1.25])
    motion, rmsd = kabsch_align(c, c.transformed(RigidMotion(R0, c0)))
    assert rmsd <= 1e-12
    assert np.linalg.norm(motion.R - R0) <= 1e-9
    assert np.linalg.norm(motion.c - c0) <= 1e-9


def test_kabsch_never_reflects():
    c = helix(1.0, 1.0, h=1e-2, n=1000)
    mirrored = SampledCurve(c.s, c.points * [1.0, 1.0, -1.0])
    motion, rmsd = kabsch_align(c, mirrored)
    assert np.linalg.det(motion.R) == pytest.approx(1.0)
    assert rmsd > 1e-2


def test_kabsch_grid_mismatch():
    c = helix(1.0, 1.0, n=100)
    with pytest.raises(GridMismatchError):
        kabsch_align(c, helix(1.0, 1.0, n=99))
    with pytest.raises(GridMismatchError):
        kabsch_align(c, SampledCurve(c.s + 1e-3, c.points))


def test_reconstruct_agrees_with_oracle():
    p = IntrinsicProfile("1", "1", 0.0, 4.0)
    rec = reconstruct(p, 0.0, 0.5, 0.0)
    curve = rec.curve
    assert not rec.events
    oracle = frenet_integrate(p, curve.frame(0), curve.points[0])
    assert kabsch_align(curve, oracle)[1] <= 1e-5


def test_initial_conditions_from_frame():
    assert initial_conditions_from_frame(E, 2.5) == (0.0, 0.0)
    r = math.sqrt(0.5)
    f = FrenetFrame.from_vectors([r, 0, r], [0, 1, 0])
    w0, v0 = initial_conditions_from_frame(f, 1.0)
    assert w0 == pytest.approx(0.70711, abs=1e-5) and v0 == 0.0
    np.testing.assert_allclose(f.b, [-r, 0, r])


def test_initial_conditions_on_boundary():
    r = math.sqrt(0.5)
    f = FrenetFrame.from_vectors([r, 0, r], [r, 0, -r])
    with pytest.raises(ChartBoundaryError):
        initial_conditions_from_frame(f, 2.0)


def test_initial_conditions_wrong_hemisphere():
    flipped = FrenetFrame([1, 0, 0], [0, -1, 0], [0, 0, -1])
    with pytest.raises(ChartBoundaryError):
        initial_conditions_from_frame(flipped, 1.0)
    assert initial_conditions_from_frame(flipped, 1.0, sign=-1) == (0.0, 0.0)
