"""Acceptance criteria, one test per criterion.

Every test records a single ``PASS``/``FAIL`` line (printed at the end of the
pytest run by ``conftest.py``, or directly when this file is executed as a
script).  Tolerances are the contractual ones; nothing is loosened here.
"""
import math
import sys
from pathlib import Path

import numpy as np

from curveforge.expr import parse, to_text
from curveforge.frenet import estimate_frames, estimate_kappa_tau, frenet_integrate, kabsch_align
from curveforge.helices import classify, general_helix, sigma_from_samples, slant_helix, slant_tau
from curveforge.ode import IntrinsicProfile, solve_w
from curveforge.output import curve_to_csv
from curveforge.pipelines import profile_from_spec, random_profile_specs
from curveforge.reconstruct import check_invariants, reconstruct

sys.path.insert(0, str(Path(__file__).parent))
from test_expr import SYNTAX_CASES, VALUE_CASES  # noqa: E402

from curveforge.errors import ExprSyntaxError  # noqa: E402

SEED = 20240601
H = 1e-3
LINES = []


def record(number, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    LINES.append(line)
    print(line)
    return ok


def one(s):
    return 1.0


def _profiles():
    return [(spec, profile_from_spec(spec)) for spec in random_profile_specs(10, SEED)]


def test_criterion_1_round_trip():
    worst_k = worst_t = 0.0
    for spec, profile in _profiles():
        curve = reconstruct(profile, spec["s0"], spec["w0"], spec["v0"], h=H).curve
        m = check_invariants(curve, profile)
        worst_k = max(worst_k, m["max_kappa_error"])
        worst_t = max(worst_t, m["max_tau_error"])
    ok = worst_k <= 1e-3 and worst_t <= 1e-3
    assert record(1, ok, f"10 profiles, max rel kappa err {worst_k:.2e}, max tau err {worst_t:.2e} (tol 1e-3)")


def test_criterion_2_uniqueness():
    worst = 0.0
    worst_R = worst_c = 0.0
    rng = np.random.default_rng(SEED)
    for spec, profile in _profiles():
        curve = reconstruct(profile, spec["s0"], spec["w0"], spec["v0"], h=H).curve
        i0 = curve.index_of(spec["s0"])
        oracle = frenet_integrate(profile, curve.frame(i0), curve.points[i0], h=H, s0=spec["s0"])
        worst = max(worst, kabsch_align(curve, oracle)[1])
        # rotated (about e3, via the initial azimuth) and translated start
        alpha = float(rng.uniform(-math.pi, math.pi))
        shift = rng.uniform(-5.0, 5.0, 3)
        moved = reconstruct(profile, spec["s0"], spec["w0"], spec["v0"], shift, theta0=alpha, h=H).curve
        motion, _ = kabsch_align(curve, moved)
        c, s = math.cos(alpha), math.sin(alpha)
        Rz = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
        worst_R = max(worst_R, float(np.linalg.norm(motion.R - Rz)))
        worst_c = max(worst_c, float(np.linalg.norm(motion.c - shift)))
    ok = worst <= 1e-5 and worst_R <= 1e-9 and worst_c <= 1e-9
    assert record(
        2,
        ok,
        f"oracle rmsd {worst:.2e} (tol 1e-5); recovered motion rotation err {worst_R:.2e}, "
        f"translation err {worst_c:.2e} (tol 1e-9)",
    )


def test_criterion_3_constant_solution():
    worst = 0.0
    for m in (0.25, -0.25, 1.0, -1.0, 3.0, -3.0):
        xi = m / math.sqrt(1 + m * m)
        sol = solve_w(IntrinsicProfile(one, lambda s, m=m: m, 0.0, 2.0), 1.0, xi, 0.0, h=H)
        worst = max(worst, float(np.max(np.abs(sol.w - xi))))
    assert record(3, worst <= 1e-8, f"max |w - m/sqrt(1+m^2)| {worst:.2e} over 6 values of m (tol 1e-8)")


def test_criterion_4_general_helix():
    c = general_helix(1.0, one, (0.0, 2 * math.pi), h=H)
    t_err = float(np.max(np.abs(c.tangents[:, 2] - 1 / math.sqrt(2))))
    z_err = float(np.max(np.abs((c.points[:, 2] - c.points[0, 2]) - (c.s - c.s[0]) / math.sqrt(2))))
    est = estimate_kappa_tau(c)
    kt_err = float(max(np.max(np.abs(est.kappa - 1)), np.max(np.abs(est.tau - 1))))
    ok = t_err <= 1e-6 and z_err <= 1e-9 and kt_err <= 1e-3
    assert record(4, ok, f"<t,e3> err {t_err:.2e} (1e-6), z linearity err {z_err:.2e} (1e-9), "
                         f"(kappa,tau) err {kt_err:.2e} (1e-3)")


def test_criterion_5_slant_helix():
    m = 0.5
    domain = (-1.9, 1.9)
    c = slant_helix(m, one, domain, h=H)
    _, F = estimate_frames(c)
    n_err = float(np.max(np.abs(F[:, 1, 2] - 0.44721)))
    est = estimate_kappa_tau(c)
    sigma = sigma_from_samples(est.s, est.kappa, est.tau)
    s_err = float(np.max(np.abs(sigma[1:-1] - m)))
    profile = IntrinsicProfile(one, slant_tau(m, 0.0, one, domain, h=H), *domain)
    i0 = c.index_of(0.0)
    ref = reconstruct(profile, 0.0, start=c.points[i0], frame=c.frame(i0), h=H).curve
    rmsd = kabsch_align(c, ref)[1]
    ok = n_err <= 1e-3 and s_err <= 1e-3 and rmsd <= 1e-4
    assert record(5, ok, f"<n,e3> err {n_err:.2e} (1e-3), sigma err {s_err:.2e} (1e-3), "
                         f"rmsd vs reconstruct {rmsd:.2e} (1e-4)")


def _guard_clauses(w0, domain, s0):
    profile = IntrinsicProfile(one, lambda s: 5.0, *domain)
    plain = reconstruct(profile, s0, w0, 0.0, h=H)
    exited = any(e["event"] == "domain_exit" for e in plain.events)
    restarted = reconstruct(profile, s0, w0, 0.0, h=H, restart=True)
    outputs = [restarted.curve.points, restarted.curve.frames, plain.curve.points, plain.curve.frames]
    outputs += [a for sol in plain.solutions + restarted.solutions for a in (sol.w, sol.v)]
    nans = sum(int(np.isnan(a).sum()) for a in outputs)
    nans += curve_to_csv(restarted.curve, frames=True).lower().count("nan")
    curve = restarted.curve
    i0 = curve.index_of(s0)
    oracle = frenet_integrate(profile, curve.frame(i0), curve.points[i0], h=H, s0=s0)
    rmsd = kabsch_align(curve, oracle)[1]
    restarts = sum(e["event"] == "restart" for e in restarted.events)
    return exited, nans, rmsd, restarts


def test_criterion_6_domain_guard():
    # the configuration exactly as stated: kappa 1, tau 5, w0 = 0.99, v0 = 0
    exited, nans, rmsd, restarts = _guard_clauses(0.99, (0.0, 2 * math.pi), 0.0)
    ok = exited and nans == 0 and rmsd <= 1e-4
    assert record(
        6,
        ok,
        f"w0=+0.99: DomainExit {'seen' if exited else 'NOT seen'}, NaN count {nans}, "
        f"restart rmsd vs oracle {rmsd:.2e} (1e-4), {restarts} restarts",
    )


def test_criterion_6_supplement_mirrored_start():
    # w0 = -0.99 tilts the rotation axis away from e3, so the binormal does cross the horizontal
    exited, nans, rmsd, restarts = _guard_clauses(-0.99, (0.0, 2.0), 1.0)
    ok = exited and nans == 0 and rmsd <= 1e-4
    assert record(
        "6 (supplement)",
        ok,
        f"w0=-0.99: DomainExit {'seen' if exited else 'NOT seen'}, NaN count {nans}, "
        f"restart rmsd vs oracle {rmsd:.2e} (1e-4), {restarts} restarts",
    )


def test_criterion_7_solver_order():
    profile = IntrinsicProfile(lambda s: 4.0, lambda s: 0.0, 0.0, 2 * math.pi)
    errors = []
    for h in (2e-3, 1e-3):
        sol = solve_w(profile, 0.0, 0.5, 0.0, h=h, direction="forward")
        errors.append(float(np.max(np.abs(sol.w - 0.5 * np.cos(4 * sol.s)))))
    ratio = errors[0] / errors[1]
    assert record(7, ratio >= 12, f"error {errors[0]:.2e} -> {errors[1]:.2e}, reduction x{ratio:.1f} (need >= 12)")


def test_criterion_8_classifier():
    general = classify(IntrinsicProfile(one, one, 0.0, 1.0))
    slant = classify(IntrinsicProfile(one, slant_tau(0.5, 0.0, one), 0.0, 1.0))
    generic = classify(IntrinsicProfile(one, lambda s: s, 0.0, 2.0))
    ok = (
        general.kind == "general-helix"
        and abs(general.m - 1) <= 1e-6
        and slant.kind == "slant-helix"
        and abs(slant.m - 0.5) <= 1e-4
        and generic.kind == "generic"
    )
    assert record(8, ok, f"{general}; {slant}; {generic}")


def test_criterion_9_expressions():
    failures = 0
    for text, s, expected in VALUE_CASES:
        got = parse(text)(s)
        failures += not abs(got - expected) <= 1e-15 * max(1.0, abs(expected))
    for text, offset in SYNTAX_CASES:
        try:
            parse(text)
            failures += 1
        except ExprSyntaxError as exc:
            failures += exc.offset != offset
    formulas = [text for text, _, _ in VALUE_CASES if "s" in text] + [
        "1 + 0.3*sin(1.3*s)",
        "2^-s*cos(s^2) - arctan(s/3)",
        "-(s - 1)^3 + e^(s/4)",
        "abs(s)^0.5 + pi*tan(s/10)",
    ]
    rng = np.random.default_rng(SEED)
    points = rng.uniform(0.01, 2.0, 100)
    worst = 0.0
    for text in formulas:
        first = parse(text)
        second = parse(to_text(first))
        for x in points:
            a, b = first(float(x)), second(float(x))
            worst = max(worst, abs(a - b) / max(abs(a), 1e-300))
    cases = len(VALUE_CASES) + len(SYNTAX_CASES)
    ok = failures == 0 and cases >= 30 and worst <= 1e-15
    assert record(9, ok, f"{cases} grammar cases, {failures} failures; round-trip max rel diff {worst:.1e} "
                         f"over {len(formulas)} formulas x 100 points (tol 1e-15)")


if __name__ == "__main__":
    status = 0
    for name, fn in list(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
            except AssertionError:
                status = 1
    sys.exit(status)
