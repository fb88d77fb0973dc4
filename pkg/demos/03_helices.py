"""
General helices and slant helices
=================================

A general helix has tau/kappa constant and its tangent keeps a fixed angle
with an axis.  A slant helix keeps the principal normal at a fixed angle
instead; the quantity sigma = kappa^2 (tau/kappa)' / (kappa^2 + tau^2)^1.5
is then constant.
"""

import math

import numpy as np

from curveforge import (
    IntrinsicProfile,
    classify,
    estimate_frames,
    estimate_kappa_tau,
    general_helix,
    sigma_from_samples,
    slant_helix,
    slant_tau,
)

# General helix with m = 1 and a varying curvature
kappa = IntrinsicProfile("1 + 0.4*cos(s)", "0", 0.0, 6.0).kappa
g = general_helix(1.0, kappa, (0.0, 6.0))
print("general helix <t, e3>:", np.unique(np.round(g.tangents[:, 2], 12)))
print("height gained:", g.points[-1, 2] - g.points[0, 2], "expected", 6 / math.sqrt(2))

# Slant helix with m = 0.5, unit curvature
c = slant_helix(0.5, lambda s: 1.0, (-1.9, 1.9))
print("orientation check:", c.events[0])
_, frames = estimate_frames(c)
print("<n, e3> range:", frames[:, 1, 2].min(), frames[:, 1, 2].max(), "expected", 0.5 / math.sqrt(1.25))
est = estimate_kappa_tau(c)
sigma = sigma_from_samples(est.s, est.kappa, est.tau)
print("sigma from the sampled curve:", sigma[1:-1].min(), sigma[1:-1].max())

# Classification from the intrinsic data alone
for kappa_text, tau in [("1", "1"), ("2 + s", "-0.5*(2 + s)"), ("1", "s")]:
    print(kappa_text, "|", tau, "->", classify(IntrinsicProfile(kappa_text, tau, 0.0, 2.0)))
print("slant torsion ->", classify(IntrinsicProfile("1", slant_tau(0.5, 0.0, lambda s: 1.0), 0.0, 1.0)))
