"""
When the binormal turns horizontal
==================================

The scalar equation for w = <t, e3> only makes sense while the binormal has
a positive e3 component.  With a large torsion and a tangent pointing
steeply down, the binormal soon reaches the horizontal plane.  The solver
stops there and says so; with restarts enabled the integration continues in
a rotated coordinate system and the pieces are stitched together.
"""

import numpy as np

from curveforge import IntrinsicProfile, frenet_integrate, kabsch_align, reconstruct

profile = IntrinsicProfile("1", "5", 0.0, 2.0)

plain = reconstruct(profile, 1.0, w0=-0.99, v0=0.0)
for event in plain.events:
    print(f"{event['side']:5s} exit at s = {event['s']:.6f}, radicand {event['radicand']:.2e}")
print(f"truncated curve covers [{plain.curve.s[0]:.3f}, {plain.curve.s[-1]:.3f}]")

stitched = reconstruct(profile, 1.0, w0=-0.99, v0=0.0, restart=True)
restarts = [e for e in stitched.events if e["event"] == "restart"]
print(f"{len(restarts)} restarts at s =", ", ".join(f"{e['s']:.3f}" for e in restarts))

curve = stitched.curve
i0 = curve.index_of(1.0)
oracle = frenet_integrate(profile, curve.frame(i0), curve.points[i0], s0=1.0)
print(f"stitched curve vs oracle rmsd: {kabsch_align(curve, oracle)[1]:.2e}")
print("any NaN:", bool(np.isnan(curve.points).any()))

# Starting with the tangent pointing up instead (w0 = +0.99) the rotation
# axis of the frame is almost e3 itself and the binormal never gets close
# to horizontal: no exit at all.
up = reconstruct(profile, 1.0, w0=0.99, v0=0.0)
print("w0 = +0.99 events:", up.events or "none")
