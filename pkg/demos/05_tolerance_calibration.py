"""Where the verdict tolerances come from.

The comparison inequalities are equalities for the cone 1 - |x| on the unit
disk, so the discrete gap there measures pure discretization error. The
slack used in verdicts is expressed in units of
h * (max u / R + max |grad u|) * |Omega|^(1/p); the constant in front was
set at about four times the largest gap seen below.

Run: python demos/05_tolerance_calibration.py
"""
import math

import numpy as np

from robinsym import grid, robin
from robinsym.grid import field_from_function, gradient_magnitude, schwarz_radius
from robinsym.symmetrize import DISCRETIZATION_C, build_ustar, lorentz_compare, pointwise_bound_check

print(f"DISCRETIZATION_C = {DISCRETIZATION_C}")
for h in (1 / 64, 1 / 128, 1 / 256):
    d = grid.disk(1.0, h)
    u = field_from_function(d, lambda x, y: 1 - np.hypot(x, y))
    us = build_ustar(u)
    R = schwarz_radius(d).radius
    scale = h * (u.values.max() / R + gradient_magnitude(u).values.max())
    gaps = []
    for p in (1.0, 1.5, 2.0):
        rec = lorentz_compare(u, us, p)
        gaps.append((rec.lhs - rec.rhs) / (scale * d.area ** (1 / p)))
    pb = pointwise_bound_check(u)
    print(f"h = 1/{round(1 / h):<4d} normalized gaps (lhs - rhs) for p = 1, 1.5, 2: "
          + "  ".join(f"{g:+.3f}" for g in gaps)
          + f"   pointwise max gap / (h max|grad u|) = {pb.max_gap / (h * gradient_magnitude(u).values.max()):.2f}")

exact = robin.exact_ball_solution(1.0, 1.0).torsion()
for h in (1 / 64, 1 / 128):
    T = robin.torsion_rigidity(grid.disk(1.0, h), 1.0).torsion
    print(f"torsion on the disk, h = 1/{round(1 / h)}: relative error / h = {abs(T - exact) / exact / h:.3f}"
          f" (TORSION_C = {robin.TORSION_C})")
