"""The radial comparison function u* and the norms it dominates.

u* lives on the disk with the same area as the domain. Its gradient is the
increasing rearrangement of |grad u| laid out radially, and its boundary value
spreads the boundary mass of u evenly over the circle.

Run: python demos/02_radial_comparison.py
"""
import math

import numpy as np

from robinsym import grid
from robinsym.grid import constant_field, field_from_function
from robinsym.symmetrize import build_ustar, l1_compare, lorentz_compare, trace_lp_check

square = grid.square(1.0, h=1 / 128)
print(f"unit square: area {square.area:.6f}, perimeter {square.perimeter:.6f}")

# Constant field: no gradient, so u* is the constant 4 / |circle of area 1| = 2/sqrt(pi).
one = constant_field(square)
us = build_ustar(one)
print(f"u = 1:  u* = {us.center_value:.6f} (2/sqrt(pi) = {2 / math.sqrt(math.pi):.6f})")

# u = x: unit gradient, boundary mass 2, so u*(r) = 2/sqrt(pi) - r.
x = field_from_function(square, lambda x, y: x)
us = build_ustar(x)
r = np.linspace(0, us.radius, 5)
print("u = x:  u*(r) at", np.round(r, 3), "->", np.round(us.at_radius(r), 4))
print("        expected      ", np.round(2 / math.sqrt(math.pi) - r, 4))
print("  ", l1_compare(x, us))
for p in (1.0, 2.0):
    print("  ", trace_lp_check(x, us, p))
for p in (1.0, 1.5, 2.0, 4.0):
    rec = lorentz_compare(x, us, p)
    print(f"   Lorentz L^({p:g},1): {rec.lhs:.4f} vs {rec.rhs:.4f} -> {rec.verdict} {rec.note}")

# On the disk the cone 1 - |x| is its own comparison function.
disk = grid.disk(1.0, h=1 / 128)
cone = field_from_function(disk, lambda x, y: 1 - np.hypot(x, y))
us = build_ustar(cone)
print(f"cone:   ||u||_1 = {cone.integral():.5f}, ||u*||_1 = {us.l1_norm():.5f}, exact pi/3 = {math.pi / 3:.5f}")
