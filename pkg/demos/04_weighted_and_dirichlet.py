"""Weighted comparison, the pointwise Dirichlet bound, the radial GN solution and Talenti's formula.

Run: python demos/04_weighted_and_dirichlet.py
"""
import math

import numpy as np

from robinsym import fields, grid, robin
from robinsym.grid import field_from_function, field_to_samples, gradient_magnitude
from robinsym.rearrange import (
    NONINCREASING,
    StepProfile,
    check_weight_condition,
    decreasing_rearrangement,
    distribution_function,
)
from robinsym.symmetrize import (
    build_ustar,
    essosc_check,
    gn_radial_solution,
    pointwise_bound_check,
    talenti_lorentz_formula,
    talenti_radial_profile,
    weighted_compare,
)

square = grid.square(1.0, h=1 / 128)
u = field_from_function(square, lambda x, y: x)

# The weight must not decay too fast: f*(t) >= (1 - 1/n) * mean of f* over [0, t].
for label, f in (
    ("0.6 + 0.4 (1 - x)", field_from_function(square, lambda x, y: 0.6 + 0.4 * (1 - x))),
    ("steep step", field_from_function(square, lambda x, y: np.where(x < 0.3, 1.0, 0.2))),
):
    cond = check_weight_condition(decreasing_rearrangement(field_to_samples(f)), 2)
    print(f"weight {label:18s} oscillation test: {essosc_check(field_to_samples(f), 2):12s} exact condition: {cond.holds}")
    if cond.holds:
        print("   ", weighted_compare(f, u, build_ustar(u)))
        print("   ", robin.compare_weighted_torsion(f, 1.0))

# For fields vanishing on the boundary, u*(s) is bounded by the radial integral of
# the pseudo-rearranged gradient; on the cone both sides coincide.
disk = grid.disk(1.0, h=1 / 128)
cone = field_from_function(disk, lambda x, y: 1 - np.hypot(x, y))
pb = pointwise_bound_check(cone)
print(f"\ncone: largest gap between the two sides {pb.max_gap:.2e}")
v = fields.random_dirichlet_field(square, seed=3)
pb = pointwise_bound_check(v)
print(f"random Dirichlet field: min(rhs - lhs) = {pb.margin:+.2e}, slack {pb.tolerance:.2e}")

# Radial solution of K(|grad v|) = f_# vanishing on the circle.
vbar = gn_radial_solution(decreasing_rearrangement(field_to_samples(gradient_magnitude(v))))
print(f"||v||_1 = {v.integral():.5f} <= ||v_bar||_1 = {vbar.l1_norm():.5f}")
sq = gn_radial_solution(StepProfile(np.array([0, math.pi]), np.array([4.0]), NONINCREASING), K=lambda t: t * t)
print(f"K(t) = t^2, f = 4: v_bar(0.5) = {float(sq.at_radius(0.5)):.12f} (expected 1)")

# Talenti's closed form for the L^{p,1} norm from the distribution of |grad u| alone.
M = distribution_function(field_to_samples(gradient_magnitude(v)))
profile = talenti_radial_profile(M, square.area)
for p in (1.0, 2.0):
    print(f"p = {p:g}: closed form {talenti_lorentz_formula(M, square.area, p):.10f}  "
          f"radial profile {profile.lorentz_norm(p):.10f}")
