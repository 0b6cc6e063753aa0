"""Distribution functions, rearrangements and the inequalities they satisfy.

Run: python demos/01_rearrangements.py
"""
import numpy as np

from robinsym.rearrange import (
    LorentzParams,
    WeightedSamples,
    contraction_check,
    decreasing_rearrangement,
    distribution_function,
    hardy_littlewood_check,
    increasing_rearrangement,
    lorentz_norm,
    lp_norm,
    pseudo_rearrangement,
)

# A function on three cells of unequal measure.
f = WeightedSamples(np.array([1.0, 4.0, 4.0]), np.array([2.0, 1.0, 1.0]))

# mu(t) = measure of {f > t}; ties collapse into one step.
mu = distribution_function(f)
print("distribution  breakpoints", mu.breakpoints, "values", mu.values)

# f* lays the values out in decreasing order over [0, |Omega|], f_* in increasing order.
dec, inc = decreasing_rearrangement(f), increasing_rearrangement(f)
print("f*            breakpoints", dec.breakpoints, "values", dec.values)
print("f_*           breakpoints", inc.breakpoints, "values", inc.values)

# Rearranging preserves every L^p norm.
for p in (1, 2, 3):
    print(f"L^{p}: raw {lp_norm(f, p):.12f}   rearranged {lp_norm(dec, p):.12f}")

# The Lorentz norm with p = q is the L^p norm again; q = 1 is the case used later.
print("L^{2,2}", lorentz_norm(dec, LorentzParams(2, 2)), " L^{2,1}", lorentz_norm(dec, LorentzParams(2, 1)))

# Products are largest when both factors are similarly ordered and smallest when opposite.
rng = np.random.default_rng(0)
w = rng.uniform(0.5, 1.5, 200)
a, b = WeightedSamples(rng.uniform(0, 1, 200), w), WeightedSamples(rng.uniform(0, 1, 200), w)
hl = hardy_littlewood_check(a, b)
print(f"Hardy-Littlewood: {hl.lower:.4f} <= {hl.middle:.4f} <= {hl.upper:.4f}  ({hl.holds})")

# Rearrangement never increases L^p distances.
c = contraction_check(a, b, 2)
print(f"contraction: |a* - b*|_2 = {c.lhs:.4f} <= |a - b|_2 = {c.rhs:.4f}")

# The pseudo-rearrangement of b along the level sets of a keeps the mass of b
# but need not be monotone.
F = pseudo_rearrangement(b, a)
print(f"pseudo-rearrangement mass {F.integral():.12f} vs {b.integral():.12f}; monotone: {F.monotonicity}")
