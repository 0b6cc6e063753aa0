"""
Radial comparison functions and the inequalities they satisfy.

A radial function on the ball ``Ω♯`` is stored in the measure variable
``s = ω_n r^n``: a right-continuous step profile of gradient magnitudes over
``[0, |Ω|]`` plus the boundary value. Within a step the function is affine in
``r``, so every integral needed here (L¹, Lorentz ``L^{p,1}``, weighted
integrals against step profiles) reduces to sums of power integrals.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate, optimize

from .grid import (
    PLANE,
    MeasureConstants,
    ScalarField,
    boundary_trace_integral,
    field_to_samples,
    gradient_magnitude,
    schwarz_radius,
)
from .rearrange import (
    NONDECREASING,
    NONINCREASING,
    UNORDERED,
    LorentzParams,
    StepProfile,
    WeightedSamples,
    check_weight_condition,
    decreasing_rearrangement,
    increasing_rearrangement,
    lorentz_norm,
    pseudo_rearrangement,
    reflect,
)

# Discretization slack for inequality verdicts, in units of
# h * (max|u| / R + max|grad u|) * |Omega|^(1/p). Calibrated on the cone
# u = 1 - |x| over the unit disk, where the continuum inequality is an equality.
DISCRETIZATION_C = 0.25
# Same calibration for the pointwise Dirichlet bound, in units of h * max|grad u|.
POINTWISE_C = 1.0


def power_integral(e: float, a, b):
    """``∫_a^b t^e dt`` (vectorized over the interval ends)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if abs(e + 1.0) < 1e-14:
        with np.errstate(divide="ignore"):
            return np.log(b / a)
    return (b ** (e + 1) - a ** (e + 1)) / (e + 1)


@dataclass(frozen=True, eq=False)
class RadialFunction:
    """Radially nonincreasing function on the ball of measure ``breakpoints[-1]``.

    ``slopes[k]`` is ``|∇u|`` on the shell ``breakpoints[k] <= ω_n r^n <
    breakpoints[k+1]``; ``boundary_value`` is the value on the sphere.
    """

    constants: MeasureConstants
    breakpoints: np.ndarray
    slopes: np.ndarray
    boundary_value: float = 0.0
    radii: np.ndarray = field(init=False, repr=False)
    node_values: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=float)
        g = np.asarray(self.slopes, dtype=float)
        if bp.size != g.size + 1 or bp[0] != 0 or np.any(np.diff(bp) <= 0):
            raise ValueError("invalid shell breakpoints")
        if np.any(g < 0):
            raise ValueError("gradient magnitudes must be nonnegative")
        if self.boundary_value < 0:
            raise ValueError("boundary value must be nonnegative")
        n, w = self.constants.n, self.constants.omega_n
        r = (bp / w) ** (1.0 / n)
        drops = g * np.diff(r)
        # value at each shell edge, accumulated inward from the boundary
        nodes = self.boundary_value + np.concatenate(
            [np.cumsum(drops[::-1].astype(np.longdouble))[::-1].astype(float), [0.0]]
        )
        for name, val in (("breakpoints", bp), ("slopes", g), ("radii", r), ("node_values", nodes)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)

    @property
    def n(self) -> int:
        return self.constants.n

    @property
    def volume(self) -> float:
        return float(self.breakpoints[-1])

    @property
    def radius(self) -> float:
        return float(self.radii[-1])

    @property
    def boundary_measure(self) -> float:
        return self.constants.sphere_area(self.radius)

    @property
    def center_value(self) -> float:
        return float(self.node_values[0])

    def _band(self, s):
        k = np.searchsorted(self.breakpoints, s, side="right") - 1
        return np.clip(k, 0, self.slopes.size - 1)

    def at_radius(self, r):
        r = np.asarray(r, dtype=float)
        k = np.searchsorted(self.radii, r, side="right") - 1
        k = np.clip(k, 0, self.slopes.size - 1)
        rr = np.minimum(r, self.radius)
        return self.node_values[k + 1] + self.slopes[k] * (self.radii[k + 1] - rr)

    def at_measure(self, s):
        s = np.asarray(s, dtype=float)
        return self.at_radius((np.maximum(s, 0.0) / self.constants.omega_n) ** (1.0 / self.n))

    def __call__(self, x):
        """Evaluate at points ``x`` of shape ``(..., n)``."""
        return self.at_radius(np.linalg.norm(np.asarray(x, dtype=float), axis=-1))

    def moment(self, alpha: float = 0.0, weight: Optional[StepProfile] = None) -> float:
        """Closed-form ``∫_0^{|Ω|} w(s) s^α u(s) ds`` for a step weight ``w`` (default 1)."""
        bp = self.breakpoints
        if weight is not None:
            bp = np.union1d(bp, weight.breakpoints[weight.breakpoints <= self.volume])
        a, b = bp[:-1], bp[1:]
        k = self._band(a)
        w = np.ones_like(a) if weight is None else weight(a)
        inv_n = 1.0 / self.n
        # on a shell: u(s) = U_{k+1} + g_k (r_{k+1} - (s/ω)^{1/n})
        outer = self.node_values[k + 1] + self.slopes[k] * self.radii[k + 1]
        coef = self.slopes[k] * self.constants.omega_n ** (-inv_n)
        pieces = w * (
            outer * power_integral(alpha, a, b) - coef * power_integral(alpha + inv_n, a, b)
        )
        return math.fsum(pieces)

    def l1_norm(self) -> float:
        return self.moment(0.0)

    def _quad_bands(self, integrand) -> float:
        total = []
        for a, b in zip(self.breakpoints[:-1], self.breakpoints[1:]):
            val, _ = integrate.quad(integrand, a, b, epsabs=0.0, epsrel=1e-13, limit=200)
            total.append(val)
        return math.fsum(total)

    def lp_norm(self, p: float) -> float:
        if p < 1:
            raise ValueError("lp_norm needs p >= 1")
        if p == 1:
            return self.l1_norm()
        return self._quad_bands(lambda s: float(self.at_measure(s)) ** p) ** (1.0 / p)

    def lorentz_norm(self, p: float, q: float = 1.0) -> float:
        """``L^{p,q}`` norm; ``u`` is already its own decreasing rearrangement in ``s``."""
        LorentzParams(p, q)
        if q == 1:
            return self.moment(1.0 / p - 1.0)
        e = q / p - 1.0
        return self._quad_bands(lambda s: s**e * float(self.at_measure(s)) ** q) ** (1.0 / q)

    def gradient_profile(self) -> StepProfile:
        d = np.diff(self.slopes)
        flag = NONDECREASING if np.all(d >= 0) else UNORDERED
        return StepProfile(self.breakpoints, self.slopes, flag)

    def gradient_lp_integral(self, p: float) -> float:
        """``∫_{Ω♯} |∇u|^p dx`` (exact from the shell profile)."""
        return math.fsum(self.slopes**p * np.diff(self.breakpoints))

    def to_csv(self, path) -> None:
        rows = np.column_stack([self.breakpoints, self.node_values])
        np.savetxt(path, rows, delimiter=",", header="s,value", comments="", fmt="%.17g")


def spherical_layout(profile: StepProfile, constants: MeasureConstants = PLANE) -> Callable:
    """``x ↦ g(ω_n |x|^n)``: the radial layout of a profile on the ball."""

    def layout(x):
        r = np.linalg.norm(np.asarray(x, dtype=float), axis=-1)
        return profile(constants.omega_n * r**constants.n)

    return layout


def build_ustar(u: ScalarField, constants: MeasureConstants = PLANE) -> RadialFunction:
    """Radial function on ``Ω♯`` with ``|∇u*| = |∇u|_♯`` and boundary value ``∫_{∂Ω} u / |∂Ω♯|``."""
    if np.any(u.values < 0):
        raise ValueError("u must be nonnegative")
    ball = schwarz_radius(u.domain, constants)
    trace = boundary_trace_integral(u, 1.0)
    grad = increasing_rearrangement(field_to_samples(gradient_magnitude(u)))
    return RadialFunction(constants, grad.breakpoints, grad.values, trace / ball.boundary_measure)


VERDICTS = ("holds", "violated", "inconclusive")


@dataclass(frozen=True)
class ComparisonRecord:
    """``lhs <= rhs`` checked with an absolute slack ``tolerance``.

    Records that are not ``asserted`` (probes outside a theorem's range) carry
    the verdict ``inconclusive``; the numeric outcome stays visible through
    ``margin``.
    """

    name: str
    lhs: float
    rhs: float
    tolerance: float
    verdict: str
    asserted: bool = True
    note: str = ""

    @classmethod
    def evaluate(cls, name, lhs, rhs, tolerance, asserted=True, note=""):
        if asserted:
            verdict = "holds" if lhs <= rhs + tolerance else "violated"
        else:
            verdict = "inconclusive"
        return cls(name, float(lhs), float(rhs), float(tolerance), verdict, asserted, note)

    @property
    def margin(self) -> float:
        return self.rhs + self.tolerance - self.lhs

    @property
    def holds(self) -> bool:
        return self.verdict == "holds"

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "tolerance": self.tolerance,
            "margin": self.margin,
            "verdict": self.verdict,
            "asserted": self.asserted,
            "note": self.note,
        }


def discretization_tolerance(u: ScalarField, p: float = 1.0, constants=PLANE) -> float:
    domain = u.domain
    R = schwarz_radius(domain, constants).radius
    scale = u.values.max() / R + gradient_magnitude(u).values.max()
    return DISCRETIZATION_C * domain.h * scale * domain.area ** (1.0 / p)


def l1_compare(u: ScalarField, ustar: RadialFunction) -> ComparisonRecord:
    """``‖u‖_{L¹(Ω)} ≤ ‖u*‖_{L¹(Ω♯)}``."""
    return ComparisonRecord.evaluate(
        "l1", u.integral(), ustar.l1_norm(), discretization_tolerance(u, 1.0, ustar.constants)
    )


def trace_lp_check(u: ScalarField, ustar: RadialFunction, p: float) -> ComparisonRecord:
    """``|∂Ω♯|^{p-1} ∫_{∂Ω♯} (u*)^p ≤ |∂Ω|^{p-1} ∫_{∂Ω} u^p``.

    ``u*`` is constant on the sphere, so the left side is
    ``(|∂Ω♯| c)^p``; the right side follows from the boundary segments. The
    discrete inequality is Hölder's inequality for the segment sum, so only
    rounding slack is allowed.
    """
    if p < 1:
        raise ValueError("trace check needs p >= 1")
    P = u.domain.perimeter
    lhs = (ustar.boundary_measure * ustar.boundary_value) ** p
    rhs = P ** (p - 1) * boundary_trace_integral(u, p)
    return ComparisonRecord.evaluate(f"trace_L{p:g}", lhs, rhs, 1e-12 * max(abs(rhs), 1e-300))


def _invert(K: Callable, y: float) -> float:
    if y == 0 and K(0.0) == 0:
        return 0.0
    if K(0.0) > y:
        raise ValueError(f"K is not invertible at {y!r}: K(0) = {K(0.0)!r}")
    hi = 1.0
    for _ in range(200):
        if K(hi) >= y:
            break
        hi *= 2.0
    else:
        raise ValueError(f"K does not reach {y!r}")
    return optimize.brentq(lambda t: K(t) - y, 0.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def gn_radial_solution(
    fprofile: StepProfile,
    K: Optional[Callable] = None,
    *,
    K_inverse: Optional[Callable] = None,
    area: Optional[float] = None,
    constants: MeasureConstants = PLANE,
) -> RadialFunction:
    """Decreasing radial solution of ``K(|∇v|) = f_♯`` on ``Ω♯`` with ``v = 0`` on the sphere.

    ``fprofile`` is the decreasing rearrangement ``f*``. ``K`` must be
    strictly increasing; without ``K_inverse`` it is inverted by bracketing
    root search. The gradient is constant on each shell, so the profile is
    exact once the inverse values are known.
    """
    if fprofile.monotonicity != NONINCREASING:
        raise ValueError("expected a decreasing rearrangement")
    if area is not None and not math.isclose(area, fprofile.total_measure, rel_tol=1e-12):
        raise ValueError("profile measure does not match the domain area")
    inc = reflect(fprofile)
    levels = inc.values
    if K_inverse is not None:
        grads = np.array([K_inverse(v) for v in levels], dtype=float)
    elif K is None:
        grads = levels.copy()
    else:
        probe = np.linspace(0.0, max(1.0, float(levels.max(initial=0.0))), 64)
        if np.any(np.diff([K(t) for t in probe]) <= 0):
            raise ValueError("K must be strictly increasing")
        grads = np.array([_invert(K, float(v)) for v in levels])
    if np.any(~np.isfinite(grads)) or np.any(grads < 0):
        raise ValueError("K inverse is not defined on the needed range")
    return RadialFunction(constants, inc.breakpoints, grads, 0.0)


def essosc_check(f: WeightedSamples, n: int) -> str:
    """Sufficient condition ``sup f / inf f ≤ n/(n-1)`` for the weight hypothesis.

    Returns ``"holds"`` or ``"inconclusive"``; when it holds, the exact weight
    condition is verified as well and a disagreement raises.
    """
    lo = float(f.values.min())
    if lo <= 0:
        raise ValueError("condition requires strictly positive f")
    ratio = float(f.values.max()) / lo
    if ratio <= n / (n - 1):
        if not check_weight_condition(decreasing_rearrangement(f), n).holds:
            raise AssertionError("oscillation bound holds but the weight condition fails")
        return "holds"
    return "inconclusive"


def weighted_compare(f: ScalarField, u: ScalarField, ustar: RadialFunction) -> ComparisonRecord:
    """``∫_Ω f u ≤ ∫_{Ω♯} f♯ u* = ∫_0^{|Ω|} f*(s) u*(s) ds``."""
    if f.domain is not u.domain:
        raise ValueError("f and u must live on the same domain")
    fstar = decreasing_rearrangement(field_to_samples(f))
    if not check_weight_condition(fstar, ustar.n).holds:
        raise ValueError("weight condition not satisfied by f")
    lhs = math.fsum(f.values * u.values * u.domain.weights)
    rhs = ustar.moment(0.0, weight=fstar)
    tol = discretization_tolerance(u, 1.0, ustar.constants) * float(f.values.max())
    return ComparisonRecord.evaluate("weighted_l1", lhs, rhs, tol)


@dataclass(frozen=True)
class PointwiseBound:
    margin: float  # min over the grid of (rhs - lhs)
    max_gap: float  # max |rhs - lhs|
    s: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    tolerance: float

    def record(self) -> ComparisonRecord:
        return ComparisonRecord.evaluate(
            "pointwise_dirichlet", -self.margin, 0.0, self.tolerance, note="min(rhs - lhs)"
        )


def pointwise_bound_check(
    u: ScalarField,
    Fprofile: Optional[StepProfile] = None,
    constants: MeasureConstants = PLANE,
) -> PointwiseBound:
    """``u*(s) ≤ (n ω_n^{1/n})^{-1} ∫_s^{|Ω|} F(t) t^{1/n - 1} dt`` for ``u`` vanishing on ``∂Ω``.

    ``F`` defaults to the pseudo-rearrangement of ``|∇u|`` along the
    superlevel sets of ``u``. The right side is the radial function with
    shell gradients ``F`` and zero boundary value. Both sides are compared at
    the midpoints of the steps of ``u*`` (each step is one group of
    equal-valued cells, represented by its cell-center value).
    """
    grad = gradient_magnitude(u)
    gmax = float(grad.values.max())
    tol = POINTWISE_C * u.domain.h * gmax
    mean_trace = boundary_trace_integral(u, 1.0) / u.domain.perimeter
    if mean_trace > tol:
        raise ValueError("Dirichlet-case bound: u does not vanish on the boundary")
    samples = field_to_samples(u)
    if Fprofile is None:
        Fprofile = pseudo_rearrangement(field_to_samples(grad), samples)
    bound = RadialFunction(constants, Fprofile.breakpoints, Fprofile.values, 0.0)
    ustar = decreasing_rearrangement(samples)
    mids = 0.5 * (ustar.breakpoints[:-1] + ustar.breakpoints[1:])
    lhs = ustar.values
    rhs = bound.at_measure(mids)
    gap = rhs - lhs
    return PointwiseBound(float(gap.min()), float(np.abs(gap).max()), mids, lhs, rhs, tol)


def rearrangement_from_distribution(M: StepProfile, total: float) -> StepProfile:
    """Decreasing rearrangement ``f*(s) = inf{t : M(t) < s}`` on ``[0, total]``."""
    if M.monotonicity != NONINCREASING:
        raise ValueError("a distribution function is nonincreasing")
    if M.values.size and M.values[0] > total * (1 + 1e-12):
        raise ValueError("distribution exceeds the total measure")
    # f* equals t_{j+1} on [M_{j+1}, M_j), with M_m = 0; zero on [M_0, total)
    levels = M.breakpoints[1:][::-1]
    s = np.concatenate([[0.0], M.values[::-1]])
    vals = list(levels)
    if s[-1] < total:
        s = np.concatenate([s, [total]])
        vals.append(0.0)
    else:
        s[-1] = total
    return StepProfile(s, np.array(vals), NONINCREASING)


def talenti_lorentz_formula(
    M: StepProfile, V: float, p: float, constants: MeasureConstants = PLANE
) -> float:
    """Closed form of ``‖v‖_{L^{p,1}}`` from the distribution ``M`` of ``|∇u|`` and support measure ``V``.

    ``p² / (ω_n^{1/n} (n + p)) ∫_0^∞ [V^γ - (V - M(t))^γ] dt`` with
    ``γ = 1/p + 1/n``; ``M`` is a step function in ``t``, so each step
    contributes its length times a constant.
    """
    if not V > 0:
        raise ValueError("support measure must be positive")
    if M.values.size and M.values[0] > V * (1 + 1e-12):
        raise ValueError("M(0) exceeds V")
    n, w = constants.n, constants.omega_n
    gamma_ = 1.0 / p + 1.0 / n
    rest = np.maximum(V - M.values, 0.0)
    integral = math.fsum((V**gamma_ - rest**gamma_) * M.lengths)
    return p * p / (w ** (1.0 / n) * (n + p)) * integral


def talenti_radial_profile(M: StepProfile, V: float, constants=PLANE) -> RadialFunction:
    """Radially decreasing ``v`` vanishing on the sphere, ``|∇v|`` increasing with distribution ``M``."""
    dec = rearrangement_from_distribution(M, V)
    inc = reflect(dec)
    return RadialFunction(constants, inc.breakpoints, inc.values, 0.0)


def lorentz_compare(u: ScalarField, ustar: RadialFunction, p: float) -> ComparisonRecord:
    """``‖u‖_{L^{p,1}} ≤ ‖u*‖_{L^{p,1}}``, asserted for ``1 ≤ p ≤ n/(n-1)`` only."""
    if p < 1:
        raise ValueError("Lorentz comparison needs p >= 1")
    n = ustar.n
    in_range = p <= n / (n - 1) + 1e-12
    lhs = lorentz_norm(decreasing_rearrangement(field_to_samples(u)), LorentzParams(p, 1.0))
    rhs = ustar.lorentz_norm(p, 1.0)
    tol = discretization_tolerance(u, p, ustar.constants)
    note = "" if in_range else "outside theorem range - probe only"
    return ComparisonRecord.evaluate(f"lorentz_L{p:g},1", lhs, rhs, tol, asserted=in_range, note=note)
