"""
Rearrangement calculus on measure-weighted samples and step profiles.

A field sampled on cells of different measure is a :class:`WeightedSamples`.
Its distribution function and its decreasing / increasing rearrangements are
right-continuous step functions of the measure variable, represented by
:class:`StepProfile`. All integrals of step functions are evaluated in closed
form, interval by interval, with compensated summation (``math.fsum``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

NONINCREASING = "nonincreasing"
NONDECREASING = "nondecreasing"
UNORDERED = "none"

# relative slack granted to inequalities that hold exactly in exact arithmetic
ROUNDING_RTOL = 1e-12


def _cumulative(weights: np.ndarray) -> np.ndarray:
    # extended-precision running sum; the final entry is replaced by fsum
    acc = np.cumsum(np.asarray(weights, dtype=np.longdouble))
    out = np.empty(len(weights) + 1)
    out[0] = 0.0
    out[1:] = acc.astype(float)
    if len(weights):
        out[-1] = math.fsum(weights)
    return out


@dataclass(frozen=True)
class WeightedSamples:
    """Nonnegative values carried by cells of positive measure."""

    values: np.ndarray
    weights: np.ndarray
    total_measure: float = field(init=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).ravel()
        weights = np.asarray(self.weights, dtype=float).ravel()
        if values.shape != weights.shape:
            raise ValueError("values and weights must have the same length")
        if values.size == 0:
            raise ValueError("empty domain")
        if np.any(~np.isfinite(values)) or np.any(values < 0):
            raise ValueError("sample values must be finite and nonnegative")
        if np.any(~(weights > 0)):
            raise ValueError("cell weights must be positive")
        values.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "total_measure", math.fsum(weights))

    def __len__(self) -> int:
        return self.values.size

    def integral(self) -> float:
        return math.fsum(self.values * self.weights)

    def same_cells(self, other: "WeightedSamples") -> bool:
        return self.weights.shape == other.weights.shape and np.array_equal(
            self.weights, other.weights
        )


@dataclass(frozen=True)
class StepProfile:
    """Right-continuous step function on ``[0, total_measure)``.

    ``breakpoints`` has one more entry than ``values``; interval ``k`` is
    ``[breakpoints[k], breakpoints[k+1])`` and carries ``values[k]``.
    """

    breakpoints: np.ndarray
    values: np.ndarray
    monotonicity: str = NONINCREASING

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=float).ravel()
        vals = np.asarray(self.values, dtype=float).ravel()
        if bp.size != vals.size + 1:
            raise ValueError("need exactly one more breakpoint than values")
        if bp[0] != 0.0:
            raise ValueError("profiles start at s = 0")
        if np.any(np.diff(bp) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        if np.any(vals < 0) or np.any(~np.isfinite(vals)):
            raise ValueError("profile values must be finite and nonnegative")
        d = np.diff(vals)
        if self.monotonicity == NONINCREASING and np.any(d > 0):
            raise ValueError("values are not nonincreasing")
        if self.monotonicity == NONDECREASING and np.any(d < 0):
            raise ValueError("values are not nondecreasing")
        if self.monotonicity not in (NONINCREASING, NONDECREASING, UNORDERED):
            raise ValueError(f"unknown monotonicity flag {self.monotonicity!r}")
        bp.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    @property
    def total_measure(self) -> float:
        return float(self.breakpoints[-1])

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self.breakpoints)

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        idx = np.searchsorted(self.breakpoints, s, side="right") - 1
        past = idx >= self.values.size
        idx = np.clip(idx, 0, max(self.values.size - 1, 0))
        if self.values.size == 0:
            return np.zeros_like(s)
        out = self.values[idx]
        if self.monotonicity == NONDECREASING:
            out = np.where(past, self.values[-1], out)
        else:
            out = np.where(past, 0.0, out)
        return out

    def integral(self) -> float:
        return math.fsum(self.values * self.lengths)

    def cumulative(self, s: float) -> float:
        """Closed-form ``∫_0^s`` of the profile."""
        s = min(max(float(s), 0.0), self.total_measure)
        k = int(np.searchsorted(self.breakpoints, s, side="right") - 1)
        k = min(k, self.values.size)
        head = math.fsum(self.values[:k] * self.lengths[:k])
        if k < self.values.size:
            head += self.values[k] * (s - self.breakpoints[k])
        return head

    def as_samples(self) -> WeightedSamples:
        return WeightedSamples(self.values, self.lengths)

    def to_csv(self, path) -> None:
        rows = np.column_stack([self.breakpoints[:-1], self.values])
        np.savetxt(path, rows, delimiter=",", header="s,value", comments="", fmt="%.17g")


def _merge_ties(breakpoints: np.ndarray, values: np.ndarray):
    if values.size < 2:
        return breakpoints, values
    keep = np.concatenate([[True], values[1:] != values[:-1]])
    return np.concatenate([breakpoints[:-1][keep], breakpoints[-1:]]), values[keep]


def _layout(values: np.ndarray, weights: np.ndarray, monotonicity: str) -> StepProfile:
    bp = _cumulative(weights)
    bp, vals = _merge_ties(bp, values)
    return StepProfile(bp, vals, monotonicity)


def _as_samples(f) -> WeightedSamples:
    if isinstance(f, WeightedSamples):
        return f
    if isinstance(f, StepProfile):
        return f.as_samples()
    raise TypeError(f"expected WeightedSamples or StepProfile, got {type(f).__name__}")


def decreasing_rearrangement(f) -> StepProfile:
    """Sort values in decreasing order and lay them out over cumulative measure."""
    f = _as_samples(f)
    order = np.argsort(-f.values, kind="stable")
    return _layout(f.values[order], f.weights[order], NONINCREASING)


def increasing_rearrangement(f) -> StepProfile:
    f = _as_samples(f)
    order = np.argsort(f.values, kind="stable")
    return _layout(f.values[order], f.weights[order], NONDECREASING)


def reflect(profile: StepProfile) -> StepProfile:
    """``s ↦ g(|Ω| - s)``; swaps the decreasing and increasing layouts."""
    total = profile.total_measure
    bp = total - profile.breakpoints[::-1]
    bp[0] = 0.0
    bp[-1] = total
    flag = {NONINCREASING: NONDECREASING, NONDECREASING: NONINCREASING}.get(
        profile.monotonicity, UNORDERED
    )
    return StepProfile(bp, profile.values[::-1], flag)


def distribution_function(f) -> StepProfile:
    """``t ↦ |{f > t}|`` as a nonincreasing step profile on ``[0, max f]``.

    Accepts raw samples or a step profile. For a nonincreasing profile the
    levels are read directly off its breakpoints.
    """
    if isinstance(f, StepProfile) and f.monotonicity == NONINCREASING:
        g = f
    else:
        g = decreasing_rearrangement(f)
    # levels in increasing order with the measure strictly above each level
    levels = g.values[::-1]
    above = g.breakpoints[:-1][::-1]
    positive = levels > 0
    levels, above = levels[positive], above[positive]
    if levels.size == 0:
        return StepProfile(np.array([0.0]), np.array([]), NONINCREASING)
    bp = np.concatenate([[0.0], levels])
    # on [0, l_1) everything with value > 0 counts, i.e. the right end of the
    # last positive interval
    first = g.breakpoints[np.count_nonzero(g.values > 0)]
    vals = np.concatenate([[first], above[:-1]])
    return StepProfile(bp, vals, NONINCREASING)


def _merged(p1: StepProfile, p2: StepProfile):
    bp = np.union1d(p1.breakpoints, p2.breakpoints)
    left = bp[:-1]
    return bp, p1(left), p2(left), np.diff(bp)


def integrate_product(p1: StepProfile, p2: StepProfile) -> float:
    """Closed-form ``∫ p1 p2 ds`` over the common refinement of the breakpoints."""
    _, a, b, dl = _merged(p1, p2)
    return math.fsum(a * b * dl)


def lp_norm(g, p: float) -> float:
    """L^p norm of a step profile (or of raw weighted samples)."""
    if p < 1:
        raise ValueError("lp_norm needs p >= 1")
    if isinstance(g, WeightedSamples):
        vals, lens = g.values, g.weights
    else:
        vals, lens = g.values, g.lengths
    return math.fsum(vals**p * lens) ** (1.0 / p)


@dataclass(frozen=True)
class LorentzParams:
    p: float
    q: float = 1.0

    def __post_init__(self):
        for name in ("p", "q"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"Lorentz exponent {name} must be finite and positive")


def lorentz_norm(g, params: LorentzParams) -> float:
    """``( ∫ [t^{1/p} g(t)]^q dt/t )^{1/q}`` for a decreasing rearrangement.

    Objects exposing their own ``lorentz_norm(p, q)`` (radial profiles) are
    delegated to; step profiles are integrated exactly per interval.
    """
    if not isinstance(g, StepProfile) and hasattr(g, "lorentz_norm"):
        return g.lorentz_norm(params.p, params.q)
    if g.monotonicity != NONINCREASING:
        raise ValueError("lorentz_norm requires decreasing rearrangement")
    p, q = params.p, params.q
    e = q / p
    a, b = g.breakpoints[:-1], g.breakpoints[1:]
    pieces = g.values**q * (b**e - a**e) / e
    return math.fsum(pieces) ** (1.0 / q)


@dataclass(frozen=True)
class HardyLittlewood:
    lower: float
    middle: float
    upper: float
    holds: bool


def _check_cells(f: WeightedSamples, g: WeightedSamples) -> None:
    if not f.same_cells(g):
        raise ValueError("samples live on different cell structures")


def _leq(a: float, b: float, scale: float) -> bool:
    return a <= b + ROUNDING_RTOL * max(abs(scale), 1e-300)


def hardy_littlewood_check(f: WeightedSamples, g: WeightedSamples) -> HardyLittlewood:
    """Evaluate ``∫ f* g_*  ≤  ∫ |f g|  ≤  ∫ f* g*``."""
    _check_cells(f, g)
    fd = decreasing_rearrangement(f)
    lower = integrate_product(fd, increasing_rearrangement(g))
    upper = integrate_product(fd, decreasing_rearrangement(g))
    middle = math.fsum(f.values * g.values * f.weights)
    ok = _leq(lower, middle, upper) and _leq(middle, upper, upper)
    return HardyLittlewood(lower, middle, upper, ok)


@dataclass(frozen=True)
class Contraction:
    lhs: float
    rhs: float
    holds: bool


def contraction_check(f: WeightedSamples, g: WeightedSamples, p: float) -> Contraction:
    """``‖f* - g*‖_p ≤ ‖f - g‖_p``."""
    if p < 1:
        raise ValueError("contraction_check needs p >= 1")
    _check_cells(f, g)
    _, a, b, dl = _merged(decreasing_rearrangement(f), decreasing_rearrangement(g))
    lhs = math.fsum(np.abs(a - b) ** p * dl) ** (1.0 / p)
    rhs = math.fsum(np.abs(f.values - g.values) ** p * f.weights) ** (1.0 / p)
    return Contraction(lhs, rhs, _leq(lhs, rhs, max(rhs, lhs)))


def pseudo_rearrangement(f: WeightedSamples, u: WeightedSamples) -> StepProfile:
    """Density ``F`` with ``∫_0^s F = ∫_{D(s)} f``, ``D(s)`` nested along decreasing ``u``.

    Cells are ordered by decreasing ``u``; equal values keep their cell index
    order, which fills the gap between consecutive superlevel sets. The
    result is generally not monotone.
    """
    _check_cells(f, u)
    order = np.argsort(-u.values, kind="stable")
    return _layout(f.values[order], f.weights[order], UNORDERED)


@dataclass(frozen=True)
class WeightCondition:
    holds: bool
    first_violation: Optional[float]
    worst_margin: float


def check_weight_condition(fprofile: StepProfile, n: int) -> WeightCondition:
    """Test ``f*(t) ≥ (1 - 1/n) (1/t) ∫_0^t f*`` for every ``t`` in ``[0, |Ω|]``.

    On an interval ``[a, b)`` with value ``v`` the right side is
    ``κ (I(a) - v a)/t + κ v`` with ``I(a) - v a ≥ 0``, hence nonincreasing in
    ``t``; the binding point is the left endpoint. The first interval always
    satisfies the inequality since ``κ < 1``.
    """
    if fprofile.monotonicity != NONINCREASING:
        raise ValueError("weight condition is stated for a decreasing rearrangement")
    if n < 2:
        raise ValueError("dimension must be at least 2")
    kappa = 1.0 - 1.0 / n
    a = fprofile.breakpoints[:-1]
    running = _cumulative(fprofile.values * fprofile.lengths)[:-1]
    margins = np.empty(fprofile.values.size)
    margins[0] = (1.0 - kappa) * fprofile.values[0]
    inner = slice(1, None)
    margins[inner] = fprofile.values[inner] - kappa * running[inner] / a[inner]
    scale = max(float(fprofile.values[0]), 1e-300)
    bad = np.nonzero(margins < -ROUNDING_RTOL * scale)[0]
    first = float(a[bad[0]]) if bad.size else None
    return WeightCondition(bad.size == 0, first, float(margins.min()))
