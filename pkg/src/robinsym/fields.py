"""Test-field generators: seeded cosine series, Dirichlet fields, expressions and presets."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import GridDomain, ScalarField, field_from_function, schwarz_radius


@dataclass(frozen=True)
class CosineSeries:
    """``Σ a_kl cos(π k (x - x0)/L) cos(π l (y - y0)/L)`` over ``0 ≤ k, l ≤ K``."""

    coefficients: np.ndarray  # (K + 1, K + 1)
    x0: float
    y0: float
    length: float

    @classmethod
    def random(cls, domain: GridDomain, seed: int, modes: int = 4, decay: float = 1.5) -> "CosineSeries":
        rng = np.random.default_rng(seed)
        k = np.arange(modes + 1)
        scale = 1.0 / (1.0 + np.add.outer(k, k)) ** decay
        xmin, ymin, xmax, ymax = domain.bounding_box()
        L = max(xmax - xmin, ymax - ymin)
        return cls(rng.standard_normal((modes + 1, modes + 1)) * scale, xmin, ymin, L)

    def _wavenumbers(self):
        k = np.arange(self.coefficients.shape[0]) * math.pi / self.length
        return k[:, None], k[None, :]

    def __call__(self, x, y):
        kx, ky = self._wavenumbers()
        cx = np.cos(np.multiply.outer(np.asarray(x) - self.x0, kx[:, 0]))
        cy = np.cos(np.multiply.outer(np.asarray(y) - self.y0, ky[0]))
        return np.einsum("...k,kl,...l->...", cx, self.coefficients, cy)

    def sup_bound(self) -> float:
        return float(np.abs(self.coefficients).sum())

    def derivative_bound(self, order: int) -> float:
        """Bound on the size of any ``order``-th directional derivative."""
        kx, ky = self._wavenumbers()
        return float((np.abs(self.coefficients) * np.hypot(kx, ky) ** order).sum())


@dataclass(frozen=True, eq=False)
class SmoothField:
    field: ScalarField
    series: CosineSeries
    shift: float

    def gradient_bound(self, h: float) -> float:
        """Bound on the discrete gradient magnitude.

        Central differences of a cosine never exceed the exact derivative;
        the one-sided stencils at the boundary add at most ``h M2 / 2``
        (first order) or ``h² M3`` (second order) per component.
        """
        s = self.series
        slack = max(0.5 * h * s.derivative_bound(2), h * h * s.derivative_bound(3))
        return s.derivative_bound(1) + math.sqrt(2.0) * slack


def random_smooth_field(domain: GridDomain, seed: int, modes: int = 4) -> SmoothField:
    """Seeded band-limited field, shifted by its coefficient sum so it is nonnegative everywhere."""
    series = CosineSeries.random(domain, seed, modes)
    shift = series.sup_bound()
    field = field_from_function(domain, lambda x, y: series(x, y) + shift, clip=False)
    return SmoothField(field, series, shift)


def random_weight_field(domain: GridDomain, seed: int, ratio: float = 2.0) -> ScalarField:
    """Seeded smooth weight with values in ``[1, ratio]``, so its oscillation is at most ``ratio``."""
    series = CosineSeries.random(domain, seed, modes=3)
    s = series.sup_bound()
    return field_from_function(
        domain, lambda x, y: 1.0 + (ratio - 1.0) * 0.5 * (1.0 + series(x, y) / s), clip=False
    )


def random_dirichlet_field(domain: GridDomain, seed: int, modes: int = 3) -> ScalarField:
    """Nonnegative field vanishing on the boundary of the domain's bounding box.

    A product of sines across the box times ``1 + s/2`` for a normalized
    cosine series ``s``. Only meaningful on rectangles.
    """
    series = CosineSeries.random(domain, seed, modes)
    bound = series.sup_bound()
    bump = _sine_bump(domain)
    return field_from_function(domain, lambda x, y: bump(x, y) * (1.0 + 0.5 * series(x, y) / bound))


def _sine_bump(domain: GridDomain):
    xmin, ymin, xmax, ymax = domain.bounding_box()

    def bump(x, y):
        return np.sin(math.pi * (x - xmin) / (xmax - xmin)) * np.sin(math.pi * (y - ymin) / (ymax - ymin))

    return bump


_NAMESPACE = {
    name: getattr(np, name)
    for name in ("sin", "cos", "tan", "exp", "log", "sqrt", "abs", "minimum", "maximum", "hypot", "arctan2", "pi", "e")
}


def expression_field(domain: GridDomain, expression: str) -> ScalarField:
    """Field from an arithmetic expression in ``x``, ``y`` and ``r = |(x, y)|``.

    Negative values at cut-cell centers outside the domain are clipped to 0.
    """
    code = compile(expression, "<field>", "eval")
    allowed = set(_NAMESPACE) | {"x", "y", "r"}
    unknown = set(code.co_names) - allowed
    if unknown:
        raise ValueError(f"unknown names in expression: {sorted(unknown)}")

    def fn(x, y):
        env = dict(_NAMESPACE, x=x, y=y, r=np.hypot(x, y))
        return eval(code, {"__builtins__": {}}, env)

    return field_from_function(domain, fn)


def cone_field(domain: GridDomain) -> ScalarField:
    """``R - |x - c|`` with ``R`` the Schwarz radius, clipped at 0.

    ``c`` is the disk center for disks and the centroid otherwise.
    """
    R = schwarz_radius(domain).radius
    cx, cy = domain.description.get("params", {}).get("center", domain.geometric_center())
    return field_from_function(domain, lambda x, y: R - np.hypot(x - cx, y - cy))


def _constant(domain, params):
    value = float(params.get("value", 1.0))
    return field_from_function(domain, lambda x, y: np.full_like(x, value))


PRESETS = {
    "constant": _constant,
    "cone": lambda domain, params: cone_field(domain),
    "sine-bump": lambda domain, params: field_from_function(domain, _sine_bump(domain)),
    "random-weight": lambda domain, params: random_weight_field(
        domain, int(params.get("seed", 0)), float(params.get("ratio", 2.0))
    ),
}


def make_field(domain: GridDomain, spec: dict, seed: int | None = None) -> ScalarField:
    """Build a field from ``{"kind": "expression" | "preset" | "random-smooth", "params": {...}, "seed": int}``."""
    kind = spec.get("kind")
    params = dict(spec.get("params", {}))
    if kind == "expression":
        return expression_field(domain, params["expression"])
    if kind == "preset":
        name = params.get("name")
        if name not in PRESETS:
            raise ValueError(f"unknown preset {name!r}")
        return PRESETS[name](domain, params)
    if kind == "random-smooth":
        s = spec.get("seed", seed) if seed is None else seed
        if s is None:
            raise ValueError("random-smooth fields need a seed")
        return random_smooth_field(domain, int(s)).field
    raise ValueError(f"unknown field kind {kind!r}")
