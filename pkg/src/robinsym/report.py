"""Config-driven verification runs and their JSON reports."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import fields, robin
from .grid import (
    PLANE,
    GridDomain,
    ScalarField,
    boundary_trace_integral,
    field_to_samples,
    gradient_magnitude,
    load_domain,
    schwarz_radius,
)
from .rearrange import (
    check_weight_condition,
    contraction_check,
    decreasing_rearrangement,
    distribution_function,
    hardy_littlewood_check,
    increasing_rearrangement,
    lp_norm,
    pseudo_rearrangement,
)
from .symmetrize import (
    POINTWISE_C,
    ComparisonRecord,
    build_ustar,
    discretization_tolerance,
    gn_radial_solution,
    l1_compare,
    lorentz_compare,
    pointwise_bound_check,
    talenti_lorentz_formula,
    talenti_radial_profile,
    trace_lp_check,
    weighted_compare,
)

SCHEMA = 1
SUITES = (
    "rearrangement-properties",
    "main-comparison",
    "trace",
    "torsion",
    "weighted",
    "lorentz",
    "talenti",
    "gn-dirichlet",
)
# multipliers accepted under "tolerances" in a config
TOLERANCE_KEYS = ("discretization", "pointwise", "torsion")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    domain: dict
    field: dict
    suites: tuple
    betas: tuple = (1.0,)
    lorentz_p: tuple = (1.0, 1.5, 2.0, 4.0)
    trace_p: tuple = (1.0, 2.0)
    weight: dict = field(default_factory=lambda: {"kind": "expression", "params": {"expression": "1"}})
    h: Optional[float] = None
    seed: Optional[int] = None
    tolerances: dict = field(default_factory=dict)
    solver_tol: float = robin.DEFAULT_TOL

    @classmethod
    def from_dict(cls, data: dict, h: Optional[float] = None, seed: Optional[int] = None) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        known = {"domain", "field", "suites", "betas", "lorentz_p", "trace_p", "weight", "h", "seed", "tolerances", "solver_tol"}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        for key in ("domain", "field", "suites"):
            if key not in data:
                raise ConfigError(f"missing config key {key!r}")
        kw = dict(data)
        for key in ("suites", "betas", "lorentz_p", "trace_p"):
            if key in kw:
                if not isinstance(kw[key], list):
                    raise ConfigError(f"{key} must be a list")
                kw[key] = tuple(kw[key])
        if h is not None:
            kw["h"] = h
        if seed is not None:
            kw["seed"] = seed
        cfg = cls(**kw)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path, h: Optional[float] = None, seed: Optional[int] = None) -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        return cls.from_dict(data, h, seed)

    def validate(self) -> None:
        if not self.suites:
            raise ConfigError("at least one suite must be selected")
        bad = [s for s in self.suites if s not in SUITES]
        if bad:
            raise ConfigError(f"unknown suites: {bad}")
        if len(set(self.suites)) != len(self.suites):
            raise ConfigError("duplicate suites")
        if not isinstance(self.domain, dict) or "shape" not in self.domain:
            raise ConfigError("domain needs a shape")
        for spec, label in ((self.field, "field"), (self.weight, "weight")):
            if not isinstance(spec, dict) or spec.get("kind") not in ("expression", "preset", "random-smooth"):
                raise ConfigError(f"{label} kind must be expression, preset or random-smooth")
        if self.field.get("kind") == "random-smooth" and self.field_seed is None:
            raise ConfigError("random-smooth fields need a seed")
        if self.weight.get("kind") == "random-smooth" and self.weight.get("seed") is None and self.seed is None:
            raise ConfigError("random-smooth weights need a seed")
        if any(not _positive(b) for b in self.betas):
            raise ConfigError("betas must be positive")
        if any(not (_positive(p) and p >= 1) for p in self.lorentz_p + self.trace_p):
            raise ConfigError("exponents must be at least 1")
        resolution = self.resolution
        if not _positive(resolution):
            raise ConfigError("h must be positive")
        if set(self.tolerances) - set(TOLERANCE_KEYS):
            raise ConfigError(f"tolerance overrides must be among {TOLERANCE_KEYS}")
        if any(not _positive(v) for v in self.tolerances.values()):
            raise ConfigError("tolerance multipliers must be positive")
        if not _positive(self.solver_tol):
            raise ConfigError("solver_tol must be positive")

    @property
    def resolution(self) -> float:
        return self.h if self.h is not None else self.domain.get("h", 1 / 128)

    @property
    def field_seed(self) -> Optional[int]:
        return self.seed if self.seed is not None else self.field.get("seed")

    def as_dict(self) -> dict:
        return {
            "domain": self.domain,
            "field": self.field,
            "suites": list(self.suites),
            "betas": list(self.betas),
            "lorentz_p": list(self.lorentz_p),
            "trace_p": list(self.trace_p),
            "weight": self.weight,
            "h": self.resolution,
            "seed": self.seed,
            "tolerances": dict(sorted(self.tolerances.items())),
            "solver_tol": self.solver_tol,
        }


def _positive(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x) and x > 0


@dataclass
class SuiteResult:
    name: str
    records: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"records": [r.as_dict() for r in self.records], "details": self.details}


@dataclass
class RunReport:
    config: ExperimentConfig
    grid: dict
    suites: list
    timing: dict
    profiles: dict = field(default_factory=dict)  # file name -> writer
    solutions: dict = field(default_factory=dict)

    @property
    def records(self) -> list:
        return [r for s in self.suites for r in s.records]

    @property
    def overall(self) -> str:
        asserted = [r for r in self.records if r.asserted]
        return "holds" if all(r.holds for r in asserted) else "violated"

    def as_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "config": self.config.as_dict(),
            "grid": self.grid,
            "suites": {s.name: s.as_dict() for s in self.suites},
            "overall": self.overall,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=False, allow_nan=False) + "\n"

    def write(self, out: Path) -> None:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(self.to_json())
        # wall-clock times vary between runs, so they stay out of report.json
        (out / "timing.json").write_text(json.dumps(self.timing, indent=2) + "\n")
        for folder, items in (("profiles", self.profiles), ("solutions", self.solutions)):
            if items:
                (out / folder).mkdir(exist_ok=True)
            for name, obj in sorted(items.items()):
                obj.to_csv(out / folder / name)


def _scaled(record: ComparisonRecord, factor: float) -> ComparisonRecord:
    if factor == 1.0:
        return record
    return ComparisonRecord.evaluate(
        record.name, record.lhs, record.rhs, record.tolerance * factor, record.asserted, record.note
    )


def _equality(name: str, a: float, b: float, rtol: float, note: str = "") -> ComparisonRecord:
    """``|a - b| ≤ rtol max(|a|, |b|)`` phrased as a comparison record."""
    scale = max(abs(a), abs(b))
    return ComparisonRecord.evaluate(name, abs(a - b), 0.0, rtol * scale, note=note)


class Context:
    """Lazily computed objects shared between suites."""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.domain: GridDomain = load_domain(config.domain, config.resolution)
        self.u: ScalarField = fields.make_field(self.domain, config.field, config.field_seed)
        self._cache = {}

    def get(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    @property
    def ustar(self):
        return self.get("ustar", lambda: build_ustar(self.u))

    @property
    def grad(self) -> ScalarField:
        return self.get("grad", lambda: gradient_magnitude(self.u))

    @property
    def mean_trace(self) -> float:
        return self.get("trace", lambda: boundary_trace_integral(self.u, 1.0) / self.domain.perimeter)

    @property
    def vanishes_on_boundary(self) -> bool:
        gmax = float(self.grad.values.max())
        return self.mean_trace <= POINTWISE_C * self.domain.h * max(gmax, 1e-300)

    def multiplier(self, key: str) -> float:
        return float(self.config.tolerances.get(key, 1.0))


def _suite_rearrangement(ctx: Context, report: RunReport) -> SuiteResult:
    res = SuiteResult("rearrangement-properties")
    u = field_to_samples(ctx.u)
    g = field_to_samples(ctx.grad)
    for label, s in (("u", u), ("grad", g)):
        dec = decreasing_rearrangement(s)
        mu_raw = distribution_function(s)
        mu_dec = distribution_function(dec.as_samples())
        same = (
            np.array_equal(mu_raw.breakpoints, mu_dec.breakpoints)
            and np.allclose(mu_raw.values, mu_dec.values, rtol=1e-13, atol=0)
        )
        res.records.append(
            ComparisonRecord.evaluate(f"equimeasurable_{label}", 0.0 if same else 1.0, 0.0, 0.0)
        )
        for p in (1.0, 2.0, 3.0):
            a, b = lp_norm(dec, p), lp_norm(s, p)
            res.records.append(_equality(f"lp_preserved_{label}_p{p:g}", a, b, 1e-12))
        report.profiles[f"{label}_decreasing.csv"] = dec
    hl = hardy_littlewood_check(u, g)
    res.records.append(ComparisonRecord.evaluate("hardy_littlewood_lower", hl.lower, hl.middle, 1e-12 * abs(hl.upper)))
    res.records.append(ComparisonRecord.evaluate("hardy_littlewood_upper", hl.middle, hl.upper, 1e-12 * abs(hl.upper)))
    for p in (1.0, 2.0):
        c = contraction_check(u, g, p)
        res.records.append(ComparisonRecord.evaluate(f"contraction_p{p:g}", c.lhs, c.rhs, 1e-12 * max(c.rhs, 1e-300)))
    F = pseudo_rearrangement(g, u)
    res.records.append(_equality("pseudo_rearrangement_mass", F.integral(), g.integral(), 1e-12))
    report.profiles["pseudo_rearrangement.csv"] = F
    return res


def _suite_main(ctx: Context, report: RunReport) -> SuiteResult:
    res = SuiteResult("main-comparison")
    us = ctx.ustar
    res.records.append(_scaled(l1_compare(ctx.u, us), ctx.multiplier("discretization")))
    res.details = {
        "boundary_value": us.boundary_value,
        "center_value": us.center_value,
        "schwarz_radius": us.radius,
        "l1_difference": us.l1_norm() - ctx.u.integral(),
    }
    report.profiles["ustar.csv"] = us
    report.profiles["grad_increasing.csv"] = increasing_rearrangement(field_to_samples(ctx.grad))
    return res


def _suite_trace(ctx: Context, report: RunReport) -> SuiteResult:
    res = SuiteResult("trace")
    for p in ctx.config.trace_p:
        res.records.append(trace_lp_check(ctx.u, ctx.ustar, float(p)))
    return res


def _suite_torsion(ctx: Context, report: RunReport) -> SuiteResult:
    res = SuiteResult("torsion")
    m = ctx.multiplier("torsion")
    runs = []
    for beta in ctx.config.betas:
        result = robin.torsion_rigidity(ctx.domain, float(beta), ctx.config.solver_tol)
        res.records.append(_scaled(robin.compare_torsion(ctx.domain, float(beta), result=result), m))
        res.records.append(robin.functional_compare(ctx.u, float(beta), 2.0))
        runs.append(result.as_dict())
        report.solutions[f"robin_beta{beta:g}.csv"] = result.field
    res.details = {"runs": runs}
    return res


def _suite_weighted(ctx: Context, report: RunReport) -> SuiteResult:
    res = SuiteResult("weighted")
    cfg = ctx.config
    seed = cfg.weight.get("seed", cfg.seed)
    f = fields.make_field(ctx.domain, cfg.weight, seed)
    fstar = decreasing_rearrangement(field_to_samples(f))
    wc = check_weight_condition(fstar, PLANE.n)
    res.details = {
        "weight_condition": wc.holds,
        "first_violation": wc.first_violation,
        "worst_margin": wc.worst_margin,
    }
    report.profiles["weight_decreasing.csv"] = fstar
    if not wc.holds:
        # the theorem has nothing to say; record the failed hypothesis without asserting
        res.records.append(
            ComparisonRecord.evaluate("weight_condition", 0.0, wc.worst_margin, 0.0, asserted=False,
                                      note="hypothesis not satisfied - weighted checks skipped")
        )
        return res
    res.records.append(_scaled(weighted_compare(f, ctx.u, ctx.ustar), ctx.multiplier("discretization")))
    for beta in cfg.betas:
        rec = robin.compare_weighted_torsion(f, float(beta), cfg.solver_tol)
        res.records.append(_scaled(rec, ctx.multiplier("torsion")))
    return res


def _suite_lorentz(ctx: Context, report: RunReport) -> SuiteResult:
    res = SuiteResult("lorentz")
    for p in ctx.config.lorentz_p:
        res.records.append(_scaled(lorentz_compare(ctx.u, ctx.ustar, float(p)), ctx.multiplier("discretization")))
    return res


def _suite_talenti(ctx: Context, report: RunReport) -> SuiteResult:
    res = SuiteResult("talenti")
    M = distribution_function(field_to_samples(ctx.grad))
    V = ctx.domain.area
    v = talenti_radial_profile(M, V)
    n = PLANE.n
    for p in ctx.config.lorentz_p:
        p = float(p)
        closed = talenti_lorentz_formula(M, V, p)
        res.records.append(_equality(f"talenti_dual_path_p{p:g}", closed, v.lorentz_norm(p, 1.0), 1e-6))
        rec = lorentz_compare(ctx.u, v, p)
        in_range = p <= n / (n - 1) + 1e-12
        if not (ctx.vanishes_on_boundary and in_range):
            note = "u does not vanish on the boundary - probe only" if in_range else rec.note
            rec = ComparisonRecord.evaluate(f"talenti_L{p:g},1", rec.lhs, closed, rec.tolerance, False, note)
        else:
            rec = ComparisonRecord.evaluate(f"talenti_L{p:g},1", rec.lhs, closed, rec.tolerance)
        res.records.append(_scaled(rec, ctx.multiplier("discretization")))
    report.profiles["talenti_profile.csv"] = v
    return res


def _suite_gn(ctx: Context, report: RunReport) -> SuiteResult:
    res = SuiteResult("gn-dirichlet")
    fstar = decreasing_rearrangement(field_to_samples(ctx.grad))
    vbar = gn_radial_solution(fstar, area=ctx.domain.area)
    tol = discretization_tolerance(ctx.u) * ctx.multiplier("discretization")
    dirichlet = ctx.vanishes_on_boundary
    note = "" if dirichlet else "u does not vanish on the boundary - probe only"
    res.records.append(ComparisonRecord.evaluate("gn_l1", ctx.u.integral(), vbar.l1_norm(), tol, dirichlet, note))
    report.profiles["gn_solution.csv"] = vbar
    if dirichlet:
        pb = pointwise_bound_check(ctx.u)
        res.records.append(_scaled(pb.record(), ctx.multiplier("pointwise")))
        res.details = {"pointwise_max_gap": pb.max_gap}
    return res


RUNNERS = {
    "rearrangement-properties": _suite_rearrangement,
    "main-comparison": _suite_main,
    "trace": _suite_trace,
    "torsion": _suite_torsion,
    "weighted": _suite_weighted,
    "lorentz": _suite_lorentz,
    "talenti": _suite_talenti,
    "gn-dirichlet": _suite_gn,
}


def run(config: ExperimentConfig) -> RunReport:
    """Execute the selected suites in declared order."""
    import time

    config.validate()
    t0 = time.perf_counter()
    ctx = Context(config)
    d = ctx.domain
    ball = schwarz_radius(d)
    grid = {
        "h": d.h,
        "shape": list(d.shape),
        "n_cells": d.n_cells,
        "area": d.area,
        "perimeter": d.perimeter,
        "schwarz_radius": ball.radius,
        "ball_perimeter": ball.boundary_measure,
    }
    report = RunReport(config, grid, [], {"setup": time.perf_counter() - t0})
    for name in config.suites:
        t = time.perf_counter()
        report.suites.append(RUNNERS[name](ctx, report))
        report.timing[name] = time.perf_counter() - t
    report.solutions["u.csv"] = ctx.u
    return report
