"""
Rasterized planar domains and cell-sampled fields.

A :class:`GridDomain` is a uniform square lattice of spacing ``h`` cut by a
reconstructed boundary: boundary cells carry their covered area, interior
faces carry their open length, and the boundary itself is a list of straight
segments (one per cut cell crossing) with outward normals. Fields live on the
active cells (covered area > 0), ordered row-major.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from scipy import ndimage
from scipy.special import gamma

from . import geometry
from .rearrange import WeightedSamples


@dataclass(frozen=True)
class MeasureConstants:
    """Dimension ``n`` and the volume ``ω_n`` of the unit ball."""

    n: int = 2
    omega_n: float = field(init=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError("dimension must be an integer >= 2")
        object.__setattr__(self, "omega_n", math.pi ** (self.n / 2) / gamma(self.n / 2 + 1))

    def ball_radius(self, volume: float) -> float:
        return (volume / self.omega_n) ** (1.0 / self.n)

    def sphere_area(self, radius: float) -> float:
        return self.n * self.omega_n * radius ** (self.n - 1)


PLANE = MeasureConstants(2)


@dataclass(frozen=True, eq=False)
class BoundarySegments:
    cell: np.ndarray  # compact index of the owning active cell
    normal: np.ndarray  # (m, 2) unit outward normals
    length: np.ndarray
    midpoint: np.ndarray  # (m, 2)


@dataclass(frozen=True, eq=False)
class GridDomain:
    h: float
    origin: tuple
    rings: tuple
    coverage: np.ndarray  # (ny, nx) covered area per cell
    open_x: np.ndarray  # (ny, nx + 1) open length of the vertical faces
    open_y: np.ndarray  # (ny + 1, nx) open length of the horizontal faces
    segments: BoundarySegments
    description: dict = field(default_factory=dict)

    @property
    def shape(self) -> tuple:
        return self.coverage.shape

    @property
    def cell_area(self) -> float:
        return self.h * self.h

    @property
    def active(self) -> np.ndarray:
        return self.coverage > 0

    @property
    def rows(self) -> np.ndarray:
        return np.nonzero(self.active)[0]

    @property
    def cols(self) -> np.ndarray:
        return np.nonzero(self.active)[1]

    @property
    def n_cells(self) -> int:
        return int(np.count_nonzero(self.active))

    @property
    def weights(self) -> np.ndarray:
        return self.coverage[self.active]

    @property
    def area(self) -> float:
        return math.fsum(self.weights)

    @property
    def perimeter(self) -> float:
        return math.fsum(self.segments.length)

    @property
    def centers(self) -> np.ndarray:
        x0, y0 = self.origin
        return np.column_stack(
            [x0 + (self.cols + 0.5) * self.h, y0 + (self.rows + 0.5) * self.h]
        )

    @property
    def cell_ids(self) -> np.ndarray:
        """Row-major lattice index of every active cell (the tie-breaking order)."""
        return self.rows * self.shape[1] + self.cols

    def index_map(self) -> np.ndarray:
        idx = np.full(self.shape, -1, dtype=int)
        idx[self.active] = np.arange(self.n_cells)
        return idx

    def scatter(self, values, fill=np.nan) -> np.ndarray:
        out = np.full(self.shape, fill, dtype=float)
        out[self.active] = values
        return out

    def bounding_box(self) -> tuple:
        pts = np.concatenate(self.rings)
        return pts[:, 0].min(), pts[:, 1].min(), pts[:, 0].max(), pts[:, 1].max()

    def geometric_center(self) -> np.ndarray:
        c = self.centers
        w = self.weights
        return np.array([np.dot(c[:, 0], w), np.dot(c[:, 1], w)]) / w.sum()


def _grid_for(rings, h: float, origin=None):
    pts = np.concatenate(rings)
    xmin, ymin = pts.min(axis=0)
    xmax, ymax = pts.max(axis=0)
    if origin is None:
        # place the lower-left extreme of the domain on a cell center, one cell of padding
        origin = (xmin - 1.5 * h, ymin - 1.5 * h)
    x0, y0 = origin
    nx = int(math.ceil((xmax - x0) / h)) + 2
    ny = int(math.ceil((ymax - y0) / h)) + 2
    return (float(x0), float(y0)), nx, ny


def build_domain(rings, h: float, origin=None, description=None) -> GridDomain:
    """Rasterize a region bounded by oriented rings onto a grid of spacing ``h``."""
    if not (h > 0):
        raise ValueError("grid spacing must be positive")
    rings = [np.asarray(r, dtype=float) for r in rings]
    if not rings or sum(geometry.signed_area(r) for r in rings) <= 0:
        raise ValueError("degenerate domain (nonpositive area)")
    (x0, y0), nx, ny = _grid_for(rings, h, origin)
    rows, cols, nrm_x, nrm_y, length, mx, my = geometry.split_boundary(rings, x0, y0, h)

    touched = np.zeros((ny, nx), dtype=bool)
    touched[rows, cols] = True
    candidates = ndimage.binary_dilation(touched, structure=np.ones((3, 3), bool))

    inside = geometry.lattice_inside(
        rings, x0 + (np.arange(nx) + 0.5) * h, y0 + (np.arange(ny) + 0.5) * h
    )
    full = inside & ~candidates
    coverage = np.where(full, h * h, 0.0)
    faces = np.zeros((4, ny, nx))  # west, east, south, north
    faces[:, full] = h

    cand_r, cand_c = np.nonzero(candidates)
    for c in np.unique(cand_c):
        rs = cand_r[cand_c == c]
        results = geometry.column_coverage(rings, x0 + c * h, h, y0 + rs * h)
        for r, (a, opn) in zip(rs, results):
            coverage[r, c] = a
            faces[:, r, c] = opn

    open_x = np.zeros((ny, nx + 1))
    open_x[:, 1:-1] = np.minimum(faces[1, :, :-1], faces[0, :, 1:])
    open_y = np.zeros((ny + 1, nx))
    open_y[1:-1, :] = np.minimum(faces[3, :-1, :], faces[2, 1:, :])

    active = coverage > 0
    if not active.any():
        raise ValueError("empty mask")
    n_labels = ndimage.label(active)[1]
    if n_labels != 1:
        raise ValueError(f"domain is not 4-connected ({n_labels} components)")
    idx = np.full((ny, nx), -1, dtype=int)
    idx[active] = np.arange(np.count_nonzero(active))
    owner = idx[rows, cols]
    if np.any(owner < 0):
        raise ValueError("boundary segment falls in an uncovered cell")
    segs = BoundarySegments(
        cell=owner,
        normal=np.column_stack([nrm_x, nrm_y]),
        length=length,
        midpoint=np.column_stack([mx, my]),
    )
    return GridDomain(
        h=float(h),
        origin=(x0, y0),
        rings=tuple(rings),
        coverage=coverage,
        open_x=open_x,
        open_y=open_y,
        segments=segs,
        description=dict(description or {}),
    )


def disk(radius: float = 1.0, h: float = 1 / 128, center=(0.0, 0.0)) -> GridDomain:
    if not (radius > 0):
        raise ValueError("radius must be positive")
    if not (h > 0):
        raise ValueError("grid spacing must be positive")
    cx, cy = map(float, center)
    # the center sits on a lattice node, so no cell is centered on the axis of symmetry
    k = math.ceil(radius / h) + 1
    origin = (cx - k * h, cy - k * h)
    ring = geometry.circle_ring((cx, cy), radius, origin[0], origin[1], h)
    desc = {"shape": "disk", "params": {"center": [cx, cy], "radius": radius}, "h": h}
    return build_domain([ring], h, origin, desc)


def polygon(vertices, h: float = 1 / 128) -> GridDomain:
    ring = geometry.orient_ccw(vertices)
    if len(ring) < 3 or abs(geometry.signed_area(ring)) <= 0:
        raise ValueError("degenerate polygon")
    desc = {"shape": "polygon", "params": {"vertices": np.asarray(vertices).tolist()}, "h": h}
    return build_domain([ring], h, None, desc)


def square(side: float = 1.0, h: float = 1 / 128) -> GridDomain:
    return polygon([(0, 0), (side, 0), (side, side), (0, side)], h)


def rectangle(width: float, height: float, h: float = 1 / 128) -> GridDomain:
    return polygon([(0, 0), (width, 0), (width, height), (0, height)], h)


def l_shape(h: float = 1 / 128) -> GridDomain:
    """Unit square minus its upper-right quarter."""
    return polygon([(0, 0), (1, 0), (1, 0.5), (0.5, 0.5), (0.5, 1), (0, 1)], h)


def from_mask(mask, h: float = 1 / 128, origin=(0.0, 0.0)) -> GridDomain:
    """Domain from a row-major 0/1 matrix; row 0 is the lowest row of cells."""
    if not (h > 0):
        raise ValueError("grid spacing must be positive")
    mask = np.asarray(mask)
    if mask.ndim != 2 or not mask.any():
        raise ValueError("empty mask")
    rings = geometry.mask_rings(mask, origin[0], origin[1], h)
    desc = {"shape": "mask", "params": {"mask": mask.astype(int).tolist()}, "h": h}
    return build_domain(rings, h, None, desc)


def load_domain(spec, h: Optional[float] = None) -> GridDomain:
    """Build a domain from ``{"shape": ..., "params": {...}, "h": ...}`` or a JSON file path."""
    if isinstance(spec, (str, Path)):
        spec = json.loads(Path(spec).read_text())
    shape = spec.get("shape")
    params = spec.get("params", {})
    h = float(h if h is not None else spec.get("h", 1 / 128))
    if h <= 0:
        raise ValueError("grid spacing must be positive")
    if shape == "disk":
        return disk(float(params.get("radius", 1.0)), h, params.get("center", (0.0, 0.0)))
    if shape == "polygon":
        return polygon(params["vertices"], h)
    if shape == "mask":
        return from_mask(params["mask"], h, tuple(params.get("origin", (0.0, 0.0))))
    raise ValueError(f"unknown domain shape {shape!r}")


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Nonnegative values on the active cells of a domain."""

    domain: GridDomain
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        if v.size != self.domain.n_cells:
            raise ValueError("one value per active cell is required")
        if np.any(~np.isfinite(v)) or np.any(v < 0):
            raise ValueError("field values must be finite and nonnegative")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def integral(self) -> float:
        return math.fsum(self.values * self.domain.weights)

    def scaled(self, factor: float) -> "ScalarField":
        return ScalarField(self.domain, factor * self.values)

    def to_csv(self, path) -> None:
        c = self.domain.centers
        np.savetxt(
            path,
            np.column_stack([c, self.values]),
            delimiter=",",
            header="x,y,u",
            comments="",
            fmt="%.17g",
        )


def field_from_function(domain: GridDomain, fn: Callable, clip: bool = True) -> ScalarField:
    """Sample ``fn(x, y)`` at cell centers.

    Centers of cut cells can sit just outside the domain, where a function that
    is nonnegative on the domain may dip below zero; ``clip`` maps those
    values to zero.
    """
    c = domain.centers
    vals = np.broadcast_to(np.asarray(fn(c[:, 0], c[:, 1]), dtype=float), (domain.n_cells,))
    if clip:
        vals = np.maximum(vals, 0.0)
    return ScalarField(domain, np.array(vals))


def constant_field(domain: GridDomain, value: float = 1.0) -> ScalarField:
    return ScalarField(domain, np.full(domain.n_cells, float(value)))


def _neighbor_tables(domain: GridDomain):
    """For each active cell: compact index of E/W/N/S neighbors across open faces (-1 if none)."""
    idx = domain.index_map()
    r, c = domain.rows, domain.cols
    ny, nx = domain.shape

    def look(dr, dc, opening):
        rr, cc = r + dr, c + dc
        ok = (rr >= 0) & (rr < ny) & (cc >= 0) & (cc < nx) & (opening > 0)
        out = np.full(r.size, -1)
        out[ok] = idx[rr[ok], cc[ok]]
        return out

    east = look(0, 1, domain.open_x[r, c + 1])
    west = look(0, -1, domain.open_x[r, c])
    north = look(1, 0, domain.open_y[r + 1, c])
    south = look(-1, 0, domain.open_y[r, c])
    return east, west, north, south


def _directional(u: np.ndarray, fwd: np.ndarray, bwd: np.ndarray, h: float) -> np.ndarray:
    """Central difference where both neighbors exist, second-order one-sided otherwise."""
    d = np.zeros_like(u)
    both = (fwd >= 0) & (bwd >= 0)
    d[both] = (u[fwd[both]] - u[bwd[both]]) / (2 * h)

    f_only = (fwd >= 0) & ~both
    f2 = np.full(u.size, -1)
    f2[f_only] = fwd[fwd[f_only]]
    far = f_only & (f2 >= 0)
    d[far] = (-3 * u[far] + 4 * u[fwd[far]] - u[f2[far]]) / (2 * h)
    near = f_only & (f2 < 0)
    d[near] = (u[fwd[near]] - u[near]) / h

    b_only = (bwd >= 0) & ~both
    b2 = np.full(u.size, -1)
    b2[b_only] = bwd[bwd[b_only]]
    far = b_only & (b2 >= 0)
    d[far] = (3 * u[far] - 4 * u[bwd[far]] + u[b2[far]]) / (2 * h)
    near = b_only & (b2 < 0)
    d[near] = (u[near] - u[bwd[near]]) / h
    return d


def gradient(u) -> np.ndarray:
    """Per-cell gradient vector, shape ``(n_cells, 2)``."""
    domain = u.domain
    values = u.values
    east, west, north, south = _neighbor_tables(domain)
    gx = _directional(values, east, west, domain.h)
    gy = _directional(values, north, south, domain.h)
    return np.column_stack([gx, gy])


def gradient_magnitude(u: ScalarField) -> ScalarField:
    g = gradient(u)
    return ScalarField(u.domain, np.hypot(g[:, 0], g[:, 1]))


def boundary_values(u: ScalarField) -> np.ndarray:
    """Cell values extrapolated linearly to the boundary segment midpoints (clipped at 0)."""
    seg = u.domain.segments
    g = gradient(u)[seg.cell]
    offset = seg.midpoint - u.domain.centers[seg.cell]
    return np.maximum(u.values[seg.cell] + np.einsum("ij,ij->i", g, offset), 0.0)


def boundary_trace_integral(u: ScalarField, p: float = 1.0) -> float:
    """``∫_{∂Ω} u^p dH^1`` as a sum over boundary segments."""
    if p < 1:
        raise ValueError("trace integral needs p >= 1")
    return math.fsum(boundary_values(u) ** p * u.domain.segments.length)


def field_to_samples(u: ScalarField) -> WeightedSamples:
    return WeightedSamples(u.values, u.domain.weights)


@dataclass(frozen=True)
class SchwarzBall:
    radius: float
    volume: float
    boundary_measure: float


def schwarz_radius(domain: GridDomain, constants: MeasureConstants = PLANE) -> SchwarzBall:
    """The centered ball with the measure of ``domain``."""
    vol = domain.area
    if not (vol > 0):
        raise ValueError("domain area must be positive")
    R = constants.ball_radius(vol)
    return SchwarzBall(R, vol, constants.sphere_area(R))
