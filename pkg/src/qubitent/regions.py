"""Membership in the regions R_2k, the Bloch-ball comparison, nesting checks and slice scans.

``R_2k`` is the set of models ``r`` in the cube admitting a representing
signed distribution with ``H_2k >= 2``. Membership is decided by the maximal
entropy, so the margin ``max H_2k - 2`` (bits) drives everything here.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .maxent import max_entropy, max_entropy_many
from .representation import EmpiricalModel

THRESHOLD = 2.0
MEMBERSHIP_TOL = 1e-9
BOUNDARY_BAND = 1e-3
BISECTION_STEPS = 60
DEFAULT_RESOLUTION = 401
AXES = ("x", "y", "z")


@dataclass(frozen=True)
class MembershipVerdict:
    inside: bool
    margin: float
    boundary: bool

    @classmethod
    def from_margin(cls, margin: float, tol: float = MEMBERSHIP_TOL, band: float = BOUNDARY_BAND):
        return cls(bool(margin >= -tol), float(margin), bool(abs(margin) <= band))


def margins(r, k: int, jobs: int = 1) -> np.ndarray:
    """Entropy margins ``max H_2k - 2`` for a stack of models."""
    return max_entropy_many(r, k, jobs).entropy - THRESHOLD


def in_region(m, k: int) -> MembershipVerdict:
    return MembershipVerdict.from_margin(max_entropy(m, k).entropy - THRESHOLD)


def in_ball(m) -> bool:
    return EmpiricalModel.coerce(m).radius_squared <= 1.0


@dataclass
class BallReport:
    samples: int
    tested: int
    excluded: int
    seed: int
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def to_dict(self) -> dict:
        return {"samples": self.samples, "tested": self.tested, "excluded": self.excluded,
                "seed": self.seed, "mismatches": [list(map(float, r)) for r in self.mismatches]}


def verify_ball_equals_R2(samples: int = 10_000, seed: int = 0, band: float = 1e-6,
                          jobs: int = 1, points=None) -> BallReport:
    """Compare optimizer-based order-2 membership with ``|r|^2 <= 1`` on random cube points.

    Points within ``band`` of the unit sphere (in radius) are skipped. ``points``
    overrides the random draw.
    """
    if points is None:
        pts = np.random.default_rng(seed).uniform(-1.0, 1.0, size=(samples, 3))
    else:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
    radius = np.linalg.norm(pts, axis=1)
    keep = np.abs(radius - 1.0) > band
    tested = pts[keep]
    report = BallReport(len(pts), int(keep.sum()), int((~keep).sum()), seed)
    if len(tested):
        inside_opt = margins(tested, 1, jobs) >= -MEMBERSHIP_TOL
        inside_ball = (tested ** 2).sum(axis=1) <= 1.0
        report.mismatches = [tuple(p) for p in tested[inside_opt != inside_ball]]
    return report


def ray_exit(directions) -> np.ndarray:
    """Distance from the origin to the cube surface along each unit direction."""
    return 1.0 / np.abs(directions).max(axis=1)


def boundary_radius(directions, k: int, jobs: int = 1, steps: int = BISECTION_STEPS,
                    tol: float = MEMBERSHIP_TOL) -> np.ndarray:
    """Largest radius along each unit ray that stays inside ``R_2k``, by bisection.

    Relies on the regions being star-shaped about the origin. Returns the inner
    bisection bracket, which is always a member point; rays leaving the cube
    while still inside return the exit distance.
    """
    u = np.atleast_2d(np.asarray(directions, dtype=float))
    u = u / np.linalg.norm(u, axis=1, keepdims=True)
    hi = ray_exit(u)
    lo = np.zeros(len(u))
    exit_inside = margins(np.clip(hi[:, None] * u, -1, 1), k, jobs) >= -tol
    lo[exit_inside] = hi[exit_inside]
    todo = np.flatnonzero(~exit_inside)
    for _ in range(steps):
        if todo.size == 0:
            break
        mid = 0.5 * (lo[todo] + hi[todo])
        inside = margins(mid[:, None] * u[todo], k, jobs) >= -tol
        lo[todo[inside]] = mid[inside]
        hi[todo[~inside]] = mid[~inside]
    return lo


def ray_directions(n: int, seed: int = 0) -> np.ndarray:
    """``n`` seeded directions uniform on the unit sphere."""
    v = np.random.default_rng(seed).standard_normal((n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


@dataclass
class NestingReport:
    k_values: list
    directions: np.ndarray
    radii: np.ndarray  # (len(k_values), n_rays)
    slack: float
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "k": list(self.k_values),
            "slack": self.slack,
            "directions": self.directions.tolist(),
            "radii": self.radii.tolist(),
            "violations": self.violations,
        }


def verify_nesting(k_max: int, boundary_samples: int = 64, seed: int = 0, jobs: int = 1,
                   slack: float = 1e-6, directions=None) -> NestingReport:
    """Check ``R_2k`` inside ``R_2(k+1)`` for ``k < k_max`` along sampled rays.

    Two checks per ray and k: the bisected radius of ``R_2k`` is at most that of
    ``R_2(k+1)`` plus ``slack``, and the boundary point of ``R_2k`` is a member
    of ``R_2(k+1)``.
    """
    if k_max < 2:
        raise ValueError("k_max must be at least 2")
    u = ray_directions(boundary_samples, seed) if directions is None else np.atleast_2d(directions)
    u = u / np.linalg.norm(u, axis=1, keepdims=True)
    ks = list(range(1, k_max + 1))
    radii = np.array([boundary_radius(u, k, jobs) for k in ks])
    report = NestingReport(ks, u, radii, slack)
    for i, k in enumerate(ks[:-1]):
        next_margin = margins(radii[i][:, None] * u, k + 1, jobs)
        for j in range(len(u)):
            radial = radii[i, j] > radii[i + 1, j] + slack
            member = next_margin[j] < -MEMBERSHIP_TOL
            if radial or member:
                report.violations.append({
                    "k": k, "ray": j, "radius_k": float(radii[i, j]),
                    "radius_next": float(radii[i + 1, j]), "margin_next": float(next_margin[j]),
                })
    return report


def convexity_probe(k: int, pairs: int = 200, seed: int = 0, jobs: int = 1) -> list:
    """Midpoints of random pairs of member points; returns the midpoints that fall outside."""
    rng = np.random.default_rng(seed)
    members = np.empty((0, 3))
    while len(members) < 2 * pairs:
        cand = rng.uniform(-1.0, 1.0, size=(4 * pairs, 3))
        members = np.vstack([members, cand[margins(cand, k, jobs) >= -MEMBERSHIP_TOL]])
    a, b = members[:pairs], members[pairs:2 * pairs]
    mid = 0.5 * (a + b)
    outside = margins(mid, k, jobs) < -MEMBERSHIP_TOL
    return [tuple(p) for p in mid[outside]]


@dataclass(frozen=True)
class Plane:
    """Slice of the cube with one coordinate fixed, e.g. ``z=0``."""

    axis: str = "z"
    value: float = 0.0

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"plane axis must be one of x, y, z; got {self.axis!r}")
        if not -1.0 <= self.value <= 1.0:
            raise ValueError(f"plane value {self.value} is outside [-1, 1]")

    @classmethod
    def parse(cls, text: str) -> Plane:
        try:
            axis, value = text.split("=")
            return cls(axis.strip().lower(), float(value))
        except ValueError as exc:
            raise ValueError(f"cannot parse plane {text!r} (expected e.g. z=0): {exc}") from None

    @property
    def free_axes(self) -> tuple[int, int]:
        i = AXES.index(self.axis)
        return tuple(j for j in range(3) if j != i)

    def embed(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=float)
        pts = np.empty(a.shape + (3,))
        ia, ib = self.free_axes
        pts[..., ia] = a
        pts[..., ib] = b
        pts[..., AXES.index(self.axis)] = self.value
        return pts

    def __str__(self):
        return f"{self.axis}={self.value:g}"


@dataclass
class RegionScan:
    k: int
    plane: Plane
    resolution: int
    coords: np.ndarray  # grid coordinates along each free axis
    margins: np.ndarray  # (resolution, resolution), [i, j] -> (coords[i], coords[j])
    boundary: np.ndarray  # (M, 2), closed: last point repeats the first

    @property
    def inside(self) -> np.ndarray:
        return self.margins >= -MEMBERSHIP_TOL

    def grid_rows(self):
        a, b = np.meshgrid(self.coords, self.coords, indexing="ij")
        for ra, rb, m, ins in zip(a.ravel(), b.ravel(), self.margins.ravel(), self.inside.ravel()):
            yield ra, rb, m, ins

    def grid_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r_a", "r_b", "margin_bits", "inside"])
        for ra, rb, m, ins in self.grid_rows():
            w.writerow([fmt(ra), fmt(rb), fmt(m), int(ins)])
        return buf.getvalue()

    def boundary_csv(self) -> str:
        return boundary_to_csv(self.boundary)

    def to_dict(self, include_grid: bool = True) -> dict:
        out = {"k": self.k, "plane": str(self.plane), "resolution": self.resolution,
               "boundary": [[num(a), num(b)] for a, b in self.boundary]}
        if include_grid:
            out["cells"] = [{"r_a": num(ra), "r_b": num(rb), "margin_bits": num(m), "inside": bool(ins)}
                            for ra, rb, m, ins in self.grid_rows()]
        return out

    def to_json(self, include_grid: bool = True) -> str:
        return json.dumps(self.to_dict(include_grid))


def num(x: float) -> float:
    """Round to 9 significant digits."""
    return float(f"{x:.9g}") + 0.0


def fmt(x: float) -> str:
    return repr(num(x))


def boundary_to_csv(points) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["r_a", "r_b"])
    for a, b in points:
        w.writerow([fmt(a), fmt(b)])
    return buf.getvalue()


def read_boundary_csv(text: str) -> np.ndarray:
    rows = list(csv.DictReader(io.StringIO(text)))
    return np.array([[float(r["r_a"]), float(r["r_b"])] for r in rows]).reshape(-1, 2)


def extract_boundary(coords, margin, tol: float = MEMBERSHIP_TOL) -> np.ndarray:
    """Closed boundary polyline of the member set on a square grid.

    Every grid edge joining a member to a non-member contributes the point where
    the linearly interpolated margin crosses zero. Members on the edge of the
    grid are joined to an outside ring, so a region touching the square is
    closed along it. Points are ordered by angle about the slice center, which
    is valid for regions star-shaped about it.
    """
    coords = np.asarray(coords, dtype=float)
    m = np.asarray(margin, dtype=float)
    inside = m >= -tol
    pts = []
    for axis in (0, 1):
        m0 = np.moveaxis(m, axis, 0)
        in0 = np.moveaxis(inside, axis, 0)
        a, b = m0[:-1], m0[1:]
        cross = in0[:-1] != in0[1:]
        i, j = np.nonzero(cross)
        # clamp so the crossing stays on the segment even when the margin sits inside the tolerance
        w = np.clip(a[i, j] / (a[i, j] - b[i, j]), 0.0, 1.0)
        along = coords[i] + w * (coords[i + 1] - coords[i])
        other = coords[j]
        pts.append(np.column_stack([along, other]) if axis == 0 else np.column_stack([other, along]))
    # members on the rim of the square are boundary points themselves
    rim = np.zeros_like(inside)
    rim[0, :] = rim[-1, :] = rim[:, 0] = rim[:, -1] = True
    i, j = np.nonzero(inside & rim)
    pts.append(np.column_stack([coords[i], coords[j]]))
    pts = np.vstack(pts)
    if len(pts) == 0:
        return pts.reshape(0, 2)
    pts = np.unique(np.round(pts, 12), axis=0)
    angle = np.arctan2(pts[:, 1], pts[:, 0])
    order = np.lexsort((np.hypot(pts[:, 0], pts[:, 1]), angle))
    pts = pts[order]
    return np.vstack([pts, pts[:1]])


def scan_slice(k: int, plane: Plane | str = "z=0", resolution: int = DEFAULT_RESOLUTION,
               jobs: int = 1) -> RegionScan:
    """Margins on a ``resolution x resolution`` grid over a slice, plus its boundary polyline."""
    if resolution < 16:
        raise ValueError(f"resolution must be at least 16, got {resolution}")
    plane = Plane.parse(plane) if isinstance(plane, str) else plane
    coords = np.linspace(-1.0, 1.0, resolution)
    a, b = np.meshgrid(coords, coords, indexing="ij")
    pts = plane.embed(a, b).reshape(-1, 3)
    grid = margins(pts, k, jobs).reshape(resolution, resolution)
    return RegionScan(k, plane, resolution, coords, grid, extract_boundary(coords, grid))


def max_radial_deviation(boundary, radius: float = 1.0) -> float:
    pts = np.asarray(boundary, dtype=float)
    return float(np.max(np.abs(np.hypot(pts[:, 0], pts[:, 1]) - radius)))


def slice_matches_projection(k: int, points, offsets=np.linspace(-1.0, 1.0, 21),
                             axis: str = "z", jobs: int = 1) -> list:
    """Spot-check that the ``axis = 0`` slice equals the projection along ``axis``.

    For each 2-D point, no model off the slice may have a larger margin than the
    on-slice model. Returns the points that fail.
    """
    plane = Plane(axis, 0.0)
    pts2 = np.atleast_2d(np.asarray(points, dtype=float))
    on = margins(plane.embed(pts2[:, 0], pts2[:, 1]), k, jobs)
    failures = []
    for off in offsets:
        shifted = Plane(axis, float(off)).embed(pts2[:, 0], pts2[:, 1])
        worse = margins(shifted, k, jobs) > on + MEMBERSHIP_TOL
        failures.extend((tuple(p), float(off)) for p in pts2[worse])
    return failures


def _segment_distance(p, a, b):
    ab = b - a
    t = np.clip(((p - a) * ab).sum(-1) / np.maximum((ab * ab).sum(-1), 1e-300), 0.0, 1.0)
    return np.hypot(*(a + t[..., None] * ab - p).T)


def polygon_contains(polygon, points, tol: float = 1e-9) -> np.ndarray:
    """Even-odd containment for a closed polyline; points within ``tol`` of an edge count as inside."""
    poly = np.asarray(polygon, dtype=float)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    a, b = poly[:-1], poly[1:]
    x, y = pts[:, 0:1], pts[:, 1:2]
    crosses = ((a[:, 1] > y) != (b[:, 1] > y))
    with np.errstate(divide="ignore", invalid="ignore"):
        x_at = a[:, 0] + (y - a[:, 1]) * (b[:, 0] - a[:, 0]) / (b[:, 1] - a[:, 1])
    inside = (crosses & (x < x_at)).sum(axis=1) % 2 == 1
    near = np.array([_segment_distance(p, a, b).min() <= tol for p in pts])
    return inside | near


def polygon_radius(polygon, angles) -> np.ndarray:
    """Distance from the origin to a closed polyline along rays at ``angles``.

    Takes the farthest edge hit per ray, which is the unique hit for a
    polyline star-shaped about the origin.
    """
    poly = np.asarray(polygon, dtype=float)
    a, e = poly[:-1], poly[1:] - poly[:-1]
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    d = np.column_stack([np.cos(angles), np.sin(angles)])
    # solve a + s e = rho d for each (ray, edge): cross products in 2-D
    den = d[:, None, 0] * e[None, :, 1] - d[:, None, 1] * e[None, :, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (a[None, :, 0] * d[:, None, 1] - a[None, :, 1] * d[:, None, 0]) / den
        rho = (a[None, :, 0] * e[None, :, 1] - a[None, :, 1] * e[None, :, 0]) / den
    hit = (s >= -1e-12) & (s <= 1 + 1e-12) & (rho >= 0) & np.isfinite(rho)
    return np.where(hit, rho, -np.inf).max(axis=1)
