"""Numerical checks tying the unbiasedness axiom to the entropy threshold of 2 bits."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .maxent import max_entropy_many
from .regions import BISECTION_STEPS, THRESHOLD

DEFAULT_EPSILONS = (1e-1, 1e-2, 1e-3, 1e-4)


@dataclass
class UnbiasednessProbe:
    """Maximal ``H_2k`` along the models ``(1, eps, 0)`` as ``eps`` shrinks."""

    k: int
    epsilons: list
    sup_entropies: list
    pole_entropy: float  # the eps = 0 limit point (1, 0, 0)

    def __post_init__(self):
        if any(b >= a for a, b in zip(self.epsilons, self.epsilons[1:])):
            raise ValueError("epsilons must be strictly decreasing")
        if not np.all(np.isfinite(self.sup_entropies)):
            raise ValueError("probe entropies must be finite")

    @property
    def gaps(self) -> list:
        return [abs(h - THRESHOLD) for h in self.sup_entropies]

    @property
    def limit_gap(self) -> float:
        return self.gaps[-1]

    @property
    def shrinking(self) -> bool:
        """Gaps do not grow as eps decreases (the delta(eps) -> 0 trend)."""
        return all(b <= a for a, b in zip(self.gaps, self.gaps[1:]))

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "pole_entropy": self.pole_entropy,
            "entries": [{"epsilon": e, "entropy": h, "gap": g}
                        for e, h, g in zip(self.epsilons, self.sup_entropies, self.gaps)],
        }


def probe_beta(k: int, epsilons=DEFAULT_EPSILONS, jobs: int = 1) -> UnbiasednessProbe:
    eps = sorted((float(e) for e in epsilons), reverse=True)
    if not eps or any(not 0 < e <= 1 for e in eps):
        raise ValueError(f"each epsilon must lie in (0, 1], got {list(epsilons)!r}")
    pts = np.array([[1.0, e, 0.0] for e in eps] + [[1.0, 0.0, 0.0]])
    h = max_entropy_many(pts, k, jobs).entropy
    return UnbiasednessProbe(k, eps, h[:-1].tolist(), float(h[-1]))


@dataclass
class UnbiasednessReport:
    k_max: int
    tol: float
    pole_entropies: list
    # per k: largest |r_y| (resp. |r_z|) with (1, r_y, 0) still a member, by bisection
    extent_y: list
    extent_z: list
    resolution: float = 1e-6

    @property
    def intersection_extent(self) -> float:
        return max(min(self.extent_y), min(self.extent_z))

    @property
    def poles_inside(self) -> bool:
        return all(h - THRESHOLD >= -self.tol for h in self.pole_entropies)

    @property
    def consistent(self) -> bool:
        return self.poles_inside and self.intersection_extent <= self.resolution

    def to_dict(self) -> dict:
        return {
            "k_max": self.k_max, "tol": self.tol,
            "per_k": [{"k": k + 1, "pole_entropy": h, "extent_y": ey, "extent_z": ez}
                      for k, (h, ey, ez) in enumerate(zip(self.pole_entropies, self.extent_y, self.extent_z))],
            "intersection_extent": self.intersection_extent,
            "consistent": self.consistent,
        }


def _edge_extent(k: int, axis: int, tol: float, jobs: int) -> float:
    lo, hi = 0.0, 1.0
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        pt = np.array([[1.0, 0.0, 0.0]])
        pt[0, axis] = mid
        if max_entropy_many(pt, k, jobs).entropy[0] - THRESHOLD >= -tol:
            lo = mid
        else:
            hi = mid
    return lo


def check_unbiasedness_consistency(k_max: int, tol: float = 0.0, jobs: int = 1) -> UnbiasednessReport:
    """Among models with ``f_x = 1``, find which lie in every ``R_2k`` for ``k <= k_max``.

    ``tol`` defaults to 0 (strict margin): with a positive entropy tolerance the
    order-2 margin ``-(r_y^2)/(2 ln 2)`` admits ``|r_y|`` up to ``sqrt(2 ln2 tol)``.
    """
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    pole = np.array([[1.0, 0.0, 0.0]])
    ks = range(1, k_max + 1)
    return UnbiasednessReport(
        k_max, tol,
        pole_entropies=[float(max_entropy_many(pole, k, jobs).entropy[0]) for k in ks],
        extent_y=[_edge_extent(k, 1, tol, jobs) for k in ks],
        extent_z=[_edge_extent(k, 2, tol, jobs) for k in ks],
    )
