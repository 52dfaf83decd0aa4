"""Empirical models and the affine family of signed distributions that reproduce them."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import OutOfCube
from .phase_space import CHARACTERS, N_POINTS, OUTCOMES, SignedDistribution

# coordinates within this distance outside the cube are clipped rather than rejected
CUBE_SLACK = 1e-12

FREE_LABELS = ("xy", "xz", "yz", "xyz")

# (4, 8): higher-order characters scaled by 1/8, so t_i is the character coefficient c_S
FREE_DIRECTIONS = CHARACTERS[4:] / N_POINTS
FREE_DIRECTIONS.setflags(write=False)


@dataclass(frozen=True)
class EmpiricalModel:
    """Outcome-0 frequencies of the x, y, z measurements, stored as ``r_j = 2 f_j - 1``."""

    r_x: float
    r_y: float
    r_z: float

    def __post_init__(self):
        for name in ("r_x", "r_y", "r_z"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or abs(v) > 1.0 + CUBE_SLACK:
                raise OutOfCube(f"{name}={getattr(self, name)!r} is outside [-1, 1]")
            object.__setattr__(self, name, min(1.0, max(-1.0, v)))

    @classmethod
    def from_frequencies(cls, f_x: float, f_y: float, f_z: float) -> EmpiricalModel:
        return cls(2 * f_x - 1, 2 * f_y - 1, 2 * f_z - 1)

    @classmethod
    def coerce(cls, m) -> EmpiricalModel:
        return m if isinstance(m, cls) else cls(*m)

    @property
    def r(self) -> tuple[float, float, float]:
        return (self.r_x, self.r_y, self.r_z)

    @property
    def f(self) -> tuple[float, float, float]:
        return tuple((1.0 + v) / 2.0 for v in self.r)

    @property
    def radius_squared(self) -> float:
        return self.r_x ** 2 + self.r_y ** 2 + self.r_z ** 2

    def to_json(self) -> str:
        return json.dumps({"r": list(self.r)})

    @classmethod
    def from_json(cls, text: str) -> EmpiricalModel:
        data = json.loads(text)
        r = data["r"]
        if len(r) != 3:
            raise ValueError(f'"r" must hold three numbers, got {r!r}')
        return cls(*r)


def base_weights(r) -> np.ndarray:
    """``(1/8)(1 + r_x chi_x + r_y chi_y + r_z chi_z)``; accepts shape (3,) or (N, 3)."""
    r = np.asarray(r, dtype=float)
    return (1.0 + r @ CHARACTERS[1:4]) / N_POINTS


def member_weights(base, t) -> np.ndarray:
    """``base + sum_i t_i direction_i``, row-wise for stacked inputs."""
    t = np.asarray(t, dtype=float)
    return base + t @ FREE_DIRECTIONS


@dataclass(frozen=True, eq=False)
class RepresentationFamily:
    """All signed distributions with the marginals of ``model``, as ``base + t @ directions``."""

    model: EmpiricalModel
    base: SignedDistribution
    directions: np.ndarray = FREE_DIRECTIONS

    @property
    def dimension(self) -> int:
        return len(self.directions)

    def member(self, t) -> SignedDistribution:
        t = np.asarray(t, dtype=float).reshape(-1)
        if t.shape != (self.dimension,):
            raise ValueError(f"expected {self.dimension} free parameters, got {t.size}")
        return SignedDistribution(member_weights(self.base.weights, t))


def build_family(m) -> RepresentationFamily:
    m = EmpiricalModel.coerce(m)
    return RepresentationFamily(m, SignedDistribution(base_weights(m.r)))


def member(fam: RepresentationFamily, t) -> SignedDistribution:
    return fam.member(t)


def product_witness(m) -> SignedDistribution:
    """Independent-outcome distribution ``q_abc = f_x^(a) f_y^(b) f_z^(c)``, entrywise non-negative."""
    m = EmpiricalModel.coerce(m)
    f = np.array(m.f)
    per_axis = np.where(OUTCOMES == 0, f, 1.0 - f)
    w = per_axis.prod(axis=1)
    # absorb the rounding residue so the sum invariant holds to 1e-12
    w[np.argmax(w)] += 1.0 - w.sum()
    return SignedDistribution(w)


def has_unsigned_member(fam: RepresentationFamily) -> tuple[bool, SignedDistribution]:
    """Always true for a single two-level system; returns the product witness."""
    witness = product_witness(fam.model)
    return witness.is_unsigned, witness
