"""Eight-point phase space of a two-level system and signed distributions on it.

A point ``w_abc`` records the outcomes ``a``, ``b``, ``c`` of the x-, y- and
z-measurements. Points are indexed ``4a + 2b + c`` everywhere.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

SUM_TOL = 1e-12
N_POINTS = 8


@dataclass(frozen=True)
class PhasePoint:
    a: int
    b: int
    c: int

    def __post_init__(self):
        for bit in (self.a, self.b, self.c):
            if bit not in (0, 1):
                raise ValueError(f"outcomes must be 0 or 1, got {(self.a, self.b, self.c)}")

    @property
    def index(self) -> int:
        return 4 * self.a + 2 * self.b + self.c

    @classmethod
    def from_index(cls, index: int) -> PhasePoint:
        if not 0 <= index < N_POINTS:
            raise ValueError(f"phase point index out of range: {index}")
        return cls((index >> 2) & 1, (index >> 1) & 1, index & 1)

    def __str__(self):
        return f"w{self.a}{self.b}{self.c}"


POINTS = tuple(PhasePoint.from_index(i) for i in range(N_POINTS))

# (8, 3) array of outcome bits, row i is point i
OUTCOMES = np.array([[p.a, p.b, p.c] for p in POINTS], dtype=np.int64)


class CharacterBasis:
    """Walsh characters on phase space, +1 where the relevant outcome is 0.

    Rows of ``table`` are the characters in the order given by ``labels``:
    constant, x, y, z, xy, xz, yz, xyz. Columns are phase points.
    """

    labels = ("1", "x", "y", "z", "xy", "xz", "yz", "xyz")

    def __init__(self):
        x, y, z = (1 - 2 * OUTCOMES).T.astype(float)
        table = np.array([np.ones(N_POINTS), x, y, z, x * y, x * z, y * z, x * y * z])
        table.setflags(write=False)
        self.table = table

    def __getitem__(self, label: str) -> np.ndarray:
        return self.table[self.labels.index(label)]

    def __len__(self):
        return len(self.labels)


BASIS = CharacterBasis()
CHARACTERS = BASIS.table


@dataclass(frozen=True, eq=False)
class SignedDistribution:
    """Real weights on the eight phase points summing to one; entries may be negative."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float).reshape(-1)
        if w.shape != (N_POINTS,):
            raise ValueError(f"a signed distribution needs {N_POINTS} weights, got {w.size}")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        total = float(np.sum(w))
        if abs(total - 1.0) > SUM_TOL:
            raise ValueError(f"weights must sum to 1 (got {total!r})")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls) -> SignedDistribution:
        return cls(np.full(N_POINTS, 1.0 / N_POINTS))

    @classmethod
    def point_mass(cls, index: int) -> SignedDistribution:
        w = np.zeros(N_POINTS)
        w[PhasePoint.from_index(index).index] = 1.0
        return cls(w)

    @property
    def is_unsigned(self) -> bool:
        return bool(np.all(self.weights >= 0))

    def __getitem__(self, index):
        return self.weights[index]

    def __iter__(self):
        return iter(self.weights.tolist())

    def __eq__(self, other):
        if not isinstance(other, SignedDistribution):
            return NotImplemented
        return bool(np.array_equal(self.weights, other.weights))

    def __hash__(self):
        return hash(self.weights.tobytes())

    def __repr__(self):
        return f"SignedDistribution({self.weights.tolist()})"

    def to_json(self) -> str:
        return json.dumps(self.weights.tolist())

    @classmethod
    def from_json(cls, text: str) -> SignedDistribution:
        return cls(json.loads(text))


def _weights(q) -> np.ndarray:
    if isinstance(q, SignedDistribution):
        return q.weights
    return np.asarray(q, dtype=float)


def character_transform(q) -> np.ndarray:
    """Coefficients ``c_S = sum_w chi_S(w) q(w)`` in the order of ``CharacterBasis.labels``.

    Accepts a single distribution or a stack of weight vectors with last axis 8.
    """
    return _weights(q) @ CHARACTERS.T


def inverse_character_transform(coefficients) -> np.ndarray:
    """Weights ``q(w) = (1/8) sum_S c_S chi_S(w)``."""
    return np.asarray(coefficients, dtype=float) @ CHARACTERS / N_POINTS


def marginals(q) -> tuple[float, float, float]:
    """Frequencies of outcome 0 along x, y and z."""
    w = _weights(q)
    fx = w[0] + w[1] + w[2] + w[3]
    fy = w[0] + w[1] + w[4] + w[5]
    fz = w[0] + w[2] + w[4] + w[6]
    return float(fx), float(fy), float(fz)


def random_signed_weights(rng: np.random.Generator, size: int, scale: float = 1.0) -> np.ndarray:
    """Draw ``size`` signed weight vectors summing to one.

    Eight standard normals are scaled by ``scale`` and shifted so each row sums
    to 1, which puts negative entries in most rows.
    """
    z = scale * rng.standard_normal((size, N_POINTS))
    return z - z.mean(axis=1, keepdims=True) + 1.0 / N_POINTS
