"""Rényi entropy of signed and unsigned phase-space distributions, in bits."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import NonIntegerOrderOnSigned, OrderTooLarge, ShannonOnSigned
from .phase_space import N_POINTS, SignedDistribution, random_signed_weights

MAX_ORDER = 64


@dataclass(frozen=True)
class RenyiOrder:
    alpha: float

    def __post_init__(self):
        alpha = float(self.alpha)
        if not math.isfinite(alpha) or alpha <= 0:
            raise ValueError(f"Rényi order must be a positive real, got {self.alpha!r}")
        object.__setattr__(self, "alpha", alpha)

    @classmethod
    def even(cls, k: int) -> RenyiOrder:
        if int(k) != k or k < 1:
            raise ValueError(f"k must be a positive integer, got {k!r}")
        return cls(2 * int(k))

    @property
    def is_integer(self) -> bool:
        return self.alpha.is_integer()

    @property
    def is_even_integer(self) -> bool:
        return self.is_integer and int(self.alpha) % 2 == 0

    @property
    def k(self) -> int | None:
        return int(self.alpha) // 2 if self.is_even_integer else None

    def __float__(self):
        return self.alpha


@dataclass(frozen=True)
class EntropyValue:
    """Entropy in bits; ``defined`` is False when the value would be complex."""

    value: float
    defined: bool = True

    def __post_init__(self):
        if self.defined and not math.isfinite(self.value):
            raise ValueError("a defined entropy must be finite")

    def __float__(self):
        return self.value


def _order(alpha) -> RenyiOrder:
    return alpha if isinstance(alpha, RenyiOrder) else RenyiOrder(alpha)


def _as_array(q) -> np.ndarray:
    if isinstance(q, SignedDistribution):
        return q.weights
    return np.asarray(q, dtype=float)


def int_power(x, n: int):
    """Elementwise ``x**n`` for a non-negative integer ``n`` by repeated squaring.

    Never goes through exp/log, so negative bases keep their sign.
    """
    x = np.asarray(x, dtype=float)
    result = np.ones_like(x)
    base = x.copy()
    while n:
        if n & 1:
            result = result * base
        n >>= 1
        if n:
            base = base * base
    return result


def _power_terms(w: np.ndarray, order: RenyiOrder) -> np.ndarray:
    if order.alpha > MAX_ORDER:
        raise OrderTooLarge(f"order {order.alpha:g} exceeds the supported maximum {MAX_ORDER}")
    if order.is_integer:
        return int_power(w, int(order.alpha))
    if np.any(w < 0):
        raise NonIntegerOrderOnSigned(
            f"negative weight raised to the non-integer power {order.alpha:g}")
    return np.power(w, order.alpha)


def power_sum(q, alpha) -> float:
    """``sum_i q_i**alpha`` for one distribution."""
    terms = _power_terms(_as_array(q), _order(alpha))
    return math.fsum(terms.reshape(-1).tolist())


def power_sums(weights, alpha) -> np.ndarray:
    """Row-wise power sums for a stack of weight vectors (last axis = phase points)."""
    return _power_terms(np.asarray(weights, dtype=float), _order(alpha)).sum(axis=-1)


def renyi_entropy(q, alpha) -> EntropyValue:
    order = _order(alpha)
    w = _as_array(q)
    if order.alpha == 1.0:
        if np.any(w < 0):
            raise ShannonOnSigned("Shannon entropy is complex for a distribution with negative weights")
        nz = w[w > 0]
        return EntropyValue(float(-np.sum(nz * np.log2(nz))) + 0.0)
    s = power_sum(w, order)
    if s <= 0:
        return EntropyValue(math.nan, defined=False)
    return EntropyValue(-math.log2(s) / (order.alpha - 1.0) + 0.0)


@dataclass
class RealityVerdict:
    alpha: float
    trials: int
    always_real: bool
    counterexample: np.ndarray | None = None
    counterexample_power_sum: float | None = None
    min_power_sum: float = math.nan
    # 8**(1 - alpha) for even orders, from convexity of the even power
    lower_bound: float | None = None
    reason: str = field(default="")


def _negative_entry_witness(rng, trials, chunk):
    done = 0
    while done < trials:
        n = min(chunk, trials - done)
        w = random_signed_weights(rng, n)
        hit = np.flatnonzero(np.any(w < 0, axis=1))
        if hit.size:
            return w[hit[0]], done + n
        done += n
    return None, trials


def check_reality(alpha: float, trials: int = 100_000, seed: int = 0,
                  chunk: int = 10_000) -> RealityVerdict:
    """Search random signed distributions for one whose order-``alpha`` entropy is not real."""
    order = _order(alpha)
    rng = np.random.default_rng(seed)

    if not order.is_integer or order.alpha == 1.0:
        # any negative entry makes the entropy complex: q**alpha (or log q) is non-real
        witness, used = _negative_entry_witness(rng, trials, chunk)
        if witness is None:
            return RealityVerdict(order.alpha, used, True, reason="no negative entry drawn")
        return RealityVerdict(order.alpha, used, False, counterexample=witness,
                              reason="negative weight under a non-integer power or logarithm")

    lowest = math.inf
    done = 0
    while done < trials:
        n = min(chunk, trials - done)
        w = random_signed_weights(rng, n)
        s = power_sums(w, order)
        lowest = min(lowest, float(s.min()))
        bad = np.flatnonzero(s <= 0)
        if bad.size:
            i = bad[0]
            return RealityVerdict(order.alpha, int(done + i + 1), False, counterexample=w[i],
                                  counterexample_power_sum=power_sum(w[i], order),
                                  min_power_sum=lowest, reason="non-positive power sum")
        done += n

    bound = float(N_POINTS) ** (1.0 - order.alpha) if order.is_even_integer else None
    reason = ("even power sum is bounded below by 8**(1-alpha)" if order.is_even_integer
              else "no counterexample found")
    return RealityVerdict(order.alpha, trials, True, min_power_sum=lowest,
                          lower_bound=bound, reason=reason)
