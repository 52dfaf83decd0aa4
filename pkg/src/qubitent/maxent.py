"""Maximum Rényi entropy of order 2k over the representation family of a model.

Maximizing ``H_2k`` is the same as minimizing the power sum ``sum q**(2k)``,
which is strictly convex on the affine family. The solver runs damped Newton in
the four free character coefficients, vectorized over many models at once.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .entropy import RenyiOrder
from .exceptions import NotConverged
from .phase_space import SignedDistribution
from .representation import FREE_DIRECTIONS, EmpiricalModel, base_weights

MAX_K = 32
MAX_ITER = 200
GRAD_TOL = 1e-10
STEP_TOL = 1e-12
ARMIJO = 1e-4
RIDGE = 1e-12
MAX_BACKTRACK = 60
CHUNK = 2048
_NOISE = 64 * np.finfo(float).eps

_D = np.ascontiguousarray(FREE_DIRECTIONS.T)  # (8, 4)
_DD = np.einsum("wi,wj->wij", _D, _D)  # (8, 4, 4) outer products per phase point


def _check_k(k) -> int:
    if int(k) != k or not 1 <= k <= MAX_K:
        raise ValueError(f"k must be an integer in [1, {MAX_K}], got {k!r}")
    return int(k)


def _members(base, t):
    # explicit broadcast-and-sum keeps each row's arithmetic independent of the batch size
    return base + (t[:, None, :] * _D[None, :, :]).sum(axis=2)


def objective(r, k: int, t):
    """Raw power sum ``sum q(t)**(2k)`` with its gradient and Hessian in ``t``.

    ``r`` and ``t`` may be single vectors or stacks of matching length.
    """
    k = _check_k(k)
    p = 2 * k
    r2 = np.atleast_2d(np.asarray(r, dtype=float))
    t2 = np.atleast_2d(np.asarray(t, dtype=float))
    q = _members(base_weights(r2), t2)
    value = (q ** p).sum(axis=1)
    grad = p * (q[:, :, None] ** (p - 1) * _D[None]).sum(axis=1)
    hess = p * (p - 1) * (q[:, :, None, None] ** (p - 2) * _DD[None]).sum(axis=1)
    if np.ndim(r) == 1 and np.ndim(t) == 1:
        return value[0], grad[0], hess[0]
    return value, grad, hess


@dataclass
class BatchSolution:
    r: np.ndarray  # (N, 3)
    k: int
    t: np.ndarray  # (N, 4)
    q: np.ndarray  # (N, 8)
    entropy: np.ndarray
    iterations: np.ndarray
    gradient_norm: np.ndarray
    converged: np.ndarray

    def __len__(self):
        return len(self.entropy)

    def raise_unconverged(self):
        bad = np.flatnonzero(~self.converged)
        if bad.size:
            i = bad[0]
            raise NotConverged(
                f"order-{2 * self.k} maximizer did not converge at r={self.r[i].tolist()} "
                f"({bad.size} of {len(self)} models; gradient norm {self.gradient_norm[i]:.3g})",
                r=tuple(self.r[i]), k=self.k)


def _solve_chunk(r: np.ndarray, k: int) -> BatchSolution:
    p = 2 * k
    n = len(r)
    base = base_weights(r)
    # per-row scale keeps q/scale of order one for every k
    scale = np.abs(base).max(axis=1)
    log2_scale = np.log2(scale)
    ubase = base / scale[:, None]
    uD = _D[None, :, :] / scale[:, None, None]

    t = np.zeros((n, 4))
    iterations = np.zeros(n, dtype=np.int64)
    converged = np.zeros(n, dtype=bool)
    active = np.arange(n)

    def scaled_value(rows, tt):
        u = ubase[rows] + (tt[:, None, :] * uD[rows]).sum(axis=2)
        return (u ** p).sum(axis=1)

    for it in range(MAX_ITER + 1):
        if active.size == 0:
            break
        tt = t[active]
        uDa = uD[active]
        u = ubase[active] + (tt[:, None, :] * uDa).sum(axis=2)
        f = (u ** p).sum(axis=1)
        g = p * (u[:, :, None] ** (p - 1) * uDa).sum(axis=1)
        h = p * (p - 1) * (u[:, :, None, None] ** (p - 2)
                           * (uDa[:, :, :, None] * uDa[:, :, None, :])).sum(axis=1)
        raw_g = np.linalg.norm(g, axis=1) * np.exp2(p * log2_scale[active])

        eig = np.linalg.eigvalsh(h)
        lam_max = np.maximum(eig[:, -1], np.finfo(float).tiny)
        weak = eig[:, 0] < RIDGE * lam_max
        if np.any(weak):
            h[weak] += (RIDGE * lam_max[weak])[:, None, None] * np.eye(4)
        d = -np.linalg.solve(h, g[:, :, None])[:, :, 0]
        step_norm = np.linalg.norm(d, axis=1)
        slope = (g * d).sum(axis=1)

        # flat: the remaining predicted decrease is below the rounding level of f,
        # so the power sum (and the entropy) cannot improve in double precision
        small = step_norm <= STEP_TOL
        flat = -slope <= _NOISE * f
        done = (raw_g <= GRAD_TOL) & (small | flat)
        polish = done & ~small
        t[active[polish]] = tt[polish] + d[polish]
        iterations[active[polish]] += 1
        converged[active[done]] = True
        if it == MAX_ITER:
            break

        keep = ~done
        rows, tt, f, d, slope = active[keep], tt[keep], f[keep], d[keep], slope[keep]
        step = np.ones(len(rows))
        # rows whose decrease Armijo cannot resolve are in the quadratic basin: full step
        pending = np.flatnonzero(-slope > _NOISE * f)
        for _ in range(MAX_BACKTRACK):
            if pending.size == 0:
                break
            trial = tt[pending] + step[pending, None] * d[pending]
            ok = scaled_value(rows[pending], trial) <= f[pending] + ARMIJO * step[pending] * slope[pending]
            pending = pending[~ok]
            step[pending] *= 0.5
        t[rows] = tt + step[:, None] * d
        iterations[rows] += 1
        active = rows

    q = base + (t[:, None, :] * _D[None, :, :]).sum(axis=2)
    u = ubase + (t[:, None, :] * uD).sum(axis=2)
    g = p * (u[:, :, None] ** (p - 1) * uD).sum(axis=1)
    gnorm = np.linalg.norm(g, axis=1) * np.exp2(p * log2_scale)
    converged &= gnorm <= GRAD_TOL
    log2_sum = np.log2((u ** p).sum(axis=1)) + p * log2_scale
    entropy = -log2_sum / (p - 1)
    return BatchSolution(r.copy(), k, t, q, entropy, iterations, gnorm, converged)


def _concat(parts: list[BatchSolution], k: int) -> BatchSolution:
    if len(parts) == 1:
        return parts[0]
    fields = ("r", "t", "q", "entropy", "iterations", "gradient_norm", "converged")
    return BatchSolution(k=k, **{name: np.concatenate([getattr(s, name) for s in parts])
                                 for name in fields})


def _chunk_job(args):
    r, k = args
    return _solve_chunk(r, k)


def resolve_jobs(jobs: int) -> int:
    return os.cpu_count() or 1 if jobs == 0 else max(1, int(jobs))


def solve_batch(r, k: int, jobs: int = 1) -> BatchSolution:
    """Maximize ``H_2k`` for every row of ``r`` (shape (N, 3)).

    Work is split into fixed-size chunks so the result is identical for any
    ``jobs``; ``jobs > 1`` farms chunks out to a process pool, ``jobs = 0``
    uses every CPU. Unconverged rows are flagged, not raised.
    """
    k = _check_k(k)
    r = np.atleast_2d(np.asarray(r, dtype=float))
    if r.shape[1] != 3 or len(r) == 0:
        raise ValueError(f"expected a non-empty (N, 3) array of models, got shape {r.shape}")
    chunks = [r[i:i + CHUNK] for i in range(0, len(r), CHUNK)]
    jobs = resolve_jobs(jobs)
    if jobs == 1 or len(chunks) == 1:
        parts = [_solve_chunk(c, k) for c in chunks]
    else:
        with ProcessPoolExecutor(max_workers=min(jobs, len(chunks))) as pool:
            parts = list(pool.map(_chunk_job, [(c, k) for c in chunks]))
    return _concat(parts, k)


def max_entropy_many(r, k: int, jobs: int = 1) -> BatchSolution:
    """Like :func:`solve_batch` but raises :class:`NotConverged` if any row failed."""
    sol = solve_batch(r, k, jobs)
    sol.raise_unconverged()
    return sol


@dataclass(frozen=True)
class MaxEntResult:
    model: EmpiricalModel
    order: RenyiOrder
    optimizer_q: SignedDistribution
    t: tuple[float, float, float, float]
    entropy: float
    iterations: int
    gradient_norm: float
    converged: bool

    @property
    def k(self) -> int:
        return self.order.k

    def to_dict(self) -> dict:
        return {
            "r": list(self.model.r),
            "k": self.k,
            "entropy": self.entropy,
            "q": self.optimizer_q.weights.tolist(),
            "iterations": self.iterations,
            "converged": self.converged,
            "gradient_norm": self.gradient_norm,
        }


def max_entropy(m, k: int) -> MaxEntResult:
    """Global maximizer of ``H_2k`` over all signed distributions representing ``m``."""
    m = EmpiricalModel.coerce(m)
    sol = solve_batch(np.array([m.r]), k)
    sol.raise_unconverged()
    return MaxEntResult(
        model=m,
        order=RenyiOrder.even(k),
        optimizer_q=SignedDistribution(sol.q[0]),
        t=tuple(sol.t[0].tolist()),
        entropy=float(sol.entropy[0]),
        iterations=int(sol.iterations[0]),
        gradient_norm=float(sol.gradient_norm[0]),
        converged=bool(sol.converged[0]),
    )


def max_entropy_order2_closed_form(m) -> float:
    m = EmpiricalModel.coerce(m)
    return 3.0 - math.log2(1.0 + m.radius_squared)
