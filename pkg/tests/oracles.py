"""Independent reference computations used to freeze and cross-check expected values.

Nothing here touches the Newton solver: the representation family is rebuilt
from the marginal equations directly and minimized by grid search plus
Nelder-Mead.
"""
import itertools
import math

import numpy as np
from scipy.optimize import minimize

# phase point index 4a + 2b + c; rows of the marginal system (sum, f_x, f_y, f_z)
_POINTS = list(itertools.product((0, 1), repeat=3))
_A = np.array([
    [1.0] * 8,
    [1.0 if a == 0 else 0.0 for a, b, c in _POINTS],
    [1.0 if b == 0 else 0.0 for a, b, c in _POINTS],
    [1.0 if c == 0 else 0.0 for a, b, c in _POINTS],
])


def _family(r):
    """Particular solution and null-space basis of the marginal equations, via SVD."""
    f = (1.0 + np.asarray(r, dtype=float)) / 2.0
    rhs = np.concatenate([[1.0], f])
    q0 = np.linalg.lstsq(_A, rhs, rcond=None)[0]
    _, _, vt = np.linalg.svd(_A)
    null = vt[4:]  # (4, 8), orthonormal
    return q0, null


def brute_force_max_entropy(r, k, step=0.25, span=3.0, starts=5):
    """Maximal H_2k by grid search over the null-space coordinates and Nelder-Mead polish."""
    q0, null = _family(r)
    p = 2 * k
    scale = np.abs(q0).max()

    def f(s):
        q = (q0 + s @ null) / scale
        return np.sum(q ** p, axis=-1)

    axis = np.arange(-span, span + step / 2, step)
    grid = np.stack(np.meshgrid(*[axis] * 4, indexing="ij"), axis=-1).reshape(-1, 4)
    vals = f(grid)
    best = grid[np.argsort(vals)[:starts]]
    results = []
    for s0 in best:
        res = minimize(f, s0, method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-18, "maxiter": 40000, "maxfev": 80000})
        results.append(res.fun)
    fmin = min(results)
    return -(math.log2(fmin) + p * math.log2(scale)) / (p - 1)


def finite_difference_gradient(func, t, h=1e-6):
    t = np.asarray(t, dtype=float)
    g = np.zeros_like(t)
    for i in range(len(t)):
        e = np.zeros_like(t)
        e[i] = h
        g[i] = (func(t + e) - func(t - e)) / (2 * h)
    return g


def signed_permutations():
    """The 48 maps (r_x, r_y, r_z) -> signed permutation."""
    out = []
    for perm in itertools.permutations(range(3)):
        for signs in itertools.product((1, -1), repeat=3):
            out.append((perm, signs))
    return out
