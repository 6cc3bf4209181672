"""Pure numpy implementations of the hot kernels.

All tensors live in the truncated tensor algebra over R^d up to level N and
are stored as flat float64 arrays of length ``1 + d + d^2 + ... + d^N``.
Level k occupies the slice ``offsets[k] : offsets[k] + d**k`` in row-major
(lexicographic word) order.

The compiled backend in ``_ckernels.pyx`` exposes the same callables; the
package selects one at import time.
"""

import numpy as np

BACKEND = "python"


def level_offsets(dim, level):
    """Start index of each tensor level in the flat layout.

    Returns an int array of length ``level + 2``; the last entry is the
    total flat size.
    """
    offs = np.empty(level + 2, dtype=np.int64)
    offs[0] = 0
    size = 1
    for k in range(level + 1):
        offs[k + 1] = offs[k] + size
        size *= dim
    return offs


def tensor_size(dim, level):
    return int(level_offsets(dim, level)[-1])


def tensor_mul(a, b, dim, level):
    """Truncated tensor product of flat tensors ``a`` and ``b``."""
    offs = level_offsets(dim, level)
    out = np.zeros(offs[-1])
    for k in range(level + 1):
        acc = np.zeros(dim ** k)
        for i in range(k + 1):
            j = k - i
            ai = a[offs[i]:offs[i + 1]]
            bj = b[offs[j]:offs[j + 1]]
            acc += np.outer(ai, bj).ravel()
        out[offs[k]:offs[k + 1]] = acc
    return out


def tensor_exp(a, dim, level):
    """exp of ``a`` (scalar part ignored, treated as 0), truncated.

    Horner form: e = 1 + a/1 (1 + a/2 (1 + ... )).
    """
    offs = level_offsets(dim, level)
    x = a.copy()
    x[0] = 0.0
    out = np.zeros(offs[-1])
    out[0] = 1.0
    for k in range(level, 0, -1):
        out = tensor_mul(x, out, dim, level) / k
        out[0] += 1.0
    return out


def tensor_log(g, dim, level):
    """log of ``g`` (scalar part must be 1), truncated.

    Horner form on x = g - 1: log(1+x) = x (1 - x (1/2 - x (1/3 - ...))).
    """
    offs = level_offsets(dim, level)
    x = g.copy()
    x[0] = 0.0
    out = np.zeros(offs[-1])
    out[0] = 1.0 / level
    for k in range(level - 1, 0, -1):
        out = -tensor_mul(x, out, dim, level)
        out[0] += 1.0 / k
    return tensor_mul(x, out, dim, level)


def sig_product(logs, dim, level):
    """Ordered product of exponentials of the rows of ``logs``.

    ``logs`` is an (n, M) array of log-increments (scalar slot ignored).
    Returns the flat group element ``exp(logs[0]) @ ... @ exp(logs[n-1])``.
    """
    offs = level_offsets(dim, level)
    acc = np.zeros(offs[-1])
    acc[0] = 1.0
    for i in range(logs.shape[0]):
        acc = tensor_mul(acc, tensor_exp(logs[i], dim, level), dim, level)
    return acc


def pvar_dp(values, p):
    """Sup over partitions of sum of p-th powers of increment norms.

    ``values`` is an (n, d) array of points visited in order; the returned
    value is the raw power sum (take the 1/p root for the p-variation).
    Dynamic program over end points, O(n^2) distance evaluations.
    """
    n = values.shape[0]
    if n < 2:
        return 0.0
    best = np.zeros(n)
    for j in range(1, n):
        diff = values[:j] - values[j]
        dist_p = np.sum(diff * diff, axis=1) ** (p / 2.0)
        best[j] = np.max(best[:j] + dist_p)
    return float(best[n - 1])
