"""Truncated tensor algebra T^(N)(R^d).

Elements are dense: level k holds d^k coefficients in row-major word order
(first letter most significant). The flat layout and the hot loops live in
the kernel backend; this module provides the value type, the algebra
operations, shuffle combinatorics, and JSON serialization.
"""

from itertools import combinations, product

import numpy as np

from ._kernels import kernels


class TruncatedTensor:
    """Element of the tensor algebra over R^dim truncated at ``level``.

    ``data`` is the flat coefficient vector of length
    ``1 + dim + dim^2 + ... + dim^level``.
    """

    __slots__ = ("dim", "level", "data")

    def __init__(self, dim, level, data=None):
        if dim < 1 or level < 1:
            raise ValueError("dim and level must be positive")
        self.dim = int(dim)
        self.level = int(level)
        size = kernels.tensor_size(dim, level)
        if data is None:
            self.data = np.zeros(size)
        else:
            data = np.asarray(data, dtype=np.float64).ravel()
            if data.size != size:
                raise ValueError(
                    f"flat size {data.size} != expected {size} for "
                    f"dim={dim}, level={level}")
            self.data = data

    @property
    def offsets(self):
        return kernels.level_offsets(self.dim, self.level)

    def level_part(self, k):
        """Level-k coefficients as an array of shape (dim,)*k."""
        if k < 0 or k > self.level:
            raise ValueError(f"level {k} outside 0..{self.level}")
        offs = self.offsets
        part = self.data[offs[k]:offs[k + 1]]
        return part.reshape((self.dim,) * k) if k else part[0]

    def set_level(self, k, arr):
        offs = self.offsets
        arr = np.asarray(arr, dtype=np.float64).ravel()
        if arr.size != offs[k + 1] - offs[k]:
            raise ValueError("level part has wrong size")
        self.data[offs[k]:offs[k + 1]] = arr

    def coeff(self, word):
        """Coefficient of the given word (letters in 1..dim)."""
        k = len(word)
        if k > self.level:
            raise ValueError("word longer than truncation level")
        idx = 0
        for letter in word:
            if not 1 <= letter <= self.dim:
                raise ValueError(f"letter {letter} outside 1..{self.dim}")
            idx = idx * self.dim + (letter - 1)
        return float(self.data[self.offsets[k] + idx])

    def copy(self):
        return TruncatedTensor(self.dim, self.level, self.data.copy())

    def __add__(self, other):
        _check_compatible(self, other)
        return TruncatedTensor(self.dim, self.level, self.data + other.data)

    def __sub__(self, other):
        _check_compatible(self, other)
        return TruncatedTensor(self.dim, self.level, self.data - other.data)

    def __mul__(self, scalar):
        return TruncatedTensor(self.dim, self.level, self.data * float(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return TruncatedTensor(self.dim, self.level, -self.data)

    def __matmul__(self, other):
        return mul(self, other)

    def __repr__(self):
        return (f"TruncatedTensor(dim={self.dim}, level={self.level}, "
                f"scalar={self.data[0]:g})")

    def to_json(self):
        offs = self.offsets
        return {
            "dim": self.dim,
            "level": self.level,
            "coeffs": [self.data[offs[k]:offs[k + 1]].tolist()
                       for k in range(self.level + 1)],
        }

    @classmethod
    def from_json(cls, obj):
        dim, level = int(obj["dim"]), int(obj["level"])
        flat = np.concatenate([np.asarray(c, dtype=np.float64).ravel()
                               for c in obj["coeffs"]])
        return cls(dim, level, flat)


def _check_compatible(a, b):
    if a.dim != b.dim or a.level != b.level:
        raise ValueError(
            f"incompatible tensors: ({a.dim},{a.level}) vs ({b.dim},{b.level})")


def zero(dim, level):
    return TruncatedTensor(dim, level)


def unit(dim, level):
    t = TruncatedTensor(dim, level)
    t.data[0] = 1.0
    return t


def basis(dim, level, letter):
    """The level-1 basis vector e_letter (letters 1..dim)."""
    t = TruncatedTensor(dim, level)
    t.data[1 + (letter - 1)] = 1.0
    return t


def mul(a, b):
    """Truncated tensor product, dropping all levels above the truncation."""
    _check_compatible(a, b)
    return TruncatedTensor(a.dim, a.level,
                           kernels.tensor_mul(a.data, b.data, a.dim, a.level))


def exp_trunc(x):
    """Truncated exponential Sum x^{(x)k}/k!; requires zero scalar part."""
    if x.data[0] != 0.0:
        raise ValueError("exp_trunc requires zero scalar part")
    return TruncatedTensor(x.dim, x.level,
                           kernels.tensor_exp(x.data, x.dim, x.level))


def log_trunc(g, tol=1e-9):
    """Truncated logarithm; requires scalar part 1."""
    if abs(g.data[0] - 1.0) > tol:
        raise ValueError(f"log_trunc requires scalar part 1, got {g.data[0]}")
    return TruncatedTensor(g.dim, g.level,
                           kernels.tensor_log(g.data, g.dim, g.level))


def project(g, m):
    """Copy levels 0..m into a new tensor truncated at level m."""
    if m > g.level:
        raise ValueError(f"cannot project level {g.level} tensor to {m}")
    offs = g.offsets
    return TruncatedTensor(g.dim, m, g.data[:offs[m + 1]].copy())


def embed(g, n):
    """Copy levels 0..level into a new tensor truncated at level n >= level."""
    if n < g.level:
        raise ValueError("embed target below current level")
    out = TruncatedTensor(g.dim, n)
    out.data[:g.data.size] = g.data
    return out


def shuffles(v, w):
    """All interleavings of words v and w preserving internal order.

    Returned as a list (with multiplicity) of letter tuples; its length is
    C(|v|+|w|, |v|).
    """
    v, w = tuple(v), tuple(w)
    m, n = len(v), len(w)
    out = []
    for positions in combinations(range(m + n), m):
        word = [0] * (m + n)
        pos_set = set(positions)
        vi = 0
        for p in positions:
            word[p] = v[vi]
            vi += 1
        wi = 0
        for p in range(m + n):
            if p not in pos_set:
                word[p] = w[wi]
                wi += 1
        out.append(tuple(word))
    return out


def _shuffle_axis_orders(m, n):
    """Axis permutations realizing every (m,n)-shuffle on a rank-(m+n) array.

    For each choice of the m slots taken by the first word, the returned
    tuple P+Q transposes the merged-level array so that axes P (the first
    word's slots) come first.
    """
    orders = []
    for positions in combinations(range(m + n), m):
        pos_set = set(positions)
        rest = tuple(p for p in range(m + n) if p not in pos_set)
        orders.append(positions + rest)
    return orders


def group_like_residual(g):
    """Max shuffle-identity residual |g^v g^w - Sum_z g^z| over word pairs.

    Vectorized per level pair: the shuffle sum is a sum of axis
    transpositions of the merged-level coefficient array.
    """
    if abs(g.data[0] - 1.0) > 1e-9:
        return float("inf")
    d, N = g.dim, g.level
    worst = 0.0
    for m in range(1, N):
        A = g.level_part(m)
        for n in range(1, N - m + 1):
            B = g.level_part(n)
            lhs = np.multiply.outer(A, B)
            merged = g.level_part(m + n)
            rhs = np.zeros_like(lhs)
            for order in _shuffle_axis_orders(m, n):
                rhs += merged.transpose(order)
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def is_group_like(g, tol=1e-10):
    """Shuffle-identity test for all word pairs with |v|+|w| <= level."""
    return group_like_residual(g) <= tol


def random_tensor(dim, level, rng, scale=1.0):
    size = kernels.tensor_size(dim, level)
    return TruncatedTensor(dim, level, rng.normal(0.0, scale, size))


def all_words(dim, max_len):
    """Every word of length 1..max_len over letters 1..dim."""
    out = []
    for k in range(1, max_len + 1):
        out.extend(product(range(1, dim + 1), repeat=k))
    return out
