"""Step-N free nilpotent group G^(N)(R^d) and its Lie algebra.

Group elements are group-like truncated tensors with scalar part 1; Lie
elements are their logarithms. At N=2 the Lie algebra splits explicitly as
R^d + so(d), and the level-2 log part is checked for antisymmetry.
"""

import numpy as np

from . import tensor as ta
from .tensor import TruncatedTensor


class GroupElement:
    """Group-like element of T^(N)(R^d) with scalar part exactly 1."""

    __slots__ = ("value",)

    def __init__(self, value, check=True, tol=1e-8):
        if value.data[0] != 1.0:
            raise ValueError("group element must have scalar part 1")
        if check and not ta.is_group_like(value, tol):
            raise ValueError("tensor is not group-like at the given tolerance")
        self.value = value

    @classmethod
    def unchecked(cls, value):
        return cls(value, check=False)

    @property
    def dim(self):
        return self.value.dim

    @property
    def level(self):
        return self.value.level

    def __matmul__(self, other):
        return GroupElement.unchecked(ta.mul(self.value, other.value))

    def __repr__(self):
        return f"GroupElement(dim={self.dim}, level={self.level})"

    def to_json(self):
        obj = self.value.to_json()
        obj["grouplike"] = True
        return obj

    @classmethod
    def from_json(cls, obj, check=True):
        return cls(TruncatedTensor.from_json(obj), check=check)


class LieElement:
    """Element of the free nilpotent Lie algebra (zero scalar part).

    At level 2 the second-level part must be antisymmetric; for higher
    levels only the zero-scalar constraint is enforced and group-likeness
    of the exponential is the effective membership test.
    """

    __slots__ = ("value",)

    def __init__(self, value, tol=1e-12):
        if value.data[0] != 0.0:
            raise ValueError("Lie element must have zero scalar part")
        if value.level == 2:
            A = value.level_part(2)
            if np.max(np.abs(A + A.T)) > tol:
                raise ValueError("level-2 part of an N=2 Lie element "
                                 "must be antisymmetric")
        self.value = value

    @classmethod
    def from_vector_area(cls, x, A, level=2):
        """Build from the explicit N=2 split (x in R^d, A antisymmetric)."""
        x = np.asarray(x, dtype=np.float64).ravel()
        d = x.size
        t = TruncatedTensor(d, level)
        t.set_level(1, x)
        if A is not None:
            t.set_level(2, np.asarray(A, dtype=np.float64))
        return cls(t)

    @property
    def dim(self):
        return self.value.dim

    @property
    def level(self):
        return self.value.level

    def __repr__(self):
        return f"LieElement(dim={self.dim}, level={self.level})"


def unit(dim, level):
    return GroupElement.unchecked(ta.unit(dim, level))


def exp(lie):
    value = lie.value if isinstance(lie, LieElement) else lie
    return GroupElement.unchecked(ta.exp_trunc(value))


def log(g):
    value = g.value if isinstance(g, GroupElement) else g
    out = ta.log_trunc(value)
    if out.level == 2:
        # symmetrize away rounding so the N=2 constraint holds exactly
        A = out.level_part(2)
        out.set_level(2, (A - A.T) / 2.0)
    return LieElement(out)


def inverse(g):
    return GroupElement.unchecked(ta.exp_trunc(-log(g).value))


def increment(g, h):
    """The group increment g^{-1} (x) h."""
    return inverse(g) @ h


def cc_norm(g):
    """Homogeneous norm Sum_k |pi_k(log g)|^{1/k} (Euclidean per level).

    Equivalent to the Carnot-Caratheodory norm; at N=2 it reads
    |x| + |A|^{1/2}. Zero iff g is the unit; 1-homogeneous under dilation.
    """
    lg = ta.log_trunc(g.value if isinstance(g, GroupElement) else g)
    offs = lg.offsets
    total = 0.0
    for k in range(1, lg.level + 1):
        nk = float(np.linalg.norm(lg.data[offs[k]:offs[k + 1]]))
        if nk > 0.0:
            total += nk ** (1.0 / k)
    return total


def cc_dist(g, h):
    """Left-invariant distance ||g^{-1} (x) h|| in the homogeneous norm."""
    return cc_norm(increment(g, h))


def dilate(g, lam):
    """Carnot dilation: scale level-k coefficients by lam^k."""
    value = g.value if isinstance(g, GroupElement) else g
    out = value.copy()
    offs = out.offsets
    for k in range(1, out.level + 1):
        out.data[offs[k]:offs[k + 1]] *= float(lam) ** k
    return GroupElement.unchecked(out)


def log_linear_point(x, y, t):
    """Point at parameter t on the log-linear path from x to y.

    exp((1-t) log x + t log y); endpoints reproduce x and y. For x the
    unit this is the geodesic-like traversal exp(t log y).
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError("interpolation parameter must lie in [0, 1]")
    lx = ta.log_trunc(x.value)
    ly = ta.log_trunc(y.value)
    return GroupElement.unchecked(ta.exp_trunc((1.0 - t) * lx + t * ly))
