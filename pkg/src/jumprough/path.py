"""Finitely sampled cadlag paths.

A path is given by strictly increasing sample times t_0 = 0 < ... < t_n = T,
right values X(t_i) and left limits X(t_i-). Between samples the path
follows the chosen interpolation from X(t_i) to X(t_{i+1}-):
piecewise-constant (cadlag step function) or linear. Jumps at t=0 are
disallowed (X(0-) = X(0) by convention).
"""

import csv
import io
import math

import numpy as np

from ._kernels import kernels
from .errors import NumericsError

PIECEWISE_CONSTANT = "piecewise_constant_cadlag"
PIECEWISE_LINEAR = "piecewise_linear"

# O(n^2) dynamic programs stop making sense beyond this
PVAR_MAX_POINTS = 20000


class CadlagPath:

    __slots__ = ("times", "values", "left_values", "interp")

    def __init__(self, times, values, left_values=None,
                 interp=PIECEWISE_CONSTANT):
        times = np.asarray(times, dtype=np.float64).ravel()
        values = np.asarray(values, dtype=np.float64)
        if values.ndim == 1:
            values = values[:, None]
        if times.size != values.shape[0]:
            raise ValueError("times and values length mismatch")
        if times.size < 1:
            raise ValueError("path needs at least one sample")
        if times[0] != 0.0:
            raise ValueError("paths start at time 0")
        if times.size > 1 and np.min(np.diff(times)) <= 0.0:
            raise ValueError("times must be strictly increasing")
        if interp not in (PIECEWISE_CONSTANT, PIECEWISE_LINEAR):
            raise ValueError(f"unknown interpolation {interp!r}")
        if left_values is None:
            if interp == PIECEWISE_CONSTANT:
                left_values = np.vstack([values[:1], values[:-1]])
            else:
                left_values = values.copy()
        else:
            left_values = np.asarray(left_values, dtype=np.float64)
            if left_values.ndim == 1:
                left_values = left_values[:, None]
            if left_values.shape != values.shape:
                raise ValueError("left_values shape mismatch")
        if not np.array_equal(left_values[0], values[0]):
            raise ValueError("jumps at t=0 are disallowed (X(0-) = X(0))")
        self.times = times
        self.values = values
        self.left_values = left_values
        self.interp = interp

    @property
    def dim(self):
        return self.values.shape[1]

    @property
    def T(self):
        return float(self.times[-1])

    def jumps(self):
        return self.values - self.left_values

    def _cell_index(self, t):
        if not self.times[0] <= t <= self.times[-1]:
            raise ValueError(f"time {t} outside [0, {self.times[-1]}]")
        return int(np.searchsorted(self.times, t, side="right") - 1)

    def eval(self, t):
        """Right-continuous evaluation X(t)."""
        i = self._cell_index(t)
        if t == self.times[i] or i == self.times.size - 1:
            return self.values[i].copy()
        if self.interp == PIECEWISE_CONSTANT:
            return self.values[i].copy()
        theta = (t - self.times[i]) / (self.times[i + 1] - self.times[i])
        return (1.0 - theta) * self.values[i] + theta * self.left_values[i + 1]

    def eval_left(self, t):
        """Left limit X(t-); equals X(0) at t=0."""
        i = self._cell_index(t)
        if t == self.times[i]:
            return self.left_values[i].copy()
        return self.eval(t)  # continuous strictly inside a cell

    def restrict_events(self, s, t):
        """Points visited on [s, t], in order, consecutive duplicates dropped.

        The list starts at X(s) and ends at X(t); left limits at jump times
        inside (s, t] appear as separate points. This event sequence carries
        the full variation of the interpolated path over [s, t].
        """
        if s > t:
            raise ValueError("need s <= t")
        pts = [self.eval(s)]
        lo = int(np.searchsorted(self.times, s, side="right"))
        hi = int(np.searchsorted(self.times, t, side="right"))
        for i in range(lo, hi):
            for q in (self.left_values[i], self.values[i]):
                if not np.array_equal(q, pts[-1]):
                    pts.append(q)
        q = self.eval(t)
        if not np.array_equal(q, pts[-1]):
            pts.append(q)
        return np.array(pts)

    def __repr__(self):
        return (f"CadlagPath(n={self.times.size}, dim={self.dim}, "
                f"T={self.T:g}, interp={self.interp})")


class Partition:

    __slots__ = ("points",)

    def __init__(self, points):
        points = np.asarray(points, dtype=np.float64).ravel()
        if points.size < 2 or np.min(np.diff(points)) <= 0.0:
            raise ValueError("partition points must be strictly increasing "
                             "with at least two entries")
        self.points = points

    def __len__(self):
        return self.points.size

    def __repr__(self):
        return f"Partition(n={len(self)}, [{self.points[0]:g}, {self.points[-1]:g}])"


def p_variation(X, p, s=None, t=None):
    """Exact p-variation norm of the sampled path over [s, t].

    Supremum over partitions whose points are events of the path (sample
    values and left limits); for both interpolation modes this attains the
    true supremum. Computed by O(n^2) dynamic programming.
    """
    if p < 1.0:
        raise ValueError("p-variation needs p >= 1")
    s = float(X.times[0]) if s is None else float(s)
    t = float(X.times[-1]) if t is None else float(t)
    events = X.restrict_events(s, t)
    if events.shape[0] > PVAR_MAX_POINTS:
        raise NumericsError(
            f"p-variation DP capped at {PVAR_MAX_POINTS} points, "
            f"got {events.shape[0]}")
    raw = kernels.pvar_dp(events, float(p))
    return raw ** (1.0 / p)


def pvar_control(X, p, s, t):
    """Superadditive control w(s,t) = ||X||_{p-var;[s,t]}^p."""
    if s > t:
        raise ValueError("need s <= t")
    return p_variation(X, p, s, t) ** p


def pvar_backbone(increment_norm, n, p):
    """p-th power variation of a two-parameter functional over n points.

    ``increment_norm(i, j)`` gives |Z_{t_i, t_j}| for i < j; returns
    sup over partitions of index points of Sum |Z|^p (the raw power sum).
    """
    if n < 2:
        return 0.0
    if n > PVAR_MAX_POINTS:
        raise NumericsError("p-variation DP capped")
    best = np.zeros(n)
    for j in range(1, n):
        cand = max(best[i] + increment_norm(i, j) ** p for i in range(j))
        best[j] = cand
    return float(best[n - 1])


def oscillation(Z, s, t):
    """Osc(Z, [s,t]) = sup |Z_v - Z_u| over s <= u <= v <= t, exact."""
    events = Z.restrict_events(s, t)
    n = events.shape[0]
    if n < 2:
        return 0.0
    worst = 0.0
    for i in range(n - 1):
        diff = events[i + 1:] - events[i]
        worst = max(worst, float(np.max(np.sqrt(np.sum(diff * diff, axis=1)))))
    return worst


def compatible_partition(X, Y, eps):
    """Greedy partition where each cell has Osc(X) <= eps or Osc(Y) <= eps.

    Works left to right over the union of sample times, always taking the
    longest admissible cell. Raises if no admissible cell exists at the
    sample resolution.
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    times = np.union1d(X.times, Y.times)
    pts = [times[0]]
    i = 0
    n = times.size
    while i < n - 1:
        j = n - 1
        while j > i:
            s, t = times[i], times[j]
            if oscillation(X, s, t) <= eps or oscillation(Y, s, t) <= eps:
                break
            j -= 1
        if j == i:
            raise NumericsError(
                f"no compatible partition at sample resolution: both "
                f"oscillations exceed {eps} on [{times[i]}, {times[i + 1]}]")
        pts.append(times[j])
        i = j
    return Partition(np.array(pts))


def dyadic_pvar_bound(X, p, gamma, n_max=None):
    """Sum_n n^gamma Sum_k |X(t_k^n) - X(t_{k-1}^n)|^p over dyadic grids.

    Finite for gamma > p - 1 > 0 when the path has the matching
    regularity; grids refine down to the sample resolution.
    """
    if not (gamma > p - 1.0 > 0.0):
        raise ValueError("need gamma > p - 1 > 0")
    T = X.T
    if n_max is None:
        gaps = np.diff(X.times)
        min_gap = float(np.min(gaps)) if gaps.size else T
        n_max = max(1, min(20, int(math.ceil(math.log2(max(T, min_gap) /
                                                       min_gap))) + 1))
    total = 0.0
    for n in range(1, n_max + 1):
        grid = np.linspace(0.0, T, 2 ** n + 1)
        vals = np.array([X.eval(t) for t in grid])
        incs = np.diff(vals, axis=0)
        total += n ** gamma * float(
            np.sum(np.sum(incs * incs, axis=1) ** (p / 2.0)))
    return total


def path_to_csv(X, fileobj):
    w = csv.writer(fileobj)
    d = X.dim
    header = ["t"] + [f"x{i+1}" for i in range(d)] + [f"lx{i+1}" for i in range(d)]
    w.writerow(header)
    for i in range(X.times.size):
        w.writerow([repr(float(X.times[i]))]
                   + [repr(float(v)) for v in X.values[i]]
                   + [repr(float(v)) for v in X.left_values[i]])


def path_from_csv(fileobj, interp=None):
    """Read `t,x1,...,xd[,lx1,...,lxd]`; left-value columns optional."""
    if isinstance(fileobj, str):
        with io.open(fileobj, "r", encoding="utf-8") as fh:
            return path_from_csv(fh, interp)
    reader = csv.reader(fileobj)
    header = next(reader)
    names = [h.strip() for h in header]
    if not names or names[0] != "t":
        raise ValueError("path CSV must start with a 't' column")
    xcols = [i for i, h in enumerate(names) if h.startswith("x")]
    lcols = [i for i, h in enumerate(names) if h.startswith("lx")]
    if not xcols:
        raise ValueError("path CSV needs x1..xd columns")
    times, vals, lvals = [], [], []
    for row in reader:
        if not row:
            continue
        times.append(float(row[0]))
        vals.append([float(row[i]) for i in xcols])
        if lcols:
            lvals.append([float(row[i]) for i in lcols])
    has_left = bool(lcols)
    if interp is None:
        interp = PIECEWISE_LINEAR if has_left else PIECEWISE_CONSTANT
    return CadlagPath(times, vals, lvals if has_left else None, interp)
