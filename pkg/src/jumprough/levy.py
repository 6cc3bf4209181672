"""Levy and enhanced (group-valued) Levy processes.

Simulation of finite-activity triplets, Marcus lifts, analytic expected
signatures of Levy-Khintchine type, seeded Monte-Carlo validation, and
regularity diagnostics. Small-jump compensation (the |y| < 1 cutoff) is
honored analytically in the exponent and via a drift adjustment in the
sampler, so simulated means match the triplet's characteristic exponent;
atoms with |y| exactly 1 count as large (uncompensated).
"""

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import nilpotent as nil
from . import tensor as ta
from ._kernels import kernels
from .errors import RegimeError
from .marcus import GroupPath, group_path_from_increment_logs, signature
from .path import CadlagPath, PIECEWISE_LINEAR
from .rough import lift_young_marcus
from .tensor import TruncatedTensor

# fixed Monte-Carlo chunk size so that thread count never changes the
# reduction order (bit-for-bit reproducibility)
MC_CHUNK = 1024


def area_pairs(d):
    """Area index pairs (j, k), j < k, in lexicographic order."""
    return [(j, k) for j in range(d) for k in range(j + 1, d)]


def area_vec_to_matrix(v, d):
    A = np.zeros((d, d))
    for idx, (j, k) in enumerate(area_pairs(d)):
        A[j, k] = v[idx]
        A[k, j] = -v[idx]
    return A


def area_matrix_to_vec(A, d):
    return np.array([A[j, k] for j, k in area_pairs(d)])


def _check_psd(a, name):
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be a square matrix")
    if np.max(np.abs(a - a.T)) > 1e-12:
        raise ValueError(f"{name} must be symmetric")
    if np.min(np.linalg.eigvalsh(a)) < -1e-12:
        raise ValueError(f"{name} must be positive semidefinite")
    return a


def _sqrt_psd(a):
    w, V = np.linalg.eigh(a)
    return V * np.sqrt(np.clip(w, 0.0, None))


class LevyTriplet:
    """(a, b, K) with a the diffusion matrix, b the drift, K a finite list
    of weighted jump atoms (rate, y)."""

    __slots__ = ("a", "b", "atoms")

    def __init__(self, a, b, atoms=()):
        b = np.asarray(b, dtype=np.float64).ravel()
        self.a = _check_psd(a, "diffusion matrix")
        if self.a.shape[0] != b.size:
            raise ValueError("drift and diffusion dimensions differ")
        self.b = b
        parsed = []
        for rate, y in atoms:
            y = np.asarray(y, dtype=np.float64).ravel()
            if rate <= 0.0:
                raise ValueError("atom rates must be positive")
            if y.size != b.size or not np.any(y != 0.0):
                raise ValueError("atom jumps must be nonzero d-vectors")
            parsed.append((float(rate), y))
        self.atoms = parsed

    @property
    def dim(self):
        return self.b.size

    def to_json(self):
        return {"a": self.a.tolist(), "b": self.b.tolist(),
                "atoms": [{"rate": r, "y": y.tolist()} for r, y in self.atoms]}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["a"], obj["b"],
                   [(at["rate"], at["y"]) for at in obj.get("atoms", [])])


class EnhancedLevyTriplet:
    """Triplet over the step-2 group: indices J = I + {jk : j < k}.

    ``a`` is (|J|, |J|) PSD, ``b`` a |J|-vector (drift then area drift in
    lexicographic pair order), atoms are (rate, y, A) with A antisymmetric.
    """

    __slots__ = ("dim", "a", "b", "atoms")

    def __init__(self, dim, a, b, atoms=()):
        self.dim = int(dim)
        nJ = dim + len(area_pairs(dim))
        b = np.asarray(b, dtype=np.float64).ravel()
        self.a = _check_psd(a, "enhanced diffusion matrix")
        if self.a.shape[0] != nJ or b.size != nJ:
            raise ValueError(f"enhanced triplet needs size {nJ} over dim {dim}")
        self.b = b
        parsed = []
        for atom in atoms:
            rate, y, A = atom
            y = np.asarray(y, dtype=np.float64).ravel()
            A = np.zeros((dim, dim)) if A is None else np.asarray(
                A, dtype=np.float64)
            if rate <= 0.0:
                raise ValueError("atom rates must be positive")
            if np.max(np.abs(A + A.T)) > 1e-12:
                raise ValueError("atom area parts must be antisymmetric")
            if not (np.any(y != 0.0) or np.any(A != 0.0)):
                raise ValueError("atoms must be nonzero")
            parsed.append((float(rate), y, A))
        self.atoms = parsed

    def atom_coords(self, y, A):
        return np.concatenate([y, area_matrix_to_vec(A, self.dim)])

    def to_json(self):
        d = self.dim
        return {
            "dim": d,
            "a": self.a.tolist(),
            "b": self.b[:d].tolist(),
            "area_b": self.b[d:].tolist(),
            "atoms": [{"rate": r, "y": y.tolist(), "A": A.tolist()}
                      for r, y, A in self.atoms],
        }

    @classmethod
    def from_json(cls, obj):
        d = int(obj["dim"])
        b = np.concatenate([np.asarray(obj["b"], dtype=np.float64).ravel(),
                            np.asarray(obj.get("area_b", [0.0] * len(
                                area_pairs(d))), dtype=np.float64).ravel()])
        atoms = [(at["rate"], at["y"], at.get("A"))
                 for at in obj.get("atoms", [])]
        return cls(d, obj["a"], b, atoms)


class SignatureEstimate:
    """Componentwise Monte-Carlo mean and standard error of a signature."""

    __slots__ = ("mean", "stderr", "nsamples", "seed")

    def __init__(self, mean, stderr, nsamples, seed):
        self.mean = mean
        self.stderr = stderr
        self.nsamples = int(nsamples)
        self.seed = int(seed)

    def to_json(self):
        return {"mean": self.mean.to_json(), "stderr": self.stderr.to_json(),
                "nsamples": self.nsamples, "seed": self.seed}

    def __repr__(self):
        return (f"SignatureEstimate(nsamples={self.nsamples}, "
                f"seed={self.seed})")


def _draw_jump_times(rng, rate, T):
    n = rng.poisson(rate * T)
    taus = np.sort(rng.uniform(0.0, T, n))
    return taus[taus > 0.0]


def sample_path(tr, T, grid_n, seed):
    """One cadlag sample path of the Levy process on [0, T].

    Piecewise-linear Brownian-plus-drift skeleton on a uniform grid with
    atom jumps inserted as genuine jumps at their exponential-clock times.
    The drift is adjusted by -sum_{|y|<1} rate*y so the triplet follows
    the compensated (classical) convention. Deterministic given the seed.
    """
    if grid_n < 1:
        raise ValueError("grid_n must be at least 1")
    d = tr.dim
    rng = np.random.default_rng(seed)
    events = []  # (time, jump vector)
    for rate, y in tr.atoms:
        for tau in _draw_jump_times(rng, rate, T):
            events.append((float(tau), y))
    events.sort(key=lambda e: e[0])
    b_eff = tr.b - sum((rate * y for rate, y in tr.atoms
                        if np.linalg.norm(y) < 1.0), np.zeros(d))
    grid = np.linspace(0.0, T, grid_n + 1)
    times = np.unique(np.concatenate([grid, [e[0] for e in events]])
                      if events else grid)
    ncells = times.size - 1
    sqa = _sqrt_psd(tr.a)
    dts = np.diff(times)
    noise = rng.standard_normal((ncells, d))
    cont = noise * np.sqrt(dts)[:, None] @ sqa.T + np.outer(dts, b_eff)
    jumps = np.zeros((times.size, d))
    for tau, y in events:
        i = int(np.searchsorted(times, tau))
        jumps[i] += y
    left = np.zeros((times.size, d))
    vals = np.zeros((times.size, d))
    for i in range(ncells):
        left[i + 1] = vals[i] + cont[i]
        vals[i + 1] = left[i + 1] + jumps[i + 1]
    return CadlagPath(times, vals, left, interp=PIECEWISE_LINEAR)


def marcus_lift_sampled(X):
    """Exact Marcus lift of a piecewise-linear-with-jumps sampled path."""
    return lift_young_marcus(X, p=1.0)


def _enhanced_logs(tr, T, grid_n, seed):
    """Event times and group-increment logs (level-2 flat rows).

    Two rows per cell: the continuous Brownian/drift increment and the
    jump at the cell's right end (possibly zero).
    """
    d = tr.dim
    nJ = tr.b.size
    rng = np.random.default_rng(seed)
    events = []
    for rate, y, A in tr.atoms:
        ell = tr.atom_coords(y, A)
        for tau in _draw_jump_times(rng, rate, T):
            events.append((float(tau), ell))
    events.sort(key=lambda e: e[0])
    b_eff = tr.b - sum((rate * tr.atom_coords(y, A)
                        for rate, y, A in tr.atoms
                        if np.linalg.norm(tr.atom_coords(y, A)) < 1.0),
                       np.zeros(nJ))
    grid = np.linspace(0.0, T, grid_n + 1)
    times = np.unique(np.concatenate([grid, [e[0] for e in events]])
                      if events else grid)
    ncells = times.size - 1
    dts = np.diff(times)
    sqa = _sqrt_psd(tr.a)
    noise = rng.standard_normal((ncells, nJ))
    cont = noise * np.sqrt(dts)[:, None] @ sqa.T + np.outer(dts, b_eff)
    jump_rows = np.zeros((times.size, nJ))
    for tau, ell in events:
        i = int(np.searchsorted(times, tau))
        jump_rows[i] += ell
    size2 = kernels.tensor_size(d, 2)
    offs = kernels.level_offsets(d, 2)
    logs = np.zeros((2 * ncells, size2))

    def fill(row, coords):
        logs[row, 1:1 + d] = coords[:d]
        logs[row, offs[2]:offs[3]] = area_vec_to_matrix(coords[d:], d).ravel()

    for i in range(ncells):
        fill(2 * i, cont[i])
        fill(2 * i + 1, jump_rows[i + 1])
    return times, logs


def sample_enhanced(tr, T, grid_n, seed):
    """One level-2 group-valued sample path of the enhanced Levy process.

    The running point is the ordered product of segment and jump
    exponentials; level-1 Brownian segments generate the piecewise-linear
    area automatically, and area coordinates enter in the log.
    """
    times, logs = _enhanced_logs(tr, T, grid_n, seed)
    gp = group_path_from_increment_logs(
        np.arange(logs.shape[0] + 1, dtype=np.float64), logs, tr.dim, 2)
    return GroupPath(times, gp.points[::2])


def lk_exponent(tr, N):
    """Levy-Khintchine exponent C in the truncated tensor algebra.

    Level 1: b plus the uncompensated large-jump mean; level 2: a/2 plus
    the atoms' second moments; level k: sum rate * y^(x)k / k!.
    """
    d = tr.dim
    C = TruncatedTensor(d, N)
    lvl1 = tr.b.copy()
    for rate, y in tr.atoms:
        if np.linalg.norm(y) >= 1.0:
            lvl1 += rate * y
    C.set_level(1, lvl1)
    if N >= 2:
        C.set_level(2, tr.a / 2.0)
    offs = C.offsets
    for rate, y in tr.atoms:
        pow_y = y.copy()
        fact = 1.0
        for k in range(2, N + 1):
            pow_y = np.outer(pow_y, y).ravel()
            fact *= k
            C.data[offs[k]:offs[k + 1]] += rate * pow_y / fact
    return C


def expected_signature_levy(tr, N, T):
    """E[signature up to level N at time T] = exp(T C)."""
    return ta.exp_trunc(float(T) * lk_exponent(tr, N))


def sub_ellipticity_check(tr):
    """True iff the diffusion has no area rows/columns (exact zero test)."""
    d = tr.dim
    return bool(np.all(tr.a[d:, :] == 0.0) and np.all(tr.a[:, d:] == 0.0))


def _atom_norm(tr, y, A):
    return float(np.linalg.norm(tr.atom_coords(y, A)))


def enhanced_exponent(tr, N):
    """Exponent of the enhanced expected-signature formula.

    1/2 sum a^{ij} e_i e_j + sum b^i e_i + sum_{j<k} b^{jk} [e_j, e_k]
    plus, per atom, rate * (exp(log_2 g) - g) for small atoms and
    rate * (exp(log_2 g) - 1) for large ones, where g is the step-2
    exponential of the atom's Lie coordinates. Requires sub-ellipticity.
    """
    if not sub_ellipticity_check(tr):
        raise RegimeError("enhanced expected signature needs the "
                          "sub-ellipticity condition (no area diffusion)")
    d = tr.dim
    if N < 2:
        raise ValueError("enhanced exponent needs level N >= 2")
    C = TruncatedTensor(d, N)
    C.set_level(1, tr.b[:d])
    a_xx = tr.a[:d, :d]
    B = area_vec_to_matrix(tr.b[d:], d)
    C.set_level(2, a_xx / 2.0 + B)
    for rate, y, A in tr.atoms:
        ell = TruncatedTensor(d, N)
        ell.set_level(1, y)
        ell.set_level(2, A)
        gN = ta.exp_trunc(ell)
        if _atom_norm(tr, y, A) < 1.0:
            g2 = ta.embed(ta.exp_trunc(ta.project(ell, 2)), N)
            C = C + rate * (gN - g2)
        else:
            C = C + rate * (gN - ta.unit(d, N))
    return C


def expected_signature_enhanced(tr, N, T):
    """E[signature up to level N at time T] for an enhanced triplet."""
    return ta.exp_trunc(float(T) * enhanced_exponent(tr, N))


def _sample_signature_flat(tr, N, T, grid_n, sample_seed):
    if isinstance(tr, EnhancedLevyTriplet):
        d = tr.dim
        _, logs2 = _enhanced_logs(tr, T, grid_n, sample_seed)
        logs = np.zeros((logs2.shape[0], kernels.tensor_size(d, N)))
        logs[:, :logs2.shape[1]] = logs2
        return kernels.sig_product(logs, d, N)
    X = sample_path(tr, T, grid_n, sample_seed)
    return signature(X, N).value.data


def mc_expected_signature(tr, N, T, grid_n, nsamples, seed, threads=1):
    """Monte-Carlo estimate of the expected signature.

    Per-sample substreams are seeded seed + sample index; samples are
    reduced in fixed chunks combined in index order, so results are
    bit-identical for any thread count.
    """
    if nsamples < 2:
        raise ValueError("need at least 2 samples for a standard error")
    d = tr.dim
    size = kernels.tensor_size(d, N)

    def chunk_sums(bounds):
        lo, hi = bounds
        s = np.zeros(size)
        sq = np.zeros(size)
        for i in range(lo, hi):
            x = _sample_signature_flat(tr, N, T, grid_n, seed + i)
            s += x
            sq += x * x
        return s, sq

    bounds = [(lo, min(lo + MC_CHUNK, nsamples))
              for lo in range(0, nsamples, MC_CHUNK)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(chunk_sums, bounds))
    else:
        results = [chunk_sums(b) for b in bounds]
    total = np.zeros(size)
    total_sq = np.zeros(size)
    for s, sq in results:
        total += s
        total_sq += sq
    mean = total / nsamples
    var = np.clip((total_sq - nsamples * mean * mean) / (nsamples - 1),
                  0.0, None)
    stderr = np.sqrt(var / nsamples)
    return SignatureEstimate(TruncatedTensor(d, N, mean),
                             TruncatedTensor(d, N, stderr), nsamples, seed)


def area_moment_diagnostic(tr, T, grid_n, nsamples, seed, scales=None):
    """Table of (h, mean |Area_{s,s+h}|^2 / h^2) over dyadic window sizes.

    Bounded ratios across h are the expected behavior for compactly
    supported jump measures.
    """
    if scales is None:
        scales = [T / 2.0 ** k for k in range(2, 6)]
    sums = {h: 0.0 for h in scales}
    counts = {h: 0 for h in scales}
    for i in range(nsamples):
        X = sample_path(tr, T, grid_n, seed + i)
        lift = marcus_lift_sampled(X)
        times = X.times
        for h in scales:
            nwin = int(math.floor(T / h + 1e-9))
            for k in range(nwin):
                ia = int(np.searchsorted(times, k * h))
                ib = int(np.searchsorted(times, (k + 1) * h))
                xx = lift.xx(ia, ib)
                area = (xx - xx.T) / 2.0
                sums[h] += float(np.sum(area * area))
                counts[h] += 1
    return [(h, sums[h] / counts[h] / h ** 2) for h in scales]


def manstavicius_diagnostic(group_paths, h_grid, a_grid):
    """Empirical tail table and fitted regularity exponents.

    alpha_hat(h, a) is the fraction of length-h windows whose group
    increment (homogeneous distance) is at least a. Exponents come from a
    log-log least-squares fit alpha ~ h^beta / a^gamma over nondegenerate
    cells; the reported ratio gamma/beta estimates the variation index.
    """
    h_grid = np.asarray(h_grid, dtype=np.float64)
    a_grid = np.asarray(a_grid, dtype=np.float64)
    if h_grid.size < 2 or a_grid.size < 2:
        raise ValueError("need at least two window sizes and two thresholds")
    T = float(group_paths[0].times[-1])
    counts = np.zeros((h_grid.size, a_grid.size))
    totals = np.zeros(h_grid.size)
    for gp in group_paths:
        times = gp.times
        for hi, h in enumerate(h_grid):
            nwin = int(math.floor(T / h + 1e-9))
            for k in range(nwin):
                ia = int(np.searchsorted(times, k * h))
                ib = int(np.searchsorted(times, (k + 1) * h))
                dist = nil.cc_dist(gp.points[ia], gp.points[ib])
                counts[hi] += dist >= a_grid
                totals[hi] += 1
    alpha = counts / totals[:, None]
    stderr = np.sqrt(alpha * (1.0 - alpha) / totals[:, None])
    rows = []
    for hi, h in enumerate(h_grid):
        for ai, a in enumerate(a_grid):
            if 0.0 < alpha[hi, ai] < 1.0:
                rows.append((math.log(h), math.log(a),
                             math.log(alpha[hi, ai])))
    if len(rows) < 3:
        raise ValueError("tail table too degenerate to fit exponents")
    M = np.array([[1.0, lh, la] for lh, la, _ in rows])
    rhs = np.array([lal for _, _, lal in rows])
    coef, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    beta = float(coef[1])
    gamma = float(-coef[2])
    return {
        "h_grid": h_grid,
        "a_grid": a_grid,
        "alpha": alpha,
        "stderr": stderr,
        "beta": beta,
        "gamma": gamma,
        "ratio": gamma / beta if beta != 0.0 else float("inf"),
    }
