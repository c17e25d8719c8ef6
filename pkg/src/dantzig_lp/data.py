"""Synthetic instances, lambda grids and plain-text file formats.

Random streams
--------------
Every draw comes from a Philox generator seeded by
``SeedSequence(seed, spawn_key=(stream, index))``.  Columns of ``X`` use
``(STREAM_COLUMN, j)``, so a column (including its sparsity mask and any
re-draws) does not depend on how many other columns are generated or in
which order.  The shared equicorrelation factor, the support and the noise
each have their own stream.
"""
from dataclasses import dataclass, asdict
import os

import numpy as np
import scipy.io
import scipy.sparse as sp

from .errors import DegenerateColumn, EmptyGrid, InvalidAnchor
from .fused_prox import cumulate
from .sparse import as_csc

KINDS = ("ds", "bp", "fused_signal", "fused_regression")
STREAM_COLUMN, STREAM_SHARED, STREAM_SUPPORT, STREAM_NOISE, STREAM_KNOTS, STREAM_ABLATION = range(6)
REDRAW_BUDGET = 100


@dataclass
class InstanceSpec:
    kind: str = "ds"
    n: int = 100
    p: int = 1000
    rho: float = 0.0
    pi: float = 0.0
    snr: float = 10.0
    support: int = None       # defaults to n // 5 (ds) or floor(0.2 n) (bp)
    knot_count: int = None    # fused kinds; default 3 (signal) or 20 (regression), capped
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown instance kind {self.kind!r}")
        if self.n < 1 or (self.kind != "fused_signal" and self.p < 1):
            raise ValueError("n and p must be positive")
        if not 0.0 <= self.rho < 1.0:
            raise ValueError("rho must lie in [0, 1)")
        if not 0.0 <= self.pi < 1.0:
            raise ValueError("pi must lie in [0, 1)")
        if not self.snr > 0:
            raise ValueError("snr must be positive")
        if self.seed < 0 or self.seed >= 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def support_size(self):
        if self.support is not None:
            return int(self.support)
        return self.n // 5 if self.kind == "ds" else int(np.floor(0.2 * self.n))

    @property
    def knots(self):
        if self.knot_count is not None:
            return int(self.knot_count)
        if self.kind == "fused_signal":
            return min(3, max(self.n - 1, 0))
        return min(20, max(self.p - 1, 0))

    def as_dict(self):
        return asdict(self)


def stream(seed, *key):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


def _noise(seed, signal, snr):
    """Gaussian noise with ``Var(signal) / sigma^2 = snr``."""
    var = float(np.var(signal))
    sigma = np.sqrt(var / snr)
    return sigma * stream(seed, STREAM_NOISE).standard_normal(signal.size)


def gen_design(n, p, rho=0.0, pi=0.0, seed=0, normalize=True):
    """Equicorrelated Gaussian design, sparsified with probability ``pi``.

    Entry ``(i, j)`` is ``sqrt(rho) z0_i + sqrt(1 - rho) z_ij`` before
    sparsification; columns are scaled to unit norm when ``normalize``.
    All-zero columns are re-drawn from the same column stream.
    """
    z0 = stream(seed, STREAM_SHARED).standard_normal(n) if rho > 0 else np.zeros(n)
    a, b = np.sqrt(rho), np.sqrt(1.0 - rho)
    indptr = np.zeros(p + 1, dtype=np.int64)
    rows, vals = [], []
    for j in range(p):
        g = stream(seed, STREAM_COLUMN, j)
        for _ in range(REDRAW_BUDGET):
            col = a * z0 + b * g.standard_normal(n)
            if pi > 0:
                col[g.random(n) < pi] = 0.0
            nz = np.flatnonzero(col)
            if nz.size:
                break
        else:
            raise DegenerateColumn(f"column {j} stayed zero after {REDRAW_BUDGET} draws")
        v = col[nz]
        if normalize:
            v = v / np.linalg.norm(v)
        rows.append(nz)
        vals.append(v)
        indptr[j + 1] = indptr[j] + nz.size
    X = sp.csc_matrix((np.concatenate(vals) if vals else np.zeros(0),
                       np.concatenate(rows) if rows else np.zeros(0, dtype=np.int64),
                       indptr), shape=(n, p))
    return X


def _sparse_beta(seed, p, k):
    g = stream(seed, STREAM_SUPPORT)
    beta = np.zeros(p)
    S = np.sort(g.choice(p, size=min(k, p), replace=False))
    beta[S] = g.standard_normal(S.size)
    return beta


def gen_ds_instance(spec):
    """``(X, y, beta0, e0)`` for the l1 Dantzig selector (``kind='ds'``) or BP.

    For ``kind='bp'`` the response is noiseless and ``e0`` is zero.
    """
    X = gen_design(spec.n, spec.p, spec.rho, spec.pi, spec.seed)
    beta0 = _sparse_beta(spec.seed, spec.p, spec.support_size)
    signal = X @ beta0
    e0 = np.zeros(spec.n) if spec.kind == "bp" else _noise(spec.seed, signal, spec.snr)
    return X, signal + e0, beta0, e0


def piecewise_constant(seed, length, knots):
    """A signal of ``length`` with ``knots`` jumps at random positions, jumps N(0, 1)."""
    if knots >= max(length, 1):
        raise ValueError("knot_count must be smaller than the signal length")
    g = stream(seed, STREAM_KNOTS)
    alpha = np.zeros(length)
    pos = np.sort(g.choice(np.arange(1, length), size=knots, replace=False)) if knots else []
    alpha[pos] = g.standard_normal(len(pos))
    return cumulate(alpha)


def gen_fused_instance(spec):
    """``(X, y, beta0)``; ``X`` is ``None`` for the signal case (identity design)."""
    if spec.kind == "fused_signal":
        beta0 = piecewise_constant(spec.seed, spec.n, spec.knots)
        return None, beta0 + _noise(spec.seed, beta0, spec.snr), beta0
    if spec.kind != "fused_regression":
        raise ValueError(f"not a fused instance kind: {spec.kind!r}")
    X = gen_design(spec.n, spec.p, 0.0, 0.0, spec.seed, normalize=False)
    beta0 = piecewise_constant(spec.seed, spec.p, spec.knots)
    signal = X @ beta0
    return X, signal + _noise(spec.seed, signal, spec.snr), beta0


def generate_instance(spec):
    """Dispatch on ``spec.kind``; returns a dict of arrays."""
    if spec.kind in ("ds", "bp"):
        X, y, beta0, e0 = gen_ds_instance(spec)
        return {"X": X, "y": y, "beta0": beta0, "e0": e0}
    X, y, beta0 = gen_fused_instance(spec)
    out = {"y": y, "beta0": beta0}
    if X is not None:
        out["X"] = X
    return out


# -- lambda grids -------------------------------------------------------------

def log_grid(lam_min, lam_max, count):
    """``count`` log-spaced values from ``lam_max`` down to ``lam_min``."""
    if count < 1:
        raise EmptyGrid("grid needs at least one value")
    for v in (lam_min, lam_max):
        if not (np.isfinite(v) and v > 0):
            raise InvalidAnchor(f"grid anchors must be positive and finite, got {v}")
    if count == 1:
        return np.array([float(lam_max)])
    if not lam_min < lam_max:
        raise InvalidAnchor(f"lambda_min {lam_min} must be below lambda_max {lam_max}")
    grid = np.exp(np.linspace(np.log(lam_max), np.log(lam_min), count))
    grid[0], grid[-1] = lam_max, lam_min
    return grid


def lambda_grid(kind, anchors, count):
    """Descending grid for one of the standard experimental protocols.

    ``kind='path'``   anchors ``(||X^T e0||_inf, ||X^T y||_inf)``: from
                      ``lambda_max`` down to ``2 ||X^T e0||_inf``.
    ``kind='real'``   anchors ``(lambda_max,)``: down to ``1e-3 lambda_max``.
    ``kind='tau'``    anchors ``(tau, ||X^T e0||_inf, lambda_max)``: down to
                      ``tau ||X^T e0||_inf``.
    ``kind='range'``  anchors ``(lambda_min, lambda_max)`` used as given.
    """
    anchors = [float(a) for a in anchors]
    if any(not (np.isfinite(a) and a > 0) for a in anchors):
        raise InvalidAnchor(f"anchors must be positive and finite: {anchors}")
    if kind == "path":
        xte, lam_max = anchors
        return log_grid(2.0 * xte, lam_max, count)
    if kind == "real":
        (lam_max,) = anchors
        return log_grid(1e-3 * lam_max, lam_max, count)
    if kind == "tau":
        tau, xte, lam_max = anchors
        return log_grid(tau * xte, lam_max, count)
    if kind == "range":
        lam_min, lam_max = anchors
        return log_grid(lam_min, lam_max, count)
    raise ValueError(f"unknown grid kind {kind!r}")


# -- files --------------------------------------------------------------------

def write_matrix(path, X):
    """Matrix Market coordinate file with 17 significant digits."""
    scipy.io.mmwrite(path, sp.coo_matrix(as_csc(X)), precision=17)


def read_matrix(path):
    return as_csc(scipy.io.mmread(path))


def write_vector(path, v):
    """One value per line, 17 significant digits (round-trips exactly)."""
    np.savetxt(path, np.asarray(v, dtype=np.float64).ravel(), fmt="%.17g")


def read_vector(path):
    return np.loadtxt(path, dtype=np.float64, ndmin=1)


def save_instance(directory, data):
    """Write ``X.mtx`` and ``<name>.csv`` for every vector in ``data``."""
    os.makedirs(directory, exist_ok=True)
    paths = {}
    for name, value in data.items():
        if value is None:
            continue
        if sp.issparse(value) or np.ndim(value) == 2:
            paths[name] = os.path.join(directory, f"{name}.mtx")
            write_matrix(paths[name], value)
        else:
            paths[name] = os.path.join(directory, f"{name}.csv")
            write_vector(paths[name], value)
    return paths
