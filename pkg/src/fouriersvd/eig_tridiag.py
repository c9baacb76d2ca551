"""Symmetric tridiagonal eigensolvers.

The main engine is Sturm-sequence bisection followed by inverse iteration,
which computes any subset of eigenpairs at linear cost per pair.  An
implicit-shift QL iteration (``eig_full``) serves as an independent
full-spectrum solver and cross-check.

Eigenvalues are reported in descending order and selections count from
the largest eigenvalue, 1-based.  Eigenvectors are normalized and signed
so that their first entry of largest magnitude is positive.

Starting vectors for inverse iteration come from a 64-bit linear
congruential generator, ``s <- 6364136223846793005 * s + 1442695040888963407
(mod 2**64)``, seeded per eigenvalue from its ascending index and the
restart attempt; the top 53 bits give a uniform number in ``[0, 1)`` mapped
to ``[-1, 1)``.  Results therefore do not depend on which other
eigenvalues are requested in the same call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import RealSymTridiagonal
from .errors import InvalidArgumentError, NumericalFailureError

__all__ = [
    "EigenSelection",
    "EigenPairs",
    "sturm_count",
    "bisect_eigenvalues",
    "inverse_iteration",
    "eig_full",
    "eig_selected",
]

_EPS = float(np.finfo(float).eps)
_TINY = float(np.finfo(float).tiny)

_LCG_A = np.uint64(6364136223846793005)
_LCG_C = np.uint64(1442695040888963407)
_SEED = 0x5EED_2F1D_0B57_A11C

MAX_INVERSE_ITERATIONS = 5
MAX_RESTARTS = 3
CLUSTER_FACTOR = 1e3
NEAR_FACTOR = 1e-5


@dataclass(frozen=True)
class EigenSelection:
    """Which eigenpairs to compute: all, the two extremes, or a window.

    Window bounds are 1-based positions in descending order.
    """

    kind: str = "all"
    lo: int = 1
    hi: int = 1

    def __post_init__(self):
        if self.kind not in ("all", "extremes", "window"):
            raise InvalidArgumentError(f"unknown selection kind {self.kind!r}")
        if self.kind == "window" and not 1 <= self.lo <= self.hi:
            raise InvalidArgumentError(f"need 1 <= lo <= hi, got ({self.lo}, {self.hi})")

    @classmethod
    def all(cls):
        return cls("all")

    @classmethod
    def extremes(cls):
        return cls("extremes")

    @classmethod
    def window(cls, lo, hi):
        return cls("window", int(lo), int(hi))

    def positions(self, n):
        """Descending 1-based positions selected in a matrix of order ``n``."""
        if self.kind == "all":
            return np.arange(1, n + 1)
        if self.kind == "extremes":
            return np.array([1, n]) if n > 1 else np.array([1])
        if self.hi > n:
            raise InvalidArgumentError(f"window ({self.lo}, {self.hi}) exceeds order {n}")
        return np.arange(self.lo, self.hi + 1)


@dataclass(frozen=True)
class EigenPairs:
    """Eigenvalues in descending order, with optional unit eigenvectors.

    ``positions`` holds the 1-based descending positions of the returned
    values within the full spectrum; ``vectors[:, k]`` belongs to
    ``values[k]``.
    """

    values: np.ndarray
    vectors: np.ndarray | None
    positions: np.ndarray


def _pivmin(T):
    e2max = float(np.max(T.offdiag**2)) if T.n > 1 else 0.0
    return _TINY * max(1.0, e2max)


def _sturm_scalar(d, e2, x, pivmin):
    # same operations as the array version, without per-step numpy overhead
    count = 0
    t = d[0] - x
    if abs(t) <= pivmin:
        t = -pivmin
    count += t < 0
    for di, ei in zip(d[1:], e2):
        t = (di - x) - ei / t
        if abs(t) <= pivmin:
            t = -pivmin
        count += t < 0
    return count


def _sturm(d, e2, x, pivmin):
    if x.size <= 4:
        dl, el = d.tolist(), e2.tolist()
        return np.array([_sturm_scalar(dl, el, xi, pivmin) for xi in x.tolist()], dtype=np.int64)
    count = np.zeros(x.shape, dtype=np.int64)
    t = d[0] - x
    t = np.where(np.abs(t) <= pivmin, -pivmin, t)
    count += t < 0
    for i in range(1, d.size):
        t = (d[i] - x) - e2[i - 1] / t
        t = np.where(np.abs(t) <= pivmin, -pivmin, t)
        count += t < 0
    return count


def sturm_count(T: RealSymTridiagonal, x):
    """Number of eigenvalues of ``T`` strictly less than ``x``.

    ``x`` may be a scalar or an array of shifts.  Pivots that vanish are
    replaced by a tiny negative number, as in LAPACK's ``dstebz``.
    """
    xa = np.asarray(x, dtype=float)
    if np.any(np.isnan(xa)):
        raise InvalidArgumentError("Sturm count requested at NaN")
    counts = _sturm(T.diag, T.offdiag**2, np.atleast_1d(xa), _pivmin(T))
    return int(counts[0]) if xa.ndim == 0 else counts.reshape(xa.shape)


def _gershgorin(T):
    r = np.zeros(T.n)
    if T.n > 1:
        a = np.abs(T.offdiag)
        r[:-1] += a
        r[1:] += a
    lo = float(np.min(T.diag - r))
    hi = float(np.max(T.diag + r))
    return lo, hi


def bisect_eigenvalues(T: RealSymTridiagonal, ascending_index, tol=None):
    """Eigenvalues at the given 0-based ascending indices by bisection.

    Each interval is halved until it is no wider than ``tol``, which
    defaults to ``4 * eps * ||T||_1``.
    """
    idx = np.asarray(ascending_index, dtype=np.int64)
    norm = T.norm1()
    pivmin = _pivmin(T)
    if tol is None:
        tol = 4.0 * _EPS * norm
    tol = max(tol, 2.0 * pivmin)
    gl, gu = _gershgorin(T)
    pad = 2.0 * (T.n + 1) * _EPS * max(norm, abs(gl), abs(gu)) + 4.0 * pivmin
    lo = np.full(idx.shape, gl - pad)
    hi = np.full(idx.shape, gu + pad)
    e2 = T.offdiag**2
    for _ in range(256):
        active = np.nonzero(hi - lo > tol)[0]
        if active.size == 0:
            break
        mid = 0.5 * (lo[active] + hi[active])
        left = _sturm(T.diag, e2, mid, pivmin) > idx[active]
        hi[active] = np.where(left, mid, hi[active])
        lo[active] = np.where(left, lo[active], mid)
    return 0.5 * (lo + hi)


def _start_vectors(n, ascending_index, attempt):
    state = (np.asarray(ascending_index, dtype=np.uint64) * np.uint64(0x9E3779B97F4A7C15)) ^ np.uint64(
        _SEED + 7919 * attempt
    )
    out = np.empty((n, state.size))
    with np.errstate(over="ignore"):
        for i in range(n):
            state = state * _LCG_A + _LCG_C
            out[i] = (state >> np.uint64(11)).astype(float) * 2.0**-53
    return 2.0 * out - 1.0


def _factor(d, e, shifts, pert):
    """Batched LU with partial pivoting of ``T - shift I`` (dlagtf style)."""
    n, m = d.size, shifts.size
    u1 = np.empty((n, m))
    u2 = np.zeros((n, m))
    u3 = np.zeros((n, m))
    mult = np.zeros((n, m))
    swap = np.zeros((n, m), dtype=bool)
    a = d[0] - shifts
    b = np.full(m, e[0]) if n > 1 else None
    for i in range(n - 1):
        low = e[i]
        dd = d[i + 1] - shifts
        uu = e[i + 1] if i + 1 < n - 1 else 0.0
        sw = np.abs(a) < abs(low)
        piv = np.where(sw, low, a)
        piv = np.where(np.abs(piv) < pert, np.where(piv < 0, -pert, pert), piv)
        mu = np.where(sw, a, low) / piv
        u1[i] = piv
        u2[i] = np.where(sw, dd, b)
        u3[i] = np.where(sw, uu, 0.0)
        mult[i] = mu
        swap[i] = sw
        a, b = np.where(sw, b - mu * dd, dd - mu * b), np.where(sw, -mu * uu, uu)
    u1[n - 1] = np.where(np.abs(a) < pert, np.where(a < 0, -pert, pert), a)
    return u1, u2, u3, mult, swap


def _solve(factors, rhs):
    u1, u2, u3, mult, swap = factors
    n = u1.shape[0]
    y = rhs.copy()
    for i in range(n - 1):
        yi, yn = y[i].copy(), y[i + 1].copy()
        mu, sw = mult[i], swap[i]
        y[i] = np.where(sw, yn, yi)
        y[i + 1] = np.where(sw, yi - mu * yn, yn - mu * yi)
    x = np.empty_like(y)
    x[n - 1] = y[n - 1] / u1[n - 1]
    if n > 1:
        x[n - 2] = (y[n - 2] - u2[n - 2] * x[n - 1]) / u1[n - 2]
    for i in range(n - 3, -1, -1):
        x[i] = (y[i] - u2[i] * x[i + 1] - u3[i] * x[i + 2]) / u1[i]
    return x


def _colnorms(X):
    # per-column norms that do not depend on how many columns are present
    rows = np.ascontiguousarray(X.T)
    return np.sqrt(np.sum(rows * rows, axis=1))


def _residuals(T, X, lam):
    return _colnorms(T.matvec(X) - X * lam)


def _fix_signs(X):
    if X.size == 0:
        return X
    A = np.abs(X)
    # first entry of largest magnitude, ties up to rounding included
    k = np.argmax(A >= A.max(axis=0) * (1 - 64 * _EPS), axis=0)
    s = np.sign(X[k, np.arange(X.shape[1])])
    s[s == 0] = 1.0
    return X * s


def inverse_iteration(T: RealSymTridiagonal, values, ascending_index):
    """Unit eigenvectors for eigenvalues already isolated by bisection.

    ``values`` must be sorted ascending.  Eigenvalues closer than
    ``1e3 * eps * ||T||`` are treated as a cluster whose vectors are
    orthogonalized against each other on every iteration; runs of
    eigenvalues closer than ``1e-5 * ||T||`` are orthogonalized once more
    at the end.
    """
    lam = np.asarray(values, dtype=float)
    idx = np.asarray(ascending_index, dtype=np.int64)
    n, m = T.n, lam.size
    norm = T.norm1()
    scale = norm if norm > 0 else 1.0
    pert = _EPS * scale
    restol = 10.0 * n * _EPS * scale
    d, e = T.diag, T.offdiag

    X = np.empty((n, m))
    cluster_tol = CLUSTER_FACTOR * _EPS * scale
    gaps = np.diff(lam)
    in_cluster = np.zeros(m, dtype=bool)
    if m > 1:
        close = gaps <= cluster_tol
        in_cluster[:-1] |= close
        in_cluster[1:] |= close

    solo = np.nonzero(~in_cluster)[0]
    if solo.size:
        X[:, solo] = _iterate(d, e, T, lam[solo], idx[solo], pert, restol)

    if in_cluster.any():
        start = None
        for k in range(m + 1):
            member = k < m and in_cluster[k]
            linked = member and start is not None and gaps[k - 1] <= cluster_tol
            if member and start is None:
                start = k
            elif start is not None and not linked:
                stop = k
                X[:, start:stop] = _iterate_cluster(
                    d, e, T, lam[start:stop], idx[start:stop], pert, restol, scale
                )
                start = k if member else None
    _orthogonalize_near(X, lam, NEAR_FACTOR * scale)
    return _fix_signs(X)


def _orthogonalize_near(X, lam, tol):
    # Vectors of nearby (but not clustered) eigenvalues overlap by about
    # eps ||T|| / gap; Gram-Schmidt in ascending order fixes that at a cost
    # of overlap * gap in the residual.
    m = lam.size
    start = 0
    for k in range(1, m + 1):
        if k < m and lam[k] - lam[k - 1] <= tol:
            continue
        if k - start > 1:
            Q, R = np.linalg.qr(X[:, start:k])
            X[:, start:k] = Q * np.where(np.diag(R) < 0, -1.0, 1.0)
        start = k


def _iterate(d, e, T, lam, idx, pert, restol):
    n, m = d.size, lam.size
    X = np.empty((n, m))
    pending = np.arange(m)
    factors = _factor(d, e, lam, pert)
    for attempt in range(MAX_RESTARTS + 1):
        if pending.size == 0:
            break
        sub = tuple(f[:, pending] for f in factors)
        x = _start_vectors(n, idx[pending], attempt)
        todo = np.arange(pending.size)
        done = np.zeros(pending.size, dtype=bool)
        for it in range(1, MAX_INVERSE_ITERATIONS + 1):
            y = _solve(tuple(f[:, todo] for f in sub), x[:, todo])
            x[:, todo] = y / _colnorms(y)
            if it >= 2:
                ok = _residuals(T, x[:, todo], lam[pending[todo]]) <= restol
                done[todo[ok]] = True
                todo = todo[~ok]
                if todo.size == 0:
                    break
        X[:, pending[done]] = x[:, done]
        pending = pending[~done]
    if pending.size:
        raise NumericalFailureError(
            f"inverse iteration did not converge for eigenvalue index {int(idx[pending[0]])}",
            stage="inverse-iteration",
            index=int(idx[pending[0]]),
        )
    return X


def _iterate_cluster(d, e, T, lam, idx, pert, restol, scale):
    n, m = d.size, lam.size
    X = np.empty((n, m))
    pertol = 10.0 * _EPS * scale
    shift_prev = None
    for k in range(m):
        shift = lam[k]
        if shift_prev is not None and shift - shift_prev < pertol:
            shift = shift_prev + pertol
        shift_prev = shift
        factors = _factor(d, e, np.array([shift]), pert)
        prev = X[:, :k]
        for attempt in range(MAX_RESTARTS + 1):
            x = _start_vectors(n, idx[k : k + 1], attempt)
            converged = False
            for it in range(1, MAX_INVERSE_ITERATIONS + 1):
                y = _solve(factors, x)
                for _ in range(2):
                    y = y - prev @ (prev.T @ y)
                nrm = _colnorms(y)[0]
                if nrm == 0.0:
                    break
                x = y / nrm
                if it >= 2 and _residuals(T, x, lam[k : k + 1])[0] <= restol:
                    converged = True
                    break
            if converged:
                X[:, k] = x[:, 0]
                break
        else:
            raise NumericalFailureError(
                f"inverse iteration failed inside a cluster at index {int(idx[k])}",
                stage="inverse-iteration",
                index=int(idx[k]),
            )
    return X


def eig_selected(T: RealSymTridiagonal, sel: EigenSelection = EigenSelection.all(), vectors: bool = True):
    """Selected eigenpairs by bisection and inverse iteration."""
    n = T.n
    pos = sel.positions(n)
    if n == 1:
        vec = np.ones((1, 1)) if vectors else None
        return EigenPairs(T.diag.copy(), vec, pos)
    asc = n - pos  # ascending 0-based indices, in descending value order
    order = np.argsort(asc)
    lam_asc = bisect_eigenvalues(T, asc[order])
    X = None
    if vectors:
        X_asc = inverse_iteration(T, lam_asc, asc[order])
        X = np.empty_like(X_asc)
        X[:, order] = X_asc
    lam = np.empty_like(lam_asc)
    lam[order] = lam_asc
    return EigenPairs(lam, X, pos)


def eig_full(T: RealSymTridiagonal, vectors: bool = True, max_sweeps_factor: int = 50):
    """All eigenpairs by the implicit-shift QL algorithm.

    Rotations are accumulated into the eigenvector matrix when ``vectors``
    is set; otherwise only eigenvalues are computed in ``O(n^2)``.
    """
    n = T.n
    d = [float(v) for v in T.diag]
    e = [float(v) for v in T.offdiag] + [0.0]
    Zt = np.eye(n) if vectors else None
    budget = max_sweeps_factor * n
    sweeps = 0
    for l in range(n):
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= _EPS * dd:
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > budget:
                raise NumericalFailureError("QL iteration did not converge", stage="ql")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if Zt is not None:
                    zi = Zt[i].copy()
                    Zt[i] = c * zi - s * Zt[i + 1]
                    Zt[i + 1] = s * zi + c * Zt[i + 1]
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    vals = np.array(d)
    order = np.argsort(-vals, kind="stable")
    X = None
    if Zt is not None:
        X = _fix_signs(np.ascontiguousarray(Zt[order].T))
    return EigenPairs(vals[order], X, np.arange(1, n + 1))
