"""Singular value decomposition of DFT submatrices.

The right singular vectors of the ``p x q`` leading block ``A`` of the DFT
matrix are diagonal rescalings of the eigenvectors of the tridiagonal
matrix ``J(p, q)``; the left ones come from ``J(q, p)``.  Two assembly
strategies are provided:

* ``"fft"`` (default): ``sigma_k = ||A v_k||`` and ``u_k = A v_k / sigma_k``,
  so ``A v_k = sigma_k u_k`` holds by construction.  Left vectors whose
  singular value is below ``1e4 * eps * sqrt(N) * max(p, q)`` are instead
  taken from ``J(q, p)``.
* ``"projection"``: both factors from their tridiagonal matrices, paired by
  position and normalized through ``u_k^* A v_k``.

Singular values are decreasing exactly when the ``J`` eigenvalues are
increasing, so the ``k``-th largest singular value belongs to the ``k``-th
smallest eigenvalue on either side.  Windows of singular triplets are
therefore computed by selecting the matching eigenvalue window.

Work is always done on the orientation with ``p >= q``; a wide block is
handled through its transpose, which is again a DFT block.

The whole matrix (``p = q = N``) has the single singular value ``sqrt(N)``
and ``J`` says nothing about it; there the canonical factors
``U = F / sqrt(N)`` and ``V = I`` are returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core import DEFAULT_SCALAR, SubmatrixSpec, build_F, build_J, diag_D, sincos_2pi, unit_phase
from .eig_tridiag import EigenSelection, eig_selected
from .errors import InvalidArgumentError, NumericalFailureError
from .fourier_ops import DenseMatvec, make_plan, matvec_A, matvec_A_adjoint, prefer_dense

__all__ = [
    "SVDResult",
    "PlungeWindow",
    "VectorBasis",
    "right_vectors",
    "left_vectors_projection",
    "assemble_svd_fft",
    "assemble_svd_projection",
    "svd",
    "singular_values",
    "plunge_window",
    "plunge_svd",
    "zero_threshold",
]

EPS = DEFAULT_SCALAR.eps
ZERO_FACTOR = 1e4
DEGENERATE_FACTOR = 1e-6
ANNIHILATION_TOL = 1e-8


@dataclass(frozen=True)
class SVDResult:
    """Singular triplets of a DFT block.

    ``U`` is ``p x r`` and ``V`` is ``q x r`` in reduced mode (``r =
    min(p, q)``); in full mode both are square and ``sigma`` is padded with
    zeros to length ``max(p, q)``.  ``indices`` are the 1-based positions
    of the triplets in the complete decreasing list (a contiguous slice for
    partial computations).  ``flags`` lists ``(index, reason)`` pairs.
    """

    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray
    mode: str
    strategy: str
    residuals: np.ndarray
    indices: np.ndarray
    spec: SubmatrixSpec
    matvec: str = "dense"
    flags: tuple = field(default=())

    @property
    def r(self):
        return int(self.residuals.size)

    def reconstruct(self):
        """``U diag(sigma) V^*`` using the first ``r`` triplets."""
        r = self.r
        return (self.U[:, :r] * self.sigma[:r]) @ self.V[:, :r].conj().T


@dataclass(frozen=True)
class PlungeWindow:
    center: float
    lo: int
    hi: int


@dataclass(frozen=True)
class VectorBasis:
    """Eigenvectors of a ``J`` matrix and their rescaled complex versions.

    ``values`` are eigenvalues of ``J`` itself (descending), ``positions``
    their 1-based descending positions.
    """

    values: np.ndarray
    real: np.ndarray
    scaled: np.ndarray
    positions: np.ndarray


def zero_threshold(spec: SubmatrixSpec) -> float:
    """Singular values below this are treated as numerically zero."""
    return ZERO_FACTOR * EPS * math.sqrt(spec.N) * max(spec.p, spec.q)


def _require_origin(spec):
    if not spec.is_origin:
        raise InvalidArgumentError("this operation needs a block at origin (1, 1); use svd()")


def _scale_real(X, d):
    out = np.empty(X.shape, dtype=complex)
    out.real = X * d.real[:, None]
    out.imag = X * d.imag[:, None]
    return out


def _basis(p, q, N, power, n_scale, sel):
    J = build_J(p, q, N, centered=True)
    pairs = eig_selected(J, sel)
    cos_p, _ = sincos_2pi(p, 2 * N)
    scaled = _scale_real(pairs.vectors, diag_D(n_scale, N, power))
    return VectorBasis(pairs.values + float(cos_p), pairs.vectors, scaled, pairs.positions)


def right_vectors(spec: SubmatrixSpec, sel: EigenSelection = EigenSelection.all()) -> VectorBasis:
    """Right singular vectors ``v_k = D_q^{-(p-1)/2} vt_k`` from ``J(p, q)``."""
    _require_origin(spec)
    return _basis(spec.p, spec.q, spec.N, Fraction(-(spec.p - 1), 2), spec.q, sel)


def left_vectors_projection(spec: SubmatrixSpec, sel: EigenSelection = EigenSelection.all()) -> VectorBasis:
    """Left singular vectors ``u_k = D_p^{(q-1)/2} ut_k`` from ``J(q, p)``."""
    _require_origin(spec)
    return _basis(spec.q, spec.p, spec.N, Fraction(spec.q - 1, 2), spec.p, sel)


class _Operator:
    """Column-by-column products with ``A`` and ``A^*``.

    Columns are processed one at a time so that a given vector always
    produces bitwise the same product, whatever else is in the batch.
    """

    def __init__(self, spec, matvec="auto"):
        if matvec not in ("auto", "dense", "fft"):
            raise InvalidArgumentError(f"unknown matvec backend {matvec!r}")
        if matvec == "auto":
            matvec = "dense" if prefer_dense(spec) else "fft"
        self.kind = matvec
        self.spec = spec
        if matvec == "dense":
            dense = DenseMatvec(spec)
            self._fwd, self._adj = dense.matvec, dense.adjoint
        else:
            plan = make_plan(spec)
            self._fwd = lambda v: matvec_A(plan, v)
            self._adj = lambda u: matvec_A_adjoint(plan, u)

    def apply(self, X):
        out = np.empty((self.spec.p, X.shape[1]), dtype=complex)
        for k in range(X.shape[1]):
            out[:, k] = self._fwd(np.ascontiguousarray(X[:, k]))
        return out

    def apply_adjoint(self, X):
        out = np.empty((self.spec.q, X.shape[1]), dtype=complex)
        for k in range(X.shape[1]):
            out[:, k] = self._adj(np.ascontiguousarray(X[:, k]))
        return out


def _colnorms(W):
    rows = np.ascontiguousarray(W.T)
    return np.sqrt(np.sum(rows.real**2 + rows.imag**2, axis=1))


def _orthogonalize(u, Q):
    if Q.shape[1]:
        for _ in range(2):
            u = u - Q @ (Q.conj().T @ u)
    return u


def _ranks_to_positions(ranks, n):
    # k-th largest singular value <-> k-th smallest eigenvalue of J (order n)
    return n - np.asarray(ranks) + 1


def _selection_ranks(sel, r):
    return np.sort(_ranks_to_positions(sel.positions(r), r))


def _primary(spec, sel, op):
    """Right vectors of a tall block and the norms of their images."""
    basis = right_vectors(spec, sel)
    W = op.apply(basis.scaled)
    return basis, W, _colnorms(W)


def _whole_matrix(spec, sel, mode, strategy, matvec):
    # F = (F / sqrt(N)) (sqrt(N) I) I^*, triplets in column order
    N = spec.N
    ranks = _selection_ranks(sel, N)
    if mode == "full" and sel.kind != "all":
        raise InvalidArgumentError("full mode needs the complete selection")
    op = _Operator(spec, matvec)
    root = math.sqrt(N)
    V = np.eye(N, dtype=complex)[:, ranks - 1]
    U = build_F(N)[:, ranks - 1] / root
    W = op.apply(V)
    residuals = np.sqrt(np.sum(np.abs(W - root * U) ** 2, axis=0))
    return SVDResult(U, np.full(ranks.size, root), V, mode, strategy, residuals, ranks, spec, op.kind)


def _assemble_tall(spec, sel, mode, matvec):
    p, q, N = spec.p, spec.q, spec.N
    if p == q == N:
        return _whole_matrix(spec, sel, mode, "fft", matvec)
    op = _Operator(spec, matvec)
    basis, W, sigma = _primary(spec, sel, op)
    order = np.argsort(-sigma, kind="stable")
    ranks = q - basis.positions + 1
    tau = zero_threshold(spec)

    small = [k for k in order if sigma[k] < tau]
    # partners for small singular values, and the extra columns of a full U
    need = [ranks[k] for k in small]
    if mode == "full":
        need += list(range(q + 1, p + 1))
    partner = {}
    if need:
        pos = _ranks_to_positions(np.array(need), p)
        left = left_vectors_projection(spec, EigenSelection.window(pos.min(), pos.max()))
        for rank, ps in zip(need, pos):
            partner[int(rank)] = left.scaled[:, int(ps - left.positions[0])]

    m = len(order)
    U = np.empty((p, m), dtype=complex)
    residuals = np.empty(m)
    for t, k in enumerate(order):
        if sigma[k] >= tau:
            u = W[:, k] / sigma[k]
        else:
            u = partner[int(ranks[k])]
        u = _orthogonalize(u, U[:, :t])
        nrm = math.sqrt(float(np.vdot(u, u).real))
        if nrm < ANNIHILATION_TOL:
            raise NumericalFailureError(
                f"left vector {t + 1} vanished after orthogonalization",
                stage="orthogonalize-left",
                index=t + 1,
            )
        u = u / nrm
        if sigma[k] < tau:
            s_hat = np.vdot(u, W[:, k])
            if s_hat != 0:
                u = u * (s_hat / abs(s_hat))
        U[:, t] = u
        residuals[t] = math.sqrt(float(np.sum(np.abs(W[:, k] - sigma[k] * u) ** 2)))

    V = basis.scaled[:, order]
    sig = sigma[order]
    if mode == "full" and p > q:
        extra = np.empty((p, p - q), dtype=complex)
        for i, rank in enumerate(range(q + 1, p + 1)):
            u = _orthogonalize(partner[rank], np.hstack([U, extra[:, :i]]))
            nrm = math.sqrt(float(np.vdot(u, u).real))
            if nrm < ANNIHILATION_TOL:
                raise NumericalFailureError(
                    f"padding vector {rank} vanished after orthogonalization",
                    stage="full-padding",
                    index=rank,
                )
            extra[:, i] = u / nrm
        U = np.hstack([U, extra])
        sig = np.concatenate([sig, np.zeros(p - q)])
    return SVDResult(
        U, sig, V, mode, "fft", residuals, np.sort(ranks), spec, op.kind
    )


def _transpose_result(res: SVDResult, spec: SubmatrixSpec) -> SVDResult:
    # A = (A^T)^T: swap and conjugate the factors
    return SVDResult(
        np.conj(res.V), res.sigma, np.conj(res.U), res.mode, res.strategy,
        res.residuals, res.indices, spec, res.matvec, res.flags,
    )


def _check_mode(mode):
    if mode not in ("reduced", "full"):
        raise InvalidArgumentError(f"unknown mode {mode!r}")


def assemble_svd_fft(spec: SubmatrixSpec, sel: EigenSelection = EigenSelection.all(),
                     mode: str = "reduced", matvec: str = "auto") -> SVDResult:
    """SVD from the eigenvectors of one ``J`` matrix and products with ``A``.

    ``sel`` picks eigenpairs of the ``r x r`` tridiagonal matrix of the
    smaller dimension, counted from its largest eigenvalue (i.e. from the
    smallest singular value).
    """
    _require_origin(spec)
    _check_mode(mode)
    if spec.p >= spec.q:
        return _assemble_tall(spec, sel, mode, matvec)
    return _transpose_result(_assemble_tall(spec.transposed(), sel, mode, matvec), spec)


def assemble_svd_projection(spec: SubmatrixSpec, sel: EigenSelection = EigenSelection.all(),
                            mode: str = "reduced", matvec: str = "auto") -> SVDResult:
    """SVD with both factors from ``J(p, q)`` and ``J(q, p)``.

    Vectors are paired by position, largest singular value first, and
    ``sigma_k = |u_k^* A v_k|``; the phase of ``u_k^* A v_k`` is folded into
    ``u_k``.  Pairs whose residual ``||A v_k - sigma_k u_k||`` exceeds
    ``1e-6 sqrt(N)`` are flagged ``"degenerate-pairing"``.
    """
    _require_origin(spec)
    _check_mode(mode)
    p, q, N = spec.p, spec.q, spec.N
    if p == q == N:
        return _whole_matrix(spec, sel, mode, "projection", matvec)
    r = spec.r
    ranks = _selection_ranks(sel, r)
    if mode == "full" and (sel.kind != "all"):
        raise InvalidArgumentError("full mode needs the complete selection")
    all_ranks = np.arange(1, max(p, q) + 1) if mode == "full" else ranks

    def side(get, n):
        want = [a for a in all_ranks if a <= n]
        pos = _ranks_to_positions(np.array(want), n)
        basis = get(spec, EigenSelection.window(pos.min(), pos.max()))
        cols = [int(ps - basis.positions[0]) for ps in pos]
        return basis.scaled[:, cols]

    Vall = side(right_vectors, q)
    Uall = side(left_vectors_projection, p)
    m = ranks.size
    op = _Operator(spec, matvec)
    W = op.apply(Vall[:, :m])
    U = Uall[:, :m].copy()
    sigma = np.empty(m)
    residuals = np.empty(m)
    degenerate = []
    for k in range(m):
        s_hat = np.vdot(U[:, k], W[:, k])
        sigma[k] = abs(s_hat)
        if s_hat != 0:
            U[:, k] *= s_hat / abs(s_hat)
        residuals[k] = math.sqrt(float(np.sum(np.abs(W[:, k] - sigma[k] * U[:, k]) ** 2)))
        if residuals[k] > DEGENERATE_FACTOR * math.sqrt(N):
            degenerate.append(k)
    order = np.argsort(-sigma, kind="stable")
    new_pos = np.empty(m, dtype=int)
    new_pos[order] = np.arange(m)
    flags = tuple((int(ranks[new_pos[k]]), "degenerate-pairing") for k in sorted(degenerate, key=lambda k: new_pos[k]))
    U, V, sigma, residuals = U[:, order], Vall[:, :m][:, order], sigma[order], residuals[order]
    if mode == "full":
        if p > q:
            U = np.hstack([U, Uall[:, m:]])
        elif q > p:
            V = np.hstack([V, Vall[:, m:]])
        sigma = np.concatenate([sigma, np.zeros(abs(p - q))])
    return SVDResult(U, sigma, V, mode, "projection", residuals, ranks, spec, op.kind, flags)


def _shift_result(res: SVDResult, spec: SubmatrixSpec) -> SVDResult:
    N = spec.N
    row = unit_phase((spec.j0 - 1) * (spec.k0 - 1), N) * diag_D(spec.p, N, spec.k0 - 1)
    col = diag_D(spec.q, N, -(spec.j0 - 1))
    return SVDResult(
        res.U * row[:, None], res.sigma, res.V * col[:, None], res.mode, res.strategy,
        res.residuals, res.indices, spec, res.matvec, res.flags,
    )


def svd(spec: SubmatrixSpec, strategy: str = "auto", mode: str = "reduced",
        matvec: str = "auto") -> SVDResult:
    """Reduced or full SVD of any contiguous (possibly wrapped) DFT block.

    ``strategy`` is ``"fft"``, ``"projection"`` or ``"auto"`` (the same as
    ``"fft"``); ``matvec`` forces the dense or FFT products.
    """
    if strategy not in ("auto", "fft", "projection"):
        raise InvalidArgumentError(f"unknown strategy {strategy!r}")
    origin = spec.at_origin()
    if strategy == "projection":
        res = assemble_svd_projection(origin, EigenSelection.all(), mode, matvec)
    else:
        res = assemble_svd_fft(origin, EigenSelection.all(), mode, matvec)
    return res if spec.is_origin else _shift_result(res, spec)


def singular_values(spec: SubmatrixSpec, sel: EigenSelection = EigenSelection.all(),
                    matvec: str = "auto") -> np.ndarray:
    """Decreasing singular values, computed exactly as :func:`svd` does.

    No left vectors are formed.  ``sel`` is interpreted as in
    :func:`assemble_svd_fft`.
    """
    tall = spec.at_origin()
    if tall.p < tall.q:
        tall = tall.transposed()
    _, _, sigma = _primary(tall, sel, _Operator(tall, matvec))
    return np.sort(sigma)[::-1]


def plunge_window(spec: SubmatrixSpec, eps_t: float) -> PlungeWindow:
    """Index window around ``pq/N`` of half-width ``ceil(2 log2(1/eps_t)) + 2``."""
    if not 0 < eps_t < 1:
        raise InvalidArgumentError(f"threshold must lie in (0, 1), got {eps_t}")
    center = spec.p * spec.q / spec.N
    c = math.floor(center + 0.5)
    w = math.ceil(2 * math.log2(1 / eps_t)) + 2
    lo, hi = max(1, c - w), min(spec.r, c + w)
    if lo > hi:
        raise InvalidArgumentError("plunge window is empty")
    return PlungeWindow(center, lo, hi)


def plunge_svd(spec: SubmatrixSpec, eps_t: float, matvec: str = "auto") -> SVDResult:
    """Only the singular triplets around the plunge region."""
    win = plunge_window(spec, eps_t)
    r = spec.r
    sel = EigenSelection.window(r - win.hi + 1, r - win.lo + 1)
    res = assemble_svd_fft(spec.at_origin(), sel, "reduced", matvec)
    return res if spec.is_origin else _shift_result(res, spec)
