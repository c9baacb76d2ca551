"""FFT of arbitrary length and fast products with DFT submatrices.

Lengths that are powers of two use an iterative radix-2 Cooley-Tukey
transform; other lengths go through Bluestein's chirp-z convolution with
a power-of-two transform of length at least ``2N - 1``.  Twiddle and chirp
tables are built from exact integer phases and cached per length.

Transforms act along axis 0, so a 2-D input is transformed column by
column.  The forward transform is ``X_k = sum_n x_n exp(-2 pi i k n / N)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .core import SubmatrixSpec, build_A, diag_D, unit_phase
from .errors import InvalidArgumentError

__all__ = [
    "fft",
    "ifft",
    "columnwise_fft",
    "PaddedMatvecPlan",
    "make_plan",
    "matvec_A",
    "matvec_A_adjoint",
    "prefer_dense",
    "DenseMatvec",
]


def _is_pow2(n):
    return n & (n - 1) == 0


@lru_cache(maxsize=64)
def _radix2_tables(n):
    levels = n.bit_length() - 1
    rev = np.zeros(n, dtype=np.int64)
    for b in range(levels):
        rev |= ((np.arange(n) >> b) & 1) << (levels - 1 - b)
    tw = unit_phase(np.arange(max(n // 2, 1)), n)
    rev.flags.writeable = False
    tw.flags.writeable = False
    return rev, tw


def _fft_pow2(x):
    n = x.shape[0]
    if n == 1:
        return x.astype(complex, copy=True)
    rev, tw = _radix2_tables(n)
    tail = x.shape[1:]
    y = np.asarray(x, dtype=complex)[rev]
    half = 1
    while half < n:
        size = 2 * half
        w = tw[:: n // size][:half].reshape((1, half) + (1,) * len(tail))
        y = y.reshape((n // size, size) + tail)
        even = y[:, :half]
        odd = y[:, half:] * w
        y = np.concatenate((even + odd, even - odd), axis=1)
        half = size
    return y.reshape((n,) + tail)


@lru_cache(maxsize=64)
def _bluestein_tables(n):
    m = 1 << (2 * n - 2).bit_length()  # smallest power of two >= 2n - 1
    k = np.arange(n, dtype=np.int64)
    chirp = unit_phase(np.mod(k * k, 2 * n), 2 * n)  # exp(-pi i k^2 / n)
    kernel = np.zeros(m, dtype=complex)
    kernel[:n] = np.conj(chirp)
    kernel[m - n + 1 :] = np.conj(chirp[1:])[::-1]
    kernel_hat = _fft_pow2(kernel)
    chirp.flags.writeable = False
    kernel_hat.flags.writeable = False
    return m, chirp, kernel_hat


def _fft_bluestein(x):
    n = x.shape[0]
    m, chirp, kernel_hat = _bluestein_tables(n)
    tail = x.shape[1:]
    shape = (n,) + (1,) * len(tail)
    a = np.zeros((m,) + tail, dtype=complex)
    a[:n] = x * chirp.reshape(shape)
    conv = _fft_pow2(a) * kernel_hat.reshape((m,) + (1,) * len(tail))
    conv = np.conj(_fft_pow2(np.conj(conv))) / m
    return conv[:n] * chirp.reshape(shape)


def fft(x):
    """Discrete Fourier transform along axis 0, any length >= 1."""
    x = np.asarray(x)
    if x.ndim == 0 or x.shape[0] == 0:
        raise InvalidArgumentError("fft needs a non-empty array")
    n = x.shape[0]
    if _is_pow2(n):
        return _fft_pow2(x)
    return _fft_bluestein(x)


def ifft(X):
    """Inverse transform, ``x_n = (1/N) sum_k X_k exp(2 pi i k n / N)``."""
    X = np.asarray(X)
    if X.ndim == 0 or X.shape[0] == 0:
        raise InvalidArgumentError("ifft needs a non-empty array")
    return np.conj(fft(np.conj(X))) / X.shape[0]


def columnwise_fft(M):
    """Transform every column of ``M`` with an FFT of length ``rows``."""
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] < 1:
        raise InvalidArgumentError("columnwise_fft needs a matrix with at least one row")
    return fft(M)


def prefer_dense(spec: SubmatrixSpec) -> bool:
    """True when a dense product (cost ``pq``) beats an FFT (``N log N``)."""
    N = spec.N
    return spec.p * spec.q < N * math.log2(N) if N > 1 else True


@dataclass(frozen=True)
class PaddedMatvecPlan:
    """Products with the DFT block described by ``spec`` through length-N FFTs.

    ``A v`` is computed by zero-padding ``v`` to length ``N``, transforming,
    and keeping the first ``p`` entries.  Shifted blocks add the diagonal
    scalings that move the origin.
    """

    spec: SubmatrixSpec
    row_scale: np.ndarray | None = field(default=None, repr=False)
    col_scale: np.ndarray | None = field(default=None, repr=False)

    @property
    def N(self):
        return self.spec.N


def make_plan(spec: SubmatrixSpec) -> PaddedMatvecPlan:
    N = spec.N
    # warm the transform tables so that the plan is ready to share
    if _is_pow2(N):
        _radix2_tables(N)
    else:
        _bluestein_tables(N)
    if spec.is_origin:
        return PaddedMatvecPlan(spec)
    row = unit_phase((spec.j0 - 1) * (spec.k0 - 1), N) * diag_D(spec.p, N, spec.k0 - 1)
    col = diag_D(spec.q, N, spec.j0 - 1)
    return PaddedMatvecPlan(spec, row, col)


def _check_len(v, n, what):
    v = np.asarray(v)
    if v.ndim not in (1, 2) or v.shape[0] != n:
        raise InvalidArgumentError(f"{what} must have length {n}, got shape {v.shape}")
    return v


def matvec_A(plan: PaddedMatvecPlan, v):
    """``A @ v`` (``v`` of length ``q``, or ``q x m``) in ``O(N log N)``."""
    spec = plan.spec
    v = _check_len(v, spec.q, "v")
    if plan.col_scale is not None:
        v = v * (plan.col_scale if v.ndim == 1 else plan.col_scale[:, None])
    padded = np.zeros((spec.N,) + v.shape[1:], dtype=complex)
    padded[: spec.q] = v
    w = fft(padded)[: spec.p]
    if plan.row_scale is not None:
        w = w * (plan.row_scale if w.ndim == 1 else plan.row_scale[:, None])
    return w


def matvec_A_adjoint(plan: PaddedMatvecPlan, u):
    """``A^* @ u`` (``u`` of length ``p``) via a conjugated length-N FFT."""
    spec = plan.spec
    u = _check_len(u, spec.p, "u")
    if plan.row_scale is not None:
        u = u * np.conj(plan.row_scale if u.ndim == 1 else plan.row_scale[:, None])
    padded = np.zeros((spec.N,) + u.shape[1:], dtype=complex)
    padded[: spec.p] = np.conj(u)
    w = np.conj(fft(padded)[: spec.q])
    if plan.col_scale is not None:
        w = w * np.conj(plan.col_scale if w.ndim == 1 else plan.col_scale[:, None])
    return w


class DenseMatvec:
    """Explicit-matrix counterpart of :class:`PaddedMatvecPlan`.

    The adjoint is applied as ``conj(A^T @ conj(u))`` with ``A^T`` built
    directly for the transposed block, so that products with a block and
    with its transpose round identically.
    """

    def __init__(self, spec: SubmatrixSpec):
        from .core import shift_to_B

        self.spec = spec
        self.A = build_A(spec) if spec.is_origin else shift_to_B(spec, check=False)
        tspec = spec.transposed()
        self.AT = build_A(tspec) if tspec.is_origin else shift_to_B(tspec, check=False)

    def matvec(self, v):
        return self.A @ _check_len(v, self.spec.q, "v")

    def adjoint(self, u):
        return np.conj(self.AT @ np.conj(_check_len(u, self.spec.p, "u")))
