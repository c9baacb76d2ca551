"""Closed-form construction of the DFT matrix and its relatives.

All formulas use 1-based indices ``j, k`` as in the usual linear algebra
convention; storage is 0-based.  Every complex exponential is evaluated
from an exact integer phase ``num / den`` that is reduced modulo ``den``
before any floating point conversion, so entries stay accurate for large
``N`` and conjugate phases produce bitwise conjugate values.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidArgumentError

__all__ = [
    "ScalarConfig",
    "SubmatrixSpec",
    "RealSymTridiagonal",
    "DEFAULT_SCALAR",
    "sincos_2pi",
    "unit_phase",
    "twiddle",
    "build_F",
    "build_A",
    "shift_to_B",
    "build_C",
    "diag_D",
    "build_S",
    "build_J",
]


@dataclass(frozen=True)
class ScalarConfig:
    """The real scalar type used for computations.

    Only ``numpy.float64`` is exercised; other numpy float types work with
    the builders but are not validated against the tolerances.
    """

    dtype: type = np.float64

    @property
    def eps(self) -> float:
        return float(np.finfo(self.dtype).eps)


DEFAULT_SCALAR = ScalarConfig()


@dataclass(frozen=True)
class SubmatrixSpec:
    """A contiguous ``p x q`` block of the ``N x N`` DFT matrix.

    ``(j0, k0)`` is the 1-based origin of the block inside ``F``; blocks
    wrap around periodically.
    """

    N: int
    p: int
    q: int
    j0: int = 1
    k0: int = 1

    def __post_init__(self):
        for name in ("N", "p", "q", "j0", "k0"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise InvalidArgumentError(f"{name} must be an integer, got {value!r}")
        N = self.N
        if N < 1:
            raise InvalidArgumentError(f"N must be positive, got {N}")
        for name in ("p", "q", "j0", "k0"):
            value = getattr(self, name)
            if not 1 <= value <= N:
                raise InvalidArgumentError(f"{name} must lie in [1, {N}], got {value}")

    @property
    def r(self) -> int:
        return min(self.p, self.q)

    @property
    def is_origin(self) -> bool:
        return self.j0 == 1 and self.k0 == 1

    def at_origin(self) -> "SubmatrixSpec":
        return SubmatrixSpec(self.N, self.p, self.q)

    def transposed(self) -> "SubmatrixSpec":
        """Spec of the transposed block (``F`` is symmetric)."""
        return SubmatrixSpec(self.N, self.q, self.p, self.k0, self.j0)


@dataclass(frozen=True)
class RealSymTridiagonal:
    """Real symmetric tridiagonal matrix stored by its two bands."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        diag = np.ascontiguousarray(self.diag, dtype=float)
        offdiag = np.ascontiguousarray(self.offdiag, dtype=float)
        if diag.ndim != 1 or diag.size < 1:
            raise InvalidArgumentError("diag must be a non-empty vector")
        if offdiag.shape != (diag.size - 1,):
            raise InvalidArgumentError(
                f"offdiag must have length {diag.size - 1}, got {offdiag.shape}"
            )
        diag.flags.writeable = False
        offdiag.flags.writeable = False
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "offdiag", offdiag)

    @property
    def n(self) -> int:
        return self.diag.size

    def dense(self) -> np.ndarray:
        T = np.diag(self.diag)
        if self.n > 1:
            T += np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)
        return T

    def norm1(self) -> float:
        """Induced 1-norm (equal to the infinity norm by symmetry)."""
        col = np.abs(self.diag).copy()
        col[:-1] += np.abs(self.offdiag)
        col[1:] += np.abs(self.offdiag)
        return float(col.max())

    def matvec(self, x: np.ndarray) -> np.ndarray:
        """``T @ x`` for ``x`` of shape ``(n,)`` or ``(n, m)``."""
        x = np.asarray(x)
        d = self.diag if x.ndim == 1 else self.diag[:, None]
        e = self.offdiag if x.ndim == 1 else self.offdiag[:, None]
        y = d * x
        y[:-1] += e * x[1:]
        y[1:] += e * x[:-1]
        return y


def sincos_2pi(num, den):
    """Return ``(cos(2*pi*num/den), sin(2*pi*num/den))`` for integer phases.

    The phase is reduced exactly in integers to ``[0, 1/8]`` of a turn by
    the usual octant symmetries, so multiples of a quarter turn are exact
    and ``num`` and ``-num`` give results that differ only in the sign of
    the sine.
    """
    num = np.asarray(num, dtype=np.int64)
    den = np.int64(den)
    if den <= 0:
        raise InvalidArgumentError("phase denominator must be positive")
    m = np.mod(num, den)
    neg = 2 * m > den
    m = np.where(neg, den - m, m)  # now m/den in [0, 1/2]
    flip = 4 * m > den
    m = np.where(flip, den - 2 * m, 2 * m)  # angle/(2 pi) = m / (2 den), in [0, 1/4]
    swap = 4 * m > den  # m/(2 den) > 1/8
    m = np.where(swap, den - 2 * m, 2 * m)  # angle/(2 pi) = m / (4 den), in [0, 1/8]
    theta = (2.0 * np.pi) * (m / (4.0 * float(den)))
    c0 = np.cos(theta)
    s0 = np.sin(theta)
    c = np.where(swap, s0, c0)
    s = np.where(swap, c0, s0)
    c = np.where(flip, -c, c)
    s = np.where(neg, -s, s)
    return c, s


def unit_phase(num, den):
    """``exp(-2*pi*i*num/den)`` for integer ``num`` (array) and ``den``."""
    c, s = sincos_2pi(num, den)
    out = np.empty(np.shape(c), dtype=complex)
    out.real = c
    out.imag = -s
    return out


def twiddle(N: int) -> complex:
    """The twiddle factor ``exp(2*pi*i/N)``."""
    if N < 1:
        raise InvalidArgumentError(f"N must be positive, got {N}")
    return complex(unit_phase(-1, N))


def _dft_block(N, rows, cols):
    # entries exp(-2 pi i (j-1)(k-1)/N) for 0-based row/col index arrays
    rows = np.mod(np.asarray(rows, dtype=np.int64), N)
    cols = np.mod(np.asarray(cols, dtype=np.int64), N)
    return unit_phase(np.mod(np.outer(rows, cols), N), N)


def build_F(N: int) -> np.ndarray:
    """The ``N x N`` DFT matrix ``F[j, k] = omega^{-(j-1)(k-1)}``."""
    if N < 1:
        raise InvalidArgumentError(f"N must be positive, got {N}")
    idx = np.arange(N)
    return _dft_block(N, idx, idx)


def build_A(spec: SubmatrixSpec) -> np.ndarray:
    """Leading ``p x q`` block of ``F``."""
    if not spec.is_origin:
        raise InvalidArgumentError("build_A needs j0 = k0 = 1; use shift_to_B")
    return _dft_block(spec.N, np.arange(spec.p), np.arange(spec.q))


def shift_to_B(spec: SubmatrixSpec, check: bool = __debug__) -> np.ndarray:
    """The ``p x q`` block of ``F`` with origin ``(j0, k0)``, wrapping around.

    With ``check`` set, the result is compared against the diagonal scaling
    identity ``B = omega^{-(j0-1)(k0-1)} D_p^{k0-1} A D_q^{j0-1}``.
    """
    N, p, q = spec.N, spec.p, spec.q
    B = _dft_block(N, spec.j0 - 1 + np.arange(p), spec.k0 - 1 + np.arange(q))
    if check and not spec.is_origin:
        A = build_A(spec.at_origin())
        scale = unit_phase((spec.j0 - 1) * (spec.k0 - 1), N)
        B2 = scale * diag_D(p, N, spec.k0 - 1)[:, None] * A * diag_D(q, N, spec.j0 - 1)[None, :]
        err = np.max(np.abs(B - B2))
        assert err <= 1e-12 * max(1, N), f"shift identity violated by {err:.3e}"
    return B


def build_C(spec: SubmatrixSpec) -> np.ndarray:
    """Centered block ``C[j, k] = omega^{-(j-(p+1)/2)(k-(q+1)/2)}``.

    The exponent is ``(2j-p-1)(2k-q-1) / (4N)``, an exact rational.
    """
    if not spec.is_origin:
        raise InvalidArgumentError("build_C needs j0 = k0 = 1")
    N, p, q = spec.N, spec.p, spec.q
    a = 2 * np.arange(1, p + 1, dtype=np.int64) - p - 1
    b = 2 * np.arange(1, q + 1, dtype=np.int64) - q - 1
    den = 4 * N
    return unit_phase(np.mod(np.outer(a, b), den), den)


def _as_fraction(power):
    if isinstance(power, Fraction):
        return power
    if isinstance(power, (int, np.integer)):
        return Fraction(int(power))
    return Fraction(float(power))


def diag_D(n: int, N: int, power=1) -> np.ndarray:
    """Diagonal of ``D_n^power``: entries ``exp(-2*pi*i*(j-1)*power/N)``.

    ``power`` may be any real; integers, halves and other short binary
    fractions are handled with an exact integer phase.  Fractional powers
    are never taken numerically from ``D_n``.
    """
    if n < 1:
        raise InvalidArgumentError(f"n must be positive, got {n}")
    frac = _as_fraction(power)
    j = np.arange(n, dtype=np.int64)
    if frac.denominator <= 2**20:
        den = frac.denominator * N
        num = int(frac.numerator) % den
        return unit_phase(np.mod(j * num, den), den)
    angle = -2.0 * np.pi * np.mod(j * float(power), N) / N
    return np.exp(1j * angle)


def build_S(p: int, q: int, N: int) -> np.ndarray:
    """The ``q x q`` periodic prolate (Dirichlet kernel) matrix.

    Off the diagonal ``sin(p(j-k)pi/N) / sin((j-k)pi/N)``; the diagonal is
    exactly ``p``.
    """
    _check_pq(p, q, N)
    d = np.subtract.outer(np.arange(q), np.arange(q)).astype(np.int64)
    # sin(pi a / N) = sin(2 pi a / (2N))
    _, num = sincos_2pi(np.mod(p * d, 2 * N), 2 * N)
    _, den = sincos_2pi(d, 2 * N)
    S = np.empty((q, q))
    off = d != 0
    S[off] = num[off] / den[off]
    S[~off] = p
    return S


def build_J(p: int, q: int, N: int, centered: bool = False) -> RealSymTridiagonal:
    """The tridiagonal matrix commuting with ``build_S(p, q, N)``.

    Diagonal ``cos(pi(2k-q-1)/N) cos(p pi/N)``, off-diagonal
    ``-sin(pi k/N) sin(pi(q-k)/N)``.  With ``centered`` the constant
    ``cos(p pi/N)`` is subtracted from the diagonal, evaluated as
    ``-2 cos(p pi/N) sin^2(pi(2k-q-1)/(2N))`` without cancellation; this
    keeps the eigenvectors and shifts every eigenvalue by the same amount.
    """
    _check_pq(p, q, N)
    k = np.arange(1, q + 1, dtype=np.int64)
    cos_p, _ = sincos_2pi(p, 2 * N)
    if centered:
        _, s_half = sincos_2pi(2 * k - q - 1, 4 * N)
        diag = -2.0 * cos_p * s_half * s_half
    else:
        cos_k, _ = sincos_2pi(2 * k - q - 1, 2 * N)
        diag = cos_k * cos_p
    kk = np.arange(1, q, dtype=np.int64)
    _, s1 = sincos_2pi(kk, 2 * N)
    _, s2 = sincos_2pi(q - kk, 2 * N)
    return RealSymTridiagonal(np.atleast_1d(diag), -(s1 * s2))


def _check_pq(p, q, N):
    if N < 1 or not (1 <= p <= N and 1 <= q <= N):
        raise InvalidArgumentError(f"need 1 <= p, q <= N, got p={p}, q={q}, N={N}")
