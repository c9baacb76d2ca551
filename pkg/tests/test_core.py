import cmath
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from fouriersvd import (
    InvalidArgumentError,
    SubmatrixSpec,
    build_A,
    build_C,
    build_F,
    build_J,
    build_S,
    diag_D,
    shift_to_B,
    twiddle,
)
from fouriersvd.core import sincos_2pi, unit_phase
from oracles import dft_block

GRID = [(N, p, q) for N in (4, 7, 8, 12, 16) for p in range(1, N + 1) for q in range(1, N + 1)]


def test_twiddle_examples():
    assert twiddle(1) == 1
    assert twiddle(4) == 1j
    assert_allclose(twiddle(8), math.sqrt(2) / 2 * (1 + 1j), atol=1e-16)
    for N in (3, 5, 64, 1000):
        assert abs(abs(twiddle(N)) - 1) <= 2e-16


@pytest.mark.parametrize("N", [0, -3])
def test_twiddle_rejects_nonpositive(N):
    with pytest.raises(InvalidArgumentError):
        twiddle(N)


def test_sincos_exact_octants():
    assert sincos_2pi(1, 4) == (0.0, 1.0)
    assert sincos_2pi(1, 2) == (-1.0, 0.0)
    c, s = sincos_2pi(1, 8)
    assert abs(c - math.sqrt(0.5)) <= 2e-16 and abs(s - math.sqrt(0.5)) <= 2e-16
    assert unit_phase(3, 4) == 1j


def test_build_F_examples():
    assert_array_equal(build_F(1), [[1]])
    assert_array_equal(build_F(2), [[1, 1], [1, -1]])
    assert build_F(4)[1, 1] == -1j


@pytest.mark.parametrize("N", [1, 2, 5, 16, 33, 64])
def test_F_matches_naive_and_is_unitary_up_to_scale(N):
    F = build_F(N)
    assert_allclose(F, dft_block(N, N, N), atol=1e-12)
    assert np.max(np.abs(F.conj().T @ F / N - np.eye(N))) <= 1e-12 * N


def test_F_phase_accuracy_large_N():
    # the integer reduction of jk mod N keeps every entry exact to an ulp
    N = 4096
    F = build_F(N)
    assert np.max(np.abs(np.abs(F) - 1)) < 4e-16
    assert F[N - 1, N - 1] == pytest.approx(cmath.exp(-2j * math.pi / N), abs=1e-15)


def test_build_A_examples():
    assert_array_equal(build_A(SubmatrixSpec(4, 1, 4)), [[1, 1, 1, 1]])
    assert_allclose(build_A(SubmatrixSpec(4, 2, 2)), [[1, 1], [1, -1j]], atol=0)
    assert_array_equal(build_A(SubmatrixSpec(8, 8, 8)), build_F(8))


def test_build_A_rejects_shifted_block():
    with pytest.raises(InvalidArgumentError):
        build_A(SubmatrixSpec(8, 2, 2, 3, 1))


def test_shift_to_B_examples():
    spec = SubmatrixSpec(6, 3, 4)
    assert_array_equal(shift_to_B(spec), build_A(spec))
    assert_allclose(shift_to_B(SubmatrixSpec(4, 2, 2, 2, 1)), [[1, -1j], [1, -1]], atol=1e-16)
    assert_allclose(shift_to_B(SubmatrixSpec(4, 2, 2, 4, 4)), [[-1j, 1], [1, 1]], atol=1e-16)


@pytest.mark.parametrize("N", [5, 8])
def test_shift_identity_on_grid(N):
    w = twiddle(N)
    for p, q in ((2, 3), (N, 1), (3, N)):
        A = build_A(SubmatrixSpec(N, p, q))
        for j0 in range(1, N + 1):
            for k0 in range(1, N + 1):
                B = shift_to_B(SubmatrixSpec(N, p, q, j0, k0), check=False)
                ref = (w ** (-(j0 - 1) * (k0 - 1))) * diag_D(p, N, k0 - 1)[:, None] * A \
                    * diag_D(q, N, j0 - 1)[None, :]
                assert np.max(np.abs(B - ref)) <= 1e-12
                assert_allclose(B, dft_block(N, p, q, j0, k0), atol=1e-12)


def test_build_C_examples():
    for N in (1, 5, 9):
        assert_array_equal(build_C(SubmatrixSpec(N, 1, 1)), [[1]])
    C = build_C(SubmatrixSpec(4, 2, 2))
    assert_allclose(C[0, 0], cmath.exp(-1j * math.pi / 8), atol=1e-16)


@pytest.mark.parametrize("N,p,q", [(4, 2, 2), (7, 3, 5), (12, 12, 5), (16, 9, 16), (10, 4, 4)])
def test_C_round_trip_to_A(N, p, q):
    spec = SubmatrixSpec(N, p, q)
    C = build_C(spec)
    scalar = cmath.exp(2j * math.pi * ((p - 1) * (q - 1) / 4) / N)
    back = scalar * diag_D(p, N, (q - 1) / 2)[:, None] * C * diag_D(q, N, (p - 1) / 2)[None, :]
    assert np.max(np.abs(back - build_A(spec))) <= 1e-13


def test_diag_D_examples():
    assert_array_equal(diag_D(5, 7, 0), np.ones(5))
    assert_allclose(diag_D(2, 4, 1), [1, -1j], atol=0)
    half = diag_D(6, 9, 0.5)
    assert_allclose(half ** 2, diag_D(6, 9, 1), atol=1e-15)
    assert_allclose(half, np.exp(-1j * np.pi * np.arange(6) / 9), atol=1e-15)


def test_build_S_examples():
    assert_allclose(build_S(2, 2, 4), [[2, math.sqrt(2)], [math.sqrt(2), 2]], atol=1e-15)
    for p, q, N in ((1, 3, 5), (4, 7, 9), (9, 9, 9)):
        assert_array_equal(np.diag(build_S(p, q, N)), p)


@pytest.mark.parametrize("N,p,q", [(N, p, q) for (N, p, q) in GRID if N in (7, 12)])
def test_S_is_gram_of_C(N, p, q):
    C = build_C(SubmatrixSpec(N, p, q))
    G = C.conj().T @ C
    assert np.max(np.abs(G.real - build_S(p, q, N))) <= 1e-12
    assert np.max(np.abs(G.imag)) <= 1e-12
    G2 = C @ C.conj().T
    assert np.max(np.abs(G2.real - build_S(q, p, N))) <= 1e-12


@pytest.mark.parametrize("N", range(1, 65))
def test_full_width_S_is_scaled_projection(N):
    for p in range(1, N + 1):
        S = build_S(p, N, N)
        assert np.max(np.abs(S @ S - N * S)) <= 1e-9 * N


def test_build_J_examples():
    J = build_J(2, 2, 4)
    assert_allclose(J.diag, [0, 0], atol=1e-16)
    assert_allclose(J.offdiag, [-0.5], atol=1e-16)
    for p, N in ((1, 1), (3, 7), (5, 5)):
        J1 = build_J(p, 1, N)
        assert J1.offdiag.size == 0
        assert J1.diag[0] == pytest.approx(math.cos(p * math.pi / N), abs=1e-16)


@pytest.mark.parametrize("N,p,q", [(N, p, q) for (N, p, q) in GRID if N in (8, 16)])
def test_J_commutes_with_S(N, p, q):
    for a, b in ((p, q), (q, p)):
        J = build_J(a, b, N).dense()
        S = build_S(a, b, N)
        assert np.max(np.abs(J @ S - S @ J)) <= 1e-11 * max(p, q)


def test_J_formula_and_centered_shift():
    N, p, q = 13, 5, 7
    k = np.arange(1, q + 1)
    J = build_J(p, q, N)
    assert_allclose(J.diag, np.cos(np.pi * (2 * k - q - 1) / N) * np.cos(p * np.pi / N), atol=1e-15)
    kk = np.arange(1, q)
    assert_allclose(J.offdiag, -np.sin(np.pi * kk / N) * np.sin(np.pi * (q - kk) / N), atol=1e-15)
    Jc = build_J(p, q, N, centered=True)
    assert_allclose(Jc.diag + math.cos(p * math.pi / N), J.diag, atol=1e-15)
    assert_array_equal(Jc.offdiag, J.offdiag)


def test_J_offdiagonal_nonzero():
    for N in range(2, 40):
        for q in range(2, N + 1):
            assert np.min(np.abs(build_J(1, q, N).offdiag)) > 0


@pytest.mark.parametrize("args", [(4, 0, 1), (4, 1, 0), (4, 5, 1), (4, 1, 5), (0, 1, 1), (4, 1, 1, 0, 1), (4, 1, 1, 1, 5)])
def test_spec_validation(args):
    with pytest.raises(InvalidArgumentError):
        SubmatrixSpec(*args)


def test_spec_helpers():
    s = SubmatrixSpec(10, 3, 7, 4, 2)
    assert s.r == 3 and not s.is_origin
    assert s.at_origin() == SubmatrixSpec(10, 3, 7)
    t = s.transposed()
    assert (t.p, t.q) == (7, 3)
