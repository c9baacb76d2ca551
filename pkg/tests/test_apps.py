import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from fouriersvd import (
    InvalidArgumentError,
    SubmatrixSpec,
    band_energy,
    cond_heatmap,
    condition_number,
    hadamard_H,
    hadamard_rank_profile,
    localization,
    svd,
)
from fouriersvd.apps import (
    LOG_FLOOR,
    demodulated_band_half_width,
    demodulated_factors,
    literal_band_half_width,
)
from fouriersvd.fourier_ops import columnwise_fft
from oracles import dft_block, jacobi_singular_values

EPS = np.finfo(float).eps


def exact_log10_cond(N, p, q, dps=50):
    mp = pytest.importorskip("mpmath")
    mp.mp.dps = dps
    A = mp.matrix(p, q)
    for j in range(p):
        for k in range(q):
            A[j, k] = mp.expjpi(mp.mpf(-2 * ((j * k) % N)) / N)
    s = [abs(x) for x in mp.svd_c(A, compute_uv=False)]
    return float(mp.log10(max(s) / min(s)))


def test_cond_closed_forms():
    for N in (1, 4, 16, 33):
        res = condition_number(SubmatrixSpec(N, N, N))
        assert res.log10_cond == pytest.approx(0, abs=1e-13)
        assert not res.overflow and not res.estimated
    res = condition_number(SubmatrixSpec(4, 2, 2))
    assert res.sigma_max / res.sigma_min == pytest.approx(1 + math.sqrt(2), rel=1e-14)
    assert res.log10_cond == pytest.approx(math.log10(1 + math.sqrt(2)), abs=1e-14)
    one = condition_number(SubmatrixSpec(9, 1, 5))
    assert one.log10_cond == 0 and one.sigma_max == pytest.approx(math.sqrt(5))


@pytest.mark.parametrize("N", [8, 12, 16])
def test_linear_matches_full_and_oracle(N):
    for p in range(1, N + 1):
        for q in range(1, N + 1):
            spec = SubmatrixSpec(N, p, q)
            lin = condition_number(spec)
            full = condition_number(spec, method="full")
            assert lin.sigma_max >= lin.sigma_min >= 0
            if not lin.overflow:
                assert abs(lin.log10_cond - full.log10_cond) <= 1e-6 * max(1.0, abs(full.log10_cond))
            s = jacobi_singular_values(dft_block(N, p, q))
            if s[-1] >= 1e-6 * s[0]:
                assert lin.log10_cond == pytest.approx(math.log10(s[0] / s[-1]), abs=1e-6)


def test_cond_ignores_origin():
    a = condition_number(SubmatrixSpec(20, 7, 9))
    b = condition_number(SubmatrixSpec(20, 7, 9, 5, 13))
    c = condition_number(SubmatrixSpec(20, 9, 7))
    assert a.log10_cond == b.log10_cond == c.log10_cond


@pytest.mark.parametrize(
    "N,p,q",
    [(48, 24, 24), (64, 32, 32), (64, 33, 32), (64, 38, 34), (64, 39, 32), (64, 37, 35), (64, 30, 26)],
)
def test_extrapolated_cond_against_high_precision(N, p, q):
    res = condition_number(SubmatrixSpec(N, p, q))
    assert res.estimated
    assert res.log10_cond == pytest.approx(exact_log10_cond(N, p, q), abs=0.1)


def test_cond_overflow_flag():
    res = condition_number(SubmatrixSpec(256, 128, 128))
    assert res.overflow and res.estimated
    assert res.log10_cond > -math.log10(EPS)
    assert res.sigma_max >= res.sigma_min >= 0
    # the p = q = N/2 block at N = 256 sits near 1.5e63
    assert 62 < res.log10_cond < 64
    mid = condition_number(SubmatrixSpec(64, 32, 32))
    assert not mid.overflow and mid.estimated


def test_cond_invalid_method():
    with pytest.raises(InvalidArgumentError):
        condition_number(SubmatrixSpec(8, 2, 2), method="svd")


@pytest.mark.parametrize("N", [16, 32, 64])
def test_heatmap_symmetry_and_corner(N):
    grid = cond_heatmap(N, threads=1)
    assert grid.values.shape == (N, N)
    assert grid.values[N - 1, N - 1] == pytest.approx(0, abs=1e-13)
    assert np.max(np.abs(grid.values - grid.values.T)) <= 1e-6
    assert_array_equal(grid.overflow, grid.overflow.T)
    assert not grid.values.flags.writeable
    assert np.all(np.isfinite(grid.values)) and np.all(grid.values >= -1e-13)
    if N == 64:
        assert np.unravel_index(np.argmax(grid.values), grid.values.shape) == (31, 31)


def test_heatmap_workers_do_not_change_result():
    a = cond_heatmap(20, threads=1)
    b = cond_heatmap(20, threads=2)
    assert a.values.tobytes() == b.values.tobytes()
    assert_array_equal(a.overflow, b.overflow)


def test_heatmap_masked_and_validation():
    grid = cond_heatmap(8)
    assert np.all(np.isfinite(grid.masked()))
    with pytest.raises(InvalidArgumentError):
        cond_heatmap(0)
    with pytest.raises(InvalidArgumentError):
        cond_heatmap(4, threads=0)


def test_hadamard_small_and_identity():
    G, H = hadamard_H(1)
    assert_array_equal(G, [[1]])
    assert_array_equal(H, [[1]])
    for N in (2, 7, 32, 100, 128, 512):
        G, H = hadamard_H(N)
        F = dft_block(N, N, N)
        assert np.max(np.abs(F - G * H)) <= 1e-13
        assert np.max(np.abs(G - F * np.conj(H))) <= 1e-13
        assert_allclose(G, dft_block(N + 1, N, N), atol=1e-13)
        assert_allclose(H, dft_block(N * (N + 1), N, N), atol=1e-13)


def test_hadamard_profile():
    for N in (32, 64, 128):
        sigma, count = hadamard_rank_profile(N, 0.5)
        assert count <= 2 * math.log2(N) + 4
        assert np.all(np.diff(sigma) <= 0)
        assert sigma[0] <= math.sqrt(N * (N + 1))
    sigma, _ = hadamard_rank_profile(32, 0.5)
    ref = jacobi_singular_values(dft_block(32 * 33, 32, 32))
    big = ref >= 1e-8 * math.sqrt(32 * 33)
    assert np.max(np.abs(sigma - ref)[big]) <= 1e-10 * math.sqrt(32 * 33)


def test_hadamard_no_plateau():
    for N in (128, 512):
        sigma, _ = hadamard_rank_profile(N, 0.5)
        assert sigma[0] / math.sqrt(N * (N + 1)) < 1


def test_hadamard_count_monotone():
    counts = [hadamard_rank_profile(64, t)[1] for t in (0.01, 0.1, 0.3, 0.5, 0.9, 0.99)]
    assert all(a >= b for a, b in zip(counts, counts[1:]))


@pytest.mark.parametrize("t", [0.0, 1.0, -0.1, 2.0])
def test_hadamard_threshold_validation(t):
    with pytest.raises(InvalidArgumentError):
        hadamard_rank_profile(8, t)


def test_localization_maps():
    spec = SubmatrixSpec(60, 20, 12)
    maps = localization(spec)
    assert maps.leftMap.shape == (20, 12) and maps.rightMap.shape == (12, 12)
    for M in (maps.leftMap, maps.rightMap):
        assert np.all(np.isfinite(M)) and M.min() >= LOG_FLOOR
    res = svd(spec)
    assert_allclose(maps.rightMap, np.maximum(np.log10(np.abs(columnwise_fft(res.V))), -16))


def test_localization_full_block_concentration():
    # U holds unit DFT columns, so each column of F U has one entry sqrt(N)
    for N in (8, 16, 17):
        for strategy in ("fft", "projection"):
            res = svd(SubmatrixSpec(N, N, N), strategy=strategy)
            mags = np.abs(columnwise_fft(res.U))
            top = np.sort(mags, axis=0)[::-1]
            assert_allclose(top[0], math.sqrt(N), rtol=1e-10)
            assert np.all(top[1:] <= 1e-10 * N)
            assert_allclose(np.sum(mags**2, axis=0), N, rtol=1e-12)
            assert_allclose(np.abs(columnwise_fft(res.V)), 1.0, rtol=1e-12)


def test_localization_clamps_zeros():
    maps = localization(SubmatrixSpec(8, 8, 8))
    assert maps.leftMap.min() == LOG_FLOOR


def test_band_energy_basics():
    d = 10
    x = np.zeros((d, 2), dtype=complex)
    x[0, 0] = 1  # flat spectrum
    x[:, 1] = 1  # all energy at frequency 0
    e = band_energy(x, 1)
    assert_allclose(e, [3 / d, 1.0])
    assert_allclose(band_energy(x, 5), [1.0, 1.0])
    shifted = np.exp(2j * np.pi * 3 * np.arange(d) / d)
    assert_allclose(band_energy(shifted, 0, center=3), [1.0], atol=1e-14)
    assert_allclose(band_energy(shifted, 2), [0.0], atol=1e-14)
    with pytest.raises(InvalidArgumentError):
        band_energy(x, -1)


def test_band_half_widths():
    assert literal_band_half_width(50, 200) == 7
    assert literal_band_half_width(100, 200) == 25
    assert demodulated_band_half_width(SubmatrixSpec(200, 100, 50)) == 13


def test_demodulated_three_regimes():
    spec = SubmatrixSpec(200, 100, 50)
    res = svd(spec)
    Ud, Vd = demodulated_factors(spec, res.U, res.V)
    h = demodulated_band_half_width(spec)
    center, w = spec.p * spec.q / spec.N, 8
    k = np.arange(1, spec.r + 1)
    plateau = k <= math.floor(center) - w
    tail = k >= math.ceil(center) + w
    for M in (Ud, Vd):
        e = band_energy(M, h)
        assert e[plateau].min() >= 0.9
        assert e[tail].max() <= 0.1
        cross = np.nonzero(e < 0.5)[0][0] + 1
        assert center - w < cross < center + w
        assert_allclose(np.sum(np.abs(columnwise_fft(M)) ** 2, axis=0), M.shape[0], rtol=1e-10)


def test_demodulation_needs_origin():
    spec = SubmatrixSpec(20, 5, 5, 2, 1)
    with pytest.raises(InvalidArgumentError):
        demodulated_factors(spec, np.eye(5), np.eye(5))
