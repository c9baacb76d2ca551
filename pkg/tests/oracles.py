"""Independent reference implementations used only by the tests.

Nothing here imports the package: these are the brute-force oracles the
library is checked against.
"""

import numpy as np


def dft_block(N, p, q, j0=1, k0=1):
    """p x q block of the N-point DFT matrix by direct exponentiation."""
    j = (j0 - 1 + np.arange(p)) % N
    k = (k0 - 1 + np.arange(q)) % N
    return np.exp(-2j * np.pi * (np.outer(j, k) % N) / N)


def direct_dft(x):
    """O(n^2) summation X_k = sum_n x_n exp(-2 pi i k n / n_len), along axis 0."""
    x = np.asarray(x, dtype=complex)
    n = x.shape[0]
    W = np.exp(-2j * np.pi * (np.outer(np.arange(n), np.arange(n)) % n) / n)
    return W @ x


def _round_robin(n):
    # pairings of n (even) players such that every pair meets once
    players = list(range(n))
    rounds = []
    for _ in range(n - 1):
        rounds.append([(players[i], players[n - 1 - i]) for i in range(n // 2)])
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def jacobi_singular_values(A, tol=1e-15, max_sweeps=60):
    """Singular values of a complex matrix by one-sided (Hestenes) Jacobi.

    Columns are orthogonalized by plane rotations; disjoint column pairs
    are rotated together in round-robin order.  Returns the values in
    descending order, ``min(p, q)`` of them.
    """
    A = np.array(A, dtype=complex)
    if A.shape[0] < A.shape[1]:
        A = A.conj().T
    q = A.shape[1]
    if q % 2:
        A = np.hstack((A, np.zeros((A.shape[0], 1), dtype=complex)))
    n = A.shape[1]
    rounds = [np.array(r).T for r in _round_robin(n)] if n > 1 else []
    for _ in range(max_sweeps):
        rotated = False
        for I, K in rounds:
            ai, ak = A[:, I], A[:, K]
            alpha = np.sum(np.abs(ai) ** 2, axis=0)
            beta = np.sum(np.abs(ak) ** 2, axis=0)
            gamma = np.sum(ai.conj() * ak, axis=0)
            g = np.abs(gamma)
            act = g > tol * np.sqrt(alpha * beta)
            if not act.any():
                continue
            rotated = True
            g_safe = np.where(act, g, 1.0)
            phase = np.where(act, gamma / g_safe, 1.0)
            zeta = (beta - alpha) / (2.0 * g_safe)
            t = np.where(zeta >= 0, 1.0, -1.0) / (np.abs(zeta) + np.sqrt(1.0 + zeta * zeta))
            t = np.where(act, t, 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = c * t
            ak = ak * np.conj(phase)
            A[:, I] = c * ai - s * ak
            A[:, K] = (s * ai + c * ak) * phase
        if not rotated:
            break
    sig = np.sqrt(np.sum(np.abs(A) ** 2, axis=0))
    return np.sort(sig)[::-1][:q]
