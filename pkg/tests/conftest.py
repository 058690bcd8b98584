"""Shared oracle helpers: exact integer determinants, reference GSO, and
brute-force shortest-vector search used to validate the lattice code."""

from __future__ import annotations

import itertools

import numpy as np


def bareiss_det(mat) -> int:
    """Exact determinant of an integer matrix via fraction-free elimination."""
    a = [[int(x) for x in row] for row in np.asarray(mat)]
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("matrix must be square")
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            pivot = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if pivot is None:
                return 0
            a[k], a[pivot] = a[pivot], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def reference_gso(basis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Classic Gram-Schmidt over the columns; returns (mu, sq_norms)."""
    b = np.asarray(basis, dtype=np.float64)
    m = b.shape[1]
    mu = np.eye(m)
    bstar = np.zeros_like(b)
    sq = np.zeros(m)
    for j in range(m):
        v = b[:, j].copy()
        for i in range(j):
            mu[j, i] = float(b[:, j] @ bstar[:, i]) / sq[i]
            v -= mu[j, i] * bstar[:, i]
        bstar[:, j] = v
        sq[j] = float(v @ v)
    return mu, sq


def assert_lll_reduced(basis: np.ndarray, delta: float, tol: float = 1e-9) -> None:
    """Check size reduction and the Lovasz condition on every column."""
    mu, sq = reference_gso(basis)
    m = basis.shape[1]
    for j in range(m):
        for i in range(j):
            assert abs(mu[j, i]) <= 0.5 + tol, (j, i, mu[j, i])
    for k in range(1, m):
        lhs = sq[k]
        rhs = (delta - mu[k, k - 1] ** 2) * sq[k - 1]
        assert lhs >= rhs - tol * max(1.0, sq[k - 1]), (k, lhs, rhs)


def brute_min_norm(basis: np.ndarray, radius: int = 3) -> float:
    """Shortest nonzero vector norm over integer coefficients in a box.

    An upper bound on the true lattice minimum; on LLL-reduced input at
    small dimension the box contains the optimum in practice.
    """
    b = np.asarray(basis, dtype=np.float64)
    m = b.shape[1]
    best = np.inf
    for coeff in itertools.product(range(-radius, radius + 1), repeat=m):
        if not any(coeff):
            continue
        v = b @ np.asarray(coeff, dtype=np.float64)
        best = min(best, float(v @ v))
    return np.sqrt(best)


def exact_inverse_check(a: np.ndarray, a_inv: np.ndarray) -> None:
    """Verify a_inv is the exact integer inverse of unimodular integer a."""
    n = a.shape[0]
    assert np.array_equal(a_inv, np.round(a_inv)), "inverse of a unimodular matrix must be integer"
    prod = [[sum(int(a[i, k]) * int(round(float(a_inv[k, j]))) for k in range(n)) for j in range(n)] for i in range(n)]
    assert prod == [[int(i == j) for j in range(n)] for i in range(n)], "a @ a_inv must be identity"
