"""Lattice reduction and integer-forcing recovery of folded measurements.

Given the covariance M of a real stacked measurement vector, the decoder
wants an invertible integer matrix A whose rows all have small quadratic
form a^T M a: applying A to folded samples then keeps every combined
coordinate inside the fold window with high probability, so the fold can
be removed coordinate by coordinate and inverted.  Minimizing the largest
row form over unimodular A is NP-hard; this module uses LLL reduction of
a Cholesky factor of M followed by a determinant-preserving descent on
the largest form.

The unimodular transform and its inverse are carried in exact integer
arithmetic (int64 with an overflow guard, arbitrary-precision objects as
a fallback) so A * A^-1 = I holds exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .covariance import RealCompositeCovariance

__all__ = [
    "LatticeBasis",
    "IFMatrix",
    "lll_reduce",
    "solve_if_matrix",
    "if_decode",
    "stack_real",
    "unstack_real",
]

_INT64_LIMIT = 2**52  # keep integer entries exactly representable as floats
_RED_LIMIT = 2**40


class _IntegerOverflow(RuntimeError):
    pass


@dataclass(frozen=True)
class LatticeBasis:
    """Real matrix whose columns generate a lattice; full column rank."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] < m.shape[1]:
            raise ValueError("basis must have at least as many rows as columns")
        if np.linalg.matrix_rank(m) < m.shape[1]:
            raise ValueError("basis columns are linearly dependent")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True)
class IFMatrix:
    """Integer-forcing matrix: rows are the integer combination vectors.

    ``a_inv`` is the exact integer inverse evaluated in floating point
    (A is unimodular, so its inverse is again integer).  ``objective`` is
    the largest row form a^T M a achieved against the covariance the
    matrix was solved for.
    """

    a: np.ndarray
    a_inv: np.ndarray
    objective: float

    def __post_init__(self) -> None:
        a = np.asarray(self.a)
        inv = np.asarray(self.a_inv, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or inv.shape != a.shape:
            raise ValueError("A and its inverse must be square and same-shaped")
        det = abs(np.linalg.det(inv))
        if not 0.5 < det < 2.0:
            raise ValueError("A is not unimodular")
        resid = np.abs(a.astype(np.float64) @ inv - np.eye(a.shape[0])).max()
        if resid > 1e-8:
            raise ValueError("a_inv is not the inverse of a")
        if not self.objective > 0:
            raise ValueError("objective must be positive")
        af = a.astype(np.float64)
        if np.abs(af - np.round(af)).max() > 0:
            raise ValueError("A must be integer")
        a.flags.writeable = False
        inv.flags.writeable = False
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "a_inv", inv)

    @property
    def dim(self) -> int:
        return self.a.shape[0]


def _full_gso(b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Gram-Schmidt coefficients mu and squared norms of the columns of b."""
    n, m = b.shape
    mu = np.zeros((m, m))
    bstar = np.zeros((n, m))
    bstar_sq = np.zeros(m)
    for i in range(m):
        v = b[:, i].copy()
        for j in range(i):
            mu[i, j] = (b[:, i] @ bstar[:, j]) / bstar_sq[j]
            v -= mu[i, j] * bstar[:, j]
        bstar[:, i] = v
        bstar_sq[i] = v @ v
        if bstar_sq[i] <= 0.0:
            raise ValueError("basis columns are linearly dependent")
    return mu, bstar_sq


def _lll_core(
    basis: np.ndarray,
    delta: float,
    int_dtype,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Column LLL with exact unimodular bookkeeping.

    Returns (u, uinv, b_work) with basis @ u == b_work LLL-reduced and
    uinv the exact inverse of u.
    """
    b = np.array(basis, dtype=np.float64, order="F")
    m = b.shape[1]
    u = np.eye(m, dtype=int_dtype)
    uinv = np.eye(m, dtype=int_dtype)
    mu, bstar_sq = _full_gso(b)

    def reduce_col(k: int, j: int) -> None:
        q = mu[k, j]
        if abs(q) <= 0.5:
            return
        r = round(q)
        if abs(r) > _RED_LIMIT:
            raise _IntegerOverflow
        b[:, k] -= r * b[:, j]
        u[:, k] -= r * u[:, j]
        uinv[j, :] += r * uinv[k, :]
        mu[k, :j] -= r * mu[j, :j]
        mu[k, j] -= r

    swaps = 0
    refresh = max(4 * m * m, 256)
    k = 1
    while k < m:
        reduce_col(k, k - 1)
        if bstar_sq[k] < (delta - mu[k, k - 1] ** 2) * bstar_sq[k - 1]:
            b[:, [k - 1, k]] = b[:, [k, k - 1]]
            u[:, [k - 1, k]] = u[:, [k, k - 1]]
            uinv[[k - 1, k], :] = uinv[[k, k - 1], :]
            mu_old = mu[k, k - 1]
            big = bstar_sq[k] + mu_old * mu_old * bstar_sq[k - 1]
            mu[k, k - 1] = mu_old * bstar_sq[k - 1] / big
            bstar_sq[k] = bstar_sq[k - 1] * bstar_sq[k] / big
            bstar_sq[k - 1] = big
            mu[[k - 1, k], : k - 1] = mu[[k, k - 1], : k - 1]
            if k + 1 < m:
                t = mu[k + 1 :, k].copy()
                mu[k + 1 :, k] = mu[k + 1 :, k - 1] - mu_old * t
                mu[k + 1 :, k - 1] = t + mu[k, k - 1] * mu[k + 1 :, k]
            swaps += 1
            if swaps % refresh == 0:
                mu, bstar_sq = _full_gso(b)  # shed accumulated float drift
            k = max(k - 1, 1)
        else:
            for j in range(k - 2, -1, -1):
                reduce_col(k, j)
            k += 1

    if int_dtype is not object:
        worst = max(int(np.abs(u).max()), int(np.abs(uinv).max()))
        if worst > _INT64_LIMIT:
            raise _IntegerOverflow
    return u, uinv, b


def _lll_with_fallback(basis, delta):
    try:
        return _lll_core(basis, delta, np.int64)
    except _IntegerOverflow:
        return _lll_core(basis, delta, object)


def lll_reduce(basis, delta: float = 0.75) -> tuple[np.ndarray, np.ndarray]:
    """LLL-reduce the columns of ``basis``.

    Parameters
    ----------
    basis : ndarray or LatticeBasis
        Real matrix with full column rank; columns generate the lattice.
    delta : float
        Lovasz parameter, 0.25 < delta < 1.

    Returns
    -------
    reduced : ndarray
        ``basis @ unimodular``, size-reduced and Lovasz-reduced.
    unimodular : ndarray of int64
        Exact integer transform with determinant +-1.
    """
    if isinstance(basis, LatticeBasis):
        basis = basis.matrix
    basis = np.asarray(basis, dtype=np.float64)
    if basis.ndim != 2 or basis.shape[0] < basis.shape[1]:
        raise ValueError("basis must have at least as many rows as columns")
    if not 0.25 < delta < 1.0:
        raise ValueError("delta must lie in (0.25, 1)")
    u, _, _ = _lll_with_fallback(basis, delta)
    u_float = u.astype(np.float64)
    return basis @ u_float, u


def _polish_max_form(a, ainv, gram, max_moves: int = 400):
    """Greedy determinant-preserving reduction of the largest row form.

    Repeatedly rewrites the currently worst row a_k as a_k - r*a_j when
    that strictly lowers its form under the Gram matrix.  Each move is a
    unimodular row operation, mirrored on the inverse.
    """
    for _ in range(max_moves):
        forms = np.diag(gram)
        k = int(np.argmax(forms))
        gk = gram[k]
        denom = forms.copy()
        denom[k] = forms[k]  # self-move excluded below
        r = np.round(gk / denom)
        r[k] = 0.0
        cand = forms[k] - 2.0 * r * gk + r * r * denom
        cand[r == 0] = np.inf
        j = int(np.argmin(cand))
        if not cand[j] < forms[k] * (1.0 - 1e-12):
            break
        rj = int(r[j])
        if abs(rj) > _RED_LIMIT:
            break
        a[k, :] -= rj * a[j, :]
        ainv[:, j] += rj * ainv[:, k]
        gram[k, :] -= rj * gram[j, :]
        gram[:, k] -= rj * gram[:, j]
    return a, ainv, gram


def solve_if_matrix(
    cov: RealCompositeCovariance,
    quant_noise_var: float = 0.0,
    *,
    delta: float = 0.75,
) -> IFMatrix:
    """Search for a unimodular A minimizing the largest row form.

    Forms M = cov + quant_noise_var * I, factors M = F^T F, LLL-reduces
    the columns of F, then runs a greedy descent on the largest row form.
    Rows of the returned matrix are sorted by ascending form.  Falls back
    to the identity whenever the search fails to beat it.

    Raises
    ------
    ValueError
        If M has no Cholesky factor; project the covariance to the PSD
        cone first.
    """
    if quant_noise_var < 0:
        raise ValueError("quantization noise variance must be non-negative")
    m_mat = cov.matrix + quant_noise_var * np.eye(cov.dim)
    try:
        chol = np.linalg.cholesky(m_mat)
    except np.linalg.LinAlgError as exc:
        raise ValueError(
            "covariance plus noise term is not positive definite; "
            "apply psd_project before solving"
        ) from exc
    basis = chol.T  # upper-triangular F with F^T F = M
    u, uinv, _ = _lll_with_fallback(basis, delta)

    a = np.ascontiguousarray(u.T)
    ainv = np.ascontiguousarray(uinv.T)  # columns mirror row ops on a
    a_float = a.astype(np.float64)
    gram = a_float @ m_mat @ a_float.T
    gram = 0.5 * (gram + gram.T)
    a, ainv, gram = _polish_max_form(a, ainv, gram)

    order = np.argsort(np.diag(gram), kind="stable")
    a = a[order, :]
    ainv = ainv[:, order]
    objective = float(np.diag(gram)[order][-1])

    identity_objective = float(np.max(np.diag(m_mat)))
    if objective > identity_objective:
        eye = np.eye(cov.dim, dtype=np.int64)
        return IFMatrix(a=eye, a_inv=np.eye(cov.dim), objective=identity_objective)
    if a.dtype == object and max(int(np.abs(a).max()), int(np.abs(ainv).max())) <= _INT64_LIMIT:
        a = a.astype(np.int64)
        ainv = ainv.astype(np.int64)
    return IFMatrix(
        a=a,
        a_inv=ainv.astype(np.float64),
        objective=objective,
    )


def if_decode(y_bar: np.ndarray, if_matrix: IFMatrix, fold_range: float) -> np.ndarray:
    """Integer-forcing unfold: A^-1 fold(A y) over the given window.

    ``y_bar`` is a stacked real vector (or a matrix of such columns) of
    folded measurements.  Recovery is exact, up to the quantization error
    already present in y, whenever every row combination of the unfolded
    signal stays inside [-fold_range, fold_range).
    """
    from .quantizers import modulo_fold

    y = np.asarray(y_bar, dtype=np.float64)
    if y.shape[0] != if_matrix.dim:
        raise ValueError("measurement dimension does not match the IF matrix")
    mixed = if_matrix.a.astype(np.float64) @ y
    return if_matrix.a_inv @ modulo_fold(mixed, fold_range)


def stack_real(z: np.ndarray) -> np.ndarray:
    """Stack a complex vector or matrix into real [Re; Im] coordinates."""
    z = np.asarray(z, dtype=np.complex128)
    return np.concatenate([z.real, z.imag], axis=0)


def unstack_real(x: np.ndarray) -> np.ndarray:
    """Inverse of stack_real."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] % 2 != 0:
        raise ValueError("stacked vector must have even leading dimension")
    n = x.shape[0] // 2
    return x[:n] + 1j * x[n:]
