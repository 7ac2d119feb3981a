"""Dense linear algebra over the prime fields GF(p).

Matrices are numpy int64 arrays with entries reduced mod p, and subspaces are
row spans. Elimination keeps everything in exact integer arithmetic; scalar
inverses use Fermat's little theorem.
"""

from __future__ import annotations

import numpy as np


def inv_mod(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError(f"0 is not invertible mod {p}")
    return pow(a, p - 2, p)


def as_matrix(rows, p: int, width: int | None = None) -> np.ndarray:
    """Coerce to a 2-d int64 array reduced mod p; empty input needs a width."""
    a = np.array(rows, dtype=np.int64)
    if a.size == 0:
        if width is None:
            raise ValueError("empty matrix needs an explicit width")
        return np.zeros((0, width), dtype=np.int64)
    if a.ndim == 1:
        a = a[None, :]
    if a.ndim != 2:
        raise ValueError("matrix must be 2-dimensional")
    return a % p


def rref(mat, p: int) -> tuple[np.ndarray, tuple[int, ...]]:
    """Reduced row echelon form over GF(p). Returns (R, pivot_columns)."""
    a = np.array(mat, dtype=np.int64) % p
    nrows, ncols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        a[r] = (a[r] * inv_mod(int(a[r, c]), p)) % p
        rest = np.nonzero(a[:, c])[0]
        rest = rest[rest != r]
        if rest.size:
            a[rest] = (a[rest] - np.outer(a[rest, c], a[r])) % p
        pivots.append(c)
        r += 1
    return a, tuple(pivots)


def rank(mat, p: int) -> int:
    return len(rref(mat, p)[1])


def row_basis(mat, p: int) -> np.ndarray:
    """Canonical basis of the row space: the nonzero rows of the rref."""
    r, piv = rref(mat, p)
    return r[: len(piv)].copy()


def nullspace(mat, p: int) -> np.ndarray:
    """Rows spanning the right kernel {x : mat @ x == 0 mod p}."""
    a = np.asarray(mat, dtype=np.int64)
    r, piv = rref(a, p)
    ncols = a.shape[1]
    pivot_set = set(piv)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = np.zeros((len(free), ncols), dtype=np.int64)
    for i, c in enumerate(free):
        basis[i, c] = 1
        for row, pc in enumerate(piv):
            basis[i, pc] = (-int(r[row, c])) % p
    return basis


def reduce_rows(basis_rref: np.ndarray, pivots, rows, p: int) -> np.ndarray:
    """Residuals of rows after elimination against rref basis rows."""
    v = np.array(rows, dtype=np.int64) % p
    single = v.ndim == 1
    if single:
        v = v[None, :]
    for row, c in enumerate(pivots):
        hit = v[:, c] != 0
        if hit.any():
            v[hit] = (v[hit] - np.outer(v[hit, c], basis_rref[row])) % p
    return v[0] if single else v


def in_row_span(basis_rref: np.ndarray, pivots, vec, p: int) -> bool:
    return not reduce_rows(basis_rref, pivots, vec, p).any()


def matmul(a, b, p: int) -> np.ndarray:
    return (np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64)) % p


def nilpotent_block_sizes(a: np.ndarray, p: int) -> tuple[int, ...]:
    """Jordan block sizes of a nilpotent matrix over GF(p), descending.

    Uses the rank sequence: blocks of size >= k number rank(a^(k-1)) - rank(a^k).
    """
    dim = a.shape[0]
    if dim == 0:
        return ()
    ranks = [dim]
    power = a % p
    while ranks[-1] > 0:
        ranks.append(rank(power, p))
        if len(ranks) > dim + 1:
            raise ValueError("matrix is not nilpotent")
        power = matmul(power, a, p)
    at_least = [ranks[k - 1] - ranks[k] for k in range(1, len(ranks))]
    at_least.append(0)
    sizes: list[int] = []
    for k in range(len(at_least) - 1, 0, -1):
        sizes.extend([k] * (at_least[k - 1] - at_least[k]))
    return tuple(sorted(sizes, reverse=True))
