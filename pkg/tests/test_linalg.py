import numpy as np
import pytest

from fpmods import linalg


def naive_rank(mat, p):
    """Rank by enumerating row-space combinations; tiny matrices only."""
    import itertools

    rows = [tuple(r % p) for r in np.atleast_2d(np.asarray(mat, dtype=np.int64))]
    span = set()
    for combo in itertools.product(range(p), repeat=len(rows)):
        vec = tuple(
            sum(c * r[j] for c, r in zip(combo, rows)) % p for j in range(len(rows[0]))
        )
        span.add(vec)
    size = len(span)
    k = 0
    while p**k < size:
        k += 1
    return k


def test_rref_reproduces_row_space():
    rng = np.random.default_rng(1)
    for _ in range(50):
        p = int(rng.choice([3, 5, 7]))
        mat = rng.integers(0, p, size=(3, 4))
        r, piv = linalg.rref(mat, p)
        assert linalg.rank(mat, p) == naive_rank(mat, p)
        assert len(piv) == linalg.rank(mat, p)
        # pivot columns are unit columns
        for row, c in enumerate(piv):
            col = r[:, c]
            assert col[row] == 1 and (np.delete(col, row) == 0).all()


def test_rref_idempotent_and_canonical():
    rng = np.random.default_rng(2)
    for _ in range(30):
        p = 5
        mat = rng.integers(0, p, size=(4, 5))
        basis = linalg.row_basis(mat, p)
        again = linalg.row_basis(basis, p)
        assert (basis == again).all()
        # shuffling rows does not change the canonical basis
        perm = rng.permutation(mat.shape[0])
        assert (linalg.row_basis(mat[perm], p) == basis).all()


def test_nullspace_annihilates_and_has_complementary_dim():
    rng = np.random.default_rng(3)
    for _ in range(40):
        p = int(rng.choice([3, 5]))
        mat = rng.integers(0, p, size=(3, 6))
        ns = linalg.nullspace(mat, p)
        assert ns.shape[0] == 6 - linalg.rank(mat, p)
        assert not ((mat @ ns.T) % p).any()
        assert linalg.rank(ns, p) == ns.shape[0]


def test_nullspace_of_empty_constraints_is_everything():
    empty = np.zeros((0, 4), dtype=np.int64)
    ns = linalg.nullspace(empty, 3)
    assert ns.shape == (4, 4)
    assert linalg.rank(ns, 3) == 4


def test_reduce_rows_membership():
    p = 3
    mat = np.array([[1, 0, 2], [0, 1, 1]], dtype=np.int64)
    basis, piv = linalg.rref(mat, p)
    basis = basis[: len(piv)]
    inside = (2 * mat[0] + mat[1]) % p
    outside = np.array([0, 0, 1], dtype=np.int64)
    assert linalg.in_row_span(basis, piv, inside, p)
    assert not linalg.in_row_span(basis, piv, outside, p)


def test_inv_mod():
    for p in (3, 5, 7, 11):
        for a in range(1, p):
            assert linalg.inv_mod(a, p) * a % p == 1
    with pytest.raises(ZeroDivisionError):
        linalg.inv_mod(0, 5)


def test_nilpotent_block_sizes_known_forms():
    p = 3

    def jordan(sizes):
        dim = sum(sizes)
        a = np.zeros((dim, dim), dtype=np.int64)
        at = 0
        for s in sizes:
            for i in range(s - 1):
                a[at + i, at + i + 1] = 1
            at += s
        return a

    for sizes in [(3,), (2, 1), (1, 1, 1), (4, 2), (3, 3, 1), ()]:
        assert linalg.nilpotent_block_sizes(jordan(sizes), p) == tuple(
            sorted(sizes, reverse=True)
        )


def test_nilpotent_block_sizes_rejects_non_nilpotent():
    with pytest.raises(ValueError):
        linalg.nilpotent_block_sizes(np.eye(2, dtype=np.int64), 3)
