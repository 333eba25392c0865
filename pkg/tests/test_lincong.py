import random

import numpy as np
import pytest
import sympy

from quadpair.lincong import (
    bareiss_det,
    count_lincong,
    mat_mul,
    rank_rational,
    smith,
    smith_bound,
)
from quadpair.modarith import PrimePower
from quadpair.quadforms import residue_grid


def brute_count(matrix, a_vec, q):
    grid = residue_grid(q, len(matrix[0]))
    M = np.array(matrix, dtype=np.int64)
    a = np.array(a_vec, dtype=np.int64)
    hits = ((grid @ M.T - a) % q == 0).all(axis=1)
    return int(hits.sum())


def test_bareiss_det_matches_sympy():
    rng = random.Random(3)
    for _ in range(60):
        n = rng.randrange(1, 5)
        M = [[rng.randrange(-9, 10) for _ in range(n)] for _ in range(n)]
        assert bareiss_det(M) == int(sympy.Matrix(M).det())


def test_rank_rational():
    assert rank_rational([[1, 2], [2, 4]]) == 1
    assert rank_rational([[0, 0], [0, 0]]) == 0
    rng = random.Random(4)
    for _ in range(40):
        r, c = rng.randrange(1, 4), rng.randrange(1, 5)
        M = [[rng.randrange(-6, 7) for _ in range(c)] for _ in range(r)]
        assert rank_rational(M) == sympy.Matrix(M).rank()


def test_smith_decomposition_properties():
    rng = random.Random(5)
    for _ in range(50):
        r, c = rng.randrange(1, 4), rng.randrange(1, 4)
        M = [[rng.randrange(-9, 10) for _ in range(c)] for _ in range(r)]
        snf = smith(M)
        assert abs(bareiss_det([list(r) for r in snf.A])) == 1
        assert abs(bareiss_det([list(r) for r in snf.B])) == 1
        # A M B = diag(d), with the divisibility chain d1 | d2 | ...
        D = mat_mul(mat_mul([list(r) for r in snf.A], M), [list(r) for r in snf.B])
        for i in range(r):
            for j in range(c):
                assert D[i][j] == (snf.d[i] if i == j and i < len(snf.d) else 0)
        ds = [d for d in snf.d if d != 0]
        for a, b in zip(ds, ds[1:]):
            assert b % a == 0


def test_count_lincong_vs_brute_and_bound():
    rng = random.Random(6)
    for _ in range(120):
        n = rng.randrange(1, 4)
        k = rng.randrange(1, 3)
        q = rng.choice([2, 3, 4, 5, 7, 8, 9, 16, 25, 27, 32, 49, 64])
        M = [[rng.randrange(-q, q) for _ in range(n)] for _ in range(k)]
        a = [rng.randrange(q) for _ in range(k)]
        got = count_lincong(M, a, q)
        assert got == brute_count(M, a, q), (M, a, q)
        assert got <= smith_bound(M, PrimePower.of(q))


def test_count_lincong_composite_modulus():
    rng = random.Random(7)
    for _ in range(30):
        n = rng.randrange(1, 4)
        M = [[rng.randrange(-5, 6) for _ in range(n)]]
        a = [rng.randrange(12)]
        for q in (6, 12, 18, 36):
            assert count_lincong(M, a, q) == brute_count(M, a, q)


def test_count_lincong_edges():
    assert count_lincong([[0, 0]], [0], 9) == 81
    assert count_lincong([[0, 0]], [3], 9) == 0
    assert count_lincong([[1]], [5], 1) == 1
    with pytest.raises(ValueError):
        count_lincong([[1]], [0], 0)
    # more rows than unknowns
    assert count_lincong([[1], [2]], [1, 2], 5) == 1
    assert count_lincong([[1], [2]], [1, 3], 5) == 0
