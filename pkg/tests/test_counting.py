import math

import numpy as np
import pytest

from quadpair.counting import (
    BoxSpec,
    N_d,
    S_of_B,
    WeightFunction,
    enumerate_zeros,
    s_of_b_rows,
)
from quadpair.guard import ResourceGuardError
from quadpair.pairs import shipped_pair, toy_pair_2, toy_pair_3
from quadpair.quadforms import QuadraticForm, QuadricPair, residue_grid


def brute_zeros(Q2, B, congruence=None):
    n = Q2.n
    side = 2 * B + 1
    grid = residue_grid(side, n) - B
    mask = Q2.eval_batch(grid) == 0
    if congruence is not None:
        q, res = congruence
        mask &= ((grid - np.array(res)) % q == 0).all(axis=1)
    pts = grid[mask]
    return sorted(map(tuple, pts))


def test_hyperbola_thirteen_points():
    Q = QuadraticForm.diagonal([1, -1])
    pts = enumerate_zeros(Q, 3)
    assert len(pts) == 13
    tups = set(map(tuple, pts))
    assert (0, 0) in tups
    assert all((-x, -y) in tups for x, y in tups)


@pytest.mark.parametrize("B", [1, 4, 8])
def test_enumeration_matches_full_scan(B):
    # the split evaluator needs uncoupled halves; coupled forms go through auto
    for Q in (toy_pair_3().Q2, shipped_pair().Q2):
        mitm = [tuple(p) for p in enumerate_zeros(Q, B, method="mitm")]
        scan = [tuple(p) for p in enumerate_zeros(Q, B, method="scan")]
        assert mitm == scan == brute_zeros(Q, B), (Q.M, B)
    for Q in (
        toy_pair_2().Q2,
        QuadraticForm.from_matrix([[1, 1, 0], [1, -2, 1], [0, 1, 1]]),
    ):
        got = [tuple(p) for p in enumerate_zeros(Q, B, method="auto")]
        assert got == brute_zeros(Q, B), (Q.M, B)


def test_mitm_rejects_coupled_blocks():
    Q = QuadraticForm.from_matrix([[1, 1], [1, -2]])
    with pytest.raises(ValueError):
        enumerate_zeros(Q, 3, method="mitm")


def test_enumeration_with_congruence():
    Q = toy_pair_3().Q2
    spec = BoxSpec(6, congruence=(4, (2, 0, 1)))
    got = [tuple(p) for p in enumerate_zeros(Q, spec)]
    assert got == brute_zeros(Q, 6, congruence=(4, (2, 0, 1)))
    assert got, "the live class should be non-empty"


def test_enumeration_workers_deterministic():
    Q = shipped_pair().Q2
    one = enumerate_zeros(Q, 6, method="scan", workers=1)
    two = enumerate_zeros(Q, 6, method="scan", workers=2)
    assert (one == two).all()


def test_guard_on_huge_box():
    with pytest.raises(ResourceGuardError):
        enumerate_zeros(shipped_pair().Q2, 10**6, guard=10**6)


def test_N_d_toy_values():
    toy = toy_pair_2()
    # zeros of the xy-form in |x| <= 3 are the 13 axis points; Q1 = t^2 on
    # them, so 2 | Q1 exactly at the five even-coordinate points
    assert N_d(toy, 1, 3) == 13
    assert N_d(toy, 2, 3) == 5
    for d in (1, 2, 3):
        assert N_d(toy, d, 3) >= N_d(toy, 2 * d, 3)


def test_N_d_monotone_on_shipped():
    ship = shipped_pair()
    vals = {d: N_d(ship, d, 8) for d in (1, 2, 3, 4, 6, 8)}
    for d in (1, 2, 3, 4):
        if 2 * d in vals:
            assert vals[d] >= vals[2 * d]


def test_N_d_growth_bound():
    # N_d(B) d^{1/n} / B^{n-2} below a constant fitted on the smallest B
    ship = shipped_pair()
    n = ship.n
    fitted = 0.0
    for d in (1, 2, 3, 4, 5, 6, 8, 9, 10):
        fitted = max(fitted, N_d(ship, d, 10) * d ** (1 / n) / 10 ** (n - 2))
    for B in (15, 20):
        for d in (1, 2, 3, 4, 5, 6, 8, 9, 12, 16, 20):
            if d > B:
                continue
            ratio = N_d(ship, d, B) * d ** (1 / n) / B ** (n - 2)
            assert ratio <= fitted * 1.05, (B, d, ratio, fitted)


def test_weight_function_profile():
    W = WeightFunction((1.0, 0.0), 0.5)
    assert W.eval_batch(np.array([[1.0, 0.0]]))[0] == pytest.approx(math.exp(-1))
    assert W.eval_batch(np.array([[1.6, 0.0]]))[0] == 0.0
    # value at half-radius: t = 1/4
    assert W.eval_batch(np.array([[1.25, 0.0]]))[0] == pytest.approx(
        math.exp(-1 / (1 - 0.25))
    )


def test_default_weight_sits_on_cone():
    for pair in (shipped_pair(), toy_pair_3()):
        W = WeightFunction.default_for_pair(pair)
        x0 = np.array(W.x0)
        norm = float(np.linalg.norm(x0))
        assert abs(pair.Q2.eval_float(x0[None, :])[0]) <= 1e-6 * norm**2
        minQ1, mingrad = W.support_stats(pair.Q1)
        assert minQ1 > 0 and mingrad > 0
        W.check_support(pair.Q1)  # should not raise


def test_S_of_B_zero_when_support_misses_lattice():
    toy = toy_pair_2()
    W = WeightFunction((0.51, 0.24), 0.05)
    assert S_of_B(toy, W, 1) == 0.0


def test_S_of_B_single_point_value():
    toy = toy_pair_2()
    W = WeightFunction((1.0, 0.0), 0.3)
    # only x = (3, 0) lands in the support at B = 3; Q1 = 9, r2 = 4
    assert S_of_B(toy, W, 3) == pytest.approx(4 * math.exp(-1), rel=1e-12)


def test_S_of_B_doubling_on_shipped():
    ship = shipped_pair()
    W = WeightFunction.default_for_pair(ship)
    s8 = S_of_B(ship, W, 8)
    s16 = S_of_B(ship, W, 16)
    assert s8 > 0 and s16 > 0
    assert abs(s16 / s8 / 2 ** (ship.n - 2) - 1) <= 0.35


def test_S_of_B_relabeling_invariance():
    perm = [2, 0, 1]
    t3 = toy_pair_3()

    def permute(F):
        M = F.M
        return QuadraticForm.from_matrix(
            [[M[perm[i]][perm[j]] for j in range(3)] for i in range(3)]
        )

    t3p = QuadricPair.build(permute(t3.Q1), permute(t3.Q2))
    W = WeightFunction.default_for_pair(t3)
    Wp = WeightFunction(tuple(W.x0[perm[i]] for i in range(3)), W.rho)
    a = S_of_B(t3, W, 12)
    b = S_of_B(t3p, Wp, 12)
    assert a == pytest.approx(b, rel=1e-12)


def test_s_of_b_rows_shape():
    toy = toy_pair_2()
    W = WeightFunction((1.0, 0.0), 0.3)
    rows = s_of_b_rows(toy, W, [3, 6])
    assert len(rows) == 2
    for B, s, norm in rows:
        assert norm == pytest.approx(s / B ** (toy.n - 2))


def test_box_spec_validation():
    with pytest.raises(ValueError):
        BoxSpec(0)
    spec = BoxSpec(5, congruence=(4, (1, 2)))
    assert spec.bound == 5
    with pytest.raises(ValueError):
        BoxSpec(5, congruence=(4, (7, 0)))
