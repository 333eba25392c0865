import numpy as np
import pytest
import sympy

from quadpair.pairs import shipped_pair, toy_pair_2, toy_pair_3
from quadpair.quadforms import (
    QuadraticForm,
    QuadricPair,
    certified_good_primes,
    count_cone_points_mod_p,
    dual_form,
    is_Vm_singular_mod_p,
    parse_pair_text,
    pencil_det_poly,
    residue_grid,
    save_pair,
)


def test_eval_and_gradient():
    Q = QuadraticForm.from_matrix([[1, 1], [1, 3]])  # x^2 + 2xy + 3y^2
    assert Q.eval([2, -1]) == 4 - 4 + 3
    assert Q.gradient([2, -1]) == [2 * 2 + 2 * -1, 2 * 2 + 6 * -1]


def test_from_poly_coeffs():
    # 2x^2 + 4xy + y^2 has even cross coefficient -> fine
    Q = QuadraticForm.from_poly_coeffs(2, [2, 4, 1])
    assert Q.eval([1, 1]) == 7
    with pytest.raises(ValueError):
        QuadraticForm.from_poly_coeffs(2, [1, 3, 1])  # odd cross term


def test_eval_batch_agrees_with_eval():
    Q = toy_pair_3().Q2
    X = residue_grid(7, 3) - 3
    vals = Q.eval_batch(X)
    for row, v in zip(X, vals):
        assert Q.eval([int(t) for t in row]) == int(v)
    modvals = Q.eval_batch_mod(X % 7, 7)
    assert ((vals - modvals) % 7 == 0).all()


def test_pencil_roots_of_shipped_pair_distinct():
    ship = shipped_pair()
    coeffs = pencil_det_poly(ship.Q1, ship.Q2)  # det(M1 + t M2)
    t = sympy.symbols("t")
    poly = sum(c * t**i for i, c in enumerate(coeffs))
    roots = sympy.roots(sympy.Poly(poly, t))
    assert sum(roots.values()) == 5  # degree 5, counted with multiplicity
    assert all(mult == 1 for mult in roots.values())
    assert set(roots) == {
        -1,
        sympy.Rational(-1, 2),
        sympy.Rational(-1, 3),
        sympy.Rational(1, 4),
        sympy.Rational(1, 5),
    }


def test_dual_form_is_adjugate():
    for Q in (toy_pair_3().Q2, shipped_pair().Q2, toy_pair_2().Q2):
        M = sympy.Matrix(Q.M)
        adj = M.adjugate()
        D = dual_form(Q)
        assert sympy.Matrix(D.M) == adj
        # M * adj = det * I
        assert M * adj == M.det() * sympy.eye(Q.n)


def test_dual2_at_matches_dual_form():
    ship = shipped_pair()
    D = dual_form(ship.Q2)
    for m in ([1, 0, 0, 0, 0], [1, 2, 3, 4, 5], [0, 0, 0, 0, 2]):
        assert ship.dual2_at(m) == D.eval(m)


def test_certified_good_primes_shipped():
    ship = shipped_pair()
    assert certified_good_primes(ship, 23) == (11, 13, 17, 19, 23)
    for p in (2, 3, 5):
        assert p in ship.bad_primes


def test_cone_points_mod_p_vs_brute():
    pair = toy_pair_3()
    for p in (3, 5, 7):
        grid = residue_grid(p, 3)
        brute = int(
            (
                (pair.Q1.eval_batch_mod(grid, p) == 0)
                & (pair.Q2.eval_batch_mod(grid, p) == 0)
            ).sum()
        )
        assert count_cone_points_mod_p(pair, p) == brute


def test_Vm_singular_predicate():
    ship = shipped_pair()
    # found by random search: D_{13^2}(m) != 0 exactly at such m
    assert is_Vm_singular_mod_p(ship, (12, 12, 11, 4, 6), 13)
    assert not is_Vm_singular_mod_p(ship, (9, 10, 7, 3, 7), 11)


def test_pair_text_roundtrip(tmp_path):
    ship = shipped_pair()
    path = tmp_path / "pair.txt"
    save_pair(ship, path)
    text = path.read_text()
    back = parse_pair_text(text)
    assert back.Q1.M == ship.Q1.M and back.Q2.M == ship.Q2.M


def test_pair_text_poly_field():
    pair = parse_pair_text("n = 2\nQ1.poly = 1 0 1\nQ2.poly = 0 2 0\n")
    assert pair.Q1.M == ((1, 0), (0, 1))
    assert pair.Q2.M == ((0, 1), (1, 0))


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("n = 2\nQ1.matrix = 1 0 0\nQ2.matrix = 0 1 1 0", "expected 4 entries"),
        ("Q1.matrix = 1", "missing field: n"),
        ("n = 2\nQ1.matrix = 1 0 0 1", "missing field: Q2.matrix"),
        ("n = 2\nn = 3\nQ1.matrix = 1 0 0 1\nQ2.matrix = 0 1 1 0", "duplicate"),
        (
            "n = 2\nQ1.matrix = 1 0 0 1\nQ1.poly = 1 0 1\nQ2.matrix = 0 1 1 0",
            "not both",
        ),
        ("n = 2\nQ1.poly = 1 1 1\nQ2.matrix = 0 1 1 0", "cross"),
        ("n = 2\nnonsense line\nQ1.matrix = 1 0 0 1", "key = value"),
    ],
)
def test_pair_text_errors(text, fragment):
    with pytest.raises(ValueError, match=fragment):
        parse_pair_text(text)


def test_build_rejects_mismatched_sizes():
    with pytest.raises(ValueError):
        QuadricPair.build(
            QuadraticForm.diagonal([1, 1]), QuadraticForm.diagonal([1, 1, 1])
        )
