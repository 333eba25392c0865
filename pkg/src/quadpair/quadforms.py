"""Integral quadratic forms, pencils, dual forms, and mod-p geometry.

A form is Q(x) = x^T M x with M integer symmetric, so polynomial cross
coefficients are even.  A pair (Q1, Q2) with det M2 != 0 carries its
derived data: the binary pencil form P(b1, b2) = det(b1 M1 + b2 M2), the
discriminant of P, the dual form Q2* with matrix adjugate(M2), and a
divisor-based set of bad primes.

"Bad" primes: exact elimination-theoretic discriminants of the pair are
out of scope, so bad_primes(pair, p_max) returns a *verified superset* --
divisors of 2 * det2 * disc_P joined with every p <= p_max at which a
brute-force mod-p check fails (smooth codimension-2 intersection, or
rank(b1 M1 + b2 M2) >= n-1 on all of P^1(F_p)).  Claims conditioned on a
good prime are only ever tested at primes this function certifies.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .guard import check_guard
from .lincong import bareiss_det
from .modarith import factorize, is_prime

__all__ = [
    "QuadraticForm",
    "QuadricPair",
    "bad_primes",
    "binary_disc",
    "certified_good_primes",
    "count_cone_points_mod_p",
    "dual_form",
    "is_Vm_singular_mod_p",
    "load_pair",
    "parse_pair_text",
    "pencil_det_poly",
    "save_pair",
]


# --------------------------------------------------------------------------
# forms
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadraticForm:
    """Q(x) = x^T M x, M integer symmetric."""

    M: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.M)
        if n == 0:
            raise ValueError("empty matrix")
        for row in self.M:
            if len(row) != n:
                raise ValueError("matrix not square")
        for i in range(n):
            for j in range(n):
                if self.M[i][j] != self.M[j][i]:
                    raise ValueError("matrix not symmetric")

    @property
    def n(self) -> int:
        return len(self.M)

    @classmethod
    def from_matrix(cls, rows) -> "QuadraticForm":
        return cls(tuple(tuple(int(v) for v in row) for row in rows))

    @classmethod
    def diagonal(cls, entries) -> "QuadraticForm":
        n = len(entries)
        return cls.from_matrix(
            [[int(entries[i]) if i == j else 0 for j in range(n)] for i in range(n)]
        )

    @classmethod
    def from_poly_coeffs(cls, n: int, coeffs) -> "QuadraticForm":
        """Build from upper-triangular polynomial coefficients.

        coeffs lists a_11, a_12, ..., a_1n, a_22, ..., a_nn (length
        n(n+1)/2) for Q = sum a_ii x_i^2 + sum_{i<j} a_ij x_i x_j.  Cross
        coefficients a_ij must be even since the matrix entry is a_ij / 2.
        """
        expect = n * (n + 1) // 2
        if len(coeffs) != expect:
            raise ValueError(f"need {expect} coefficients for n={n}, got {len(coeffs)}")
        M = [[0] * n for _ in range(n)]
        it = iter(coeffs)
        for i in range(n):
            for j in range(i, n):
                c = int(next(it))
                if i == j:
                    M[i][i] = c
                else:
                    if c % 2 != 0:
                        raise ValueError(
                            f"odd cross term {c}*x{i + 1}*x{j + 1}: forms must have an "
                            f"integer symmetric matrix, so cross coefficients are even"
                        )
                    M[i][j] = M[j][i] = c // 2
        return cls.from_matrix(M)

    def is_diagonal(self) -> bool:
        return all(
            self.M[i][j] == 0 for i in range(self.n) for j in range(self.n) if i != j
        )

    def diagonal_entries(self) -> tuple[int, ...]:
        return tuple(self.M[i][i] for i in range(self.n))

    def eval(self, x) -> int:
        if len(x) != self.n:
            raise ValueError(f"point has length {len(x)}, form has n={self.n}")
        return sum(
            self.M[i][j] * int(x[i]) * int(x[j])
            for i in range(self.n)
            for j in range(self.n)
        )

    def __call__(self, x) -> int:
        return self.eval(x)

    def gradient(self, x) -> list:
        """grad Q = 2 M x."""
        if len(x) != self.n:
            raise ValueError("dimension mismatch")
        return [2 * sum(self.M[i][j] * int(x[j]) for j in range(self.n))
                for i in range(self.n)]

    def matrix_mod(self, q: int) -> np.ndarray:
        return np.array([[v % q for v in row] for row in self.M], dtype=np.int64)

    def eval_batch_mod(self, X: np.ndarray, q: int) -> np.ndarray:
        """Q(x) mod q for every row of X (values already in [0, q))."""
        # int64 overflow bound: entries of X @ M are < n q^2, times q and
        # summed over n again stays far below 2^63 for the q used here
        assert self.n * q**3 * self.n < 2**62, "modulus too large for int64 path"
        Mq = self.matrix_mod(q)
        return ((X @ Mq % q) * X).sum(axis=1) % q

    def eval_batch(self, X: np.ndarray) -> np.ndarray:
        """Exact Q(x) for every integer row of X (int64)."""
        bound = int(np.abs(X).max(initial=0))
        top = max(abs(v) for row in self.M for v in row)
        assert self.n * self.n * top * bound * bound < 2**62, \
            "points too large for int64 path"
        M = np.array(self.M, dtype=np.int64)
        return ((X @ M) * X).sum(axis=1)

    def eval_float(self, x: np.ndarray) -> np.ndarray:
        """Q at real points; x shape (..., n)."""
        M = np.array(self.M, dtype=float)
        return np.einsum("...i,ij,...j->...", x, M, x)


def residue_grid(q: int, k: int) -> np.ndarray:
    """All vectors of (Z/q)^k as an array of shape (q^k, k)."""
    idx = np.arange(q**k, dtype=np.int64)
    return np.stack([(idx // q**j) % q for j in range(k)], axis=1)


# --------------------------------------------------------------------------
# pencil determinant form and its discriminant
# --------------------------------------------------------------------------


def pencil_det_poly(Q1: QuadraticForm, Q2: QuadraticForm) -> tuple[int, ...]:
    """Coefficients (c_0, ..., c_n) of P(b1, b2) = det(b1 M1 + b2 M2),
    with c_k the coefficient of b1^(n-k) b2^k.

    Interpolated exactly from n+1 integer determinants and re-verified at
    two extra points.
    """
    n = Q1.n
    if Q2.n != n:
        raise ValueError("forms have different dimensions")

    def det_at(t: int) -> int:
        m = [[t * Q1.M[i][j] + Q2.M[i][j] for j in range(n)] for i in range(n)]
        return bareiss_det(m)

    # P(t, 1) = sum_k c_k t^(n-k): Lagrange interpolation at t = 0..n
    ts = list(range(n + 1))
    vals = [det_at(t) for t in ts]
    coeffs_t = [Fraction(0)] * (n + 1)  # coefficient of t^j at index j
    for i, ti in enumerate(ts):
        num = [Fraction(1)]
        denom = Fraction(1)
        for j, tj in enumerate(ts):
            if j == i:
                continue
            num = _poly_mul(num, [Fraction(-tj), Fraction(1)])
            denom *= ti - tj
        scale = Fraction(vals[i]) / denom
        for k in range(len(num)):
            coeffs_t[k] += scale * num[k]
    out = []
    for k in range(n + 1):  # c_k multiplies t^(n-k)
        c = coeffs_t[n - k]
        if c.denominator != 1:
            raise ArithmeticError("pencil interpolation produced a non-integer")
        out.append(int(c))
    for t in (n + 1, n + 2):
        check = sum(out[k] * t ** (n - k) for k in range(n + 1))
        if check != det_at(t):
            raise ArithmeticError("pencil interpolation failed verification")
    return tuple(out)


def _poly_mul(a: list, b: list) -> list:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return out


def binary_disc(coeffs) -> int:
    """Discriminant of the binary form P = sum_k c_k b1^(d-k) b2^k.

    disc = (-1)^(d(d-1)/2) Res(dP/db1, dP/db2) / d^(d-2), with the
    resultant taken of the two partials as binary forms of formal degree
    d-1 (Sylvester determinant).  This vanishes exactly when P has a
    repeated projective root, including roots at [1:0] or [0:1], which a
    naive dehomogenization would miss.
    """
    coeffs = [int(c) for c in coeffs]
    d = len(coeffs) - 1
    if d < 2:
        raise ValueError("degree must be at least 2")
    # partial derivatives as coefficient lists of formal degree d-1
    fx = [(d - k) * coeffs[k] for k in range(d)]         # d/db1
    fy = [k * coeffs[k] for k in range(1, d + 1)]        # d/db2
    size = 2 * (d - 1)
    syl = [[0] * size for _ in range(size)]
    for row in range(d - 1):
        for k, c in enumerate(fx):
            syl[row][row + k] = c
    for row in range(d - 1):
        for k, c in enumerate(fy):
            syl[d - 1 + row][row + k] = c
    res = bareiss_det(syl)
    scale = d ** (d - 2)
    if res % scale != 0:
        raise ArithmeticError("resultant not divisible by d^(d-2)")
    sign = -1 if (d * (d - 1) // 2) % 2 else 1
    return sign * (res // scale)


# --------------------------------------------------------------------------
# dual (adjugate) form
# --------------------------------------------------------------------------


def _adjugate(M) -> list:
    n = len(M)
    if n == 1:
        return [[1]]
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [
                [M[r][c] for c in range(n) if c != j] for r in range(n) if r != i
            ]
            adj[j][i] = (-1) ** (i + j) * bareiss_det(minor)
    return adj


def dual_form(Q: QuadraticForm) -> QuadraticForm:
    """Form with matrix adjugate(M) = det(M) * M^(-1)."""
    if bareiss_det([list(r) for r in Q.M]) == 0:
        raise ValueError("form is singular; dual undefined")
    return QuadraticForm.from_matrix(_adjugate([list(r) for r in Q.M]))


# --------------------------------------------------------------------------
# the pair
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadricPair:
    Q1: QuadraticForm
    Q2: QuadraticForm
    det2: int
    pencil_poly: tuple[int, ...]
    disc_P: int
    dual2: QuadraticForm
    bad_primes: tuple[int, ...]

    @property
    def n(self) -> int:
        return self.Q1.n

    @classmethod
    def build(cls, Q1: QuadraticForm, Q2: QuadraticForm) -> "QuadricPair":
        if Q1.n != Q2.n:
            raise ValueError("forms have different dimensions")
        det2 = bareiss_det([list(r) for r in Q2.M])
        if det2 == 0:
            raise ValueError("Q2 must be non-singular")
        pencil = pencil_det_poly(Q1, Q2)
        disc = binary_disc(pencil)
        dual2 = QuadraticForm.from_matrix(_adjugate([list(r) for r in Q2.M]))
        divisor_primes = {2}
        for v in (det2, disc):
            if v != 0:
                divisor_primes.update(factorize(abs(v)).keys())
        return cls(
            Q1=Q1,
            Q2=Q2,
            det2=det2,
            pencil_poly=pencil,
            disc_P=disc,
            dual2=dual2,
            bad_primes=tuple(sorted(divisor_primes)),
        )

    def dual2_at(self, m) -> int:
        """Q2*(m) for an integer vector m."""
        return self.dual2.eval(m)


# --------------------------------------------------------------------------
# mod-p geometry
# --------------------------------------------------------------------------


def _rank_mod_p(rows, p: int) -> int:
    m = [[v % p for v in row] for row in rows]
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    rank = 0
    col = 0
    while rank < nrows and col < ncols:
        piv = None
        for i in range(rank, nrows):
            if m[i][col] % p:
                piv = i
                break
        if piv is None:
            col += 1
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][col], -1, p)
        m[rank] = [(v * inv) % p for v in m[rank]]
        for i in range(nrows):
            if i != rank and m[i][col]:
                c = m[i][col]
                m[i] = [(a - c * b) % p for a, b in zip(m[i], m[rank])]
        rank += 1
        col += 1
    return rank


def _common_zero_mask(pair: QuadricPair, X: np.ndarray, p: int) -> np.ndarray:
    v1 = pair.Q1.eval_batch_mod(X, p)
    v2 = pair.Q2.eval_batch_mod(X, p)
    return (v1 == 0) & (v2 == 0)


def _iter_grid_chunks(n: int, p: int, max_rows: int = 4_000_000):
    """Yield (prefix, grid) covering F_p^n; grid has the trailing coords."""
    free = n
    lead = 0
    while p**free > max_rows:
        free -= 1
        lead += 1
    tail = residue_grid(p, free)
    if lead == 0:
        yield (), tail
        return
    for head in residue_grid(p, lead):
        block = np.empty((len(tail), n), dtype=np.int64)
        block[:, :lead] = head
        block[:, lead:] = tail
        yield tuple(int(v) for v in head), block


def count_cone_points_mod_p(pair: QuadricPair, p: int) -> int:
    """#{x mod p : Q1(x) = Q2(x) = 0 in F_p}."""
    if not is_prime(p):
        raise ValueError("p must be prime")
    check_guard("count_cone_points_mod_p", p**pair.n, 10**8)
    total = 0
    for _, block in _iter_grid_chunks(pair.n, p):
        total += int(_common_zero_mask(pair, block, p).sum())
    return total


def _smooth_intersection_mod_p(pair: QuadricPair, p: int) -> bool:
    """Every nonzero common zero of Q1, Q2 mod p has Jacobian rank 2."""
    n = pair.n
    for _, block in _iter_grid_chunks(n, p):
        mask = _common_zero_mask(pair, block, p)
        for x in block[mask]:
            if not x.any():
                continue
            jac = [pair.Q1.gradient(x), pair.Q2.gradient(x)]
            if _rank_mod_p(jac, p) < 2:
                return False
    return True


def _pencil_rank_ok_mod_p(pair: QuadricPair, p: int) -> bool:
    """rank(b1 M1 + b2 M2) >= n-1 for every [b1 : b2] in P^1(F_p)."""
    n = pair.n
    reps = [(1, t) for t in range(p)] + [(0, 1)]
    for b1, b2 in reps:
        m = [
            [b1 * pair.Q1.M[i][j] + b2 * pair.Q2.M[i][j] for j in range(n)]
            for i in range(n)
        ]
        if _rank_mod_p(m, p) < n - 1:
            return False
    return True


def bad_primes(pair: QuadricPair, p_max: int) -> tuple[int, ...]:
    """Divisor-based bad primes joined with brute-force failures p <= p_max.

    The result is a superset of the primes of bad reduction among p <= p_max;
    primes <= p_max that are absent are certified good by enumeration.
    """
    if p_max < 2:
        raise ValueError("p_max must be at least 2")
    bad = set(pair.bad_primes)
    p = 3
    while p <= p_max:
        if is_prime(p) and p not in bad:
            if not _pencil_rank_ok_mod_p(pair, p) or not _smooth_intersection_mod_p(pair, p):
                bad.add(p)
        p += 2
    return tuple(sorted(bad))


def certified_good_primes(pair: QuadricPair, p_max: int) -> tuple[int, ...]:
    """Odd primes p <= p_max passing every brute-force goodness check."""
    bad = set(bad_primes(pair, p_max))
    return tuple(
        p for p in range(3, p_max + 1) if is_prime(p) and p not in bad
    )


def is_Vm_singular_mod_p(pair: QuadricPair, m, p: int) -> bool:
    """True iff some x != 0 in F_p^n has Q1(x) = Q2(x) = m.x = 0 and the
    3 x n Jacobian (grad Q1; grad Q2; m) of rank < 3 mod p.

    Computable stand-in for "p divides the dual-variety value at m".
    """
    if not is_prime(p):
        raise ValueError("p must be prime")
    if len(m) != pair.n:
        raise ValueError("dimension mismatch")
    if all(v % p == 0 for v in m):
        raise ValueError("m must be nonzero mod p")
    check_guard("is_Vm_singular_mod_p", p**pair.n, 10**8)
    mvec = np.array([v % p for v in m], dtype=np.int64)
    for _, block in _iter_grid_chunks(pair.n, p):
        mask = _common_zero_mask(pair, block, p) & ((block @ mvec) % p == 0)
        for x in block[mask]:
            if not x.any():
                continue
            jac = [pair.Q1.gradient(x), pair.Q2.gradient(x), [int(v) for v in mvec]]
            if _rank_mod_p(jac, p) < 3:
                return True
    return False


# --------------------------------------------------------------------------
# pair files
# --------------------------------------------------------------------------


def _parse_int_list(text: str) -> list:
    return [int(tok) for tok in text.replace(",", " ").split()]


def parse_pair_text(text: str) -> QuadricPair:
    """Key-value pair file: fields n, Q1.matrix, Q2.matrix (row-major).

    Forms may alternatively be given as Q1.poly / Q2.poly upper-triangular
    polynomial coefficients; odd cross terms are rejected.
    """
    fields = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value'")
        key, val = line.split("=", 1)
        key = key.strip()
        if key in fields:
            raise ValueError(f"line {lineno}: duplicate key {key!r}")
        fields[key] = val.strip()
    if "n" not in fields:
        raise ValueError("missing field: n")
    n = int(fields["n"])
    if n < 1:
        raise ValueError("n must be positive")

    def get_form(name: str) -> QuadraticForm:
        mkey, pkey = f"{name}.matrix", f"{name}.poly"
        if mkey in fields and pkey in fields:
            raise ValueError(f"give {mkey} or {pkey}, not both")
        if mkey in fields:
            entries = _parse_int_list(fields[mkey])
            if len(entries) != n * n:
                raise ValueError(f"{mkey}: expected {n * n} entries, got {len(entries)}")
            return QuadraticForm.from_matrix(
                [entries[i * n : (i + 1) * n] for i in range(n)]
            )
        if pkey in fields:
            return QuadraticForm.from_poly_coeffs(n, _parse_int_list(fields[pkey]))
        raise ValueError(f"missing field: {mkey}")

    return QuadricPair.build(get_form("Q1"), get_form("Q2"))


def load_pair(path) -> QuadricPair:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_pair_text(fh.read())


def save_pair(pair: QuadricPair, path) -> None:
    lines = [f"n = {pair.n}"]
    for name, form in (("Q1", pair.Q1), ("Q2", pair.Q2)):
        flat = " ".join(str(v) for row in form.M for v in row)
        lines.append(f"{name}.matrix = {flat}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
