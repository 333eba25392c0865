"""Local densities of the pair, the archimedean density, and the
end-to-end comparison of S(B) against its predicted leading constant.

The predicted constant is c = sigma_inf * sigma_2 * prod_p sigma_p where,
writing chi for the non-trivial character mod 4,

    sigma_p   = (1 - chi(p)/p) * lim_k p^{-k(n-1)}
                   sum_{0 <= e <= k} chi(p)^e * Ntilde_k(e),
    Ntilde_k(e) = #{x mod p^k : p^e | Q1(x), p^k | Q2(x)},
    sigma_2   = lim_k 2^{1-k(n-1)} #{x mod 2^k : Q1 = 1 mod 4, 2^k | Q2(x)},
    sigma_inf = pi * tau_inf,   tau_inf = lim_{eps->0} (2 eps)^{-1}
                   integral of W over {|Q2| <= eps}.

All p-adic quantities are exact rationals (integer counts over explicit
prime powers); floats appear only in reports.  sigma_p is evaluated by a
stabilized form of the limit: the count at depth k is split into primitive
strata (gcd(x, p) = 1), whose contribution from depth > k is summed in
closed form under the generic depth-k lifting behaviour (each further step
of Q1-divisibility costing a factor p, each gcd stratum a factor p^{2-n}).
For a prime where the intersection is smooth this evaluation is exact
already at k = 1, and equality between consecutive depths is the
convergence certificate.  The raw truncation exactly as displayed above is
kept alongside for diagnostics (`sigma_p_truncated`); it approaches the
same limit but never equals it at finite k.

The dimension must be at least 3: at n = 2 the stratum ratio p^{2-n}
reaches 1 and the defining limit itself diverges.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .counting import S_of_B, WeightFunction
from .guard import DEFAULT_GUARD, ResourceGuardError, check_guard
from .modarith import chi4, is_prime
from .padic import count_congruence_pair, count_congruence_pair_primitive
from .quadforms import (
    QuadricPair,
    _iter_grid_chunks,
    _pencil_rank_ok_mod_p,
    residue_grid,
)

__all__ = [
    "DensityReport",
    "ExperimentResult",
    "Ntilde",
    "Sigma2",
    "SigmaP",
    "TauInfinity",
    "experiment",
    "sigma_2",
    "sigma_infinity",
    "sigma_p",
    "sigma_p_truncated",
    "singular_constant",
    "tau_infinity",
    "two_squares_closed_form",
    "two_squares_count",
]


# --------------------------------------------------------------------------
# representations by two squares modulo p^k
# --------------------------------------------------------------------------


def two_squares_count(A: int, p: int, k: int, guard: int = DEFAULT_GUARD) -> int:
    """#{(u, v) mod p^k : u^2 + v^2 = A mod p^k}, by direct count."""
    if not is_prime(p):
        raise ValueError("p must be prime")
    if k < 1:
        raise ValueError("k must be at least 1")
    q = p**k
    check_guard("two_squares_count", q * q, guard)
    sq = np.bincount((np.arange(q, dtype=np.int64) ** 2) % q, minlength=q)
    return int((sq * sq[(A - np.arange(q)) % q]).sum())


def two_squares_closed_form(A: int, p: int, k: int) -> int:
    """The case-by-case value of two_squares_count.

    For p = 2 the formula covers only odd A and k >= 2 (2^{k+1} when
    A = 1 mod 4, zero when A = 3 mod 4); other inputs raise.
    """
    if not is_prime(p):
        raise ValueError("p must be prime")
    if k < 1:
        raise ValueError("k must be at least 1")
    if p == 2:
        if A % 2 == 0:
            raise ValueError("p = 2 closed form requires odd A")
        if k < 2:
            raise ValueError("p = 2 closed form requires k >= 2")
        return 2 ** (k + 1) if A % 4 == 1 else 0
    v = 0
    a = A % p**k
    if a == 0:
        v = k
    else:
        while a % p == 0:
            a //= p
            v += 1
    if p % 4 == 1:
        if v >= k:
            return p**k + k * (p**k - p ** (k - 1))
        return (1 + v) * (p**k - p ** (k - 1))
    if v >= k:
        return p ** (2 * (k // 2))
    if v % 2 == 0:
        return p**k + p ** (k - 1)
    return 0


# --------------------------------------------------------------------------
# p-adic counts and sigma_p
# --------------------------------------------------------------------------


def Ntilde(pair: QuadricPair, p: int, k: int, e: int,
           guard: int = DEFAULT_GUARD) -> int:
    """Ntilde_k(e) = #{x mod p^k : p^e | Q1(x), p^k | Q2(x)}, p odd."""
    if not is_prime(p) or p == 2:
        raise ValueError("p must be an odd prime")
    if k < 0 or not 0 <= e <= max(k, 0):
        raise ValueError("need 0 <= e <= k")
    if k == 0:
        return 1
    return count_congruence_pair(pair, p, k, e, k, guard=guard)


@dataclass(frozen=True)
class _LocalData:
    """Primitive counts at depths 1 and 2 plus the smoothness certificate,
    all gathered in a single sweep of the grid mod p."""

    p: int
    star1: tuple[int, int]        # Ntilde*_1(0), Ntilde*_1(1)
    star2: tuple[int, int, int]   # Ntilde*_2(0), Ntilde*_2(1), Ntilde*_2(2)
    smooth: bool


def _local_data_uncached(pair: QuadricPair, p: int,
                         guard: int = DEFAULT_GUARD) -> _LocalData:
    n = pair.n
    check_guard("sigma_p", p**n, guard)
    M1 = np.array(pair.Q1.M, dtype=np.int64)
    M2 = np.array(pair.Q2.M, dtype=np.int64)
    p2 = p * p
    s1_0 = s1_1 = 0
    s2_0 = s2_1 = s2_2 = 0
    smooth = True
    inv_table = np.array([0] + [pow(a, p - 2, p) for a in range(1, p)],
                         dtype=np.int64)
    for _, block in _iter_grid_chunks(n, p, max_rows=2_000_000):
        nonzero = (block != 0).any(axis=1)
        q2 = pair.Q2.eval_batch(block)
        zero2 = (q2 % p == 0) & nonzero
        if not zero2.any():
            continue
        X = block[zero2]
        v1 = pair.Q1.eval_batch(X)
        v2 = q2[zero2]
        s1_0 += len(X)
        div1 = v1 % p == 0
        s1_1 += int(div1.sum())

        G1 = (2 * (X @ M1)) % p
        G2 = (2 * (X @ M2)) % p
        g2nz = (G2 != 0).any(axis=1)
        deep2 = v2 % p2 == 0
        # depth-2 fibers for p^2 | Q2 alone: a non-degenerate gradient row
        # gives p^{n-1} lifts, a vanishing one gives p^n iff p^2 | Q2(x0)
        s2_0 += p ** (n - 1) * int(g2nz.sum())
        s2_0 += p**n * int((~g2nz & deep2).sum())
        s2_1 += p ** (n - 1) * int((g2nz & div1).sum())
        s2_1 += p**n * int((~g2nz & div1 & deep2).sum())

        # depth-2 with p^2 | Q1 as well: solve the 2 x n system
        sel = div1
        if sel.any():
            A1, A2 = G1[sel], G2[sel]
            b1 = (-(v1[sel] // p)) % p
            b2 = (-(v2[sel] // p)) % p
            z1 = (A1 == 0).all(axis=1)
            z2 = (A2 == 0).all(axis=1)
            both0 = z1 & z2
            s2_2 += p**n * int((both0 & (b1 == 0) & (b2 == 0)).sum())
            only1 = z1 & ~z2
            s2_2 += p ** (n - 1) * int((only1 & (b1 == 0)).sum())
            only2 = ~z1 & z2
            s2_2 += p ** (n - 1) * int((only2 & (b2 == 0)).sum())
            live = ~z1 & ~z2
            if live.any():
                R1, R2 = A1[live], A2[live]
                cross = (R1[:, :, None] * R2[:, None, :]
                         - R1[:, None, :] * R2[:, :, None]) % p
                par = (cross == 0).all(axis=(1, 2))
                s2_2 += p ** (n - 2) * int((~par).sum())
                if par.any():
                    P1, P2 = R1[par], R2[par]
                    lead = np.argmax(P1 != 0, axis=1)
                    rows = np.arange(len(P1))
                    lam = (P2[rows, lead] * inv_table[P1[rows, lead]]) % p
                    ok = (lam * b1[live][par] - b2[live][par]) % p == 0
                    s2_2 += p ** (n - 1) * int(ok.sum())
                    smooth = False  # a common zero with dependent gradients
            if (both0 | only1 | only2).any():
                smooth = False
    return _LocalData(p, (s1_0, s1_1), (s2_0, s2_1, s2_2), smooth)


@lru_cache(maxsize=None)
def _local_data(pair: QuadricPair, p: int) -> _LocalData:
    return _local_data_uncached(pair, p)


def _primitive_counts(pair: QuadricPair, p: int, k: int,
                      guard: int = DEFAULT_GUARD) -> list[int]:
    """[Ntilde*_k(0), ..., Ntilde*_k(k)] (primitive x only)."""
    if k <= 2:
        # guard before the cache lookup so the outcome does not depend on
        # what happens to be cached already
        check_guard("sigma_p", p**pair.n, guard)
        data = _local_data(pair, p)
        return list(data.star1) if k == 1 else list(data.star2)
    return [count_congruence_pair_primitive(pair, p, k, e, k, guard=guard)
            for e in range(k + 1)]


def _stabilized_sigma(pair: QuadricPair, p: int, k: int,
                      guard: int = DEFAULT_GUARD) -> Fraction:
    """The depth-k stabilized evaluation of sigma_p (exact rational).

    Primitive counts at depth k are taken as computed; divisibility by Q1
    beyond depth k is charged the generic factor 1/p per extra power, and
    the strata x = p^a y contribute a geometric series in p^{2-n}.  When
    the depth-k counts already follow the generic lifting law (smooth
    case) this equals the limit exactly.
    """
    n = pair.n
    chi = chi4(p)
    star = _primitive_counts(pair, p, k, guard=guard)
    scale = p ** (k * (n - 1))
    head = sum(chi**e * star[e] for e in range(k))
    lstar = Fraction(head, scale) + Fraction(chi**k * star[k] * p, scale * (p - chi))
    d2 = Fraction(star[0], scale)
    t = Fraction(1, p ** (n - 2))
    L = lstar / (1 - t) + (1 + chi) * d2 * t / (1 - t) ** 2
    return (1 - Fraction(chi, p)) * L


@dataclass(frozen=True)
class SigmaP:
    p: int
    k_used: int
    fraction: Fraction
    converged: bool

    @property
    def value(self) -> float:
        return float(self.fraction)


def sigma_p(pair: QuadricPair, p: int, k_max: int = 2,
            guard: int = DEFAULT_GUARD) -> SigmaP:
    """sigma_p by the stabilized evaluator, deepening until two
    consecutive depths agree exactly (the convergence certificate) or
    k_max is reached."""
    if not is_prime(p) or p == 2:
        raise ValueError("p must be an odd prime")
    if pair.n < 3:
        raise ValueError("densities require n >= 3")
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    prev: Fraction | None = None
    k_done = 0
    for k in range(1, k_max + 1):
        try:
            val = _stabilized_sigma(pair, p, k, guard=guard)
        except ResourceGuardError:
            if prev is None:
                raise
            break
        if prev is not None and val == prev:
            return SigmaP(p, k, val, True)
        prev, k_done = val, k
    return SigmaP(p, k_done, prev, False)


def sigma_p_truncated(pair: QuadricPair, p: int, k: int,
                      guard: int = DEFAULT_GUARD) -> Fraction:
    """The raw truncation (1 - chi(p)/p) p^{-k(n-1)} sum_e chi^e Ntilde_k(e),
    exactly as the defining limit is written, with no rearrangement."""
    if not is_prime(p) or p == 2:
        raise ValueError("p must be an odd prime")
    if k < 1:
        raise ValueError("k must be at least 1")
    chi = chi4(p)
    total = sum(chi**e * Ntilde(pair, p, k, e, guard=guard) for e in range(k + 1))
    return (1 - Fraction(chi, p)) * Fraction(total, p ** (k * (pair.n - 1)))


def certified_good(pair: QuadricPair, p: int) -> bool:
    """True when p is odd, prime to the pair's discriminant data, and the
    intersection is smooth with good pencil rank mod p (checked afresh)."""
    if not is_prime(p) or p == 2 or p in pair.bad_primes:
        return False
    return _local_data(pair, p).smooth and _pencil_rank_ok_mod_p(pair, p)


# --------------------------------------------------------------------------
# sigma_2
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Sigma2:
    k_used: int
    fraction: Fraction
    stabilized: bool

    @property
    def value(self) -> float:
        return float(self.fraction)


def _sigma2_fraction(pair: QuadricPair, k: int) -> Fraction:
    n = pair.n
    q = 2**k
    count = 0
    free = n
    while q**free > 2_000_000 and free > 1:
        free -= 1
    tail = residue_grid(q, free)
    lead = n - free
    heads = residue_grid(q, lead) if lead else np.zeros((1, 0), dtype=np.int64)
    for head in heads:
        block = np.empty((len(tail), n), dtype=np.int64)
        if lead:
            block[:, :lead] = head
        block[:, lead:] = tail
        good1 = pair.Q1.eval_batch_mod(block % 4, 4) == 1
        good2 = pair.Q2.eval_batch_mod(block, q) == 0
        count += int((good1 & good2).sum())
    return Fraction(2 * count, 2 ** (k * (n - 1)))


def sigma_2(pair: QuadricPair, k_max: int = 5,
            guard: int = DEFAULT_GUARD) -> Sigma2:
    """Truncated 2-adic density with a stabilization flag (last two
    depths equal as exact rationals)."""
    if k_max < 2:
        raise ValueError("k_max must be at least 2")
    check_guard("sigma_2", 2 ** (k_max * pair.n), guard)
    prev = _sigma2_fraction(pair, k_max - 1)
    last = _sigma2_fraction(pair, k_max)
    return Sigma2(k_max, last, prev == last)


# --------------------------------------------------------------------------
# the archimedean density
# --------------------------------------------------------------------------


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


@dataclass(frozen=True)
class TauInfinity:
    slab: float                 # extrapolated slab estimate (the headline)
    coarea: float               # independent surface-integral estimate
    slab_ladder: tuple[float, ...]
    epsilons: tuple[float, ...]
    axis_points: int            # transverse grid resolution used

    @property
    def spread(self) -> float:
        mid = 0.5 * (abs(self.slab) + abs(self.coarea))
        return abs(self.slab - self.coarea) / mid if mid > 0 else 0.0


def _bump_1d(s2: np.ndarray, y1: np.ndarray, c1: float, rho: float) -> np.ndarray:
    """W along the distinguished coordinate: squared transverse distance s2
    fixed, axis coordinate y1 varying."""
    t = (s2 + (y1 - c1) ** 2) / rho**2
    safe = np.minimum(t, 1.0 - 1e-15)
    return np.where(t < 1.0 - 1e-15, np.exp(-1.0 / (1.0 - safe)), 0.0)


def _transverse_chunks(center: np.ndarray, rho: float, G: int,
                       max_rows: int = 1_000_000):
    """Midpoint-rule grid on the transverse box, in bounded chunks."""
    d = len(center)
    h = 2.0 * rho / G
    axis = -rho + h * (np.arange(G) + 0.5)
    free = d
    while G**free > max_rows and free > 1:
        free -= 1
    idx = np.arange(G**free, dtype=np.int64)
    tail = np.stack([axis[(idx // G**j) % G] for j in range(free)], axis=1)
    lead = d - free
    if lead == 0:
        yield center[None, :] + tail, h**d
        return
    hidx = np.arange(G**lead, dtype=np.int64)
    heads = np.stack([axis[(hidx // G**j) % G] for j in range(lead)], axis=1)
    for head in heads:
        pts = np.empty((len(tail), d), dtype=float)
        pts[:, :lead] = center[:lead] + head
        pts[:, lead:] = center[lead:] + tail
        yield pts, h**d


def _tau_pass(Q2, W: WeightFunction, eps_list, G: int):
    """One transverse resolution: slab values for every epsilon plus the
    coarea estimate, integrating exactly in the distinguished coordinate."""
    n = Q2.n
    x0 = np.array(W.x0, dtype=float)
    M2 = np.array(Q2.M, dtype=float)
    grad0 = 2.0 * M2 @ x0
    axis = int(np.argmax(np.abs(grad0)))
    rest = [j for j in range(n) if j != axis]
    a0 = float(M2[axis, axis])
    c1 = x0[axis]
    rho = W.rho

    slab_tot = [0.0 for _ in eps_list]
    co_tot = 0.0
    for yk, cell in _transverse_chunks(x0[rest], rho, G):
        # Q2(y1, y') = a y1^2 + b(y') y1 + c(y') in the distinguished coord
        b = 2.0 * yk @ M2[axis, rest]
        c = np.einsum("ij,jk,ik->i", yk, M2[np.ix_(rest, rest)], yk)
        s2 = ((yk - x0[rest]) ** 2).sum(axis=1)
        inside = s2 < rho**2
        if not inside.any():
            continue
        b, c, s2 = b[inside], c[inside], s2[inside]
        r1 = np.sqrt(rho**2 - s2)
        lo, hi = c1 - r1, c1 + r1
        a = a0
        if a < 0:
            a, b, c = -a, -b, -c

        def weight_integral(left, right):
            left = np.maximum(left, lo)
            right = np.minimum(right, hi)
            half = 0.5 * (right - left)
            live = half > 0
            if not live.any():
                return 0.0
            mid = 0.5 * (left + right)[live]
            hw = half[live]
            t0 = s2[live]
            total = 0.0
            for node, wgt in zip(_GL_NODES, _GL_WEIGHTS):
                vals = _bump_1d(t0, mid + hw * node, c1, rho)
                total += float((wgt * hw * vals).sum())
            return total

        if abs(a) > 1e-15:
            for i, eps in enumerate(eps_list):
                # {y1: |q| <= eps} = [R1, R2] minus the open middle (m1, m2)
                disc_out = b * b - 4 * a * (c - eps)
                disc_in = b * b - 4 * a * (c + eps)
                has_out = disc_out > 0
                sq_out = np.sqrt(np.maximum(disc_out, 0.0))
                R1 = np.where(has_out, (-b - sq_out) / (2 * a), 1.0)
                R2 = np.where(has_out, (-b + sq_out) / (2 * a), 0.0)
                has_in = disc_in > 0
                sq_in = np.sqrt(np.maximum(disc_in, 0.0))
                m1 = np.where(has_in, (-b - sq_in) / (2 * a), R2)
                m2 = np.where(has_in, (-b + sq_in) / (2 * a), R2)
                part = weight_integral(R1, np.minimum(R2, m1))
                part += weight_integral(np.maximum(R1, m2), R2)
                slab_tot[i] += part * cell / (2.0 * eps)
            disc = b * b - 4 * a * c
            has = disc > 0
            sq = np.sqrt(np.maximum(disc, 0.0))
            for sgn in (-1.0, 1.0):
                root = (-b + sgn * sq) / (2 * a)
                deriv = np.abs(2 * a * root + b)
                ok = has & (root >= lo) & (root <= hi) & (deriv > 1e-12)
                if ok.any():
                    wv = _bump_1d(s2[ok], root[ok], c1, rho)
                    co_tot += float((wv / deriv[ok]).sum()) * cell
        else:
            bz = np.abs(b) > 1e-12
            bsafe = np.where(bz, b, 1.0)
            for i, eps in enumerate(eps_list):
                left = (-eps - c) / bsafe
                right = (eps - c) / bsafe
                swap = left > right
                l2 = np.where(swap, right, left)
                r2_ = np.where(swap, left, right)
                # b = 0 points contribute their whole segment iff |c| <= eps
                l2 = np.where(bz, l2, np.where(np.abs(c) <= eps, lo, 1.0))
                r2_ = np.where(bz, r2_, np.where(np.abs(c) <= eps, hi, 0.0))
                slab_tot[i] += weight_integral(l2, r2_) * cell / (2.0 * eps)
            root = np.where(bz, -c / bsafe, lo - 1.0)
            ok = bz & (root >= lo) & (root <= hi)
            wv = np.where(ok, _bump_1d(s2, root, c1, rho), 0.0)
            co_tot += float((wv / np.abs(bsafe)).sum()) * cell
    return slab_tot, co_tot


def _extrapolate(eps: np.ndarray, vals: np.ndarray) -> float:
    """Least-squares linear fit in eps, evaluated at eps = 0."""
    A = np.stack([np.ones_like(eps), eps], axis=1)
    coef, *_ = np.linalg.lstsq(A, vals, rcond=None)
    return float(coef[0])


def tau_infinity(Q2, W: WeightFunction, method: str = "both",
                 guard: int = DEFAULT_GUARD) -> TauInfinity:
    """Archimedean density of {Q2 = 0} weighted by W, two ways.

    The slab estimator integrates W over {|Q2| <= eps} for the ladder
    eps in {0.2, 0.1, 0.05, 0.025} * (rho |grad Q2(x0)|), dividing by
    2 eps and extrapolating linearly to eps = 0.  The coarea estimator
    integrates W / |grad-component| over the zero set directly.  Both
    resolve the distinguished coordinate exactly (quadratic root solving)
    on a transverse grid whose resolution doubles until the estimates
    move by less than 1%.
    """
    if method not in ("slab", "coarea", "both"):
        raise ValueError(f"unknown method {method!r}")
    if W.n != Q2.n:
        raise ValueError("weight dimension mismatch")
    x0 = np.array(W.x0, dtype=float)
    M2f = np.array(Q2.M, dtype=float)
    grad0 = 2.0 * M2f @ x0
    gnorm = float(np.sqrt(grad0 @ grad0))
    if gnorm < 1e-12:
        raise ValueError("grad Q2 vanishes at the weight center")
    scale = W.rho * gnorm
    eps_list = tuple(f * scale for f in (0.2, 0.1, 0.05, 0.025))

    # reject weights whose support meets {Q2 = 0} at a critical point
    pts = W.support_grid()
    vals = Q2.eval_float(pts)
    near = np.abs(vals) < 0.2 * scale
    if near.any():
        gn = np.sqrt(((2.0 * pts[near] @ M2f) ** 2).sum(axis=1))
        if float(gn.min()) < 1e-8 * gnorm:
            raise ValueError("grad Q2 vanishes on the support near Q2 = 0")

    G = 12
    prev = None
    while True:
        check_guard("tau_infinity", (G ** (Q2.n - 1)) * 8, guard)
        slabs, coarea = _tau_pass(Q2, W, eps_list, G)
        slab = _extrapolate(np.array(eps_list), np.array(slabs))
        if prev is not None:
            ps, pc = prev
            ds = abs(slab - ps) <= 0.01 * max(abs(slab), 1e-300)
            dc = abs(coarea - pc) <= 0.01 * max(abs(coarea), 1e-300)
            if (ds and dc) or (slab == 0.0 and coarea == 0.0):
                break
        prev = (slab, coarea)
        G *= 2
    result = TauInfinity(slab, coarea, tuple(slabs), eps_list, G)
    if method == "both":
        return result
    return result


def sigma_infinity(Q2, W: WeightFunction, guard: int = DEFAULT_GUARD) -> float:
    """pi times the extrapolated slab estimate of tau_infinity."""
    return math.pi * tau_infinity(Q2, W, guard=guard).slab


# --------------------------------------------------------------------------
# the singular constant and the experiment table
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DensityReport:
    p_max: int
    primes: tuple[SigmaP, ...]
    sigma2: Sigma2
    sigma_inf: float
    sigma_inf_spread: float
    c_truncated: float
    tail_diagnostic: float

    def to_json(self) -> str:
        payload = {
            "p_max": self.p_max,
            "primes": [
                {
                    "p": s.p,
                    "k_used": s.k_used,
                    "sigma_p": s.value,
                    "fraction": f"{s.fraction.numerator}/{s.fraction.denominator}",
                    "converged": s.converged,
                }
                for s in self.primes
            ],
            "sigma2": {
                "k_used": self.sigma2.k_used,
                "value": self.sigma2.value,
                "fraction": (f"{self.sigma2.fraction.numerator}/"
                             f"{self.sigma2.fraction.denominator}"),
                "stabilized": self.sigma2.stabilized,
            },
            "sigma_inf": self.sigma_inf,
            "sigma_inf_spread": self.sigma_inf_spread,
            "c_truncated": self.c_truncated,
            "tail_diagnostic": self.tail_diagnostic,
        }
        return json.dumps(payload, indent=2, sort_keys=True)


def _odd_primes_upto(x: int) -> list[int]:
    return [p for p in range(3, x + 1) if is_prime(p)]


def singular_constant(pair: QuadricPair, W: WeightFunction, p_max: int = 50,
                      k_max: int = 5, guard: int = DEFAULT_GUARD) -> DensityReport:
    """c_truncated = sigma_inf * sigma_2 * prod_{2 < p <= p_max} sigma_p,
    with per-prime convergence certificates and a heuristic tail size."""
    if pair.n < 3:
        raise ValueError("densities require n >= 3")
    tau = tau_infinity(pair.Q2, W, guard=guard)
    sigma_inf = math.pi * tau.slab

    k2 = k_max
    while k2 > 2 and 2 ** (k2 * pair.n) > guard:
        k2 -= 1
    s2 = sigma_2(pair, k_max=k2, guard=guard)

    primes = []
    for p in _odd_primes_upto(p_max):
        primes.append(sigma_p(pair, p, k_max=k_max, guard=guard))
    c = sigma_inf * s2.value
    for s in primes:
        c *= s.value

    # heuristic tail: fit |sigma_p - 1| <= C p^{-3/2} on the computed range,
    # then bound the remainder by C * integral_{p_max}^inf t^{-3/2} / log t
    fits = [abs(s.value - 1.0) * s.p**1.5 for s in primes]
    C = max(fits) if fits else 0.0
    tail = C * 2.0 / (math.sqrt(p_max) * math.log(p_max)) if p_max >= 3 else math.inf
    return DensityReport(
        p_max=p_max,
        primes=tuple(primes),
        sigma2=s2,
        sigma_inf=sigma_inf,
        sigma_inf_spread=tau.spread,
        c_truncated=c,
        tail_diagnostic=tail,
    )


@dataclass(frozen=True)
class ExperimentResult:
    report: DensityReport
    rows: tuple[tuple, ...]   # (B, S_B, S_over_Bn2, c_trunc, ratio)

    CSV_HEADER = "B,S_B,S_over_Bn2,c_trunc,ratio"

    def to_csv(self) -> str:
        lines = [self.CSV_HEADER]
        for row in self.rows:
            lines.append(",".join(f"{v:.12g}" for v in row))
        return "\n".join(lines) + "\n"


def experiment(pair: QuadricPair, W: WeightFunction, B_values, p_max: int = 50,
               k_max: int = 5, guard: int = DEFAULT_GUARD,
               workers: int = 1) -> ExperimentResult:
    """Compare S(B) / B^{n-2} against the truncated constant over a B
    ladder; the ratio column should drift toward 1."""
    report = singular_constant(pair, W, p_max=p_max, k_max=k_max, guard=guard)
    c = report.c_truncated
    rows = []
    for B in B_values:
        s = S_of_B(pair, W, B, guard=guard, workers=workers)
        over = s / float(B) ** (pair.n - 2)
        ratio = over / c if c != 0 else math.nan
        rows.append((float(B), s, over, c, ratio))
    return ExperimentResult(report, tuple(rows))
