"""Truncated analytic linear Lie rack series and their defining identities.

A rack series over an algebra is the truncated family (A_n)_{1<=n<=N} of
(n+1)-linear maps, symmetric in the first n slots, encoding the operation

    x |> y = y + sum_{n=1}^{N} A_n(x, ..., x, y),

with A_0(x, y) = y implicit.  Convergence questions are replaced by hard
truncation at order N, which makes every identity below polynomial and
exactly checkable over the rationals.

The canonical series of a left Leibniz algebra has

    A0_n(x_1, ..., x_n, y) = 1/(n!)^2 * sum_{sigma in S_n}
                             ad_{x_sigma(1)} . ... . ad_{x_sigma(n)} (y),

whose diagonal is ad_x^n(y)/n!; it is built here by dynamic programming
over multisets of basis indices rather than by iterating permutations.

The structural identity tying the family together is, for p, q >= 1,

    A_p(x, A_q(y, z)) = sum_{s_1+...+s_q+k=p}
                        A_q(A_{s_1}(x,y), ..., A_{s_q}(x,y), A_k(x,z))

with all indices >= 0 and diagonal shorthand A_m(x, y) = A_m(x,...,x,y).
Both sides are homogeneous of degree p in x, degree q in y and linear in
z, so the identity holds iff the polar forms agree on every basis tuple;
:func:`check_eqm` compares exactly those polar forms (computed by signed
subset-sum evaluation over an integer grid, with heavy caching) and
reports the first violating tuple.  At p = q = 1 the identity is the left
Leibniz identity; at p = 1 it says A_q is invariant.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .algebras import LeibnizAlgebra
from .linalg import MatrixQ, Vector, ZERO, ONE, is_zero_vec, rat, vadd, vunit, vzero
from .multilinear import (
    PartSymMap,
    SymForm,
    is_invariant,
    multisets,
    perm_count,
    polarize,
    subset_sum_weights,
)


class TruncationError(ValueError):
    """An identity was requested beyond the truncation order of the series."""


class NotLeibnizError(ValueError):
    pass


@dataclass(frozen=True)
class RackSeries:
    """Truncated rack series: maps[n-1] is the arity-(n+1) map A_n.

    Immutable; the internal diagonal-matrix memo only caches pure
    recomputable values, so concurrent use is safe (a racing write at worst
    recomputes the same matrix).
    """

    alg: LeibnizAlgebra
    N: int
    maps: tuple  # tuple[PartSymMap, ...], maps[n-1] = A_n
    _diag_memo: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.N < 1 or len(self.maps) != self.N:
            raise ValueError("need exactly N maps A_1..A_N")
        for n, m in enumerate(self.maps, start=1):
            if m.n != n or m.dim != self.alg.dim:
                raise ValueError(f"map #{n} has arity {m.n} and dim {m.dim}")

    @classmethod
    def from_maps(cls, alg: LeibnizAlgebra, maps: Sequence[PartSymMap],
                  expect_bracket: bool = True) -> "RackSeries":
        series = cls(alg, len(maps), tuple(maps))
        if expect_bracket and series.A(1) != PartSymMap.from_bracket(alg):
            raise ValueError("A_1 does not equal the algebra bracket")
        return series

    def A(self, n: int) -> PartSymMap:
        if not 1 <= n <= self.N:
            raise TruncationError(f"A_{n} not available at truncation order {self.N}")
        return self.maps[n - 1]

    def with_map(self, n: int, new_map: PartSymMap) -> "RackSeries":
        """Copy of the series with A_n replaced (for perturbation tests)."""
        maps = list(self.maps)
        maps[n - 1] = new_map
        return RackSeries(self.alg, self.N, tuple(maps))

    def diag_matrix(self, n: int, x: Vector) -> MatrixQ:
        """Matrix of y -> A_n(x, ..., x, y); n = 0 gives the identity."""
        if n == 0:
            return MatrixQ.identity(self.alg.dim)
        key = (n, x)
        m = self._diag_memo.get(key)
        if m is None:
            m = self.A(n).diag_matrix(x)
            self._diag_memo[key] = m
        return m

    def eval_truncated(self, x: Vector, y: Vector) -> Vector:
        """x |> y truncated at order N."""
        out = y
        for n in range(1, self.N + 1):
            out = vadd(out, self.diag_matrix(n, x).matvec(y))
        return out


def canonical_series(alg: LeibnizAlgebra, N: int) -> RackSeries:
    """The canonical rack series of a left Leibniz algebra, exactly.

    Requires the left Leibniz identity (checked); the coefficient on the
    basis multiset mu is (mu!/(n!)^2) * sum over distinct orderings of mu of
    the corresponding ad-composition, computed by dynamic programming.
    """
    if not alg.check_left_leibniz().passed:
        raise NotLeibnizError("algebra does not satisfy the left Leibniz identity")
    dim = alg.dim
    ads = [alg.ad_matrix(vunit(dim, i)) for i in range(dim)]
    word_sums: dict = {(): MatrixQ.identity(dim)}
    for size in range(1, N + 1):
        for mu in multisets(dim, size):
            acc = MatrixQ.zeros(dim, dim)
            for i in set(mu):
                rest = list(mu)
                rest.remove(i)
                acc = acc + (ads[i] @ word_sums[tuple(rest)])
            word_sums[mu] = acc
    maps = []
    for n in range(1, N + 1):
        scale_den = math.factorial(n) ** 2
        coeffs = {}
        for mu in multisets(dim, n):
            mult_fact = 1
            for i in set(mu):
                mult_fact *= math.factorial(mu.count(i))
            s = Fraction(mult_fact, scale_den)
            m = word_sums[mu]
            for j in range(dim):
                v = tuple(s * e for e in m.col(j))
                if not is_zero_vec(v):
                    coeffs[(mu, j)] = v
        maps.append(PartSymMap(n, dim, coeffs))
    return RackSeries.from_maps(alg, maps)


# ---------------------------------------------------------------------------
# The multilinear compatibility identity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EqmReport:
    """Result of one (p, q) identity check.

    On failure, ``witness`` is ``(mu, nu, j, residual)``: the basis multiset
    in x, the basis multiset in y, the z-basis index and the nonzero polar
    residual vector.
    """

    p: int
    q: int
    passed: bool
    witness: "tuple | None" = None


def _outer_matrix(a_q: PartSymMap, vs: Sequence[Vector]) -> MatrixQ:
    """Matrix of z -> A_q(v_1, ..., v_q, z) for arbitrary vectors v_i."""
    dim = a_q.dim
    q = a_q.n
    cols = [[ZERO] * dim for _ in range(dim)]
    for tup in itertools.product(range(dim), repeat=q):
        w = ONE
        for t, i in enumerate(tup):
            w = w * vs[t][i]
            if w == 0:
                break
        if w == 0:
            continue
        mu = tuple(sorted(tup))
        for j in range(dim):
            coeff = a_q.coeffs.get((mu, j))
            if coeff is None:
                continue
            col = cols[j]
            for k, e in enumerate(coeff):
                if e:
                    col[k] += w * e
    return MatrixQ.from_cols([tuple(c) for c in cols])


def _compositions_grouped(p: int, q: int):
    """Multisets (s_1 <= ... <= s_q) with sum <= p, paired with k = p - sum
    and the number of ordered rearrangements."""
    out = []
    for m in itertools.combinations_with_replacement(range(p + 1), q):
        s = sum(m)
        if s <= p:
            out.append((m, p - s, perm_count(m)))
    return out


def check_eqm(series: RackSeries, p: int, q: int) -> EqmReport:
    """Exact check of the compatibility identity at bidegree (p, q).

    The difference of the two sides is polarized in x and in y and compared
    on all basis tuples: C(dim+p-1,p) * C(dim+q-1,q) * dim exact residual
    evaluations, served from a grid of cached residual matrices.
    """
    if p < 1 or q < 1:
        raise ValueError("p and q must be >= 1")
    if max(p, q) > series.N:
        raise TruncationError(
            f"identity at (p={p}, q={q}) needs maps beyond truncation order {series.N}"
        )
    alg = series.alg
    dim = alg.dim
    a_q = series.A(q)
    groups = _compositions_grouped(p, q)
    residual_memo: dict = {}

    def residual_matrix(x: Vector, y: Vector) -> MatrixQ:
        key = (x, y)
        r = residual_memo.get(key)
        if r is not None:
            return r
        mp = series.diag_matrix(p, x)
        mq = series.diag_matrix(q, y)
        lhs = mp @ mq
        rhs = MatrixQ.zeros(dim, dim)
        for m, k, count in groups:
            vs = [series.diag_matrix(s, x).matvec(y) for s in m]
            outer = _outer_matrix(a_q, vs)
            term = outer @ series.diag_matrix(k, x)
            rhs = rhs + (term.scale(count) if count != 1 else term)
        r = lhs - rhs
        residual_memo[key] = r
        return r

    scale = Fraction(1, math.factorial(p) * math.factorial(q))
    weight_memo: dict = {}

    def weights_for(mu):
        w = weight_memo.get(mu)
        if w is None:
            w = subset_sum_weights([vunit(dim, i) for i in mu])
            weight_memo[mu] = w
        return w

    for mu in multisets(dim, p):
        wx = weights_for(mu)
        for nu in multisets(dim, q):
            wy = weights_for(nu)
            polar = MatrixQ.zeros(dim, dim)
            for x, cx in wx.items():
                for y, cy in wy.items():
                    c = cx * cy
                    polar = polar + residual_matrix(x, y).scale(c)
            if not polar.is_zero():
                for j in range(dim):
                    col = polar.col(j)
                    if not is_zero_vec(col):
                        witness = (mu, nu, j, tuple(scale * e for e in col))
                        return EqmReport(p, q, False, witness)
    return EqmReport(p, q, True)


def check_eqm_family(series: RackSeries, total_max: "int | None" = None):
    """Run check_eqm for every p, q >= 1 with p + q <= total_max (default N).

    The per-pair checks are independent and could run concurrently; they are
    executed in deterministic (p, q) order here so reports are stable.
    """
    bound = series.N if total_max is None else total_max
    reports = []
    for p in range(1, bound):
        for q in range(1, bound - p + 1):
            reports.append(check_eqm(series, p, q))
    return reports


@dataclass(frozen=True)
class InvarianceReport:
    passed: bool
    per_n: dict  # n -> bool
    first_failing: "int | None"


def check_invariance_all(series: RackSeries) -> InvarianceReport:
    """is_invariant for each A_n, n = 1..N."""
    per_n = {}
    first = None
    for n in range(1, series.N + 1):
        ok = is_invariant(series.alg, series.A(n))
        per_n[n] = ok
        if not ok and first is None:
            first = n
    return InvarianceReport(first is None, per_n, first)


# ---------------------------------------------------------------------------
# Series generated by an invariant form and an analytic coefficient sequence
# ---------------------------------------------------------------------------


def _poly_mul_trunc(a: "list[Fraction]", b: "list[Fraction]", max_deg: int) -> "list[Fraction]":
    out = [ZERO] * (max_deg + 1)
    for i, ai in enumerate(a):
        if ai == 0 or i > max_deg:
            continue
        for j, bj in enumerate(b):
            if i + j > max_deg:
                break
            if bj:
                out[i + j] += ai * bj
    return out


def series_from_F(alg: LeibnizAlgebra, P: SymForm, a: Sequence, N: int) -> RackSeries:
    """Expand exp(F(P(x,...,x)) ad_x)(y) as a truncated rack series.

    ``P`` must be an invariant scalar form; ``a = (a_1, ..., a_m)`` gives
    F(u) = 1 + sum a_k u^k (so F(0) = 1 and A_1 is the bracket).  The
    expansion is exact: powers of F are composed formally in the scalar
    variable u = P(x,...,x), multiplied by ad_x powers, and each homogeneous
    x-degree component is polarized into its symmetric map.  No floating
    exponential is involved.
    """
    if not P.scalar:
        raise ValueError("P must be scalar-valued")
    if not is_invariant(alg, P):
        raise ValueError("P is not invariant")
    coeffs_a = [rat(c) for c in a]
    arity = P.p
    dim = alg.dim
    max_j = N // arity if arity else 0
    f_poly = [ONE] + coeffs_a  # F as a coefficient list in u
    # fpow[m] = coefficients of F(u)^m up to degree max_j
    fpow = [[ONE] + [ZERO] * max_j]
    for m in range(1, N + 1):
        fpow.append(_poly_mul_trunc(fpow[-1], f_poly, max_j))

    def make_diag(n):
        terms = []  # (coefficient, ad-power m)
        for m in range(1, n + 1):
            rem = n - m
            if rem % arity:
                continue
            j = rem // arity
            c = fpow[m][j] / math.factorial(m)
            if c != 0:
                terms.append((c, m, j))

        max_m = max((m for _, m, _ in terms), default=0)
        max_pow = max((j for _, _, j in terms), default=0)

        def diag(x, y):
            u = P.diag(x)
            upow = [ONE]
            for _ in range(max_pow):
                upow.append(upow[-1] * u)
            admat = alg.ad_matrix(x)
            ad_apply = [y]
            for _ in range(max_m):
                ad_apply.append(admat.matvec(ad_apply[-1]))
            out = [ZERO] * dim
            for c, m, j in terms:
                w = c * upow[j]
                if w == 0:
                    continue
                for k, e in enumerate(ad_apply[m]):
                    if e:
                        out[k] += w * e
            return tuple(out)

        return diag

    maps = [polarize(make_diag(n), n, dim) for n in range(1, N + 1)]
    return RackSeries.from_maps(alg, maps)
