"""Invariant symmetric multilinear forms on a Leibniz algebra.

For a vector-valued symmetric n-linear map B, invariance means

    [y, B(x_1, ..., x_n)] = sum_i B(x_1, ..., [y, x_i], ..., x_n)

for all y; :func:`invariant_basis` solves this linear system exactly inside
the space of symmetric maps (one unknown per basis multiset and output
coordinate) and returns a kernel basis.

The explicit families built from the trace form <.,.>:

    P_n(x_1, ..., x_2n) = 1/(2n)! sum_{sigma} <x_s(1), x_s(2)> ... <x_s(2n-1), x_s(2n)>
    B_n(x_1, ..., x_2n+1) = sum_k P_n(x_1, ..., ^x_k, ..., x_2n+1) x_k

P_n is computed by summing over perfect matchings instead of the (2n)!
permutations: the permutation sum collapses onto matchings with uniform
multiplicity 2^n n!, so the prefactor becomes 2^n n!/(2n)! per matching
(equality with the literal definition is asserted in the tests for small n).
On the diagonal P_n(x, ..., x) = <x,x>^n.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .algebras import LeibnizAlgebra
from .linalg import MatrixQ, ZERO, kernel_basis, solve_linear, vunit, vzero
from .multilinear import SymForm, is_invariant, multisets


def invariant_basis(alg: LeibnizAlgebra, n: int) -> "list[SymForm]":
    """Basis of the space of invariant symmetric n-linear maps alg^n -> alg."""
    if n < 1:
        raise ValueError("arity must be >= 1")
    dim = alg.dim
    mus = list(multisets(dim, n))
    mu_index = {mu: i for i, mu in enumerate(mus)}
    ncols = len(mus) * dim  # unknown (mu, k) -> column mu_index*dim + k
    rows = []
    for y in range(dim):
        for mu in mus:
            for r in range(dim):
                row = [ZERO] * ncols
                # [e_y, B(mu)]_r = sum_k c[y][k][r] * B(mu)_k
                base = mu_index[mu] * dim
                for k in range(dim):
                    coeff = alg.c[y][k][r]
                    if coeff:
                        row[base + k] += coeff
                # - sum over slots of B(mu with e_v -> [e_y, e_v])_r
                for v in set(mu):
                    mult = mu.count(v)
                    rest = list(mu)
                    rest.remove(v)
                    for w, cw in enumerate(alg.c[y][v]):
                        if cw == 0:
                            continue
                        nu = tuple(sorted(rest + [w]))
                        row[mu_index[nu] * dim + r] -= mult * cw
                if any(e != 0 for e in row):
                    rows.append(tuple(row))
    if not rows:
        kernel = [vunit(ncols, i) for i in range(ncols)]
    else:
        kernel = kernel_basis(MatrixQ.from_rows(rows))
    forms = []
    for vec in kernel:
        coeffs = {}
        for i, mu in enumerate(mus):
            val = tuple(vec[i * dim + k] for k in range(dim))
            coeffs[mu] = val
        forms.append(SymForm(n, dim, False, coeffs))
    return forms


def _matchings(items: tuple):
    """All perfect matchings of an even-length tuple of positions."""
    if not items:
        yield ()
        return
    first = items[0]
    for idx in range(1, len(items)):
        pair = (first, items[idx])
        rest = items[1:idx] + items[idx + 1:]
        for sub in _matchings(rest):
            yield (pair,) + sub


def build_P(alg: LeibnizAlgebra, n: int) -> SymForm:
    """The scalar form of arity 2n built from products of the trace form."""
    if n < 1:
        raise ValueError("n must be >= 1 (the arity-0 form is the constant 1)")
    dim = alg.dim
    gram = alg.gram()
    scale = Fraction(2 ** n * math.factorial(n), math.factorial(2 * n))

    def value(mu):
        total = ZERO
        for matching in _matchings(tuple(range(2 * n))):
            prod = Fraction(1)
            for a, b in matching:
                prod *= gram.entries[mu[a]][mu[b]]
                if prod == 0:
                    break
            total += prod
        return scale * total

    return SymForm.from_basis_values(2 * n, dim, value, scalar=True)


def build_B_g(alg: LeibnizAlgebra, n: int) -> SymForm:
    """The vector-valued symmetric form of arity 2n+1: sum_k P_n(... ^x_k ...) x_k."""
    if n < 0:
        raise ValueError("n must be >= 0")
    dim = alg.dim
    if n == 0:
        return SymForm.from_basis_values(1, dim, lambda mu: vunit(dim, mu[0]), scalar=False)
    P = build_P(alg, n)

    def value(mu):
        out = [ZERO] * dim
        for v in set(mu):
            mult = mu.count(v)
            rest = list(mu)
            rest.remove(v)
            pval = P.basis_value(tuple(sorted(rest)))
            if pval:
                out[v] += mult * pval
        return tuple(out)

    return SymForm.from_basis_values(2 * n + 1, dim, value, scalar=False)


@dataclass(frozen=True)
class ArityReport:
    arity: int
    dim_space: int
    spanned_by_B_g: "bool | None"  # None for even arities (no candidate family)


@dataclass(frozen=True)
class SymDimsReport:
    algebra: str
    reports: tuple
    passed: bool


def verify_sym_dims(alg: LeibnizAlgebra, n_max: int) -> SymDimsReport:
    """Check the expected invariant-space dimensions (0, 1, 0, 1, ...).

    For arities m = 2 .. 2*n_max+1: even spaces must vanish and odd spaces
    must be one-dimensional and spanned by the explicit family, which is
    decided by exact rank computations (no tolerance).
    """
    reports = []
    ok = True
    for m in range(2, 2 * n_max + 2):
        basis = invariant_basis(alg, m)
        d = len(basis)
        spanned = None
        if m % 2 == 1:
            b = build_B_g(alg, (m - 1) // 2)
            spanned = (
                d == 1
                and not b.is_zero()
                and _proportional(basis[0], b)
            )
            expected = d == 1 and bool(spanned)
        else:
            expected = d == 0
        ok = ok and expected
        reports.append(ArityReport(m, d, spanned))
    return SymDimsReport(alg.name or "custom", tuple(reports), ok)


def _proportional(f: SymForm, g: SymForm) -> bool:
    """Exact proportionality of two nonzero forms of the same shape."""
    if f.is_zero() or g.is_zero():
        return f.is_zero() and g.is_zero()
    keys = set(f.coeffs) | set(g.coeffs)
    ratio = None
    for mu in sorted(keys):
        fv, gv = f.basis_value(mu), g.basis_value(mu)
        for a, b in zip(fv, gv):
            if a == 0 and b == 0:
                continue
            if b == 0:
                return False
            r = Fraction(a, 1) / b
            if ratio is None:
                ratio = r
            elif r != ratio:
                return False
    return ratio is not None
