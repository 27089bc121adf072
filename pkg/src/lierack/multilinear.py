"""Partially-symmetric multilinear maps: storage, evaluation, polarization.

Two value types live here:

* :class:`PartSymMap`, an (n+1)-linear map symmetric in its first n
  arguments.  Coefficients are stored per *multiset* of basis indices (a
  sorted index tuple) together with the last-slot index, so memory scales
  with C(dim+n-1, n) * dim^2 instead of dim^(n+2); multiplicities are
  restored during evaluation.
* :class:`SymForm`, a fully symmetric p-linear form with scalar or vector
  values, stored per multiset.

Polarization recovers the unique symmetric multilinear map from its
diagonal restriction by inclusion-exclusion over subset sums,

    P(x_1, ..., x_n, y) = 1/n! * sum_{S nonempty} (-1)^(n-|S|) diag(sum_S x_i, y),

which costs 2^n - 1 diagonal evaluations and is exact over the rationals.

The invariance operator of a left Leibniz algebra acts on a multilinear map
A by

    (L_x A)(y_1, ..., y_m) = [x, A(y_1, ..., y_m)] - sum_i A(y_1, ..., [x, y_i], ..., y_m);

a map is *invariant* when L_x A = 0 for every x.  For scalar-valued forms
the leading bracket term is dropped, leaving the pure argument-replacement
sum.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .algebras import LeibnizAlgebra
from .linalg import (
    MatrixQ,
    Vector,
    ZERO,
    ONE,
    is_zero_vec,
    rat,
    vadd,
    vscale,
    vunit,
    vzero,
)

Multiset = tuple  # sorted tuple[int, ...]


def multisets(dim: int, n: int):
    """All size-n multisets over {0, ..., dim-1} as sorted tuples."""
    return itertools.combinations_with_replacement(range(dim), n)


def perm_count(mu: Multiset) -> int:
    """Number of distinct orderings of the multiset: n! / prod(mult!)."""
    total = math.factorial(len(mu))
    for i in set(mu):
        total //= math.factorial(mu.count(i))
    return total


def monomial(x: Vector, mu: Multiset) -> Fraction:
    """prod_i x[mu_i] (exact)."""
    out = ONE
    for i in mu:
        out = out * x[i]
        if out == 0:
            return ZERO
    return out


def subset_sum_weights(vectors: Sequence[Vector]):
    """Signed subset-sum weights used by polarization.

    Returns a dict mapping each distinct nonempty subset sum (as a tuple)
    to sum of (-1)^(p - |S|) over the subsets S producing it.  Collapsing
    repeated sums keeps the number of function evaluations small when the
    argument tuple has repeated entries.
    """
    p = len(vectors)
    weights: dict = {}
    for r in range(1, p + 1):
        sign = (-1) ** (p - r)
        for subset in itertools.combinations(range(p), r):
            s = vectors[subset[0]]
            for i in subset[1:]:
                s = vadd(s, vectors[i])
            weights[s] = weights.get(s, 0) + sign
    return {v: w for v, w in weights.items() if w != 0}


class ArityError(ValueError):
    pass


@dataclass(frozen=True)
class PartSymMap:
    """(n+1)-linear map, symmetric in the first n slots, values in Q^dim.

    ``coeffs[(mu, j)]`` is the value ``A(e_mu, e_j)`` as a coordinate
    vector; missing keys are zero.  The multiset storage makes invariance
    under permutation of the first n arguments structural.
    """

    n: int
    dim: int
    coeffs: dict  # (Multiset, int) -> Vector

    def __post_init__(self):
        clean = {}
        for (mu, j), v in self.coeffs.items():
            if tuple(sorted(mu)) != tuple(mu):
                raise ValueError(f"multiset key {mu} is not sorted")
            if len(mu) != self.n:
                raise ArityError(f"key {mu} has arity {len(mu)}, map has n={self.n}")
            if not is_zero_vec(v):
                clean[(tuple(mu), j)] = tuple(v)
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def zero(cls, n: int, dim: int) -> "PartSymMap":
        return cls(n, dim, {})

    @classmethod
    def from_basis_values(cls, n: int, dim: int, fn: Callable) -> "PartSymMap":
        """Build from ``fn(mu, j) -> Vector`` evaluated on all basis keys."""
        coeffs = {}
        for mu in multisets(dim, n):
            for j in range(dim):
                v = fn(mu, j)
                if not is_zero_vec(v):
                    coeffs[(mu, j)] = tuple(v)
        return cls(n, dim, coeffs)

    @classmethod
    def from_bracket(cls, alg: LeibnizAlgebra) -> "PartSymMap":
        """The algebra bracket viewed as the arity-(1+1) map (x, y) -> [x, y]."""
        return cls.from_basis_values(1, alg.dim, lambda mu, j: alg.c[mu[0]][j])

    def basis_value(self, mu: Multiset, j: int) -> Vector:
        return self.coeffs.get((tuple(mu), j), vzero(self.dim))

    def is_zero(self) -> bool:
        return not self.coeffs

    # -- evaluation ---------------------------------------------------------

    def eval(self, xs: Sequence[Vector], y: Vector) -> Vector:
        """Evaluate A(x_1, ..., x_n, y) by full multilinear expansion."""
        if len(xs) != self.n:
            raise ArityError(f"expected {self.n} symmetric arguments, got {len(xs)}")
        for x in xs:
            if len(x) != self.dim:
                raise ValueError("dimension mismatch")
        if len(y) != self.dim:
            raise ValueError("dimension mismatch")
        # Collapse the ordered-tuple sum per multiset first.
        w_by_mu: dict = {}
        for tup in itertools.product(range(self.dim), repeat=self.n):
            w = ONE
            for t, i in enumerate(tup):
                w = w * xs[t][i]
                if w == 0:
                    break
            if w == 0:
                continue
            mu = tuple(sorted(tup))
            w_by_mu[mu] = w_by_mu.get(mu, ZERO) + w
        out = [ZERO] * self.dim
        for mu, w in w_by_mu.items():
            if w == 0:
                continue
            for j, yj in enumerate(y):
                if yj == 0:
                    continue
                coeff = self.coeffs.get((mu, j))
                if coeff is None:
                    continue
                wy = w * yj
                for k, e in enumerate(coeff):
                    if e:
                        out[k] += wy * e
        return tuple(out)

    def diag(self, x: Vector, y: Vector) -> Vector:
        """A(x, ..., x, y), using multiset multiplicities (fast path)."""
        return self.diag_matrix(x).matvec(y)

    def diag_matrix(self, x: Vector) -> MatrixQ:
        """Matrix of y -> A(x, ..., x, y)."""
        if len(x) != self.dim:
            raise ValueError("dimension mismatch")
        cols = [[ZERO] * self.dim for _ in range(self.dim)]
        for (mu, j), coeff in self.coeffs.items():
            w = monomial(x, mu)
            if w == 0:
                continue
            w = w * perm_count(mu)
            col = cols[j]
            for k, e in enumerate(coeff):
                if e:
                    col[k] += w * e
        return MatrixQ.from_cols([tuple(c) for c in cols])

    # -- linear structure ----------------------------------------------------

    def _binop(self, other: "PartSymMap", sign: int) -> "PartSymMap":
        if (self.n, self.dim) != (other.n, other.dim):
            raise ArityError("shape mismatch")
        keys = set(self.coeffs) | set(other.coeffs)
        coeffs = {}
        for key in keys:
            a = self.coeffs.get(key, vzero(self.dim))
            b = other.coeffs.get(key, vzero(self.dim))
            v = vadd(a, vscale(sign, b))
            if not is_zero_vec(v):
                coeffs[key] = v
        return PartSymMap(self.n, self.dim, coeffs)

    def __add__(self, other: "PartSymMap") -> "PartSymMap":
        return self._binop(other, 1)

    def __sub__(self, other: "PartSymMap") -> "PartSymMap":
        return self._binop(other, -1)

    def scale(self, c) -> "PartSymMap":
        c = rat(c)
        if c == 0:
            return PartSymMap.zero(self.n, self.dim)
        return PartSymMap(
            self.n, self.dim, {key: vscale(c, v) for key, v in self.coeffs.items()}
        )


@dataclass(frozen=True)
class SymForm:
    """Fully symmetric p-linear form, scalar- or vector-valued.

    ``coeffs[mu]`` holds the value on the basis multiset ``mu``: a Fraction
    when ``scalar`` is set, a coordinate vector otherwise.
    """

    p: int
    dim: int
    scalar: bool
    coeffs: dict  # Multiset -> Fraction | Vector

    def __post_init__(self):
        clean = {}
        for mu, v in self.coeffs.items():
            if tuple(sorted(mu)) != tuple(mu):
                raise ValueError(f"multiset key {mu} is not sorted")
            if len(mu) != self.p:
                raise ArityError(f"key {mu} has arity {len(mu)}, form has p={self.p}")
            if self.scalar:
                if v != 0:
                    clean[tuple(mu)] = rat(v)
            elif not is_zero_vec(v):
                clean[tuple(mu)] = tuple(v)
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def zero(cls, p: int, dim: int, scalar: bool = False) -> "SymForm":
        return cls(p, dim, scalar, {})

    @classmethod
    def from_basis_values(cls, p: int, dim: int, fn: Callable, scalar: bool = False) -> "SymForm":
        coeffs = {}
        for mu in multisets(dim, p):
            coeffs[mu] = fn(mu)
        return cls(p, dim, scalar, coeffs)

    def basis_value(self, mu: Multiset):
        default = ZERO if self.scalar else vzero(self.dim)
        return self.coeffs.get(tuple(mu), default)

    def is_zero(self) -> bool:
        return not self.coeffs

    def eval(self, xs: Sequence[Vector]):
        """Full multilinear evaluation at arbitrary vectors."""
        if len(xs) != self.p:
            raise ArityError(f"expected {self.p} arguments, got {len(xs)}")
        w_by_mu: dict = {}
        for tup in itertools.product(range(self.dim), repeat=self.p):
            w = ONE
            for t, i in enumerate(tup):
                w = w * xs[t][i]
                if w == 0:
                    break
            if w == 0:
                continue
            mu = tuple(sorted(tup))
            w_by_mu[mu] = w_by_mu.get(mu, ZERO) + w
        if self.scalar:
            out = ZERO
            for mu, w in w_by_mu.items():
                coeff = self.coeffs.get(mu)
                if coeff is not None:
                    out += w * coeff
            return out
        out_v = [ZERO] * self.dim
        for mu, w in w_by_mu.items():
            coeff = self.coeffs.get(mu)
            if coeff is None:
                continue
            for k, e in enumerate(coeff):
                if e:
                    out_v[k] += w * e
        return tuple(out_v)

    def diag(self, x: Vector):
        """Value on the diagonal (x, ..., x)."""
        if self.scalar:
            out = ZERO
            for mu, coeff in self.coeffs.items():
                w = monomial(x, mu)
                if w:
                    out += w * perm_count(mu) * coeff
            return out
        out_v = [ZERO] * self.dim
        for mu, coeff in self.coeffs.items():
            w = monomial(x, mu)
            if w == 0:
                continue
            w = w * perm_count(mu)
            for k, e in enumerate(coeff):
                if e:
                    out_v[k] += w * e
        return tuple(out_v)

    def _binop(self, other: "SymForm", sign: int) -> "SymForm":
        if (self.p, self.dim, self.scalar) != (other.p, other.dim, other.scalar):
            raise ArityError("shape mismatch")
        keys = set(self.coeffs) | set(other.coeffs)
        coeffs = {}
        for key in keys:
            a = self.basis_value(key)
            b = other.basis_value(key)
            coeffs[key] = a + sign * b if self.scalar else vadd(a, vscale(sign, b))
        return SymForm(self.p, self.dim, self.scalar, coeffs)

    def __add__(self, other: "SymForm") -> "SymForm":
        return self._binop(other, 1)

    def __sub__(self, other: "SymForm") -> "SymForm":
        return self._binop(other, -1)

    def scale(self, c) -> "SymForm":
        c = rat(c)
        if c == 0:
            return SymForm.zero(self.p, self.dim, self.scalar)
        if self.scalar:
            return SymForm(self.p, self.dim, True, {mu: c * v for mu, v in self.coeffs.items()})
        return SymForm(
            self.p, self.dim, False, {mu: vscale(c, v) for mu, v in self.coeffs.items()}
        )


class PolarizationMismatch(ValueError):
    """The supplied diagonal is not the diagonal of a symmetric map."""


def polarize(diag: Callable, n: int, dim: int, verify: bool = True) -> PartSymMap:
    """Recover the PartSymMap with the given diagonal restriction.

    ``diag(x, y)`` must be homogeneous of degree n in ``x`` and linear in
    ``y``.  A verification pass re-evaluates the diagonal of the result on
    the polarization grid and raises :class:`PolarizationMismatch` on any
    discrepancy (this is what catches callers handing in a non-polynomial
    or wrong-degree diagonal).
    """
    inv_fact = Fraction(1, math.factorial(n))
    cache: dict = {}

    def cached(x: Vector, j: int) -> Vector:
        key = (x, j)
        val = cache.get(key)
        if val is None:
            val = diag(x, vunit(dim, j))
            cache[key] = val
        return val

    coeffs = {}
    grid = set()
    for mu in multisets(dim, n):
        weights = subset_sum_weights([vunit(dim, i) for i in mu])
        grid.update(weights)
        for j in range(dim):
            acc = [ZERO] * dim
            for x, w in weights.items():
                val = cached(x, j)
                for k, e in enumerate(val):
                    if e:
                        acc[k] += w * e
            v = vscale(inv_fact, tuple(acc))
            if not is_zero_vec(v):
                coeffs[(mu, j)] = v
    result = PartSymMap(n, dim, coeffs)
    if verify:
        for x in sorted(grid):
            for j in range(dim):
                if result.diag(x, vunit(dim, j)) != tuple(cached(x, j)):
                    raise PolarizationMismatch(
                        f"diagonal disagrees at x={x}, j={j}; "
                        "input is not the diagonal of a symmetric map of this arity"
                    )
    return result


def polarize_form(diag: Callable, p: int, dim: int, scalar: bool = False,
                  verify: bool = True) -> SymForm:
    """Same as :func:`polarize` for fully symmetric forms (no trailing slot)."""
    inv_fact = Fraction(1, math.factorial(p))
    cache: dict = {}

    def cached(x: Vector):
        val = cache.get(x)
        if val is None:
            val = diag(x)
            cache[x] = val
        return val

    coeffs = {}
    grid = set()
    for mu in multisets(dim, p):
        weights = subset_sum_weights([vunit(dim, i) for i in mu])
        grid.update(weights)
        if scalar:
            acc = ZERO
            for x, w in weights.items():
                acc += w * cached(x)
            coeffs[mu] = inv_fact * acc
        else:
            acc_v = [ZERO] * dim
            for x, w in weights.items():
                val = cached(x)
                for k, e in enumerate(val):
                    if e:
                        acc_v[k] += w * e
            coeffs[mu] = vscale(inv_fact, tuple(acc_v))
    result = SymForm(p, dim, scalar, coeffs)
    if verify:
        for x in sorted(grid):
            if result.diag(x) != cached(x):
                raise PolarizationMismatch(
                    f"diagonal disagrees at x={x}; "
                    "input is not the diagonal of a symmetric form of this arity"
                )
    return result


# ---------------------------------------------------------------------------
# Invariance operator
# ---------------------------------------------------------------------------


def _replace_sum(alg: LeibnizAlgebra, getter: Callable, mu: Multiset, ad_cols) -> "list":
    """sum over slots of value(mu with one entry bracketed), expanded linearly.

    ``getter(mu) -> list accumulator-compatible value`` must return a tuple
    (vector) or Fraction; ``ad_cols[v]`` is the vector [x, e_v].
    """
    out = None
    for v in set(mu):
        mult = mu.count(v)
        rest = list(mu)
        rest.remove(v)
        bx = ad_cols[v]
        for w, coeff in enumerate(bx):
            if coeff == 0:
                continue
            val = getter(tuple(sorted(rest + [w])))
            term_scale = mult * coeff
            if out is None:
                out = [term_scale * t for t in val] if isinstance(val, tuple) else term_scale * val
            elif isinstance(val, tuple):
                for k, t in enumerate(val):
                    if t:
                        out[k] += term_scale * t
            else:
                out += term_scale * val
    return out


def lie_derivative(alg: LeibnizAlgebra, m, x: Vector):
    """Apply the invariance operator L_x to a PartSymMap or SymForm.

    Returns a map of the same shape; for scalar forms the leading bracket
    term is dropped.
    """
    if len(x) != alg.dim:
        raise ValueError("dimension mismatch")
    ad = alg.ad_matrix(x)
    ad_cols = [ad.col(j) for j in range(alg.dim)]

    if isinstance(m, PartSymMap):
        def value(mu, j):
            lead = alg.bracket(x, m.basis_value(mu, j))
            repl = _replace_sum(alg, lambda nu: m.basis_value(nu, j), mu, ad_cols)
            out = list(lead)
            if repl is not None:
                for k in range(alg.dim):
                    out[k] -= repl[k]
            # last-slot replacement
            bx = ad_cols[j]
            for w, coeff in enumerate(bx):
                if coeff == 0:
                    continue
                val = m.basis_value(mu, w)
                for k, t in enumerate(val):
                    if t:
                        out[k] -= coeff * t
            return tuple(out)

        return PartSymMap.from_basis_values(m.n, m.dim, value)

    if isinstance(m, SymForm):
        if m.scalar:
            def svalue(mu):
                repl = _replace_sum(alg, m.basis_value, mu, ad_cols)
                return -repl if repl is not None else ZERO

            return SymForm.from_basis_values(m.p, m.dim, svalue, scalar=True)

        def vvalue(mu):
            lead = alg.bracket(x, m.basis_value(mu))
            repl = _replace_sum(alg, m.basis_value, mu, ad_cols)
            out = list(lead)
            if repl is not None:
                for k in range(alg.dim):
                    out[k] -= repl[k]
            return tuple(out)

        return SymForm.from_basis_values(m.p, m.dim, vvalue, scalar=False)

    raise TypeError(f"cannot take a Lie derivative of {type(m).__name__}")


def is_invariant(alg: LeibnizAlgebra, m) -> bool:
    """True iff L_x m = 0 for every basis vector x, checked exactly."""
    for i in range(alg.dim):
        if not lie_derivative(alg, m, vunit(alg.dim, i)).is_zero():
            return False
    return True
