"""Leibniz cohomology in low degrees: coboundary, H^0/H^1, coboundary solving.

The coboundary operator on n-linear maps with values in the algebra is

    delta(w)(x_0, ..., x_n) =
        sum_{i=0}^{n-1} (-1)^i [x_i, w(x_0, ..., ^x_i, ..., x_n)]
      + (-1)^(n-1) [w(x_0, ..., x_{n-1}), x_n]
      + sum_{i<j} (-1)^(i+1) w(x_0, ..., ^x_i, ..., x_{j-1}, [x_i, x_j], x_{j+1}, ..., x_n).

The alternating sign on the first sum is required for delta . delta = 0 (it
is invisible in degrees 0 and 1, where only i = 0 occurs); without it the
square of the operator is nonzero already on degree-1 cochains over sl2.
The two low-degree specializations

    delta(x)(m)    = -[x, m]                       (degree 0, x a vector)
    delta(F)(y, z) = [y, F(z)] + [F(y), z] - F([y, z])   (degree 1)

serving as golden tests for the general formula.  delta is implemented for
input degrees 0..3, which covers C^0 -> C^1 -> C^2 -> C^3: that is all the
H^0/H^1 computation and the delta^2 = 0 checks require, and higher degrees
would cost dim^n storage with no consumer.

Sign bridge for :func:`solve_coboundary`: the equation solved is
``D(y) = [b, y]`` with the positive sign, while ``delta(b)(y) = -[b, y]``;
a degree-1 cocycle D is a coboundary exactly when ``-D`` is hit by delta.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .algebras import LeibnizAlgebra
from .linalg import (
    MatrixQ,
    Vector,
    ZERO,
    is_zero_vec,
    kernel_basis,
    rank,
    solve_linear,
    vadd,
    vscale,
    vunit,
    vzero,
)

MAX_DELTA_DEGREE = 3


class DegreeError(ValueError):
    pass


class NotACocycle(ValueError):
    """solve_coboundary input with delta(D) != 0."""


class NoBracketForm(ValueError):
    """Cocycle that is not of the form y -> [b, y] (possible only when H^1 != 0)."""


@dataclass(frozen=True)
class Cochain:
    """n-linear map on the algebra with values in the algebra.

    Coefficients are stored per ordered index tuple (no symmetry):
    ``coeffs[t]`` is the value on ``(e_{t_0}, ..., e_{t_{n-1}})`` as a
    coordinate vector.  Degree 0 uses the empty tuple as its single key.
    """

    degree: int
    dim: int
    coeffs: dict  # tuple[int, ...] -> Vector

    def __post_init__(self):
        clean = {}
        for t, v in self.coeffs.items():
            if len(t) != self.degree:
                raise DegreeError(f"key {t} does not match degree {self.degree}")
            if not is_zero_vec(v):
                clean[tuple(t)] = tuple(v)
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def zero(cls, degree: int, dim: int) -> "Cochain":
        return cls(degree, dim, {})

    @classmethod
    def from_vector(cls, v: Vector) -> "Cochain":
        return cls(0, len(v), {(): tuple(v)})

    @classmethod
    def from_matrix(cls, m: MatrixQ) -> "Cochain":
        """Degree-1 cochain from the matrix of a linear map."""
        return cls(1, m.rows, {(j,): m.col(j) for j in range(m.cols)})

    def as_vector(self) -> Vector:
        if self.degree != 0:
            raise DegreeError("not a degree-0 cochain")
        return self.coeffs.get((), vzero(self.dim))

    def as_matrix(self) -> MatrixQ:
        if self.degree != 1:
            raise DegreeError("not a degree-1 cochain")
        return MatrixQ.from_cols([self.value((j,)) for j in range(self.dim)])

    def value(self, t) -> Vector:
        return self.coeffs.get(tuple(t), vzero(self.dim))

    def eval(self, args: Sequence[Vector]) -> Vector:
        """Multilinear evaluation at arbitrary vectors."""
        if len(args) != self.degree:
            raise DegreeError(f"expected {self.degree} arguments")
        out = [ZERO] * self.dim
        for t, v in self.coeffs.items():
            w = None
            for slot, i in enumerate(t):
                c = args[slot][i]
                if c == 0:
                    w = ZERO
                    break
                w = c if w is None else w * c
            if not t:
                w = 1
            if not w:
                continue
            for k, e in enumerate(v):
                if e:
                    out[k] += w * e
        return tuple(out)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "Cochain") -> "Cochain":
        if (self.degree, self.dim) != (other.degree, other.dim):
            raise DegreeError("shape mismatch")
        keys = set(self.coeffs) | set(other.coeffs)
        return Cochain(
            self.degree, self.dim, {t: vadd(self.value(t), other.value(t)) for t in keys}
        )

    def __sub__(self, other: "Cochain") -> "Cochain":
        if (self.degree, self.dim) != (other.degree, other.dim):
            raise DegreeError("shape mismatch")
        keys = set(self.coeffs) | set(other.coeffs)
        return Cochain(
            self.degree,
            self.dim,
            {t: vadd(self.value(t), vscale(-1, other.value(t))) for t in keys},
        )

    def scale(self, c) -> "Cochain":
        return Cochain(self.degree, self.dim, {t: vscale(c, v) for t, v in self.coeffs.items()})


def delta(alg: LeibnizAlgebra, w: Cochain) -> Cochain:
    """Coboundary of a cochain of degree n <= 3 (returns degree n + 1)."""
    n = w.degree
    if n > MAX_DELTA_DEGREE:
        raise DegreeError(f"delta implemented for degrees 0..{MAX_DELTA_DEGREE}, got {n}")
    if w.dim != alg.dim:
        raise ValueError("dimension mismatch")
    dim = alg.dim
    coeffs = {}
    for t in itertools.product(range(dim), repeat=n + 1):
        out = [ZERO] * dim
        # (-1)^i [x_i, w(..., ^x_i, ...)] terms
        for i in range(n):
            rest = t[:i] + t[i + 1:]
            si = -1 if i % 2 else 1
            val = alg.bracket(vunit(dim, t[i]), w.value(rest))
            for k, e in enumerate(val):
                if e:
                    out[k] += si * e
        # trailing right-bracket term with sign (-1)^(n-1); n may be 0
        sign = -1 if (n - 1) % 2 else 1
        val = alg.bracket(w.value(t[:n]), vunit(dim, t[n]))
        for k, e in enumerate(val):
            if e:
                out[k] += sign * e
        # bracket-insertion terms, expanded linearly over [x_i, x_j]
        for i in range(n + 1):
            for j in range(i + 1, n + 1):
                s = (-1) ** (i + 1)
                bij = alg.c[t[i]][t[j]]
                for m, coeff in enumerate(bij):
                    if coeff == 0:
                        continue
                    args = t[:i] + t[i + 1:j] + (m,) + t[j + 1:]
                    val = w.value(args)
                    for k, e in enumerate(val):
                        if e:
                            out[k] += s * coeff * e
        if not is_zero_vec(out):
            coeffs[t] = tuple(out)
    return Cochain(n + 1, dim, coeffs)


def _delta_matrix(alg: LeibnizAlgebra, degree: int) -> MatrixQ:
    """Matrix of delta on coefficient coordinates (degree 0 or 1)."""
    dim = alg.dim
    in_keys = list(itertools.product(range(dim), repeat=degree))
    out_keys = list(itertools.product(range(dim), repeat=degree + 1))
    cols = []
    for t in in_keys:
        for k in range(dim):
            basis_cochain = Cochain(degree, dim, {t: vunit(dim, k)})
            img = delta(alg, basis_cochain)
            col = []
            for s in out_keys:
                col.extend(img.value(s))
            cols.append(tuple(col))
    return MatrixQ.from_cols(cols)


def cohomology_dims(alg: LeibnizAlgebra) -> "tuple[int, int]":
    """(h0, h1) computed by exact rank over the rationals."""
    d0 = _delta_matrix(alg, 0)
    d1 = _delta_matrix(alg, 1)
    rank0 = rank(d0)
    rank1 = rank(d1)
    h0 = alg.dim - rank0
    h1 = (alg.dim ** 2 - rank1) - rank0
    return h0, h1


@dataclass(frozen=True)
class CoboundarySolution:
    """Solutions b of D(y) = [b, y]: the affine family particular + span(kernel)."""

    particular: Vector
    kernel: tuple

    @property
    def unique(self) -> bool:
        return not self.kernel

    @property
    def vector(self) -> Vector:
        if not self.unique:
            raise ValueError("solution is not unique; inspect .particular/.kernel")
        return self.particular


def solve_coboundary(alg: LeibnizAlgebra, D: Cochain) -> CoboundarySolution:
    """Solve D(y) = [b, y] for b, given a degree-1 cocycle D.

    Raises :class:`NotACocycle` when delta(D) != 0 and :class:`NoBracketForm`
    when the cocycle is not of bracket form (impossible when H^1 = 0).  The
    solution is unique exactly when H^0 = 0; otherwise the affine family is
    returned.
    """
    if D.degree != 1:
        raise DegreeError("solve_coboundary expects a degree-1 cochain")
    if not delta(alg, D).is_zero():
        raise NotACocycle("delta(D) != 0")
    dim = alg.dim
    # Rows indexed by (y-basis j, output k); unknowns are the coordinates of b.
    rows = []
    rhs = []
    for j in range(dim):
        target = D.value((j,))
        for k in range(dim):
            rows.append(tuple(alg.c[i][j][k] for i in range(dim)))
            rhs.append(target[k])
    sol = solve_linear(MatrixQ.from_rows(rows), tuple(rhs))
    if not sol.solvable:
        raise NoBracketForm("cocycle is not of the form y -> [b, y]")
    return CoboundarySolution(sol.particular, sol.kernel)
