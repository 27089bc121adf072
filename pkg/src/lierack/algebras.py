"""Left Leibniz algebras given by exact rational structure constants.

A left Leibniz algebra is an algebra whose left multiplications are
derivations:

    [u, [v, w]] = [[u, v], w] + [v, [u, w]]          (left Leibniz identity)

No skew-symmetry is assumed; a left Leibniz algebra is a Lie algebra exactly
when its bracket is skew-symmetric.  Structure constants are stored as
``c[i][j]`` = coordinates of ``[e_i, e_j]`` and validated against the left
Leibniz identity at construction time (with an explicit ``check=False``
escape hatch for negative tests).

Pinned basis conventions for the built-in algebras:

* ``sl2``: basis ``(h, e, f)`` for the traceless 2x2 matrices
  ``h = (1,0;0,-1)``, ``e = (0,1;0,0)``, ``f = (0,0;1,0)``, so
  ``[h,e] = 2e``, ``[h,f] = -2f``, ``[e,f] = h``.
* ``so3``: basis ``(E_a, E_b, E_c)`` of elementary skew-symmetric 3x3
  matrices matching the parameters ``(a, b, c)`` of a general skew matrix
  ``((0,a,b),(-a,0,c),(-b,-c,0))``; the brackets come from the 3x3
  commutators: ``[E_a,E_b] = -E_c``, ``[E_b,E_c] = -E_a``,
  ``[E_c,E_a] = -E_b``.
* ``heisenberg``: dimension 3, ``[e1,e2] = e3 = -[e2,e1]``.
* ``nilpotent4``: the dim-4 two-step nilpotent algebra ``heisenberg + R``
  (one extra central generator).
* ``abelian``: all brackets zero, any dimension.

The bilinear form used throughout is ``<x, y> = tr(ad_x . ad_y) / 2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .linalg import (
    MatrixQ,
    Scalar,
    Vector,
    ZERO,
    as_vec,
    is_zero_vec,
    kernel_basis,
    rat,
    span_basis,
    vadd,
    vscale,
    vunit,
    vzero,
)


class StructureError(ValueError):
    """Raised when structure constants violate the left Leibniz identity."""


@dataclass(frozen=True)
class LeibnizReport:
    """Outcome of a left-Leibniz check.

    ``violations`` holds ``(i, j, k, residual)`` tuples where ``residual``
    is the nonzero vector
    ``[e_i,[e_j,e_k]] - [[e_i,e_j],e_k] - [e_j,[e_i,e_k]]``.
    """

    passed: bool
    violations: tuple = ()


@dataclass(frozen=True)
class Subspace:
    """A subspace of Q^d given by a linearly independent basis."""

    ambient_dim: int
    basis: tuple  # tuple of Vectors

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, v: Vector) -> bool:
        from .linalg import in_span

        return in_span(v, list(self.basis))


@dataclass(frozen=True)
class LeibnizAlgebra:
    """Finite-dimensional left Leibniz algebra over Q.

    ``c[i][j]`` is the coordinate vector of ``[e_i, e_j]``.  Instances are
    immutable and all operations are pure, so they can be shared freely
    across threads.
    """

    dim: int
    basis_names: tuple
    c: tuple  # c[i][j] -> Vector
    name: str = field(default="", compare=False)

    @classmethod
    def from_constants(
        cls,
        constants: Sequence[Sequence[Sequence[Scalar]]],
        basis_names: "Sequence[str] | None" = None,
        check: bool = True,
        name: str = "",
    ) -> "LeibnizAlgebra":
        dim = len(constants)
        c = tuple(tuple(as_vec(constants[i][j]) for j in range(dim)) for i in range(dim))
        if basis_names is None:
            basis_names = tuple(f"e{i + 1}" for i in range(dim))
        alg = cls(dim, tuple(basis_names), c, name=name)
        if check:
            report = alg.check_left_leibniz()
            if not report.passed:
                i, j, k, res = report.violations[0]
                raise StructureError(
                    f"left Leibniz identity fails on basis triple ({i},{j},{k}); residual {res}"
                )
        return alg

    # -- bracket machinery -------------------------------------------------

    def bracket(self, x: Vector, y: Vector) -> Vector:
        """Bilinear bracket [x, y] expanded over the structure constants."""
        if len(x) != self.dim or len(y) != self.dim:
            raise ValueError("dimension mismatch in bracket")
        out = [ZERO] * self.dim
        for i, xi in enumerate(x):
            if xi == 0:
                continue
            ci = self.c[i]
            for j, yj in enumerate(y):
                if yj == 0:
                    continue
                w = xi * yj
                for k, e in enumerate(ci[j]):
                    if e:
                        out[k] += w * e
        return tuple(out)

    def basis_bracket(self, i: int, j: int) -> Vector:
        return self.c[i][j]

    def ad_matrix(self, x: Vector) -> MatrixQ:
        """Matrix of ad_x : v -> [x, v]; column j holds [x, e_j]."""
        if len(x) != self.dim:
            raise ValueError("dimension mismatch in ad_matrix")
        cols = []
        for j in range(self.dim):
            col = [ZERO] * self.dim
            for i, xi in enumerate(x):
                if xi == 0:
                    continue
                for k, e in enumerate(self.c[i][j]):
                    if e:
                        col[k] += xi * e
            cols.append(tuple(col))
        return MatrixQ.from_cols(cols)

    def right_mult_matrix(self, x: Vector) -> MatrixQ:
        """Matrix of v -> [v, x]."""
        if len(x) != self.dim:
            raise ValueError("dimension mismatch")
        cols = []
        for j in range(self.dim):
            col = [ZERO] * self.dim
            for i, xi in enumerate(x):
                if xi == 0:
                    continue
                for k, e in enumerate(self.c[j][i]):
                    if e:
                        col[k] += xi * e
            cols.append(tuple(col))
        return MatrixQ.from_cols(cols)

    def check_left_leibniz(self) -> LeibnizReport:
        """Verify the left Leibniz identity on every basis triple, exactly."""
        violations = []
        for i in range(self.dim):
            for j in range(self.dim):
                for k in range(self.dim):
                    lhs = self.bracket(vunit(self.dim, i), self.c[j][k])
                    rhs1 = self.bracket(self.c[i][j], vunit(self.dim, k))
                    rhs2 = self.bracket(vunit(self.dim, j), self.c[i][k])
                    residual = tuple(a - b - c for a, b, c in zip(lhs, rhs1, rhs2))
                    if not is_zero_vec(residual):
                        violations.append((i, j, k, residual))
        return LeibnizReport(not violations, tuple(violations))

    # -- structural subspaces ---------------------------------------------

    def center(self) -> Subspace:
        """Z = {a : [a, h] = 0 and [h, a] = 0}, by exact kernel computation."""
        rows = []
        for j in range(self.dim):
            for k in range(self.dim):
                rows.append(tuple(self.c[i][j][k] for i in range(self.dim)))
                rows.append(tuple(self.c[j][i][k] for i in range(self.dim)))
        basis = kernel_basis(MatrixQ.from_rows(rows))
        return Subspace(self.dim, tuple(basis))

    def derived(self) -> Subspace:
        """Span of all brackets [e_i, e_j]."""
        vectors = [self.c[i][j] for i in range(self.dim) for j in range(self.dim)]
        return Subspace(self.dim, tuple(span_basis(vectors, self.dim)))

    # -- trace form ---------------------------------------------------------

    def trace_form(self, x: Vector, y: Vector) -> Fraction:
        """<x, y> = tr(ad_x . ad_y) / 2 (symmetric, exact)."""
        prod = self.ad_matrix(x) @ self.ad_matrix(y)
        return prod.trace() / 2

    def gram(self) -> MatrixQ:
        """Gram matrix of the trace form on the basis."""
        ads = [self.ad_matrix(vunit(self.dim, i)) for i in range(self.dim)]
        return MatrixQ.from_rows(
            [[(ads[i] @ ads[j]).trace() / 2 for j in range(self.dim)] for i in range(self.dim)]
        )


def _zero_constants(dim: int):
    return [[[0] * dim for _ in range(dim)] for _ in range(dim)]


def _sl2() -> LeibnizAlgebra:
    c = _zero_constants(3)
    h, e, f = 0, 1, 2
    c[h][e][e] = 2
    c[e][h][e] = -2
    c[h][f][f] = -2
    c[f][h][f] = 2
    c[e][f][h] = 1
    c[f][e][h] = -1
    return LeibnizAlgebra.from_constants(c, ("h", "e", "f"), name="sl2")


def _so3() -> LeibnizAlgebra:
    c = _zero_constants(3)
    a, b, cc = 0, 1, 2
    c[a][b][cc] = -1
    c[b][a][cc] = 1
    c[b][cc][a] = -1
    c[cc][b][a] = 1
    c[cc][a][b] = -1
    c[a][cc][b] = 1
    return LeibnizAlgebra.from_constants(c, ("Ea", "Eb", "Ec"), name="so3")


def _heisenberg() -> LeibnizAlgebra:
    c = _zero_constants(3)
    c[0][1][2] = 1
    c[1][0][2] = -1
    return LeibnizAlgebra.from_constants(c, ("e1", "e2", "e3"), name="heisenberg")


def _nilpotent4() -> LeibnizAlgebra:
    c = _zero_constants(4)
    c[0][1][2] = 1
    c[1][0][2] = -1
    return LeibnizAlgebra.from_constants(c, ("e1", "e2", "e3", "e4"), name="nilpotent4")


def _abelian(dim: int) -> LeibnizAlgebra:
    return LeibnizAlgebra.from_constants(_zero_constants(dim), name=f"abelian:{dim}")


def builtin(name: str, dim: "int | None" = None) -> LeibnizAlgebra:
    """Construct a built-in algebra by name.

    Accepted names: ``sl2``, ``so3``, ``heisenberg``, ``nilpotent4``,
    ``abelian`` (requires a dimension, either via the ``dim`` argument or as
    ``"abelian:d"``).
    """
    key = name.strip().lower()
    if ":" in key:
        key, _, suffix = key.partition(":")
        if dim is not None:
            raise ValueError("dimension given twice")
        dim = int(suffix)
    if key == "sl2":
        return _sl2()
    if key == "so3":
        return _so3()
    if key == "heisenberg":
        return _heisenberg()
    if key == "nilpotent4":
        return _nilpotent4()
    if key == "abelian":
        if dim is None:
            raise ValueError("abelian algebra needs a dimension, e.g. 'abelian:3'")
        return _abelian(dim)
    raise ValueError(f"unknown builtin algebra {name!r}")


BUILTIN_NAMES = ("sl2", "so3", "heisenberg", "nilpotent4", "abelian:<d>")
