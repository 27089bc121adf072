"""Exact linear algebra over the rationals.

Scalars are :class:`fractions.Fraction` (arbitrary precision, always in
canonical form), vectors are tuples of Fractions and matrices are dense,
row-major. Everything in this module is pure and exact: a reported kernel
vector satisfies ``A @ v == 0`` with no tolerance, and ``rank + nullity``
always equals the number of columns.

Rationals serialize as ``"p/q"`` strings (``"p"`` when the denominator is
one); see :func:`format_rational` / :func:`parse_rational`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence, Union

Rational = Fraction

Scalar = Union[int, str, Fraction]

Vector = tuple  # tuple[Fraction, ...]

ZERO = Fraction(0)
ONE = Fraction(1)


def rat(x: Scalar) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"cannot interpret {x!r} as a rational")


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(s: str) -> Fraction:
    s = s.strip()
    if "/" in s:
        num, den = s.split("/")
        return Fraction(int(num), int(den))
    return Fraction(int(s))


# ---------------------------------------------------------------------------
# Vector helpers.  Vectors are plain tuples so they can key dictionaries.
# ---------------------------------------------------------------------------


def vec(*entries: Scalar) -> Vector:
    return tuple(rat(e) for e in entries)


def as_vec(entries: Iterable[Scalar]) -> Vector:
    return tuple(rat(e) for e in entries)


def vzero(dim: int) -> Vector:
    return (ZERO,) * dim


def vunit(dim: int, i: int) -> Vector:
    return tuple(ONE if j == i else ZERO for j in range(dim))


def vadd(u: Vector, v: Vector) -> Vector:
    return tuple(a + b for a, b in zip(u, v, strict=True))


def vsub(u: Vector, v: Vector) -> Vector:
    return tuple(a - b for a, b in zip(u, v, strict=True))


def vneg(u: Vector) -> Vector:
    return tuple(-a for a in u)


def vscale(c: Scalar, u: Vector) -> Vector:
    c = rat(c)
    return tuple(c * a for a in u)


def vdot(u: Vector, v: Vector) -> Fraction:
    return sum((a * b for a, b in zip(u, v, strict=True)), ZERO)


def is_zero_vec(u: Vector) -> bool:
    return all(a == 0 for a in u)


@dataclass(frozen=True)
class MatrixQ:
    """Dense matrix of Fractions, row-major."""

    rows: int
    cols: int
    entries: tuple  # tuple of row tuples

    def __post_init__(self):
        if len(self.entries) != self.rows:
            raise ValueError("row count mismatch")
        for row in self.entries:
            if len(row) != self.cols:
                raise ValueError("column count mismatch")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Scalar]]) -> "MatrixQ":
        data = tuple(tuple(rat(e) for e in row) for row in rows)
        nrows = len(data)
        ncols = len(data[0]) if data else 0
        return cls(nrows, ncols, data)

    @classmethod
    def from_cols(cls, cols: Sequence[Sequence[Scalar]]) -> "MatrixQ":
        ncols = len(cols)
        nrows = len(cols[0]) if cols else 0
        rows = [[rat(cols[j][i]) for j in range(ncols)] for i in range(nrows)]
        return cls.from_rows(rows) if cols else cls(0, 0, ())

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "MatrixQ":
        return cls(rows, cols, tuple((ZERO,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, n: int) -> "MatrixQ":
        return cls(n, n, tuple(vunit(n, i) for i in range(n)))

    def row(self, i: int) -> Vector:
        return self.entries[i]

    def col(self, j: int) -> Vector:
        return tuple(self.entries[i][j] for i in range(self.rows))

    def matvec(self, v: Vector) -> Vector:
        if len(v) != self.cols:
            raise ValueError(f"dimension mismatch: {self.cols} columns, vector of length {len(v)}")
        return tuple(vdot(row, v) for row in self.entries)

    def __matmul__(self, other: "MatrixQ") -> "MatrixQ":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch in matrix product")
        ot = other.transpose().entries
        return MatrixQ(
            self.rows,
            other.cols,
            tuple(tuple(vdot(row, col) for col in ot) for row in self.entries),
        )

    def __add__(self, other: "MatrixQ") -> "MatrixQ":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return MatrixQ(
            self.rows,
            self.cols,
            tuple(vadd(r, s) for r, s in zip(self.entries, other.entries)),
        )

    def __sub__(self, other: "MatrixQ") -> "MatrixQ":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return MatrixQ(
            self.rows,
            self.cols,
            tuple(vsub(r, s) for r, s in zip(self.entries, other.entries)),
        )

    def scale(self, c: Scalar) -> "MatrixQ":
        c = rat(c)
        return MatrixQ(self.rows, self.cols, tuple(vscale(c, r) for r in self.entries))

    def transpose(self) -> "MatrixQ":
        return MatrixQ(self.cols, self.rows, tuple(self.col(j) for j in range(self.cols)))

    def trace(self) -> Fraction:
        if self.rows != self.cols:
            raise ValueError("trace of a non-square matrix")
        return sum((self.entries[i][i] for i in range(self.rows)), ZERO)

    def is_zero(self) -> bool:
        return all(is_zero_vec(r) for r in self.entries)


def rref(m: MatrixQ) -> "tuple[MatrixQ, tuple[int, ...]]":
    """Reduced row echelon form with the list of pivot columns.

    Exact Gaussian elimination: the pivot is the first nonzero entry in the
    current column, no scaling heuristics.
    """
    rows = [list(r) for r in m.entries]
    nrows, ncols = m.rows, m.cols
    pivots = []
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        pivot_row = None
        for i in range(r, nrows):
            if rows[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        pv = rows[r][c]
        rows[r] = [e / pv for e in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return MatrixQ.from_rows(rows) if rows else m, tuple(pivots)


def rank(m: MatrixQ) -> int:
    return len(rref(m)[1])


def kernel_basis(m: MatrixQ) -> "list[Vector]":
    """Basis of the right kernel of ``m`` (empty list when trivial)."""
    reduced, pivots = rref(m)
    pivot_set = set(pivots)
    free = [c for c in range(m.cols) if c not in pivot_set]
    basis = []
    for fc in free:
        v = [ZERO] * m.cols
        v[fc] = ONE
        for r, pc in enumerate(pivots):
            v[pc] = -reduced.entries[r][fc]
        basis.append(tuple(v))
    return basis


@dataclass(frozen=True)
class LinearSolution:
    """Result of :func:`solve_linear`.

    ``status`` is one of ``"no_solution"``, ``"unique"``, ``"affine"``.  For
    the affine case the full solution set is ``particular + span(kernel)``.
    """

    status: str
    particular: "Vector | None"
    kernel: "tuple[Vector, ...]"

    @property
    def solvable(self) -> bool:
        return self.status != "no_solution"

    @property
    def unique(self) -> bool:
        return self.status == "unique"


def solve_linear(m: MatrixQ, b: Vector) -> LinearSolution:
    """Solve ``m @ x = b`` exactly.

    Returns a :class:`LinearSolution`; any returned solution satisfies the
    system with zero residual.
    """
    if len(b) != m.rows:
        raise ValueError(f"dimension mismatch: {m.rows} rows, rhs of length {len(b)}")
    if m.rows == 0:
        kernel = tuple(kernel_basis(m))
        return LinearSolution("unique" if not kernel else "affine", vzero(m.cols), kernel)
    aug = MatrixQ.from_rows([list(row) + [bi] for row, bi in zip(m.entries, b)])
    reduced, pivots = rref(aug)
    if m.cols in pivots:
        return LinearSolution("no_solution", None, ())
    x = [ZERO] * m.cols
    for r, pc in enumerate(pivots):
        x[pc] = reduced.entries[r][m.cols]
    kernel = tuple(kernel_basis(m))
    status = "unique" if not kernel else "affine"
    return LinearSolution(status, tuple(x), kernel)


def span_basis(vectors: Iterable[Vector], dim: int) -> "list[Vector]":
    """Extract an echelonized basis of the span of ``vectors``."""
    vs = [v for v in vectors if not is_zero_vec(v)]
    if not vs:
        return []
    reduced, pivots = rref(MatrixQ.from_rows(vs))
    return [reduced.entries[i] for i in range(len(pivots))]


def in_span(v: Vector, basis: Sequence[Vector]) -> bool:
    """Exact membership of ``v`` in the span of ``basis``."""
    if is_zero_vec(v):
        return True
    if not basis:
        return False
    m = MatrixQ.from_cols(list(basis))
    return solve_linear(m, v).solvable
