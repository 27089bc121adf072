"""Extraction of the invariant data behind a rack series, and the rebuild.

Over an algebra with trivial zero- and one-cohomology, a rack series whose
A_1 is the bracket is determined by a unique family (B_l)_{l>=2} of
invariant symmetric vector-valued forms through the diagonal identity

    A_n(x, y) = A0_n(x, y)
              + sum_{1<=k<=[n/2]} sum_{(l_1,...,l_k), l_i>=2, s=sum l_i<=n}
                    A0_k(B_{l_1}(x), ..., B_{l_k}(x), A0_{n-s}(x, y)),

where A0 is the canonical series, B_l(x) = B_l(x,...,x), and the inner sum
runs over ordered tuples (the displayed low-degree cases fix this: the
mixed (2,3)/(3,2) pair contributes both orders, which is what produces the
symmetrized 1/2 (...) terms).  The lower bound l_i >= 2 follows the
inductive construction; see the package notes.

:func:`reconstruct_B` inverts the identity degree by degree: at each step
the known part R(x) is subtracted, the difference D(x) = A_{n+1}(x, .) -
R(x) must be a coboundary-type cocycle (checked exactly; failure raises
:class:`CohomologyObstruction`), the unique b with D(x)(y) = [b, y] is
solved per grid point, and x -> b(x) is polarized into the symmetric form
B_{n+1}, whose invariance is then verified.

:func:`build_series_from_B` is the forward substitution; round trips are
exact by construction and exercised in the tests.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping

from .algebras import LeibnizAlgebra
from .cohomology import Cochain, NoBracketForm, cohomology_dims, delta, solve_coboundary
from .linalg import MatrixQ, Vector, ZERO, is_zero_vec, vadd, vunit, vzero
from .multilinear import (
    PartSymMap,
    SymForm,
    is_invariant,
    multisets,
    perm_count,
    polarize,
    PolarizationMismatch,
)
from .series import RackSeries, canonical_series


class CohomologyObstruction(ValueError):
    """delta(D(x)) != 0 at some induction degree: the series violates the
    q = 1 compatibility family."""

    def __init__(self, degree, message):
        self.degree = degree
        super().__init__(message)


class NoBracketFormError(ValueError):
    """A cocycle D(x) was not of bracket form (impossible when H^1 = 0)."""

    def __init__(self, degree, message):
        self.degree = degree
        super().__init__(message)


class InvarianceFailure(ValueError):
    """A recovered B was not invariant (or not a consistent polarization):
    the input is not a rack series."""

    def __init__(self, degree, message):
        self.degree = degree
        super().__init__(message)


def _link_groups(n: int, k: int, l_max: int):
    """Multisets (l_1 <= ... <= l_k), entries in [2, l_max], sum <= n, with
    the count of ordered rearrangements."""
    out = []
    if l_max < 2:
        return out
    for m in itertools.combinations_with_replacement(range(2, l_max + 1), k):
        if sum(m) <= n:
            out.append((m, perm_count(m)))
    return out


def _correction_columns(alg, canon: RackSeries, B: Mapping[int, SymForm],
                        n: int, l_max: int, x: Vector) -> MatrixQ:
    """Matrix of y -> sum-over-(k, l-tuples) A0_k(B_l(x)..., A0_{n-s}(x, y))
    with every l_i <= l_max."""
    dim = alg.dim
    total = MatrixQ.zeros(dim, dim)
    b_diag: dict = {}

    def bdiag(l):
        v = b_diag.get(l)
        if v is None:
            form = B.get(l)
            v = form.diag(x) if form is not None else vzero(dim)
            b_diag[l] = v
        return v

    for k in range(1, n // 2 + 1):
        a0k = canon.A(k)
        for m, count in _link_groups(n, k, l_max):
            vs = [bdiag(l) for l in m]
            if any(is_zero_vec(v) for v in vs):
                continue
            from .series import _outer_matrix

            outer = _outer_matrix(a0k, vs)
            term = outer @ canon.diag_matrix(n - sum(m), x)
            total = total + (term.scale(count) if count != 1 else term)
    return total


def build_series_from_B(alg: LeibnizAlgebra, B: Mapping[int, SymForm], N: int) -> RackSeries:
    """Forward substitution of an invariant B-family into a rack series.

    ``B`` maps l >= 2 to an invariant symmetric vector-valued form of arity
    l; missing degrees are zero.  Raises ValueError when some B_l is not
    invariant or has the wrong shape.
    """
    dim = alg.dim
    for l, form in B.items():
        if l < 2:
            raise ValueError("B indices start at 2")
        if form.scalar or form.p != l or form.dim != dim:
            raise ValueError(f"B[{l}] has the wrong shape")
        if not is_invariant(alg, form):
            raise ValueError(f"B[{l}] is not invariant")
    canon = canonical_series(alg, N)
    maps = []
    for n in range(1, N + 1):
        if n == 1:
            maps.append(canon.A(1))
            continue

        def diag(x, y, n=n):
            base = canon.diag_matrix(n, x).matvec(y)
            corr = _correction_columns(alg, canon, B, n, n, x).matvec(y)
            return vadd(base, corr)

        maps.append(polarize(diag, n, dim))
    return RackSeries.from_maps(alg, maps)


@dataclass(frozen=True)
class ReconstructionStep:
    degree: int
    status: str  # "ok" | "obstruction" | "no_bracket_form" | "invariance_failure"
    B: "SymForm | None"


def reconstruct_B(series: RackSeries) -> "dict[int, SymForm]":
    """Recover the unique invariant B-family of a rack series, degree by degree.

    Preconditions (checked): the algebra has H^0 = H^1 = 0 and A_1 is the
    bracket.  Raises :class:`CohomologyObstruction`,
    :class:`NoBracketFormError` or :class:`InvarianceFailure` with the
    offending degree when the input is not a rack series of the assumed
    form.
    """
    alg = series.alg
    dim = alg.dim
    if cohomology_dims(alg) != (0, 0):
        raise ValueError(
            "reconstruction requires trivial zero- and one-cohomology; refusing to run"
        )
    if series.A(1) != PartSymMap.from_bracket(alg):
        raise ValueError("A_1 must equal the algebra bracket")
    canon = canonical_series(alg, series.N)
    B: dict = {}
    for n in range(2, series.N + 1):
        # Known part R(x): canonical term plus corrections using B_l, l <= n-1.
        def b_of_x(x, n=n):
            target = series.diag_matrix(n, x)
            known = canon.diag_matrix(n, x) + _correction_columns(
                alg, canon, B, n, n - 1, x
            )
            D = Cochain.from_matrix(target - known)
            if not delta(alg, D).is_zero():
                raise CohomologyObstruction(
                    n, f"delta(D(x)) != 0 at degree {n}, x = {x}"
                )
            try:
                sol = solve_coboundary(alg, D)
            except NoBracketForm as exc:
                raise NoBracketFormError(n, str(exc)) from exc
            return sol.vector

        try:
            form = polarize_vector_form(b_of_x, n, dim)
        except PolarizationMismatch as exc:
            raise InvarianceFailure(
                n, f"recovered map at degree {n} is not a homogeneous polynomial family: {exc}"
            ) from exc
        if not is_invariant(alg, form):
            raise InvarianceFailure(n, f"recovered B_{n} is not invariant")
        if not form.is_zero():
            B[n] = form
        else:
            B[n] = form  # keep explicit zeros so the report covers every degree
    return B


def polarize_vector_form(fn, p: int, dim: int) -> SymForm:
    """Polarize a homogeneous degree-p vector-valued function of x into a
    symmetric form (wrapper over :func:`multilinear.polarize_form`)."""
    from .multilinear import polarize_form

    return polarize_form(fn, p, dim, scalar=False, verify=True)


def reconstruction_report(series: RackSeries) -> "list[ReconstructionStep]":
    """Per-degree report variant of :func:`reconstruct_B` (never raises for
    per-degree failures; stops after the first failing degree)."""
    try:
        B = reconstruct_B(series)
    except CohomologyObstruction as exc:
        return _partial_report(series, exc.degree, "obstruction")
    except NoBracketFormError as exc:
        return _partial_report(series, exc.degree, "no_bracket_form")
    except InvarianceFailure as exc:
        return _partial_report(series, exc.degree, "invariance_failure")
    return [ReconstructionStep(n, "ok", B[n]) for n in sorted(B)]


def _partial_report(series: RackSeries, bad_degree: int, status: str):
    steps = []
    truncated = RackSeries(series.alg, bad_degree - 1, series.maps[: bad_degree - 1])
    if bad_degree > 2:
        partial = reconstruct_B(truncated)
        steps = [ReconstructionStep(n, "ok", partial[n]) for n in sorted(partial)]
    steps.append(ReconstructionStep(bad_degree, status, None))
    return steps
