"""GKZ system data, Newton-polytope geometry, and parameter genericity.

Holds the system (A, c) with its kernel lattice, column simplices with exact
rational inverses, the admissibility test |A_sigma^{-1} a(j)| <= 1 (coordinate
sum), normalized volumes, pointed regular triangulations from a lifting
vector, and the two genericity checks on c (very generic, non-resonant).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .errors import (
    DegenerateWeights,
    DimensionTooLarge,
    LatticeNotSaturated,
    RankDeficient,
    SingularSimplex,
)
from .lattice import IntMatrix, kernel_basis, quotient_representatives, smith_normal_form

Rational = Fraction
Scalar = object  # Fraction for exact parameters, complex otherwise


def _is_rational(x) -> bool:
    return isinstance(x, (int, Fraction))


def _coerce_param(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return complex(x)


@dataclass(frozen=True)
class GkzSystem:
    """The pair (A, c) with cached kernel lattice basis."""

    a: IntMatrix
    c: tuple
    kernel: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return self.a.rows

    @property
    def num_columns(self) -> int:
        return self.a.cols

    @property
    def c_is_rational(self) -> bool:
        return all(_is_rational(x) for x in self.c)

    def c_complex(self) -> tuple[complex, ...]:
        return tuple(complex(x) for x in self.c)

    def simplex(self, indices: Sequence[int]) -> "Simplex":
        return Simplex.from_columns(self.a, indices)


@dataclass(frozen=True)
class Simplex:
    """An n-subset of columns with nonzero determinant and exact inverse."""

    indices: tuple[int, ...]
    a_sigma: IntMatrix
    det: int
    inv: tuple[tuple[Fraction, ...], ...]

    @staticmethod
    def from_columns(a: IntMatrix, indices: Sequence[int]) -> "Simplex":
        idx = tuple(sorted(int(i) for i in indices))
        if len(idx) != a.rows or len(set(idx)) != len(idx):
            raise SingularSimplex(f"sigma must be {a.rows} distinct column indices")
        if idx[0] < 0 or idx[-1] >= a.cols:
            raise SingularSimplex(f"column index out of range: {idx}")
        sub = a.submatrix_columns(idx)
        det = sub.det()
        if det == 0:
            raise SingularSimplex(f"det A_sigma = 0 for sigma={idx}")
        return Simplex(indices=idx, a_sigma=sub, det=det, inv=sub.fraction_inverse())

    def complement(self, num_columns: int) -> tuple[int, ...]:
        return tuple(j for j in range(num_columns) if j not in self.indices)

    def inv_times(self, vec: Sequence) -> tuple:
        """A_sigma^{-1} vec, exact when entries are rational."""
        out = []
        for row in self.inv:
            if all(_is_rational(x) for x in vec):
                out.append(sum(r * Fraction(x) for r, x in zip(row, vec)))
            else:
                out.append(sum(float(r) * complex(x) for r, x in zip(row, vec)))
        return tuple(out)


def build_system(a: IntMatrix, c: Sequence) -> GkzSystem:
    """Validate (A, c) and cache the kernel lattice basis.

    Requires full row rank, a saturated column lattice Z A = Z^n, and more
    columns than rows.
    """
    snf = smith_normal_form(a)
    if snf.rank < a.rows:
        raise RankDeficient(f"A has rank {snf.rank} < {a.rows}")
    if any(d != 1 for d in snf.diagonal[: a.rows]):
        raise LatticeNotSaturated(
            f"columns generate index-{abs(_prod(snf.diagonal))} sublattice of Z^{a.rows}"
        )
    if a.cols <= a.rows:
        raise ValueError("need strictly more columns than rows (n < N)")
    if len(tuple(c)) != a.rows:
        raise ValueError("parameter vector length must equal the number of rows")
    return GkzSystem(a=a, c=tuple(_coerce_param(x) for x in c), kernel=kernel_basis(a))


def _prod(xs):
    out = 1
    for x in xs:
        out *= x
    return out


# ---------------------------------------------------------------------------
# admissibility and convergence-critical column sums


@dataclass(frozen=True)
class AdmissibilityReport:
    admissible: bool
    column_sums: tuple[tuple[int, Fraction], ...]  # (column index, sum of A_sigma^{-1} a(j))

    def sums_by_column(self) -> dict[int, Fraction]:
        return dict(self.column_sums)


def simplex_admissible(a: IntMatrix, sigma: Sequence[int]) -> AdmissibilityReport:
    """Whether every off-simplex column satisfies sum(A_sigma^{-1} a(j)) <= 1."""
    sx = Simplex.from_columns(a, sigma)
    sums = []
    ok = True
    for j in sx.complement(a.cols):
        s_j = sum(sx.inv_times(a.column(j)))
        sums.append((j, s_j))
        if s_j > 1:
            ok = False
    return AdmissibilityReport(admissible=ok, column_sums=tuple(sums))


# ---------------------------------------------------------------------------
# exact normalized volume (recursive pyramid decomposition over facets)


def _primitive(vec: tuple[int, ...]) -> tuple[int, ...]:
    from math import gcd

    g = 0
    for x in vec:
        g = gcd(g, abs(x))
    return vec if g in (0, 1) else tuple(x // g for x in vec)


def _lattice_volume(points: list[tuple[int, ...]]) -> int:
    """n! times the Euclidean volume of conv(points), exact.

    Recursive pyramid formula over facets with primitive integer normals;
    the facet volumes are computed in lattice coordinates of the facet plane.
    """
    dim = len(points[0])
    points = list(dict.fromkeys(points))
    if dim == 1:
        return max(x for (x,) in points) - min(x for (x,) in points)
    vol = 0
    seen_facets = set()
    for subset in combinations(range(len(points)), dim):
        base = points[subset[0]]
        rows = [tuple(points[i][k] - base[k] for k in range(dim)) for i in subset[1:]]
        for nrm in kernel_candidates(rows, dim):
            h = max(_dot(nrm, p) for p in points)
            on = tuple(sorted(i for i, p in enumerate(points) if _dot(nrm, p) == h))
            if len(on) < dim:
                continue
            key = (nrm, h)
            if key in seen_facets:
                continue
            seen_facets.add(key)
            facet_pts = [points[i] for i in on]
            origin_gap = h - 0  # distance numerator from the origin side
            if origin_gap == 0:
                continue
            vol += origin_gap * _facet_lattice_volume(facet_pts, nrm)
    return vol


def kernel_candidates(rows: list[tuple[int, ...]], dim: int) -> list[tuple[int, ...]]:
    """Primitive normals orthogonal to the given (dim-1) spanning vectors."""
    if dim == 1:
        return [(1,), (-1,)]
    nonzero = [r for r in rows if any(r)]
    if len(nonzero) < dim - 1:
        return []
    mat = IntMatrix([list(r) for r in nonzero])
    try:
        kb = kernel_basis(mat)
    except RankDeficient:
        return []
    if len(kb) != 1:
        return []
    nrm = _primitive(kb[0])
    return [nrm, tuple(-x for x in nrm)]


def _dot(u, v) -> int:
    return sum(a * b for a, b in zip(u, v))


def _facet_lattice_volume(facet_pts: list[tuple[int, ...]], nrm: tuple[int, ...]) -> int:
    """(dim-1)! volume of the facet in the lattice of its supporting plane."""
    dim = len(nrm)
    if dim == 1:
        return 1
    # lattice basis of the plane nrm . x = 0
    basis = kernel_basis(IntMatrix([list(nrm)]))
    base = facet_pts[0]
    # coordinates of facet points in that basis: solve basis-matrix @ y = p - base
    bmat = [[basis[k][i] for k in range(dim - 1)] for i in range(dim)]
    coords = []
    for p in facet_pts:
        rhs = [p[i] - base[i] for i in range(dim)]
        coords.append(_solve_int(bmat, rhs))
    return _lattice_volume_low(coords)


def _solve_int(bmat, rhs) -> tuple[int, ...]:
    """Solve an overdetermined integral system with a unique rational solution."""
    cols = len(bmat[0])
    rowsel = []
    for i in range(len(bmat)):
        rowsel.append(i)
        sub = [[Fraction(bmat[r][c]) for c in range(cols)] for r in rowsel]
        if _frac_rank(sub) < len(rowsel):
            rowsel.pop()
        if len(rowsel) == cols:
            break
    mat = IntMatrix([[bmat[r][c] for c in range(cols)] for r in rowsel])
    inv = mat.fraction_inverse()
    sol = [sum(inv[i][k] * rhs[rowsel[k]] for k in range(cols)) for i in range(cols)]
    assert all(x.denominator == 1 for x in sol)
    return tuple(int(x) for x in sol)


def _frac_rank(rows) -> int:
    rows = [list(r) for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        lead = rows[rank][col]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                f = rows[r][col] / lead
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def _lattice_volume_low(points: list[tuple[int, ...]]) -> int:
    dim = len(points[0])
    if dim == 1:
        return max(x for (x,) in points) - min(x for (x,) in points)
    # shift so that some vertex is the origin, then reuse the pyramid recursion
    base = min(points)
    shifted = [tuple(p[i] - base[i] for i in range(dim)) for p in points]
    return _lattice_volume(shifted)


def newton_volume(a: IntMatrix) -> int:
    """Normalized volume of conv{0, a(1), ..., a(N)}.

    Produced by summing |det A_sigma| over an internally constructed pointed
    regular triangulation; an exact facet-pyramid computation guards the
    result against a non-covering lifting.
    """
    snf = smith_normal_form(a)
    if snf.rank < a.rows:
        raise RankDeficient(f"A has rank {snf.rank} < {a.rows}")
    exact = _lattice_volume([tuple(0 for _ in range(a.rows))] + a.columns())
    rng = random.Random(0xA17C0DE)
    for _ in range(64):
        w = [Fraction(1) + Fraction(rng.randrange(1, 1 << 20), 1 << 24) for _ in range(a.cols)]
        try:
            tri = regular_triangulation(a, w, _expected_volume=exact)
        except DegenerateWeights:
            continue
        return sum(abs(s.det) for s in tri.simplices)
    raise DegenerateWeights("no pointed generic lifting found (unexpected at this scale)")


# ---------------------------------------------------------------------------
# pointed regular triangulations from a lifting vector


@dataclass(frozen=True)
class Triangulation:
    simplices: tuple[Simplex, ...]
    weights: tuple[Fraction, ...]

    @property
    def total_volume(self) -> int:
        return sum(abs(s.det) for s in self.simplices)


def regular_triangulation(
    a: IntMatrix, w: Sequence, _expected_volume: int | None = None
) -> Triangulation:
    """Lower-hull triangulation of the lifted columns, pointed at the origin.

    sigma belongs to T(w) iff the plane through the lifted origin and the
    lifted sigma-columns lies strictly below every remaining lifted column.
    Equality for an off-simplex column of an otherwise supporting plane means
    the lifting is degenerate; a lifting whose cells fail to tile the polytope
    (the star of the origin does not cover it) is rejected the same way.
    """
    weights = tuple(Fraction(x) for x in w)
    if len(weights) != a.cols:
        raise DegenerateWeights("weight vector length must equal the number of columns")
    n = a.rows
    cells = []
    for combo in combinations(range(a.cols), n):
        sub = a.submatrix_columns(combo)
        if sub.det() == 0:
            continue
        inv = sub.fraction_inverse()
        # m solves m^T a(j) = w_j on sigma: m = (A_sigma^T)^{-1} w_sigma
        m = tuple(
            sum(inv[i][k] * weights[combo[i]] for i in range(n)) for k in range(n)
        )
        verdict = True
        boundary = False
        for j in range(a.cols):
            if j in combo:
                continue
            lift = sum(mk * ak for mk, ak in zip(m, a.column(j)))
            if lift > weights[j]:
                verdict = False
                break
            if lift == weights[j]:
                boundary = True
        if not verdict:
            continue
        if boundary:
            raise DegenerateWeights(
                f"lifting is degenerate: supporting plane of sigma={tuple(x + 1 for x in combo)}"
                " touches another lifted column"
            )
        cells.append(Simplex.from_columns(a, combo))
    cells.sort(key=lambda s: s.indices)
    tri = Triangulation(simplices=tuple(cells), weights=weights)
    expected = (
        _expected_volume
        if _expected_volume is not None
        else _lattice_volume([tuple(0 for _ in range(n))] + a.columns())
    )
    if tri.total_volume != expected:
        raise DegenerateWeights(
            f"lifting is not pointed at the origin: cells cover volume {tri.total_volume}"
            f" of {expected}"
        )
    return tri


# ---------------------------------------------------------------------------
# genericity of the parameter vector


@dataclass(frozen=True)
class VeryGenericResult:
    kind: str  # "yes" | "no" | "unknown"
    witness: tuple[int, ...] | None = None
    entry: int | None = None
    bound: int | None = None
    inv_c_nonintegral: bool | None = None

    def __bool__(self):
        return self.kind == "yes"


def is_very_generic(system: GkzSystem, sigma, bound: int = 50) -> VeryGenericResult:
    """Decide whether A_sigma^{-1}(c + A_sigmabar m) avoids integer entries
    for every nonnegative integer complement exponent m.

    Exact residue arithmetic decides rational c; otherwise the exponents are
    scanned up to the degree bound and the verdict stays "unknown" when no
    witness turns up. The report also carries the weaker condition that
    A_sigma^{-1} c itself has no integer entry.
    """
    sx = sigma if isinstance(sigma, Simplex) else system.simplex(sigma)
    comp = sx.complement(system.num_columns)
    a_bar_cols = [system.a.column(j) for j in comp]
    inv_c = sx.inv_times(system.c)
    if system.c_is_rational:
        weak = all(x.denominator != 1 for x in inv_c)
        adj = sx.a_sigma.adjugate()
        d = abs(sx.det)
        for i in range(system.n):
            row = adj.data[i]
            u = sum(Fraction(r) * Fraction(cv) for r, cv in zip(row, system.c))
            if u.denominator != 1:
                continue  # entry i can never be integral
            u = int(u) % d
            gens = [sum(r * ck for r, ck in zip(row, col)) % d for col in a_bar_cols]
            reachable = {0}
            frontier = [0]
            while frontier:
                x = frontier.pop()
                for g in gens:
                    y = (x + g) % d
                    if y not in reachable:
                        reachable.add(y)
                        frontier.append(y)
            if (-u) % d in reachable:
                witness = _find_witness(row, u, a_bar_cols, d, len(comp))
                return VeryGenericResult(
                    kind="no", witness=witness, entry=i, inv_c_nonintegral=weak
                )
        return VeryGenericResult(kind="yes", inv_c_nonintegral=weak)
    # complex parameters: bounded scan with a float tolerance
    weak = all(abs(complex(x).imag) > 1e-12 or abs(complex(x).real - round(complex(x).real)) > 1e-9 for x in inv_c)
    from .lattice import _graded_shell

    for degree in range(bound + 1):
        for m in _graded_shell(max(len(comp), 1), degree) if comp else [()]:
            shifted = [
                cv + sum(col[i] * mi for col, mi in zip(a_bar_cols, m))
                for i, cv in enumerate(system.c)
            ]
            entries = sx.inv_times(shifted)
            for i, e in enumerate(entries):
                e = complex(e)
                if abs(e.imag) < 1e-12 and abs(e.real - round(e.real)) < 1e-9:
                    return VeryGenericResult(kind="no", witness=tuple(m), entry=i, inv_c_nonintegral=weak)
        if not comp:
            break
    return VeryGenericResult(kind="unknown", bound=bound, inv_c_nonintegral=weak)


def _find_witness(row, u, a_bar_cols, d, width) -> tuple[int, ...]:
    from itertools import product as iproduct

    if width == 0:
        return ()
    gens = [sum(r * ck for r, ck in zip(row, col)) for col in a_bar_cols]
    for m in iproduct(range(d), repeat=width):
        if (u + sum(g * mi for g, mi in zip(gens, m))) % d == 0:
            return m
    raise AssertionError("witness promised by residue reachability but not found")


@dataclass(frozen=True)
class NonresonanceResult:
    kind: str  # "yes" | "no" | "unknown"
    witness_columns: tuple[int, ...] | None = None
    faces_checked: int = 0
    bound: int | None = None

    def __bool__(self):
        return self.kind == "yes"


def is_nonresonant(system: GkzSystem) -> NonresonanceResult:
    """Check c against Z^n + span of every polytope face through the origin.

    Faces are intersections of supporting hyperplanes with maximum at 0; the
    zero face (c not integral) is always included. Only n <= 3 is attempted.
    """
    n = system.n
    if n > 3:
        raise DimensionTooLarge("face enumeration implemented for n <= 3 only")
    cols = system.a.columns()
    # facet normals supporting the polytope at the origin
    normals = set()
    for combo in combinations(range(len(cols)), n - 1):
        rows = [tuple(cols[i]) for i in combo]
        for nrm in kernel_candidates(rows, n):
            if all(_dot(nrm, p) <= 0 for p in cols):
                normals.add(nrm)
    # faces through 0 = intersections of those facets; always include {0}
    column_sets = {(): tuple()}
    normals = sorted(normals)
    for r in range(1, len(normals) + 1):
        for chosen in combinations(normals, r):
            js = tuple(j for j, p in enumerate(cols) if all(_dot(nrm, p) == 0 for nrm in chosen))
            column_sets[js] = js
    checked = 0
    for js in sorted(column_sets, key=lambda t: (len(t), t)):
        checked += 1
        if _c_in_integer_span(system, js):
            return NonresonanceResult(kind="no", witness_columns=js, faces_checked=checked)
    return NonresonanceResult(kind="yes", faces_checked=checked)


def _c_in_integer_span(system: GkzSystem, js: tuple[int, ...]) -> bool:
    """c in Z^n + Q-span{a(j): j in js}, decided via a saturated cokernel basis."""
    n = system.n
    if js:
        span = IntMatrix([[system.a.data[i][j] for j in js] for i in range(n)])
        try:
            y_rows = kernel_basis(span.transpose())
        except RankDeficient:
            y_rows = ()
        if not y_rows:
            return True  # face spans Q^n, condition trivially satisfied
    else:
        y_rows = tuple(tuple(int(i == k) for k in range(n)) for i in range(n))
    if system.c_is_rational:
        for y in y_rows:
            val = sum(Fraction(cv) * yi for cv, yi in zip(system.c, y))
            if val.denominator != 1:
                return False
        return True
    for y in y_rows:
        val = sum(complex(cv) * yi for cv, yi in zip(system.c, y))
        if abs(val.imag) > 1e-12 or abs(val.real - round(val.real)) > 1e-9:
            return False
    return True
