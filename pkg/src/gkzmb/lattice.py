"""Exact integer and rational linear algebra for lattice quotients.

Everything here works over arbitrary-precision integers and `Fraction`
rationals; no floating point enters until characters are exponentiated.
The central objects are the Smith normal form, integer kernels, the finite
quotient groups Z^n / B Z^n with canonical coset representatives, the
rational duality pairing between the quotients of a matrix and of its
transpose, and the resulting character matrix.
"""

from __future__ import annotations

import cmath
import math
import operator
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

from .errors import IncompleteRepresentatives, RankDeficient, RepresentativesNotFound, SingularModulus

TWO_PI = 2.0 * math.pi


def _as_int(x) -> int:
    # operator.index rejects floats; bools are fine but normalized to int
    return operator.index(x)


class IntMatrix:
    """Immutable integer matrix with exact arithmetic helpers."""

    __slots__ = ("data", "rows", "cols")

    def __init__(self, rows: Iterable[Iterable[int]]):
        data = tuple(tuple(_as_int(x) for x in row) for row in rows)
        if not data or not data[0]:
            raise ValueError("matrix must have at least one row and one column")
        width = len(data[0])
        if any(len(r) != width for r in data):
            raise ValueError("ragged rows")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "rows", len(data))
        object.__setattr__(self, "cols", width)

    def __setattr__(self, *a):
        raise AttributeError("IntMatrix is immutable")

    @staticmethod
    def identity(n: int) -> "IntMatrix":
        return IntMatrix([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @staticmethod
    def from_columns(cols: Sequence[Sequence[int]]) -> "IntMatrix":
        return IntMatrix(list(zip(*cols)))

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.data)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.cols)]

    def submatrix_columns(self, js: Sequence[int]) -> "IntMatrix":
        return IntMatrix([[row[j] for j in js] for row in self.data])

    def transpose(self) -> "IntMatrix":
        return IntMatrix(list(zip(*self.data)))

    def __matmul__(self, other):
        if isinstance(other, IntMatrix):
            if self.cols != other.rows:
                raise ValueError("shape mismatch")
            ot = list(zip(*other.data))
            return IntMatrix(
                [[sum(a * b for a, b in zip(row, col)) for col in ot] for row in self.data]
            )
        vec = [_as_int(x) for x in other]
        if len(vec) != self.cols:
            raise ValueError("shape mismatch")
        return tuple(sum(a * b for a, b in zip(row, vec)) for row in self.data)

    def __eq__(self, other):
        return isinstance(other, IntMatrix) and self.data == other.data

    def __hash__(self):
        return hash(self.data)

    def __repr__(self):
        return f"IntMatrix({[list(r) for r in self.data]})"

    def det(self) -> int:
        """Exact determinant by fraction-free Bareiss elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of non-square matrix")
        n = self.rows
        m = [list(r) for r in self.data]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if m[k][k] == 0:
                for i in range(k + 1, n):
                    if m[i][k] != 0:
                        m[k], m[i] = m[i], m[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
                m[i][k] = 0
            prev = m[k][k]
        return sign * m[-1][-1]

    def fraction_inverse(self) -> tuple[tuple[Fraction, ...], ...]:
        """Exact inverse as a matrix of Fractions (Gauss-Jordan)."""
        if self.rows != self.cols:
            raise ValueError("inverse of non-square matrix")
        n = self.rows
        aug = [
            [Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
            for i, row in enumerate(self.data)
        ]
        for col in range(n):
            piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
            if piv is None:
                raise SingularModulus("matrix is singular")
            aug[col], aug[piv] = aug[piv], aug[col]
            inv_p = 1 / aug[col][col]
            aug[col] = [x * inv_p for x in aug[col]]
            for r in range(n):
                if r != col and aug[r][col] != 0:
                    f = aug[r][col]
                    aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
        return tuple(tuple(row[n:]) for row in aug)

    def adjugate(self) -> "IntMatrix":
        d = self.det()
        if d == 0:
            raise SingularModulus("adjugate via inverse needs det != 0")
        inv = self.fraction_inverse()
        return IntMatrix([[int(x * d) for x in row] for row in inv])


@dataclass(frozen=True)
class SnfDecomposition:
    """P @ M @ Q == D with unimodular P, Q and divisibility chain on diag(D)."""

    p: IntMatrix
    d: IntMatrix
    q: IntMatrix

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.d.data[i][i] for i in range(min(self.d.rows, self.d.cols)))

    @property
    def rank(self) -> int:
        return sum(1 for x in self.diagonal if x != 0)


def _swap_rows(b, p, i, j):
    if i != j:
        b[i], b[j] = b[j], b[i]
        p[i], p[j] = p[j], p[i]


def _swap_cols(b, q, i, j):
    if i != j:
        for row in b:
            row[i], row[j] = row[j], row[i]
        for row in q:
            row[i], row[j] = row[j], row[i]


def _scale_row(b, p, i, s):
    b[i] = [s * x for x in b[i]]
    p[i] = [s * x for x in p[i]]


def _add_row(b, p, dst, src, f):
    b[dst] = [x + f * y for x, y in zip(b[dst], b[src])]
    p[dst] = [x + f * y for x, y in zip(p[dst], p[src])]


def _add_col(b, q, dst, src, f):
    for row in b:
        row[dst] += f * row[src]
    for row in q:
        row[dst] += f * row[src]


def _smallest_pivot(b, t, rows, cols):
    best = None
    for i in range(t, rows):
        for j in range(t, cols):
            v = b[i][j]
            if v != 0 and (best is None or abs(v) < best[0]):
                best = (abs(v), i, j)
    return None if best is None else (best[1], best[2])


def smith_normal_form(m: IntMatrix) -> SnfDecomposition:
    """Smith normal form with deterministic smallest-pivot elimination.

    Returns unimodular P, Q and diagonal D with P @ M @ Q == D,
    nonnegative diagonal entries, and d1 | d2 | ... on the nonzero part.
    """
    rows, cols = m.rows, m.cols
    b = [list(r) for r in m.data]
    p = [[int(i == j) for j in range(rows)] for i in range(rows)]
    q = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def eliminate_at(t):
        while True:
            piv = _smallest_pivot(b, t, rows, cols)
            if piv is None:
                return False
            _swap_rows(b, p, t, piv[0])
            _swap_cols(b, q, t, piv[1])
            dirty = False
            for i in range(t + 1, rows):
                if b[i][t]:
                    f = b[i][t] // b[t][t]
                    _add_row(b, p, i, t, -f)
                    if b[i][t]:
                        dirty = True
            for j in range(t + 1, cols):
                if b[t][j]:
                    f = b[t][j] // b[t][t]
                    _add_col(b, q, j, t, -f)
                    if b[t][j]:
                        dirty = True
            if not dirty:
                return True

    t = 0
    limit = min(rows, cols)
    while t < limit and eliminate_at(t):
        t += 1
    rank = t

    # normalize signs, then enforce the divisibility chain
    for i in range(rank):
        if b[i][i] < 0:
            _scale_row(b, p, i, -1)
    changed = True
    while changed:
        changed = False
        for i in range(rank - 1):
            di, dj = b[i][i], b[i + 1][i + 1]
            if dj % di != 0:
                # pull the offending entry into column i and re-reduce
                _add_col(b, q, i, i + 1, 1)
                j = i
                while j < rank and eliminate_at(j):
                    j += 1
                for k in range(rank):
                    if b[k][k] < 0:
                        _scale_row(b, p, k, -1)
                changed = True
                break
    return SnfDecomposition(IntMatrix(p), IntMatrix(b), IntMatrix(q))


def kernel_basis(a: IntMatrix) -> tuple[tuple[int, ...], ...]:
    """Z-basis of the integer kernel of a full-row-rank matrix.

    The basis spans a saturated (direct summand) sublattice, so any integer
    kernel vector is an integer combination of the returned vectors.
    """
    snf = smith_normal_form(a)
    if snf.rank < a.rows:
        raise RankDeficient(f"rank {snf.rank} < {a.rows}")
    return tuple(snf.q.column(j) for j in range(snf.rank, a.cols))


@dataclass(frozen=True)
class QuotientGroup:
    """Finite abelian group Z^n / (column lattice of `modulus`).

    Coset keys live in Smith-normal-form coordinates (one residue per
    invariant factor, O(1) equality); the representative of each coset is
    its unique member of the centered fundamental parallelepiped of the
    modulus columns, which keeps downstream phase exponents small.  The
    enumeration order follows the SNF coordinates lexicographically.
    """

    modulus: IntMatrix
    order: int
    representatives: tuple[tuple[int, ...], ...]
    _p: IntMatrix = field(repr=False)
    _p_inv: IntMatrix = field(repr=False)
    _diag: tuple[int, ...] = field(repr=False)
    _inv_modulus: tuple = field(repr=False)

    def canonical_key(self, v: Sequence[int]) -> tuple[int, ...]:
        """Residues of v in SNF coordinates; equal keys iff same coset."""
        t = self._p @ v
        return tuple(x % d for x, d in zip(t, self._diag))

    def _reduce(self, v: Sequence[int]) -> tuple[int, ...]:
        # shift into modulus * [-1/2, 1/2)^n, exactly
        coords = [
            sum(row[i] * v[i] for i in range(len(v))) for row in self._inv_modulus
        ]
        shift = [math.floor(x + Fraction(1, 2)) for x in coords]
        corr = self.modulus @ shift
        return tuple(a - b for a, b in zip(v, corr))

    def canonical(self, v: Sequence[int]) -> tuple[int, ...]:
        """The canonical representative of the coset of v."""
        return self._reduce(self._p_inv @ self.canonical_key(v))

    def contains(self, v: Sequence[int]) -> bool:
        """Whether v lies in the column lattice itself."""
        return all(x == 0 for x in self.canonical_key(v))

    def index_of(self, v: Sequence[int]) -> int:
        key = self.canonical_key(v)
        idx = 0
        for x, d in zip(key, self._diag):
            idx = idx * d + x
        return idx


def quotient_representatives(modulus: IntMatrix) -> QuotientGroup:
    if modulus.rows != modulus.cols:
        raise SingularModulus("modulus must be square")
    det = modulus.det()
    if det == 0:
        raise SingularModulus("modulus has zero determinant")
    snf = smith_normal_form(modulus)
    diag = snf.diagonal
    p_inv = snf.p.adjugate() if snf.p.det() == 1 else IntMatrix(
        [[-x for x in row] for row in snf.p.adjugate().data]
    )
    group = QuotientGroup(
        modulus=modulus,
        order=abs(det),
        representatives=(),
        _p=snf.p,
        _p_inv=p_inv,
        _diag=diag,
        _inv_modulus=modulus.fraction_inverse(),
    )
    reps = tuple(
        group._reduce(p_inv @ key) for key in product(*(range(d) for d in diag))
    )
    object.__setattr__(group, "representatives", reps)
    return group


def pairing(v: Sequence[int], w: Sequence[int], a_sigma: IntMatrix) -> Fraction:
    """Fractional part of v^T A_sigma^{-1} w, exact in [0, 1).

    Well defined on Z^n/Z A_sigma^T x Z^n/Z A_sigma and nondegenerate there.
    """
    det = a_sigma.det()
    if det == 0:
        raise SingularModulus("pairing needs det != 0")
    adj = a_sigma.adjugate()
    num = sum(vi * x for vi, x in zip(v, adj @ w))
    return Fraction(num, det) % 1


def _unit_phase(frac: Fraction) -> complex:
    """exp(-2*pi*i*frac) with the rational reduced mod 1 first."""
    return cmath.exp(complex(0.0, -TWO_PI * float(frac % 1)))


@dataclass(frozen=True)
class CharacterMatrix:
    """Diagonal-times-character-table transform between the two solution bases."""

    r: int
    diag: tuple[complex, ...]
    chars: tuple[tuple[complex, ...], ...]

    def full(self) -> tuple[tuple[complex, ...], ...]:
        return tuple(
            tuple(self.diag[i] * self.chars[i][j] for j in range(self.r)) for i in range(self.r)
        )


def character_matrix(
    a_sigma: IntMatrix,
    a_sigmabar: IntMatrix | None,
    c: Sequence,
    ktilde_reps: Sequence[Sequence[int]],
    kbar_reps: Sequence[Sequence[int]],
) -> CharacterMatrix:
    """Unit-modulus character table pairing Z^n/Z A_sigma^T with Z^n/Z A_sigma.

    `kbar_reps` are nonnegative exponent vectors k(j) whose images
    A_sigmabar @ k(j) must exhaust the cosets of Z A_sigma; when the
    complement is empty pass a_sigmabar=None and kbar_reps=[()].
    Entry (i, j) is exp(-2*pi*i * <ktilde(i), A_sigmabar k(j)>) and the
    diagonal carries exp(-2*pi*i * ktilde(i)^T A_sigma^{-1} c).
    """
    det = a_sigma.det()
    if det == 0:
        raise SingularModulus("character matrix needs det != 0")
    group = quotient_representatives(a_sigma)
    r = group.order
    if len(ktilde_reps) != r:
        raise IncompleteRepresentatives(f"need {r} ktilde representatives, got {len(ktilde_reps)}")
    images = []
    for k in kbar_reps:
        if a_sigmabar is None:
            if len(tuple(k)) != 0:
                raise ValueError("empty complement expects empty exponent vectors")
            images.append(tuple(0 for _ in range(a_sigma.rows)))
        else:
            images.append(a_sigmabar @ k)
    keys = {group.canonical_key(img) for img in images}
    if len(keys) != len(images) or len(images) != r:
        raise IncompleteRepresentatives(
            f"classes of A_sigmabar k(j) must be {r} pairwise distinct cosets"
        )
    tgroup = quotient_representatives(a_sigma.transpose())
    tkeys = {tgroup.canonical_key(v) for v in ktilde_reps}
    if len(tkeys) != r:
        raise IncompleteRepresentatives("ktilde representatives are not pairwise distinct")

    chars = tuple(
        tuple(_unit_phase(pairing(kt, img, a_sigma)) for img in images) for kt in ktilde_reps
    )
    inv = a_sigma.fraction_inverse()
    diag = []
    for kt in ktilde_reps:
        # ktilde^T A_sigma^{-1} c, kept exact when c is rational
        row = [sum(Fraction(k) * inv[i][l] for i, k in enumerate(kt)) for l in range(a_sigma.cols)]
        if all(isinstance(x, (int, Fraction)) for x in c):
            diag.append(_unit_phase(sum(rl * Fraction(cl) for rl, cl in zip(row, c))))
        else:
            w = sum(float(rl) * complex(cl) for rl, cl in zip(row, c))
            diag.append(cmath.exp(-2j * math.pi * w))
    return CharacterMatrix(r=r, diag=tuple(diag), chars=chars)


def sigmabar_representatives(
    a: IntMatrix, sigma: Sequence[int], bound: int = 64
) -> tuple[tuple[int, ...], ...]:
    """Exponent vectors k(j) >= 0 whose images A_sigmabar k(j) exhaust Z^n/Z A_sigma.

    Enumerates the complement exponents in graded lexicographic order and
    keeps the first hit of each coset; `bound` caps the total degree.
    """
    sigma = tuple(sorted(sigma))
    a_sigma = a.submatrix_columns(sigma)
    det = a_sigma.det()
    if det == 0:
        raise SingularModulus("sigma must index an invertible column block")
    group = quotient_representatives(a_sigma)
    r = group.order
    comp = [j for j in range(a.cols) if j not in sigma]
    if not comp:
        if r != 1:
            raise RepresentativesNotFound(bound, found=1, needed=r)
        return ((),)
    a_bar = a.submatrix_columns(comp)
    found: dict[tuple[int, ...], tuple[int, ...]] = {}
    for degree in range(bound + 1):
        for m in _graded_shell(len(comp), degree):
            key = group.canonical_key(a_bar @ m)
            if key not in found:
                found[key] = m
                if len(found) == r:
                    return tuple(found.values())
    raise RepresentativesNotFound(bound, found=len(found), needed=r)


def _graded_shell(width: int, degree: int):
    """All nonnegative integer vectors of the given length and coordinate sum,
    in lexicographically decreasing first coordinate order."""
    if width == 1:
        yield (degree,)
        return
    for head in range(degree, -1, -1):
        for rest in _graded_shell(width - 1, degree - head):
            yield (head,) + rest
