"""Exact integer homology utilities.

Everything in this module is pure integer (or rational) arithmetic: Smith
normal form with transformation matrices, finitely generated abelian groups
given by presentations, first-homology classes of loops, slope-pair
classification for annuli on a genus-2 boundary, and the meridional
coordinate predictions used when an annulus is attached to a handlebody-knot.

No floating point is used anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence, Union


class _Infinite:
    """Singleton return value for indices of infinite-index subgroups."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITE"

    def __bool__(self) -> bool:
        return True


INFINITE = _Infinite()

Index = Union[int, _Infinite]


@dataclass(frozen=True)
class IntMatrix:
    """An immutable integer matrix stored as a tuple of row tuples.

    >>> m = IntMatrix.from_rows([[1, 2], [3, 4]])
    >>> m.det()
    -2
    """

    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        widths = {len(row) for row in self.entries}
        if len(widths) > 1:
            raise ValueError("ragged matrix")
        for row in self.entries:
            for x in row:
                if not isinstance(x, int):
                    raise TypeError(f"non-integer entry {x!r}")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]]) -> "IntMatrix":
        return cls(tuple(tuple(int(x) for x in row) for row in rows))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @property
    def nrows(self) -> int:
        return len(self.entries)

    @property
    def ncols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        cols = other.ncols
        out = []
        for i in range(self.nrows):
            out.append(tuple(
                sum(self.entries[i][k] * other.entries[k][j] for k in range(self.ncols))
                for j in range(cols)
            ))
        return IntMatrix(tuple(out))

    def transpose(self) -> "IntMatrix":
        return IntMatrix(tuple(zip(*self.entries)) if self.entries else ())

    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.entries[i][i] for i in range(min(self.nrows, self.ncols)))

    def det(self) -> int:
        """Determinant by the Bareiss fraction-free elimination.

        All intermediate values are integers, so the result is exact.
        """
        n = self.nrows
        if n != self.ncols:
            raise ValueError("determinant of a non-square matrix")
        if n == 0:
            return 1
        a = [list(row) for row in self.entries]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k] != 0:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
                a[i][k] = 0
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    def is_unimodular(self) -> bool:
        return self.nrows == self.ncols and abs(self.det()) == 1


def _swap_rows(a: list[list[int]], i: int, j: int) -> None:
    a[i], a[j] = a[j], a[i]


def _swap_cols(a: list[list[int]], i: int, j: int) -> None:
    for row in a:
        row[i], row[j] = row[j], row[i]


def _add_row(a: list[list[int]], dst: int, src: int, c: int) -> None:
    a[dst] = [x + c * y for x, y in zip(a[dst], a[src])]


def _add_col(a: list[list[int]], dst: int, src: int, c: int) -> None:
    for row in a:
        row[dst] += c * row[src]


def smith_normal_form(m: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Compute (D, U, V) with U @ m @ V == D diagonal, U and V unimodular.

    The diagonal of D is nonnegative and each entry divides the next, so D is
    the Smith normal form of m. Pivots are chosen as a nonzero entry of
    minimal absolute value in the remaining block, which keeps the integers
    small for the matrix sizes that occur here.

    >>> d, u, v = smith_normal_form(IntMatrix.from_rows([[2, 4], [6, 8]]))
    >>> d.diagonal()
    (2, 4)
    >>> (u @ IntMatrix.from_rows([[2, 4], [6, 8]]) @ v) == d
    True
    """
    a = [list(row) for row in m.entries]
    rows = len(a)
    cols = len(a[0]) if a else 0
    u = [list(row) for row in IntMatrix.identity(rows).entries]
    v = [list(row) for row in IntMatrix.identity(cols).entries]
    t = 0
    while True:
        pivot = None
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                x = abs(a[i][j])
                if x and (best is None or x < best):
                    best = x
                    pivot = (i, j)
        if pivot is None:
            break
        _swap_rows(a, t, pivot[0])
        _swap_rows(u, t, pivot[0])
        _swap_cols(a, t, pivot[1])
        _swap_cols(v, t, pivot[1])
        dirty = False
        for i in range(t + 1, rows):
            if a[i][t]:
                q = a[i][t] // a[t][t]
                _add_row(a, i, t, -q)
                _add_row(u, i, t, -q)
                dirty = dirty or a[i][t] != 0
        for j in range(t + 1, cols):
            if a[t][j]:
                q = a[t][j] // a[t][t]
                _add_col(a, j, t, -q)
                _add_col(v, j, t, -q)
                dirty = dirty or a[t][j] != 0
        if dirty:
            continue
        offender = None
        for i in range(t + 1, rows):
            for j in range(t + 1, cols):
                if a[i][j] % a[t][t]:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            _add_row(a, t, offender, 1)
            _add_row(u, t, offender, 1)
            continue
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return (
        IntMatrix.from_rows(a),
        IntMatrix.from_rows(u),
        IntMatrix.from_rows(v),
    )


@dataclass(frozen=True)
class AbelianGroup:
    """A finitely generated abelian group, Z^free_rank + sum Z/d_i.

    The invariant factors are the d_i > 1 in divisibility order.
    """

    free_rank: int
    invariant_factors: tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("negative rank")
        for d, e in zip(self.invariant_factors, self.invariant_factors[1:]):
            if e % d:
                raise ValueError("invariant factors must form a divisibility chain")
        if any(d < 2 for d in self.invariant_factors):
            raise ValueError("invariant factors must be at least 2")

    @classmethod
    def from_presentation(cls, generators: int, relations: Sequence[Sequence[int]]) -> "AbelianGroup":
        """Group generated by `generators` symbols modulo the relation rows."""
        rows = [list(r) for r in relations]
        for r in rows:
            if len(r) != generators:
                raise ValueError("relation width disagrees with generator count")
        if not rows:
            return cls(generators)
        d, _, _ = smith_normal_form(IntMatrix.from_rows(rows))
        diag = [x for x in d.diagonal() if x]
        return cls(generators - len(diag), tuple(x for x in diag if x > 1))

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.invariant_factors

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.invariant_factors)
        return " x ".join(parts) if parts else "1"


@dataclass(frozen=True)
class LoopClass:
    """Coordinates of a loop's first-homology class in a chosen free basis."""

    coords: tuple[int, ...]

    def __add__(self, other: "LoopClass") -> "LoopClass":
        if len(self.coords) != len(other.coords):
            raise ValueError("coordinate lengths disagree")
        return LoopClass(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "LoopClass":
        return LoopClass(tuple(-a for a in self.coords))

    def scaled(self, c: int) -> "LoopClass":
        return LoopClass(tuple(c * a for a in self.coords))

    @property
    def is_zero(self) -> bool:
        return not any(self.coords)


def _coords(c) -> tuple[int, ...]:
    if isinstance(c, LoopClass):
        return c.coords
    return tuple(int(x) for x in c)


def subgroup_index(classes: Sequence) -> Index:
    """Index in Z^n of the subgroup generated by the given classes.

    Classes may be LoopClass values or bare integer tuples; all must have the
    same coordinate length n. The index is the product of the nonzero
    diagonal entries of the Smith form when the classes span a finite-index
    subgroup, and INFINITE otherwise.

    >>> subgroup_index([(1, 0), (0, 2)])
    2
    >>> subgroup_index([(1, 0), (2, 0)])
    INFINITE
    """
    vecs = [_coords(c) for c in classes]
    widths = {len(v) for v in vecs}
    if len(widths) > 1:
        raise ValueError("coordinate lengths disagree")
    if not vecs:
        raise ValueError("no classes given")
    n = widths.pop()
    if n == 0:
        return 1
    d, _, _ = smith_normal_form(IntMatrix.from_rows(vecs))
    diag = [x for x in d.diagonal() if x]
    if len(diag) < n:
        return INFINITE
    index = 1
    for x in diag:
        index *= x
    return index


def primitivity_necessary(classes: Sequence) -> bool:
    """Whether the classes form a primitive system (a direct summand basis).

    True exactly when the span is a direct summand of the ambient lattice of
    the same rank as the number of classes, i.e. all Smith diagonal entries
    equal 1.

    >>> primitivity_necessary([(1, 0)])
    True
    >>> primitivity_necessary([(2, 0)])
    False
    """
    vecs = [_coords(c) for c in classes]
    widths = {len(v) for v in vecs}
    if len(widths) > 1:
        raise ValueError("coordinate lengths disagree")
    if not vecs:
        raise ValueError("no classes given")
    d, _, _ = smith_normal_form(IntMatrix.from_rows(vecs))
    diag = [x for x in d.diagonal() if x]
    return len(diag) == len(vecs) and all(x == 1 for x in diag)


def meridional_pair_predict(p: int, q: int, p1: int, mirror: bool = False) -> tuple[tuple[int, int], tuple[int, int]]:
    """Meridional coordinates of the two boundary loops of an attached annulus.

    For an annulus of integral boundary slope p (with p/q in lowest terms),
    if one loop has meridional coordinates (p1, p - p1) then the other is
    forced to (p1 - 1, p - p1 + 1); mirroring swaps the sign convention to
    (p1 + 1, p - p1 - 1). The determinant of the pair is +-(p1 + (p - p1))
    = +-p, so the pair generates an index-|p| subgroup when p != 0.

    >>> meridional_pair_predict(0, 1, 1)
    ((1, -1), (0, 0))
    """
    if gcd(p, q) != 1:
        raise ValueError("slope p/q must be in lowest terms")
    first = (p1, p - p1)
    if mirror:
        second = (p1 + 1, p - p1 - 1)
    else:
        second = (p1 - 1, p - p1 + 1)
    return first, second


@dataclass(frozen=True)
class KleinCaseGroup:
    """H1 data for an exterior whose annulus has a Klein-bottle-like core.

    The group is presented as <v_plus, v_minus, u | v_plus + v_minus = k u>
    with |k| >= 2 (mirroring negates k). Eliminating the relation leaves a
    free group of rank 2; coordinates below are in the basis {v_plus, u}.
    """

    k: int
    group: AbelianGroup
    v_plus: LoopClass
    v_minus: LoopClass
    u: LoopClass
    v_plus_u_basis: bool
    v_minus_u_basis: bool


def klein_case_group(k: int, mirror: bool = False) -> KleinCaseGroup:
    """Evaluate the rank-2 presentation for a given multiplicity k.

    Both {v_plus, u} and {v_minus, u} are bases; the basis checks are
    computed, not assumed.

    >>> g = klein_case_group(3)
    >>> g.v_minus
    LoopClass(coords=(-1, 3))
    >>> g.v_minus_u_basis
    True
    """
    if abs(k) < 2:
        raise ValueError("multiplicity k must satisfy |k| >= 2")
    kk = -k if mirror else k
    v_plus = LoopClass((1, 0))
    u = LoopClass((0, 1))
    v_minus = LoopClass((-1, kk))
    return KleinCaseGroup(
        k=kk,
        group=AbelianGroup(2),
        v_plus=v_plus,
        v_minus=v_minus,
        u=u,
        v_plus_u_basis=subgroup_index([v_plus, u]) == 1,
        v_minus_u_basis=subgroup_index([v_minus, u]) == 1,
    )


@dataclass(frozen=True)
class SlopeShape:
    """Classification of an unordered pair of boundary slopes.

    kind is one of "trivial", "reciprocal", "product", "invalid"; for the
    reciprocal pair {p/q, q/p} and the product pair {p/q, p*q} the defining
    integers (p, q) are recorded.
    """

    kind: str
    p: int | None = None
    q: int | None = None

    @property
    def is_nontrivial_valid(self) -> bool:
        return self.kind in ("reciprocal", "product")


def slope_pair_classify(r1, r2) -> SlopeShape:
    """Classify an unordered slope pair on the two boundary circles.

    >>> slope_pair_classify(Fraction(2, 3), Fraction(3, 2)).kind
    'reciprocal'
    >>> slope_pair_classify(Fraction(2, 3), 6)
    SlopeShape(kind='product', p=2, q=3)
    >>> slope_pair_classify(0, 0).kind
    'trivial'
    >>> slope_pair_classify(0, 5).kind
    'invalid'
    """
    a = Fraction(r1)
    b = Fraction(r2)
    if a == 0 and b == 0:
        return SlopeShape("trivial")
    for x, y in ((a, b), (b, a)):
        p, q = x.numerator, x.denominator
        if p != 0 and y == Fraction(q, p):
            return SlopeShape("reciprocal", p, q)
    for x, y in ((a, b), (b, a)):
        p, q = x.numerator, x.denominator
        if p != 0 and y == p * q:
            return SlopeShape("product", p, q)
    return SlopeShape("invalid")


@dataclass(frozen=True)
class LaurentPoly:
    """A one-variable integer Laurent polynomial, kept in sorted sparse form."""

    terms: tuple[tuple[int, int], ...] = ()

    @classmethod
    def from_dict(cls, coeffs: dict[int, int]) -> "LaurentPoly":
        return cls(tuple(sorted((e, c) for e, c in coeffs.items() if c)))

    @classmethod
    def constant(cls, c: int) -> "LaurentPoly":
        return cls.from_dict({0: c})

    @classmethod
    def t(cls, exponent: int = 1, coeff: int = 1) -> "LaurentPoly":
        return cls.from_dict({exponent: coeff})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, exponent: int) -> int:
        for e, c in self.terms:
            if e == exponent:
                return c
        return 0

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        coeffs: dict[int, int] = dict(self.terms)
        for e, c in other.terms:
            coeffs[e] = coeffs.get(e, 0) + c
        return LaurentPoly.from_dict(coeffs)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        coeffs: dict[int, int] = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                coeffs[e1 + e2] = coeffs.get(e1 + e2, 0) + c1 * c2
        return LaurentPoly.from_dict(coeffs)

    @property
    def evaluated_at_one(self) -> int:
        return sum(c for _, c in self.terms)

    def normalized(self) -> "LaurentPoly":
        """Shift so the lowest exponent is 0 and the leading coefficient > 0."""
        if self.is_zero:
            return self
        low = self.terms[0][0]
        shifted = [(e - low, c) for e, c in self.terms]
        if shifted[-1][1] < 0:
            shifted = [(e, -c) for e, c in shifted]
        return LaurentPoly(tuple(shifted))

    def equals_up_to_units(self, other: "LaurentPoly") -> bool:
        return self.normalized() == other.normalized()

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        pieces = []
        for e, c in reversed(self.terms):
            mag = abs(c)
            if e == 0:
                body = str(mag)
            elif e == 1:
                body = "t" if mag == 1 else f"{mag}*t"
            else:
                body = f"t^{e}" if mag == 1 else f"{mag}*t^{e}"
            if not pieces:
                pieces.append(body if c > 0 else f"-{body}")
            else:
                pieces.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(pieces)


def random_unimodular(rng, n: int, steps: int = 12) -> IntMatrix:
    """A random unimodular matrix built from elementary row operations.

    Intended for randomized invariance checks (D(M) == D(P @ M @ Q)).
    """
    a = [list(row) for row in IntMatrix.identity(n).entries]
    for _ in range(steps):
        op = rng.randrange(3)
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if op == 0 and i != j:
            _add_row(a, i, j, rng.choice([-2, -1, 1, 2]))
        elif op == 1 and i != j:
            _swap_rows(a, i, j)
        else:
            a[i] = [-x for x in a[i]]
    return IntMatrix.from_rows(a)


def invariant_factors_of(m: IntMatrix) -> tuple[int, ...]:
    """Nonzero Smith diagonal entries of m, in divisibility order."""
    d, _, _ = smith_normal_form(m)
    return tuple(x for x in d.diagonal() if x)


__all__ = [
    "AbelianGroup",
    "INFINITE",
    "Index",
    "IntMatrix",
    "KleinCaseGroup",
    "LaurentPoly",
    "LoopClass",
    "SlopeShape",
    "invariant_factors_of",
    "klein_case_group",
    "meridional_pair_predict",
    "primitivity_necessary",
    "random_unimodular",
    "slope_pair_classify",
    "smith_normal_form",
    "subgroup_index",
]
