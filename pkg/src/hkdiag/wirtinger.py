"""Abelianized presentations read off a diagram code.

Splitting every strand of a code at its under-passes yields one generator
per arc, a relation per under-pass identifying the arcs it separates, and a
relation per trivalent vertex balancing the meridians of its three ends.
The cokernel of that relation matrix is the first homology of the
complement, and the change of basis from its normal form gives exact
integer coordinates for every meridian.

The same arc bookkeeping drives the one-variable Alexander polynomial of a
knot code, which in turn supplies computable nontriviality certificates for
constituent knots of a graph code.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagram import StructureError
from .homology import AbelianGroup, IntMatrix, LaurentPoly, LoopClass, smith_normal_form
from .spatial import (
    Crossing,
    EdgeCode,
    FactSet,
    SpatialGraphCode,
    constituent_links,
    linking_number,
)


@dataclass(frozen=True)
class Meridian:
    """The meridian loop of one edge of the code."""

    edge: str


@dataclass(frozen=True)
class UnderPassWord:
    """A loop described by the crossings it dives under, with signs.

    Each step (crossing id, sign) contributes the signed meridian of the
    strand passing over at that crossing.
    """

    passes: tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class EdgeWalk:
    """A closed walk along graph edges; its class is that of the push-off.

    Each step is (edge id, direction) with direction +1 for tail-to-head.
    The push-off runs parallel to the walk, so it picks up the signed
    meridian of the over-strand at every crossing the walk dives under;
    walking an edge backwards flips those contributions.
    """

    steps: tuple[tuple[str, int], ...]


MarkedLoop = Meridian | UnderPassWord | EdgeWalk


class _Arcs:
    """Arc decomposition of a code: strands split at their under-passes."""

    def __init__(self, g: SpatialGraphCode):
        self.index: dict[tuple[str, int], int] = {}
        self.arc_of_pos: dict[tuple[str, int], int] = {}
        self.arc_count_of: dict[str, int] = {}
        self.last_arc_of: dict[str, int] = {}
        self.under_positions: dict[str, list[int]] = {}
        counter = 0
        for e in g.edges:
            unders = [i for i, p in enumerate(e.passes) if p.position == "under"]
            self.under_positions[e.id] = unders
            if e.is_circle:
                n_arcs = max(len(unders), 1)
            else:
                n_arcs = len(unders) + 1
            self.arc_count_of[e.id] = n_arcs
            self.last_arc_of[e.id] = n_arcs - 1
            for j in range(n_arcs):
                self.index[(e.id, j)] = counter
                counter += 1
            for i in range(len(e.passes)):
                before = sum(1 for u in unders if u < i)
                if e.is_circle and unders:
                    self.arc_of_pos[(e.id, i)] = before % n_arcs
                else:
                    self.arc_of_pos[(e.id, i)] = min(before, n_arcs - 1)
        self.count = counter
        self._circle = {e.id: e.is_circle for e in g.edges}

    def under_pair(self, edge_id: str, j: int) -> tuple[int, int]:
        """Generator indices of the arcs entering and leaving under-pass j."""
        m = len(self.under_positions[edge_id])
        a_in = self.index[(edge_id, j)]
        if self._circle[edge_id]:
            a_out = self.index[(edge_id, (j + 1) % m)]
        else:
            a_out = self.index[(edge_id, j + 1)]
        return a_in, a_out


def _relation_rows(g: SpatialGraphCode, arcs: _Arcs) -> list[list[int]]:
    rows: list[list[int]] = []
    for e in g.edges:
        for j, _ in enumerate(arcs.under_positions[e.id]):
            a_in, a_out = arcs.under_pair(e.id, j)
            if a_in == a_out:
                continue
            row = [0] * arcs.count
            row[a_out] += 1
            row[a_in] -= 1
            rows.append(row)
    for v in g.vertices:
        row = [0] * arcs.count
        for eid, side in v.ends:
            if side == 1:
                row[arcs.index[(eid, arcs.last_arc_of[eid])]] += 1
            else:
                row[arcs.index[(eid, 0)]] -= 1
        rows.append(row)
    return rows


@dataclass(frozen=True)
class MeridianMap:
    """Free-part coordinates for every meridian of a code."""

    group: AbelianGroup
    _coords: tuple[tuple[int, ...], ...]
    _arc_index: dict[tuple[str, int], int]

    def arc_class(self, edge_id: str, arc: int) -> LoopClass:
        return LoopClass(self._coords[self._arc_index[(edge_id, arc)]])

    def edge_class(self, edge_id: str) -> LoopClass:
        """The meridian class of an edge; its arcs all agree."""
        return self.arc_class(edge_id, 0)

    def zero(self) -> LoopClass:
        return LoopClass((0,) * self.group.free_rank)


def h1_complement(g: SpatialGraphCode) -> tuple[AbelianGroup, MeridianMap]:
    """First homology of the complement, with meridian coordinates.

    For a theta-curve or handcuff code the group is free of rank two; for a
    link code it is free of rank the number of components. The coordinates
    of each generator come from the change of basis that diagonalizes the
    relation matrix, so meridian classes can be compared and combined
    exactly.
    """
    arcs = _Arcs(g)
    rows = _relation_rows(g, arcs)
    group = AbelianGroup.from_presentation(arcs.count, rows)
    if rows:
        matrix = IntMatrix.from_rows(rows)
        d, _, v = smith_normal_form(matrix)
        rank = sum(1 for i in range(min(d.nrows, d.ncols)) if d.entries[i][i] != 0)
        coords = tuple(
            tuple(v.entries[j][rank:]) for j in range(arcs.count)
        )
    else:
        coords = tuple(
            tuple(1 if i == j else 0 for i in range(arcs.count))
            for j in range(arcs.count)
        )
    return group, MeridianMap(group, coords, arcs.index)


def _over_edge(g: SpatialGraphCode, crossing_id: str) -> str:
    for eid, _, position in g.crossing_passes()[crossing_id]:
        if position == "over":
            return eid
    raise StructureError(f"crossing {crossing_id} has no over pass")


def _check_walk(g: SpatialGraphCode, steps: tuple[tuple[str, int], ...]) -> None:
    if not steps:
        raise StructureError("a walk needs at least one step")
    start: str | None = None
    cur: str | None = None
    for eid, direction in steps:
        if direction not in (1, -1):
            raise StructureError("walk directions must be +1 or -1")
        e = g.edge(eid)
        if e.is_circle:
            raise StructureError("walks follow graph edges, not circles")
        s, t = (e.tail, e.head) if direction == 1 else (e.head, e.tail)
        if cur is None:
            start = s
        elif s != cur:
            raise StructureError(f"walk breaks before edge {eid}")
        cur = t
    if cur != start:
        raise StructureError("walk does not close up")


def loop_class(g: SpatialGraphCode, marked: MarkedLoop,
               mapping: MeridianMap | None = None) -> LoopClass:
    """Evaluate a marked loop in the homology of the complement."""
    if mapping is None:
        _, mapping = h1_complement(g)
    if isinstance(marked, Meridian):
        return mapping.edge_class(marked.edge)
    total = mapping.zero()
    if isinstance(marked, UnderPassWord):
        for crossing_id, sign in marked.passes:
            if sign not in (1, -1):
                raise StructureError("under-pass signs must be +1 or -1")
            total = total + mapping.edge_class(_over_edge(g, crossing_id)).scaled(sign)
        return total
    if isinstance(marked, EdgeWalk):
        _check_walk(g, marked.steps)
        uses = g.crossing_passes()
        for eid, direction in marked.steps:
            e = g.edge(eid)
            for p in e.passes:
                if p.position != "under":
                    continue
                over = next(o for o, _, pos in uses[p.crossing] if pos == "over")
                factor = direction * g.sign(p.crossing)
                total = total + mapping.edge_class(over).scaled(factor)
        return total
    raise TypeError(f"not a marked loop: {marked!r}")


def loop_classes(g: SpatialGraphCode, markeds) -> list[LoopClass]:
    """Evaluate several marked loops against one shared meridian map."""
    _, mapping = h1_complement(g)
    return [loop_class(g, marked, mapping) for marked in markeds]


# --- Alexander polynomial -------------------------------------------------------


def _poly_det(mat: list[list[LaurentPoly]]) -> LaurentPoly:
    n = len(mat)
    if n == 0:
        return LaurentPoly.constant(1)
    memo: dict[tuple[int, ...], LaurentPoly] = {}

    def expand(r: int, cols: tuple[int, ...]) -> LaurentPoly:
        if r == n:
            return LaurentPoly.constant(1)
        if cols in memo:
            return memo[cols]
        total = LaurentPoly.constant(0)
        for k, c in enumerate(cols):
            entry = mat[r][c]
            if not entry.terms:
                continue
            sub = expand(r + 1, cols[:k] + cols[k + 1:])
            term = entry * sub
            total = total + term if k % 2 == 0 else total - term
        memo[cols] = total
        return total

    return expand(0, tuple(range(n)))


def alexander_polynomial(g: SpatialGraphCode) -> LaurentPoly:
    """The one-variable Alexander polynomial of a knot code, normalized.

    The code must be a single-circle link. Rows follow the free derivative
    of the crossing relations: at a positive crossing the incoming under
    arc contributes t, the over arc 1 - t, and the outgoing arc -1; at a
    negative crossing t is inverted. One row and one column are dropped
    before taking the determinant, and the result is shifted to lowest
    degree zero with positive leading coefficient. For codes of genuine
    knot diagrams the value at 1 is a unit; garbage codes make no such
    promise.
    """
    if g.kind != "link" or len(g.edges) != 1:
        raise StructureError("the Alexander polynomial applies to knot codes")
    e = g.edges[0]
    arcs = _Arcs(g)
    unders = arcs.under_positions[e.id]
    m = len(unders)
    if m <= 1:
        return LaurentPoly.constant(1)

    t = LaurentPoly.t()
    t_inv = LaurentPoly.from_dict({-1: 1})
    one = LaurentPoly.constant(1)
    zero = LaurentPoly.constant(0)

    rows: list[list[LaurentPoly]] = []
    for j, position in enumerate(unders):
        crossing = e.passes[position].crossing
        sign = g.sign(crossing)
        over_entry = next(
            (eid, pos) for eid, pos, where in g.crossing_passes()[crossing] if where == "over"
        )
        c = arcs.arc_of_pos[(over_entry[0], over_entry[1])]
        a = j
        b = (j + 1) % m
        row = [zero] * m
        if sign == 1:
            row[a] = row[a] + t
            row[c] = row[c] + (one - t)
        else:
            row[a] = row[a] + t_inv
            row[c] = row[c] + (one - t_inv)
        row[b] = row[b] - one
        rows.append(row)

    minor = [row[: m - 1] for row in rows[: m - 1]]
    return _poly_det(minor).normalized()


def _component_knot(link: SpatialGraphCode, name: str) -> SpatialGraphCode:
    """One circle of a link code, with all mixed crossings forgotten."""
    circle = link.edge(name)
    uses = link.crossing_passes()
    keep = {
        cid for cid, entries in uses.items()
        if all(eid == name for eid, _, _ in entries)
    }
    passes = tuple(p for p in circle.passes if p.crossing in keep)
    crossings = tuple(Crossing(cid, link.sign(cid)) for cid in sorted(keep))
    return SpatialGraphCode("link", (), (EdgeCode(name, None, None, passes),), crossings)


def attach_evidence(g: SpatialGraphCode, facts: FactSet) -> FactSet:
    """Add computable certificates about a code to a fact set.

    A nontrivial Alexander polynomial certifies that a constituent knot is
    knotted; a nonzero linking number certifies that a handcuff's
    constituent link does not split. Negative results prove nothing and
    leave the facts untouched. Entries land with provenance "computed", so
    a clash with an asserted fact raises ContradictionError.
    """
    one = LaurentPoly.constant(1)
    if g.kind == "theta":
        for knot in constituent_links(g):
            name = knot.edges[0].id
            if alexander_polynomial(knot) != one:
                facts.set(f"knot-trivial:{name}", False, "computed")
    elif g.kind == "handcuff":
        (link,) = constituent_links(g)
        a, b = (e.id for e in link.edges)
        if linking_number(link, a, b) != 0:
            facts.set("split", False, "computed")
        for name in (a, b):
            if alexander_polynomial(_component_knot(link, name)) != one:
                facts.set(f"knot-trivial:{name}", False, "computed")
    return facts
