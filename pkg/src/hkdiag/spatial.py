"""Diagram codes for spatial trivalent graphs and the looping rewrite.

A SpatialGraphCode records a diagram of a theta-curve, a handcuff graph or a
link combinatorially: edges with ordered crossing traversals, trivalent
vertices listing their incident edge-ends, and a sign per crossing. The code
is what a careful reader would write down walking along each strand of the
picture.

On top of the codes this module implements the operations the theory calls
for: extracting constituent knots and links, exact linking numbers, the
looping rewrite that replaces a trivalent vertex by an encircling ring, the
classification bookkeeping for atoroidal graphs, the transition table under
looping, annulus predictions for looped graphs, and the two families used
as running examples (closed 2-braid links with a tunnel, and their ringed
odd companions).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, replace
from fractions import Fraction

from .diagram import CharDiagram, Node, NodeKind, StructureError, Violation
from .labeling import AnnulusDiagram, EdgeLabel

_ID_RE = re.compile(r"^[A-Za-z0-9_+-]+$")


class ContradictionError(ValueError):
    """Raised when asserted facts and computed evidence cannot both hold."""


@dataclass(frozen=True)
class Pass:
    """One visit of an edge to a crossing."""

    crossing: str
    position: str  # "over" | "under"

    def __post_init__(self):
        if self.position not in ("over", "under"):
            raise StructureError(f"bad pass position {self.position!r}")


@dataclass(frozen=True)
class EdgeCode:
    """A strand: an open edge between vertices, or a free circle.

    tail and head are vertex ids; both None makes the edge a circle. The
    pass tuple lists crossings in traversal order from tail to head, or
    once around the circle from an arbitrary start.
    """

    id: str
    tail: str | None
    head: str | None
    passes: tuple[Pass, ...] = ()

    def __post_init__(self):
        if (self.tail is None) != (self.head is None):
            raise StructureError(f"edge {self.id}: tail and head must both be set or both empty")

    @property
    def is_circle(self) -> bool:
        return self.tail is None

    @property
    def is_vertex_loop(self) -> bool:
        return self.tail is not None and self.tail == self.head


@dataclass(frozen=True)
class VertexCode:
    id: str
    ends: tuple[tuple[str, int], ...]  # (edge id, 0 for tail, 1 for head)


@dataclass(frozen=True)
class Crossing:
    id: str
    sign: int

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise StructureError(f"crossing {self.id}: sign must be +1 or -1")


@dataclass(frozen=True)
class Provenance:
    """How a code came to exist; drives the annulus predictions."""

    origin: str  # "family" | "looping"
    source_kind: str | None = None
    looping_kind: str | None = None
    loopings: int = 0
    family: str | None = None
    n: int | None = None
    variant: str | None = None
    mirror: bool = False


@dataclass(frozen=True)
class SpatialGraphCode:
    kind: str  # "theta" | "handcuff" | "link"
    vertices: tuple[VertexCode, ...]
    edges: tuple[EdgeCode, ...]
    crossings: tuple[Crossing, ...]
    provenance: Provenance | None = None

    def __post_init__(self):
        if self.kind not in ("theta", "handcuff", "link"):
            raise StructureError(f"unknown graph kind {self.kind!r}")
        object.__setattr__(self, "crossings", tuple(sorted(self.crossings, key=lambda c: c.id)))

    def edge(self, edge_id: str) -> EdgeCode:
        for e in self.edges:
            if e.id == edge_id:
                return e
        raise KeyError(edge_id)

    def vertex(self, vertex_id: str) -> VertexCode:
        for v in self.vertices:
            if v.id == vertex_id:
                return v
        raise KeyError(vertex_id)

    def sign(self, crossing_id: str) -> int:
        for c in self.crossings:
            if c.id == crossing_id:
                return c.sign
        raise KeyError(crossing_id)

    def crossing_passes(self) -> dict[str, list[tuple[str, int, str]]]:
        """crossing id -> [(edge id, pass index, position), ...]"""
        out: dict[str, list[tuple[str, int, str]]] = {}
        for e in self.edges:
            for i, p in enumerate(e.passes):
                out.setdefault(p.crossing, []).append((e.id, i, p.position))
        return out


def validate_code(g: SpatialGraphCode) -> list[Violation]:
    """Structural checks: id sanity, end incidences, pass pairing, shape."""
    out: list[Violation] = []
    edge_ids = [e.id for e in g.edges]
    if len(set(edge_ids)) != len(edge_ids):
        out.append(Violation("ids", "duplicate edge id"))
    vertex_ids = [v.id for v in g.vertices]
    if len(set(vertex_ids)) != len(vertex_ids):
        out.append(Violation("ids", "duplicate vertex id"))
    crossing_ids = [c.id for c in g.crossings]
    if len(set(crossing_ids)) != len(crossing_ids):
        out.append(Violation("ids", "duplicate crossing id"))

    known_edges = set(edge_ids)
    known_vertices = set(vertex_ids)
    claimed: dict[tuple[str, int], str] = {}
    for v in g.vertices:
        if len(v.ends) != 3:
            out.append(Violation("arity", f"vertex {v.id} has {len(v.ends)} ends, expected 3"))
        for end in v.ends:
            eid, side = end
            if eid not in known_edges or side not in (0, 1):
                out.append(Violation("ends", f"vertex {v.id} references unknown end {eid}.{side}"))
                continue
            if end in claimed:
                out.append(Violation("ends", f"end {eid}.{side} claimed by two vertices"))
            claimed[end] = v.id
    for e in g.edges:
        if e.is_circle:
            if (e.id, 0) in claimed or (e.id, 1) in claimed:
                out.append(Violation("ends", f"circle {e.id} is attached to a vertex"))
            continue
        for side, want in ((0, e.tail), (1, e.head)):
            if want not in known_vertices:
                out.append(Violation("ends", f"edge {e.id} endpoint {want!r} is not a vertex"))
            elif claimed.get((e.id, side)) != want:
                out.append(Violation("ends", f"end {e.id}.{side} is not listed at vertex {want}"))

    uses = g.crossing_passes()
    declared = set(crossing_ids)
    for cid, entries in sorted(uses.items()):
        if cid not in declared:
            out.append(Violation("passes", f"pass references undeclared crossing {cid}"))
            continue
        if len(entries) != 2 or sorted(pos for _, _, pos in entries) != ["over", "under"]:
            out.append(Violation("passes", f"crossing {cid} needs exactly one over and one under pass"))
    for cid in sorted(declared - set(uses)):
        out.append(Violation("passes", f"crossing {cid} is never visited"))

    out.extend(_shape_violations(g))
    return out


def _shape_violations(g: SpatialGraphCode) -> list[Violation]:
    out: list[Violation] = []
    if g.kind == "link":
        if g.vertices:
            out.append(Violation("shape", "a link code has no vertices"))
        for e in g.edges:
            if not e.is_circle:
                out.append(Violation("shape", f"edge {e.id} of a link must be a circle"))
        return out
    if len(g.vertices) != 2 or len(g.edges) != 3:
        out.append(Violation("shape", f"a {g.kind} code has 2 vertices and 3 edges"))
        return out
    v1, v2 = g.vertices[0].id, g.vertices[1].id
    if g.kind == "theta":
        for e in g.edges:
            if e.is_circle or e.tail == e.head or {e.tail, e.head} != {v1, v2}:
                out.append(Violation("shape", f"theta edge {e.id} must join the two vertices"))
    else:
        loops = [e for e in g.edges if e.is_vertex_loop]
        bridges = [e for e in g.edges if not e.is_circle and e.tail != e.head]
        if len(loops) != 2 or len(bridges) != 1 or {loops[0].tail, loops[1].tail} != {v1, v2}:
            out.append(Violation("shape", "a handcuff code has one loop at each vertex and one bridge"))
    return out


def _require_valid(g: SpatialGraphCode) -> None:
    problems = validate_code(g)
    if problems:
        raise StructureError(f"invalid code: {problems[0]}")


def bridge_of(g: SpatialGraphCode) -> EdgeCode:
    """The bridge edge of a handcuff code."""
    if g.kind != "handcuff":
        raise StructureError("only handcuff codes have a bridge")
    return next(e for e in g.edges if not e.is_circle and not e.is_vertex_loop)


# --- constituents and linking -------------------------------------------------


def _reversed_passes(e: EdgeCode) -> tuple[Pass, ...]:
    return tuple(reversed(e.passes))


def _effective_signs(g: SpatialGraphCode, flipped: set[str]) -> dict[str, int]:
    """Crossing signs after reversing the given edges.

    Reversing exactly one of a crossing's two strands flips its sign;
    reversing both, or a self-crossing of a reversed edge, preserves it.
    """
    uses = g.crossing_passes()
    out: dict[str, int] = {}
    for c in g.crossings:
        owners = [eid for eid, _, _ in uses.get(c.id, [])]
        if len(owners) == 2 and ((owners[0] in flipped) != (owners[1] in flipped)):
            out[c.id] = -c.sign
        else:
            out[c.id] = c.sign
    return out


def _restrict(g: SpatialGraphCode, circles: list[tuple[str, tuple[Pass, ...]]],
              keep: set[str], signs: dict[str, int]) -> SpatialGraphCode:
    """Build a link code from assembled circles, dropping every crossing
    that involves a removed edge."""
    uses = g.crossing_passes()
    surviving = {
        cid for cid, entries in uses.items()
        if all(eid in keep for eid, _, _ in entries)
    }
    edges = tuple(
        EdgeCode(name, None, None, tuple(p for p in passes if p.crossing in surviving))
        for name, passes in circles
    )
    crossings = tuple(Crossing(cid, signs[cid]) for cid in sorted(surviving))
    return SpatialGraphCode("link", (), edges, crossings)


def constituent_links(g: SpatialGraphCode) -> tuple[SpatialGraphCode, ...]:
    """The constituent knots (theta) or 2-component link (handcuff).

    A theta-curve has three constituent knots, one per pair of edges; each
    comes back as a one-circle link code named after the pair, e.g. "a+b".
    A handcuff graph has one constituent link: the two vertex loops with
    the bridge forgotten. Link codes are their own constituents.
    """
    _require_valid(g)
    if g.kind == "link":
        return (g,)
    if g.kind == "theta":
        out = []
        for e1, e2 in itertools.combinations(sorted(g.edges, key=lambda e: e.id), 2):
            if e2.tail == e1.head:
                passes = e1.passes + e2.passes
                flipped: set[str] = set()
            else:
                passes = e1.passes + _reversed_passes(e2)
                flipped = {e2.id}
            signs = _effective_signs(g, flipped)
            out.append(_restrict(g, [(f"{e1.id}+{e2.id}", passes)], {e1.id, e2.id}, signs))
        return tuple(out)
    loops = sorted((e for e in g.edges if e.is_vertex_loop), key=lambda e: e.id)
    keep = {e.id for e in loops}
    signs = _effective_signs(g, set())
    return (_restrict(g, [(e.id, e.passes) for e in loops], keep, signs),)


def linking_number(g: SpatialGraphCode, a: str, b: str) -> int:
    """Exact linking number of two named circles of a link code."""
    _require_valid(g)
    if g.kind != "link":
        raise StructureError("linking numbers are computed on link codes")
    if a == b:
        raise StructureError("linking number needs two distinct components")
    names = {e.id for e in g.edges}
    for name in (a, b):
        if name not in names:
            raise StructureError(f"no component named {name!r}")
    total = 0
    for cid, entries in g.crossing_passes().items():
        owners = sorted(eid for eid, _, _ in entries)
        if owners == sorted((a, b)):
            total += g.sign(cid)
    if total % 2:
        raise StructureError("inter-component crossing signs do not pair up; not a diagram code")
    return total // 2


def mirror_code(g: SpatialGraphCode) -> SpatialGraphCode:
    """The mirror image: every crossing sign flips, over and under swap."""
    swapped = tuple(
        replace(e, passes=tuple(
            Pass(p.crossing, "under" if p.position == "over" else "over") for p in e.passes
        ))
        for e in g.edges
    )
    prov = g.provenance
    if prov is not None:
        prov = replace(prov, mirror=not prov.mirror)
    return SpatialGraphCode(
        g.kind, g.vertices, swapped,
        tuple(Crossing(c.id, -c.sign) for c in g.crossings),
        prov,
    )


# --- looping ------------------------------------------------------------------


def _fresh(prefix: str, taken: set[str]) -> str:
    i = 1
    while f"{prefix}{i}" in taken:
        i += 1
    return f"{prefix}{i}"


def resolve_end(g: SpatialGraphCode, vertex_id: str, token: str) -> tuple[str, int]:
    """Turn "edge" or "edge.0" / "edge.1" into an end at the given vertex."""
    try:
        v = g.vertex(vertex_id)
    except KeyError:
        raise StructureError(f"no vertex named {vertex_id!r}") from None
    if "." in token:
        eid, _, side = token.rpartition(".")
        if side not in ("0", "1"):
            raise StructureError(f"bad end token {token!r}")
        end = (eid, int(side))
        if end not in v.ends:
            raise StructureError(f"end {token} is not at vertex {vertex_id}")
        return end
    candidates = [end for end in v.ends if end[0] == token]
    if not candidates:
        raise StructureError(f"edge {token!r} has no end at vertex {vertex_id}")
    if len(candidates) > 1:
        raise StructureError(
            f"edge {token!r} has both ends at {vertex_id}; say {token}.0 or {token}.1")
    return candidates[0]


def loop_at(g: SpatialGraphCode, vertex_id: str,
            pair: tuple[tuple[str, int], tuple[str, int]],
            kind: str = "plain", mirror: bool = False) -> SpatialGraphCode:
    """Loop the graph at a vertex, splicing the two given edge-ends.

    The vertex disappears: the two chosen strands are joined smoothly, and
    the third strand now terminates in a small ring encircling the joined
    strand where the vertex used to be. Looping a theta-curve or a handcuff
    graph always yields a handcuff graph. The splice that would set a
    handcuff loop free (pairing the loop's own two ends) disconnects the
    graph and is rejected.

    kind records the looping's relation to a designated tunnel ("tunnel",
    "knot" or "plain"); it only affects provenance. mirror reverses the
    handedness of the new ring.
    """
    _require_valid(g)
    if g.kind not in ("theta", "handcuff"):
        raise StructureError("looping applies to theta and handcuff codes")
    if kind not in ("plain", "tunnel", "knot"):
        raise StructureError(f"unknown looping kind {kind!r}")
    v = g.vertex(vertex_id)
    p, q = pair
    if p not in v.ends or q not in v.ends or p == q:
        raise StructureError(f"ends {p} and {q} must be two distinct ends at {vertex_id}")
    (r,) = (end for end in v.ends if end not in (p, q))
    if p[0] == q[0]:
        raise ValueError("splicing a loop's two ends onto each other disconnects the graph")
    if p[0] == r[0]:
        # Make sure the edge sharing its other end with the remainder comes
        # second, so the merged strand finishes at the ring vertex.
        p, q = q, p

    w_id = _fresh("w", {w.id for w in g.vertices})
    ring_id = _fresh("c", {e.id for e in g.edges})
    taken_crossings = {c.id for c in g.crossings}
    x1 = _fresh("x", taken_crossings)
    x2 = _fresh("x", taken_crossings | {x1})

    if mirror:
        ring_passes = (Pass(x1, "under"), Pass(x2, "over"))
        strand_insert = (Pass(x1, "over"), Pass(x2, "under"))
        ring_sign = -1
    else:
        ring_passes = (Pass(x1, "over"), Pass(x2, "under"))
        strand_insert = (Pass(x1, "under"), Pass(x2, "over"))
        ring_sign = 1

    edge_p, edge_q, edge_r = g.edge(p[0]), g.edge(q[0]), g.edge(r[0])
    flipped: set[str] = set()

    # First leg: edge(p) oriented into the vertex.
    if p[1] == 1:
        part1, start = edge_p.passes, edge_p.tail
    else:
        part1, start = _reversed_passes(edge_p), edge_p.head
        flipped.add(edge_p.id)

    theta_case = r[0] != q[0]
    if theta_case:
        # Second leg: edge(q) oriented out of the vertex; the remaining edge
        # is re-ended onto the new ring vertex.
        if q[1] == 0:
            part2, finish = edge_q.passes, edge_q.head
        else:
            part2, finish = _reversed_passes(edge_q), edge_q.tail
            flipped.add(edge_q.id)
        merged = EdgeCode(f"{edge_p.id}+{edge_q.id}", start, finish,
                          part1 + strand_insert + part2)
        third = replace(edge_r, tail=w_id) if r[1] == 0 else replace(edge_r, head=w_id)
        new_edges = [merged, third]
        end_map = {
            (edge_p.id, 1 - p[1]): (merged.id, 0),
            (edge_q.id, 1 - q[1]): (merged.id, 1),
        }
        w_ends = ((edge_r.id, r[1]), (ring_id, 0), (ring_id, 1))
    else:
        # edge(q) is a vertex loop whose far end is the remainder: the
        # strand continues around the loop and finishes at the ring vertex.
        if q[1] == 0:
            part2 = edge_q.passes
        else:
            part2 = _reversed_passes(edge_q)
            flipped.add(edge_q.id)
        merged = EdgeCode(f"{edge_p.id}+{edge_q.id}", start, w_id,
                          part1 + strand_insert + part2)
        untouched = [e for e in g.edges if e.id not in (edge_p.id, edge_q.id)]
        new_edges = [merged] + untouched
        end_map = {(edge_p.id, 1 - p[1]): (merged.id, 0)}
        w_ends = ((merged.id, 1), (ring_id, 0), (ring_id, 1))

    ring = EdgeCode(ring_id, w_id, w_id, ring_passes)
    new_edges.append(ring)

    new_vertices = [
        VertexCode(w.id, tuple(end_map.get(end, end) for end in w.ends))
        for w in g.vertices if w.id != vertex_id
    ]
    new_vertices.append(VertexCode(w_id, w_ends))

    signs = _effective_signs(g, flipped)
    crossings = tuple(Crossing(cid, s) for cid, s in sorted(signs.items()))
    crossings += (Crossing(x1, ring_sign), Crossing(x2, ring_sign))

    prov = g.provenance
    if prov is not None and prov.origin == "looping":
        prov = replace(prov, loopings=prov.loopings + 1, looping_kind=kind)
    else:
        prov = Provenance(
            origin="looping",
            source_kind=g.kind,
            looping_kind=kind,
            loopings=1,
            family=prov.family if prov else None,
            n=prov.n if prov else None,
            variant=prov.variant if prov else None,
            mirror=prov.mirror if prov else False,
        )

    result = SpatialGraphCode("handcuff", tuple(new_vertices), tuple(new_edges),
                              crossings, prov)
    problems = validate_code(result)
    if problems:
        raise StructureError(f"looping produced an invalid code: {problems[0]}")
    return result


def looping_kind(g: SpatialGraphCode, pair: tuple[tuple[str, int], tuple[str, int]],
                 tunnel_edge: str | None) -> str:
    """Name a looping relative to a designated tunnel edge of a theta-curve.

    Splicing the two non-tunnel edges is the tunnel looping; a splice that
    consumes the tunnel is a knot looping. Without a designated tunnel, or
    on a handcuff graph, the looping is plain.
    """
    if tunnel_edge is None or g.kind != "theta":
        return "plain"
    spliced = {pair[0][0], pair[1][0]}
    if tunnel_edge in spliced:
        return "knot"
    return "tunnel"


# --- facts and classification ---------------------------------------------------


@dataclass(frozen=True)
class FactEntry:
    key: str
    value: bool | str
    provenance: str  # "asserted" | "computed" | "rule"


class FactSet:
    """External knowledge about a code, each entry tagged with provenance.

    Keys in use: "atoroidal", "planar", "split", "tunnel" (an edge id),
    "knotting-arc" (an edge id), and "knot-trivial:<component>" for
    constituent knots. Setting a key twice with different values raises
    ContradictionError; repeating the same value is a no-op that keeps the
    earlier provenance.
    """

    def __init__(self):
        self._facts: dict[str, FactEntry] = {}

    def set(self, key: str, value: bool | str, provenance: str = "asserted") -> None:
        if provenance not in ("asserted", "computed", "rule"):
            raise ValueError(f"unknown provenance {provenance!r}")
        old = self._facts.get(key)
        if old is not None:
            if old.value != value:
                raise ContradictionError(
                    f"fact {key}: {old.value!r} ({old.provenance}) against {value!r} ({provenance})")
            return
        self._facts[key] = FactEntry(key, value, provenance)

    def get(self, key: str) -> bool | str | None:
        entry = self._facts.get(key)
        return entry.value if entry is not None else None

    def entry(self, key: str) -> FactEntry | None:
        return self._facts.get(key)

    def entries(self) -> list[FactEntry]:
        return [self._facts[k] for k in sorted(self._facts)]

    def __contains__(self, key: str) -> bool:
        return key in self._facts


_CLASS_DESCRIPTIONS = {
    "tau1": "planar theta-curve",
    "tau2": "nonplanar theta-curve whose three constituent knots are trivial",
    "tau3": "theta-curve made of a nontrivial knot and a tunnel of it",
    "tau4": "theta-curve made of a nontrivial knot and a knotting arc",
    "h1": "planar handcuff graph",
    "h2": "nonplanar handcuff graph with split constituent link",
    "h3": "handcuff graph over a non-split link whose bridge is a tunnel",
    "h4": "handcuff graph over a non-split link whose bridge is a knotting arc",
}


@dataclass(frozen=True)
class GraphClass:
    """One of the eight classes of atoroidal trivalent spatial graphs."""

    code: str

    def __post_init__(self):
        if self.code not in _CLASS_DESCRIPTIONS:
            raise ValueError(f"unknown class {self.code!r}")

    @property
    def family(self) -> str:
        return "theta" if self.code.startswith("tau") else "handcuff"

    @property
    def description(self) -> str:
        return _CLASS_DESCRIPTIONS[self.code]

    def __str__(self) -> str:
        return self.code


@dataclass(frozen=True)
class Unclassified:
    """Classification could not be decided from the available facts."""

    reason: str
    needed: tuple[str, ...] = ()


def _theta_components(g: SpatialGraphCode) -> list[str]:
    ids = sorted(e.id for e in g.edges)
    return [f"{a}+{b}" for a, b in itertools.combinations(ids, 2)]


def _arc_complement(g: SpatialGraphCode, component: str) -> str:
    used = set(component.split("+"))
    (rest,) = (e.id for e in g.edges if e.id not in used)
    return rest


def classify_atoroidal(g: SpatialGraphCode, facts: FactSet) -> GraphClass | Unclassified:
    """Place an atoroidal theta-curve or handcuff graph in its class.

    Whatever the code itself can certify is computed here and written into
    the fact set with provenance "computed": a nonzero linking number of a
    handcuff's constituent link certifies that the link is not split.
    Everything else (planarity, atoroidality, constituent knot types, arc
    designations) must be supplied as facts. Returns Unclassified naming
    the missing facts when the decision is out of reach.
    """
    _require_valid(g)
    if g.kind == "link":
        raise StructureError("classification applies to theta and handcuff codes")

    if g.kind == "handcuff":
        (link,) = constituent_links(g)
        a, b = (e.id for e in link.edges)
        if linking_number(link, a, b) != 0:
            facts.set("split", False, "computed")

    if facts.get("atoroidal") is not True:
        return Unclassified("the exterior must be known atoroidal", ("atoroidal",))
    planar = facts.get("planar")

    if g.kind == "theta":
        comps = _theta_components(g)
        status = {c: facts.get(f"knot-trivial:{c}") for c in comps}
        knotted = [c for c, s in status.items() if s is False]
        if planar is True:
            if knotted:
                raise ContradictionError(
                    f"a planar theta-curve has trivial constituents, yet {knotted[0]} is knotted")
            return GraphClass("tau1")
        if planar is False:
            if all(s is True for s in status.values()):
                return GraphClass("tau2")
            if knotted:
                arc = _arc_complement(g, knotted[0])
                if facts.get("tunnel") == arc:
                    return GraphClass("tau3")
                if facts.get("knotting-arc") == arc:
                    return GraphClass("tau4")
                return Unclassified(
                    f"the arc {arc} must be designated a tunnel or a knotting arc",
                    ("tunnel", "knotting-arc"))
            return Unclassified(
                "constituent knot types are unknown",
                tuple(f"knot-trivial:{c}" for c in comps))
        return Unclassified("planarity is unknown", ("planar",))

    if planar is True:
        if facts.get("split") is False:
            raise ContradictionError("a planar handcuff graph has a split constituent link")
        return GraphClass("h1")
    if planar is False:
        split = facts.get("split")
        if split is True:
            return GraphClass("h2")
        if split is False:
            bridge = bridge_of(g).id
            if facts.get("tunnel") == bridge:
                return GraphClass("h3")
            if facts.get("knotting-arc") == bridge:
                return GraphClass("h4")
            return Unclassified(
                f"the bridge {bridge} must be designated a tunnel or a knotting arc",
                ("tunnel", "knotting-arc"))
        return Unclassified("splitness of the constituent link is unknown", ("split",))
    return Unclassified("planarity is unknown", ("planar",))


@dataclass(frozen=True)
class Transition:
    """Possible classes of the looped graph, given the class of the source."""

    source: GraphClass
    kind: str
    targets: tuple[GraphClass, ...]
    note: str | None = None


def looping_transition(source: GraphClass, kind: str = "plain") -> Transition:
    """Where looping can send each class of atoroidal graph.

    The looping of a theta-curve or a handcuff graph is a handcuff graph,
    so all targets are handcuff classes. For the knot-with-tunnel class the
    answer depends on which looping is performed, hence the kind argument
    ("tunnel", "knot" or "plain"; plain means undetermined).
    """
    if kind not in ("plain", "tunnel", "knot"):
        raise ValueError(f"unknown looping kind {kind!r}")
    code = source.code
    if code == "tau1":
        return Transition(source, "any", (GraphClass("h3"),),
                          "the looped graph carries the handlebody-knot 2_1")
    if code == "tau2":
        return Transition(source, "any", (GraphClass("h4"),))
    if code == "tau3":
        if kind == "knot":
            return Transition(source, "knot", (GraphClass("h4"),))
        return Transition(source, kind, (GraphClass("h3"), GraphClass("h4")))
    if code == "tau4":
        return Transition(source, "any", (GraphClass("h4"),))
    if code == "h1":
        return Transition(source, "any", (GraphClass("h1"),))
    return Transition(source, "any", (GraphClass("h2"),))


def type_three_two_linking_test(lk: int) -> bool:
    """Whether an essential annulus pattern of the mixed type tolerates this
    linking number between its core and the spine loop. Absolute value one
    is the single excluded case."""
    return lk not in (1, -1)


# --- annulus predictions --------------------------------------------------------


def _diag_loop(label: EdgeLabel) -> AnnulusDiagram:
    base = CharDiagram.build([Node("v", NodeKind.HOLLOW, 2)], [("v", "v")])
    return AnnulusDiagram.build(base, [label])


def _diag_loop_with_cut(loop_label: EdgeLabel, cut_label: EdgeLabel) -> AnnulusDiagram:
    base = CharDiagram.build(
        [Node("v", NodeKind.HOLLOW, 2), Node("s", NodeKind.SOLID)],
        [("v", "v"), ("v", "s")],
    )
    return AnnulusDiagram.build(base, [loop_label, cut_label])


def _diag_theta(solid: bool) -> AnnulusDiagram:
    kind = NodeKind.SOLID if solid else NodeKind.HOLLOW
    base = CharDiagram.build(
        [Node("v", kind, 2), Node("s", NodeKind.SOLID)],
        [("v", "s"), ("v", "s"), ("v", "s")],
    )
    return AnnulusDiagram.build(base, [EdgeLabel.h2(), EdgeLabel.h2(), EdgeLabel.l0()])


@dataclass(frozen=True)
class AnnulusPrediction:
    """What the looping provenance of a code promises about ring annuli."""

    annulus_type: str | None  # "2-1" | "2-2"
    annulus_count: int
    unknotting: bool | None
    exterior_irreducible_atoroidal: bool | None
    unique: bool | None
    diagram: AnnulusDiagram | None
    notes: tuple[str, ...] = ()


def predicted_annulus(g: SpatialGraphCode, facts: FactSet) -> AnnulusPrediction:
    """Predict the ring annulus data of a looped code from its provenance.

    Facts describe the looping source. Asserting that the source is
    atoroidal and nonplanar activates the generic predictions; family
    provenance pins the diagram outright. Codes without looping provenance
    get an empty prediction.
    """
    _require_valid(g)
    pv = g.provenance
    if pv is None or pv.origin != "looping" or pv.loopings < 1:
        return AnnulusPrediction(None, 0, None, None, None, None,
                                 ("the code does not record a looping",))
    source_ok = facts.get("atoroidal") is True and facts.get("planar") is False

    if pv.loopings >= 2:
        notes = ["two loopings give two non-isotopic ring annuli, both of the second type"]
        if source_ok:
            return AnnulusPrediction("2-2", 2, None, True, False, _diag_theta(solid=False),
                                     tuple(notes))
        notes.append("assert atoroidal and nonplanar on the source to pin the diagram")
        return AnnulusPrediction("2-2", 2, None, None, None, None, tuple(notes))

    if pv.source_kind == "theta":
        knot_nontrivial = any(
            entry.key.startswith("knot-trivial:") and entry.value is False
            for entry in facts.entries()
        )
        if pv.looping_kind == "tunnel" and knot_nontrivial:
            unique = True if facts.get("atoroidal") is True else None
            return AnnulusPrediction(
                "2-1", 1, True, True, unique, _diag_loop(EdgeLabel.h1()),
                ("tunnel looping of a nontrivial knot: the ring annulus unknots the handlebody",))
        if source_ok:
            return AnnulusPrediction(
                "2-1", 1, None, True, True, _diag_loop(EdgeLabel.h1()),
                ("the ring annulus is the unique annulus of the first type",))
        return AnnulusPrediction(
            "2-1", 1, None, None, None, None,
            ("assert atoroidal and nonplanar on the source to pin the diagram",))

    # Handcuff source.
    if pv.family == "torus-link" and pv.variant == "tunnel" and pv.n is not None:
        n = pv.n
        if n == 2:
            return AnnulusPrediction(
                "2-2", 1, True, True, False, _diag_theta(solid=True),
                ("equivalent to 4_1",
                 "the two annuli of the second type are swapped by a symmetry"))
        if n % 2 == 0:
            return AnnulusPrediction(
                "2-2", 1, True, True, True,
                _diag_loop_with_cut(EdgeLabel.h2(), EdgeLabel.k2(Fraction(n, 2))),
                (f"closed 2-braid family with {n} crossings, linking number {n // 2}",))
    if pv.family == "odd-ringed" and pv.variant in ("one", "both"):
        if pv.variant == "one":
            diagram = _diag_loop(EdgeLabel.h2())
        else:
            diagram = _diag_loop_with_cut(EdgeLabel.h2(), EdgeLabel.k1())
        return AnnulusPrediction(
            "2-2", 1, True, True, True, diagram,
            (f"ringed odd family, ring around {pv.variant}",))

    nonsplit = facts.get("split") is False
    if nonsplit and facts.get("tunnel") is not None:
        return AnnulusPrediction(
            "2-2", 1, True, True, None, None,
            ("looping a non-split link with tunnel bridge unknots the handlebody",
             "the diagram is one of the five of the second type"))
    if source_ok:
        return AnnulusPrediction(
            "2-2", 1, None, True, None, None,
            ("the diagram is one of the five of the second type",))
    return AnnulusPrediction(
        "2-2", 1, None, None, None, None,
        ("assert atoroidal and nonplanar on the source to pin the exterior",))


# --- families -------------------------------------------------------------------


def closed_braid(word, strands: int) -> SpatialGraphCode:
    """The closure of a braid word as a link code.

    word is a sequence of (i, s) pairs: generator index i (1-based, acting
    on strand positions i-1 and i) and sign s. In a positive letter the
    strand entering from the left passes over. One resulting circle is
    named "k"; two are named "a" and "b"; more get "c1", "c2", ...
    """
    letters = list(word)
    if strands < 1:
        raise StructureError("a braid needs at least one strand")
    journeys: list[list[Pass]] = [[] for _ in range(strands)]
    pos_to_token = list(range(strands))
    crossings = []
    for step, (i, s) in enumerate(letters, start=1):
        if not 1 <= i < strands:
            raise StructureError(f"braid letter {i} out of range for {strands} strands")
        if s not in (1, -1):
            raise StructureError("braid letter signs must be +1 or -1")
        x = f"x{step}"
        left, right = pos_to_token[i - 1], pos_to_token[i]
        if s == 1:
            journeys[left].append(Pass(x, "over"))
            journeys[right].append(Pass(x, "under"))
        else:
            journeys[left].append(Pass(x, "under"))
            journeys[right].append(Pass(x, "over"))
        crossings.append(Crossing(x, s))
        pos_to_token[i - 1], pos_to_token[i] = right, left

    end_pos = {tok: pos for pos, tok in enumerate(pos_to_token)}
    cycles: list[list[int]] = []
    seen: set[int] = set()
    for t in range(strands):
        if t in seen:
            continue
        cycle = [t]
        seen.add(t)
        u = end_pos[t]
        while u != t:
            cycle.append(u)
            seen.add(u)
            u = end_pos[u]
        cycles.append(cycle)

    if len(cycles) == 1:
        names = ["k"]
    elif len(cycles) == 2:
        names = ["a", "b"]
    else:
        names = [f"c{j + 1}" for j in range(len(cycles))]
    edges = tuple(
        EdgeCode(name, None, None,
                 tuple(itertools.chain.from_iterable(journeys[t] for t in cycle)))
        for name, cycle in zip(names, cycles)
    )
    return SpatialGraphCode("link", (), edges, tuple(crossings))


def family_torus_link(n: int, tunnel: bool = False, mirror: bool = False) -> SpatialGraphCode:
    """The closed 2-braid with n positive crossings, optionally with tunnel.

    Even n gives a 2-component link with linking number n/2; adding the
    tunnel joins the components into a handcuff graph. Odd n gives a knot;
    the tunnel then splits its circle into a theta-curve whose nontrivial
    constituent is the closed braid and whose other two constituents are
    trivial.
    """
    if n < 2:
        raise StructureError("the closed 2-braid family starts at n = 2")
    base = closed_braid([(1, 1)] * n, 2)
    prov = Provenance(origin="family", family="torus-link", n=n,
                      variant="tunnel" if tunnel else "closed")
    if not tunnel:
        g = SpatialGraphCode("link", (), base.edges, base.crossings, prov)
    elif n % 2 == 0:
        a, b = base.edge("a"), base.edge("b")
        edges = (
            replace(a, tail="u", head="u"),
            replace(b, tail="v", head="v"),
            EdgeCode("t", "u", "v", ()),
        )
        vertices = (
            VertexCode("u", (("a", 0), ("a", 1), ("t", 0))),
            VertexCode("v", (("b", 0), ("b", 1), ("t", 1))),
        )
        g = SpatialGraphCode("handcuff", vertices, edges, base.crossings, prov)
    else:
        k = base.edge("k")
        ka = EdgeCode("ka", "u", "v", k.passes[:n])
        kb = EdgeCode("kb", "v", "u", k.passes[n:])
        t = EdgeCode("t", "u", "v", ())
        vertices = (
            VertexCode("u", (("ka", 0), ("kb", 1), ("t", 0))),
            VertexCode("v", (("ka", 1), ("kb", 0), ("t", 1))),
        )
        g = SpatialGraphCode("theta", vertices, (ka, kb, t), base.crossings, prov)
    return mirror_code(g) if mirror else g


def family_odd_ringed(n: int, ring: str = "one", mirror: bool = False) -> SpatialGraphCode:
    """An odd closed 2-braid knot with a small ring, joined by a bridge.

    The ring either encircles one strand of the braid (linking number one
    with the knot) or both strands (linking number two). Either way the
    result is a handcuff graph over a non-split link whose bridge is a
    tunnel.
    """
    if n < 3 or n % 2 == 0:
        raise StructureError("the ringed family needs odd n >= 3")
    if ring not in ("one", "both"):
        raise StructureError('ring must be "one" or "both"')
    base = closed_braid([(1, 1)] * n, 2)
    k = base.edge("k")
    j0, j1 = k.passes[:n], k.passes[n:]
    if ring == "one":
        ring_passes = (Pass("y1", "over"), Pass("y2", "under"))
        prefix0 = (Pass("y1", "under"), Pass("y2", "over"))
        prefix1: tuple[Pass, ...] = ()
        extra = (Crossing("y1", 1), Crossing("y2", 1))
    else:
        ring_passes = (Pass("y1", "over"), Pass("y2", "over"),
                       Pass("y3", "under"), Pass("y4", "under"))
        prefix0 = (Pass("y1", "under"), Pass("y4", "over"))
        prefix1 = (Pass("y2", "under"), Pass("y3", "over"))
        extra = tuple(Crossing(f"y{i}", 1) for i in (1, 2, 3, 4))
    loop_k = EdgeCode("k", "u", "u", prefix0 + j0 + prefix1 + j1)
    ring_e = EdgeCode("r", "v", "v", ring_passes)
    bridge = EdgeCode("t", "u", "v", ())
    vertices = (
        VertexCode("u", (("k", 0), ("k", 1), ("t", 0))),
        VertexCode("v", (("r", 0), ("r", 1), ("t", 1))),
    )
    prov = Provenance(origin="family", family="odd-ringed", n=n, variant=ring)
    g = SpatialGraphCode("handcuff", vertices, (loop_k, ring_e, bridge),
                         base.crossings + extra, prov)
    return mirror_code(g) if mirror else g


# --- text format ---------------------------------------------------------------


_PROV_KEYS = (
    ("origin", "origin"),
    ("source-kind", "source_kind"),
    ("looping-kind", "looping_kind"),
    ("loopings", "loopings"),
    ("family", "family"),
    ("n", "n"),
    ("variant", "variant"),
    ("mirror", "mirror"),
)


def _prov_items(pv: Provenance) -> list[tuple[str, str]]:
    out = []
    for key, attr in _PROV_KEYS:
        value = getattr(pv, attr)
        if value is None:
            continue
        if attr == "loopings" and value == 0:
            continue
        if attr == "mirror":
            if not value:
                continue
            value = "true"
        out.append((key, str(value)))
    return out


def format_code(g: SpatialGraphCode) -> str:
    """Serialize a code in the line-oriented text format."""
    lines = [f"graph {g.kind}"]
    for v in g.vertices:
        ends = " ".join(f"{eid}.{side}" for eid, side in v.ends)
        lines.append(f"vertex {v.id} ends {ends}")
    for e in g.edges:
        if e.is_circle:
            lines.append(f"edge {e.id}")
        elif e.is_vertex_loop:
            lines.append(f"edge {e.id} loop from {e.tail} to {e.head}")
        else:
            lines.append(f"edge {e.id} from {e.tail} to {e.head}")
    for e in g.edges:
        for p in e.passes:
            sign = "+" if g.sign(p.crossing) == 1 else "-"
            lines.append(f"pass {e.id} {p.crossing} {p.position} sign={sign}")
    if g.provenance is not None:
        lines.append("meta " + " ".join(f"{k}={v}" for k, v in _prov_items(g.provenance)))
    return "\n".join(lines) + "\n"


def _check_id(token: str, lineno: int) -> str:
    if not _ID_RE.match(token):
        raise StructureError(f"bad identifier {token!r}", lineno)
    return token


def parse_code(text: str) -> SpatialGraphCode:
    """Parse the line-oriented text format back into a code."""
    kind: str | None = None
    vertices: list[VertexCode] = []
    edge_names: list[str] = []
    edge_ends: dict[str, tuple[str | None, str | None]] = {}
    edge_passes: dict[str, list[Pass]] = {}
    signs: dict[str, int] = {}
    meta: dict[str, str] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        directive = tokens[0]
        if directive == "graph":
            if kind is not None or len(tokens) != 2:
                raise StructureError("exactly one graph line must come first", lineno)
            kind = tokens[1]
        elif directive == "vertex":
            if len(tokens) < 3 or tokens[2] != "ends":
                raise StructureError("vertex line needs: vertex <id> ends <e.side>...", lineno)
            ends = []
            for token in tokens[3:]:
                eid, _, side = token.rpartition(".")
                if side not in ("0", "1") or not eid:
                    raise StructureError(f"bad end token {token!r}", lineno)
                ends.append((_check_id(eid, lineno), int(side)))
            vertices.append(VertexCode(_check_id(tokens[1], lineno), tuple(ends)))
        elif directive == "edge":
            if len(tokens) == 2:
                name, tail, head = _check_id(tokens[1], lineno), None, None
            else:
                rest = tokens[2:]
                if rest and rest[0] == "loop":
                    rest = rest[1:]
                if len(rest) != 4 or rest[0] != "from" or rest[2] != "to":
                    raise StructureError(
                        "edge line needs: edge <id> [loop] from <v> to <v>", lineno)
                name = _check_id(tokens[1], lineno)
                tail, head = _check_id(rest[1], lineno), _check_id(rest[3], lineno)
            if name in edge_ends:
                raise StructureError(f"edge {name} declared twice", lineno)
            edge_names.append(name)
            edge_ends[name] = (tail, head)
            edge_passes[name] = []
        elif directive == "pass":
            if len(tokens) != 5 or not tokens[4].startswith("sign="):
                raise StructureError(
                    "pass line needs: pass <edge> <crossing> over|under sign=+|-", lineno)
            name, cid, position = tokens[1], _check_id(tokens[2], lineno), tokens[3]
            if name not in edge_passes:
                raise StructureError(f"pass for undeclared edge {name!r}", lineno)
            if position not in ("over", "under"):
                raise StructureError(f"bad pass position {position!r}", lineno)
            sign_token = tokens[4][len("sign="):]
            if sign_token not in ("+", "-"):
                raise StructureError(f"bad sign {sign_token!r}", lineno)
            sign = 1 if sign_token == "+" else -1
            if signs.setdefault(cid, sign) != sign:
                raise StructureError(f"crossing {cid} has conflicting signs", lineno)
            edge_passes[name].append(Pass(cid, position))
        elif directive == "meta":
            for token in tokens[1:]:
                key, eq, value = token.partition("=")
                if not eq:
                    raise StructureError(f"bad meta token {token!r}", lineno)
                meta[key] = value
        else:
            raise StructureError(f"unknown directive {directive!r}", lineno)

    if kind is None:
        raise StructureError("missing graph line")
    edges = tuple(
        EdgeCode(name, edge_ends[name][0], edge_ends[name][1], tuple(edge_passes[name]))
        for name in edge_names
    )
    crossings = tuple(Crossing(cid, s) for cid, s in sorted(signs.items()))
    return SpatialGraphCode(kind, tuple(vertices), edges, crossings, _prov_from_meta(meta))


def _prov_from_meta(meta: dict[str, str]) -> Provenance | None:
    if not meta:
        return None
    if "origin" not in meta:
        raise StructureError("meta needs an origin")
    known = {key for key, _ in _PROV_KEYS}
    for key in meta:
        if key not in known:
            raise StructureError(f"unknown meta key {key!r}")
    return Provenance(
        origin=meta["origin"],
        source_kind=meta.get("source-kind"),
        looping_kind=meta.get("looping-kind"),
        loopings=int(meta.get("loopings", "0")),
        family=meta.get("family"),
        n=int(meta["n"]) if "n" in meta else None,
        variant=meta.get("variant"),
        mirror=meta.get("mirror") == "true",
    )
