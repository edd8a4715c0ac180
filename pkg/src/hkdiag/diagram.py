"""Characteristic diagrams of genus-2 handlebody-knot exteriors.

A characteristic diagram is a finite multigraph (loops allowed) whose nodes
are decorated solid or hollow, with exactly one node carrying a genus label.
Solid nodes stand for I-fibered pieces of the exterior's characteristic
decomposition, hollow nodes for simple pieces, and edges for the annuli they
are glued along. The constraints checked by `validate` cut the possible
shapes down to thirteen isomorphism classes, enumerated by `enumerate_valid`.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterable


class StructureError(ValueError):
    """Raised for input that does not describe a diagram at all.

    Distinct from a validation violation: a violation is a well-formed
    diagram breaking a domain constraint, a StructureError is a file or
    object that cannot be interpreted.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NodeKind(enum.Enum):
    SOLID = "solid"
    HOLLOW = "hollow"


@dataclass(frozen=True)
class Node:
    id: str
    kind: NodeKind
    genus: int | None = None

    @property
    def is_labeled(self) -> bool:
        return self.genus is not None


@dataclass(frozen=True)
class DiagramType:
    """The isomorphism invariant (e, l, b, labeled-node kind).

    e is the number of edges, l the number of loops, b the number of bigons
    (for a pair of nodes joined by m parallel edges, m*(m-1)/2 of them).
    """

    edges: int
    loops: int
    bigons: int
    labeled_kind: NodeKind

    def as_tuple(self) -> tuple[int, int, int, str]:
        return (self.edges, self.loops, self.bigons, self.labeled_kind.value)

    def __str__(self) -> str:
        return f"({self.edges},{self.loops},{self.bigons},{self.labeled_kind.value})"


@dataclass(frozen=True)
class Violation:
    code: str
    message: str

    def __str__(self) -> str:
        return f"[{self.code}] {self.message}"


@dataclass(frozen=True)
class CharDiagram:
    """An immutable multigraph with decorated nodes.

    Edges are stored as endpoint pairs in input order, each pair sorted by
    node id; parallel edges simply repeat. Structural sanity (no dangling
    endpoints, no duplicate ids) is enforced at construction, the domain
    constraints are checked by `validate`.
    """

    nodes: tuple[Node, ...]
    edges: tuple[tuple[str, str], ...]

    def __post_init__(self):
        ids = [n.id for n in self.nodes]
        if len(set(ids)) != len(ids):
            raise StructureError("duplicate node id")
        known = set(ids)
        for a, b in self.edges:
            for end in (a, b):
                if end not in known:
                    raise StructureError(f"edge endpoint {end!r} is not a node")
        object.__setattr__(
            self, "edges", tuple(tuple(sorted(e)) for e in self.edges)
        )

    @classmethod
    def build(cls, nodes: Iterable[Node], edges: Iterable[tuple[str, str]]) -> "CharDiagram":
        return cls(tuple(nodes), tuple((a, b) for a, b in edges))

    def node(self, node_id: str) -> Node:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)

    @property
    def labeled_nodes(self) -> tuple[Node, ...]:
        return tuple(n for n in self.nodes if n.is_labeled)

    @property
    def labeled_node(self) -> Node:
        labeled = self.labeled_nodes
        if len(labeled) != 1:
            raise ValueError("diagram does not have a unique labeled node")
        return labeled[0]

    def degree(self, node_id: str) -> int:
        """Number of edge ends at the node; a loop contributes two."""
        return sum((a == node_id) + (b == node_id) for a, b in self.edges)

    def is_loop(self, index: int) -> bool:
        a, b = self.edges[index]
        return a == b

    @property
    def loop_count(self) -> int:
        return sum(1 for i in range(len(self.edges)) if self.is_loop(i))

    def multiplicity(self, a: str, b: str) -> int:
        pair = tuple(sorted((a, b)))
        return sum(1 for e in self.edges if e == pair)

    @property
    def bigon_count(self) -> int:
        count = 0
        seen = set()
        for a, b in self.edges:
            if a == b or (a, b) in seen:
                continue
            seen.add((a, b))
            m = self.multiplicity(a, b)
            count += m * (m - 1) // 2
        return count

    def is_connected(self) -> bool:
        if not self.nodes:
            return True
        reached = {self.nodes[0].id}
        frontier = [self.nodes[0].id]
        while frontier:
            here = frontier.pop()
            for a, b in self.edges:
                for x, y in ((a, b), (b, a)):
                    if x == here and y not in reached:
                        reached.add(y)
                        frontier.append(y)
        return len(reached) == len(self.nodes)

    def is_cut_edge(self, index: int) -> bool:
        """Whether removing one copy of the edge disconnects the diagram."""
        if self.is_loop(index):
            return False
        remaining = tuple(e for i, e in enumerate(self.edges) if i != index)
        return not CharDiagram(self.nodes, remaining).is_connected()


def validate(d: CharDiagram, single_bigon_rule: bool = True) -> list[Violation]:
    """Check the characteristic-diagram constraints; return all violations.

    The `single_bigon_rule` toggle exists so the effect of the rule "a
    solid-labeled diagram is not a single bigon" can be measured by ablation;
    it is on in normal use.
    """
    out: list[Violation] = []
    labeled = d.labeled_nodes
    if len(labeled) != 1:
        out.append(Violation("C-i", f"expected exactly one labeled node, found {len(labeled)}"))
    elif labeled[0].genus != 2:
        out.append(Violation("C-i", f"labeled node must carry genus 2, found {labeled[0].genus}"))
    for n in d.nodes:
        if not n.is_labeled and n.kind is not NodeKind.SOLID:
            out.append(Violation("C-ii", f"unlabeled node {n.id} must be solid"))
    for i in range(len(d.edges)):
        if d.is_loop(i) and d.node(d.edges[i][0]).kind is NodeKind.SOLID:
            out.append(Violation("C-iii", f"loop at solid node {d.edges[i][0]}"))
    if len(labeled) == 1:
        lid = labeled[0].id
        for a, b in d.edges:
            if lid not in (a, b):
                out.append(Violation("C-iv", f"edge {a}-{b} is not adjacent to the labeled node"))
        if (
            single_bigon_rule
            and labeled[0].kind is NodeKind.SOLID
            and len(d.nodes) == 2
            and len(d.edges) == 2
            and d.loop_count == 0
            and d.bigon_count == 1
        ):
            out.append(Violation("C-vi", "solid-labeled diagram must not be a single bigon"))
    for n in d.nodes:
        if d.degree(n.id) > 3:
            out.append(Violation("C-vii", f"node {n.id} has degree {d.degree(n.id)} > 3"))
    if not d.edges:
        out.append(Violation("C-cyl", "diagram has no edges"))
    if not d.is_connected():
        out.append(Violation("conn", "diagram is not connected"))
    return out


def classify_type(d: CharDiagram) -> DiagramType:
    """The (e, l, b, kind) invariant; requires a uniquely labeled diagram."""
    return DiagramType(
        edges=len(d.edges),
        loops=d.loop_count,
        bigons=d.bigon_count,
        labeled_kind=d.labeled_node.kind,
    )


def _node_signature(n: Node) -> tuple[str, int]:
    return (n.kind.value, -1 if n.genus is None else n.genus)


def are_isomorphic(d1: CharDiagram, d2: CharDiagram) -> bool:
    """Node-decoration-preserving multigraph isomorphism."""
    if len(d1.nodes) != len(d2.nodes) or len(d1.edges) != len(d2.edges):
        return False
    sig1 = sorted(_node_signature(n) for n in d1.nodes)
    sig2 = sorted(_node_signature(n) for n in d2.nodes)
    if sig1 != sig2:
        return False
    edges1 = sorted(d1.edges)
    for perm in itertools.permutations(d2.nodes):
        if any(_node_signature(a) != _node_signature(b) for a, b in zip(d1.nodes, perm)):
            continue
        rename = {a.id: b.id for a, b in zip(d1.nodes, perm)}
        mapped = sorted(tuple(sorted((rename[a], rename[b]))) for a, b in d1.edges)
        if mapped == sorted(d2.edges):
            return True
    return False


def canonical_form(d: CharDiagram) -> str:
    """A string equal for two diagrams exactly when they are isomorphic.

    Minimizes a plain-text encoding over all node orderings; the diagrams
    here never exceed four nodes, so the search is trivial.
    """
    best = None
    for perm in itertools.permutations(range(len(d.nodes))):
        index = {d.nodes[orig].id: new for new, orig in enumerate(perm)}
        nodes_part = ",".join(
            f"{d.nodes[orig].kind.value}:{d.nodes[orig].genus if d.nodes[orig].genus is not None else '-'}"
            for orig in perm
        )
        edges_part = ",".join(
            f"{min(index[a], index[b])}-{max(index[a], index[b])}"
            for a, b in sorted(
                d.edges, key=lambda e: (min(index[e[0]], index[e[1]]), max(index[e[0]], index[e[1]]))
            )
        )
        encoding = nodes_part + "|" + edges_part
        if best is None or encoding < best:
            best = encoding
    return best if best is not None else "|"


_UNKNOWN_REALIZATION = {
    (2, 0, 0, "solid"),
    (3, 0, 1, "hollow"),
    (3, 0, 1, "solid"),
    (3, 0, 0, "hollow"),
    (3, 0, 0, "solid"),
}


def realization_status(t: DiagramType) -> str:
    """"realized" if an exterior with this diagram is known, else "unknown"."""
    return "unknown" if t.as_tuple() in _UNKNOWN_REALIZATION else "realized"


def solid_base_annotation(d: CharDiagram) -> str | None:
    """Base surface of the I-fibered piece at a solid labeled node.

    The base is read off the node's degree (its boundary-annulus count);
    hollow labeled nodes have no such annotation.
    """
    labeled = d.labeled_node
    if labeled.kind is not NodeKind.SOLID:
        return None
    deg = d.degree(labeled.id)
    return {
        1: "I-bundle over a Klein bottle minus an open disk",
        2: "I-bundle over a Moebius band minus an open disk",
        3: "I-bundle over a pair of pants",
    }.get(deg)


def enumerate_valid(single_bigon_rule: bool = True) -> tuple[CharDiagram, ...]:
    """All valid diagrams up to isomorphism, one representative per class.

    Generation is deliberately wider than the answer: up to three unlabeled
    solid nodes, up to three edges over every node pair including loops and
    pairs avoiding the labeled node. `validate` does the narrowing, so the
    thirteen classes really are cut out by the constraints rather than by
    the generator. Representatives come back sorted by type.
    """
    found: dict[str, CharDiagram] = {}
    for kind in (NodeKind.HOLLOW, NodeKind.SOLID):
        for extra in range(0, 4):
            nodes = [Node("v", kind, 2)] + [Node(f"s{i + 1}", NodeKind.SOLID) for i in range(extra)]
            ids = [n.id for n in nodes]
            pairs = [(a, a) for a in ids] + list(itertools.combinations(ids, 2))
            for count in range(1, 4):
                for combo in itertools.combinations_with_replacement(pairs, count):
                    d = CharDiagram.build(nodes, combo)
                    if validate(d, single_bigon_rule=single_bigon_rule):
                        continue
                    key = canonical_form(d)
                    if key not in found:
                        found[key] = d
    return tuple(sorted(found.values(), key=lambda d: classify_type(d).as_tuple()))


# --- text and JSON formats ---------------------------------------------------


def _parse_lines(text: str) -> tuple[CharDiagram, dict[int, tuple[str, int]]]:
    """Shared line-level parser.

    Returns the diagram together with raw label tokens keyed by edge index
    (token, line number); label syntax itself is the labeling module's
    business.
    """
    nodes: list[Node] = []
    edges: list[tuple[str, str]] = []
    labels: dict[int, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "node":
            if len(parts) not in (3, 4):
                raise StructureError("node line needs: node <id> <solid|hollow> [genus=<n>]", lineno)
            genus = None
            if len(parts) == 4:
                if not parts[3].startswith("genus="):
                    raise StructureError(f"unexpected token {parts[3]!r}", lineno)
                try:
                    genus = int(parts[3][len("genus="):])
                except ValueError:
                    raise StructureError("genus must be an integer", lineno) from None
            try:
                kind = NodeKind(parts[2])
            except ValueError:
                raise StructureError(f"unknown node kind {parts[2]!r}", lineno) from None
            nodes.append(Node(parts[1], kind, genus))
        elif parts[0] == "edge":
            if len(parts) not in (3, 4):
                raise StructureError("edge line needs: edge <id> <id> [label=<label>]", lineno)
            if len(parts) == 4:
                if not parts[3].startswith("label="):
                    raise StructureError(f"unexpected token {parts[3]!r}", lineno)
                labels[len(edges)] = (parts[3][len("label="):], lineno)
            edges.append((parts[1], parts[2]))
        else:
            raise StructureError(f"unknown directive {parts[0]!r}", lineno)
    try:
        diagram = CharDiagram.build(nodes, edges)
    except StructureError:
        raise
    except ValueError as exc:
        raise StructureError(str(exc)) from exc
    return diagram, labels


def parse_diagram(text: str) -> CharDiagram:
    """Parse the plain text format; labeled edges are rejected here."""
    diagram, labels = _parse_lines(text)
    if labels:
        lineno = next(iter(labels.values()))[1]
        raise StructureError("edge labels are not allowed in an unlabeled diagram", lineno)
    return diagram


def format_diagram(d: CharDiagram) -> str:
    lines = []
    for n in d.nodes:
        suffix = f" genus={n.genus}" if n.genus is not None else ""
        lines.append(f"node {n.id} {n.kind.value}{suffix}")
    for a, b in d.edges:
        lines.append(f"edge {a} {b}")
    return "\n".join(lines) + "\n"


def diagram_to_json_dict(d: CharDiagram) -> dict:
    return {
        "nodes": [
            {"id": n.id, "kind": n.kind.value, "genus": n.genus} for n in d.nodes
        ],
        "edges": [[a, b] for a, b in d.edges],
    }


def diagram_from_json_dict(data: dict) -> CharDiagram:
    try:
        nodes = [
            Node(str(n["id"]), NodeKind(n["kind"]), n.get("genus"))
            for n in data["nodes"]
        ]
        edges = [(str(a), str(b)) for a, b in data["edges"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise StructureError(f"malformed diagram object: {exc}") from exc
    return CharDiagram.build(nodes, edges)


__all__ = [
    "CharDiagram",
    "DiagramType",
    "Node",
    "NodeKind",
    "StructureError",
    "Violation",
    "are_isomorphic",
    "canonical_form",
    "classify_type",
    "diagram_from_json_dict",
    "diagram_to_json_dict",
    "enumerate_valid",
    "format_diagram",
    "parse_diagram",
    "realization_status",
    "solid_base_annotation",
    "validate",
]
