"""Edge labels for characteristic diagrams and the rules that govern them.

Each edge of a characteristic diagram can be annotated with the type of the
annulus it stands for:

    h1      non-separating annulus whose attachment leaves a solid torus
    h2      separating annulus of the same kind on the other side
    k1      annulus running along a knotted core, integral framing
    k2(r)   same with nonintegral boundary slope r (r never 0, never 1/m)
    l(r,s)  annulus with both boundary circles on the genus-2 node, slopes r,s
    l0      the trivial-slope version of l
    em      annulus separating a once-punctured torus piece

Labels live on top of a valid diagram. `validate_labels` checks the rule set
R1..R8 below; `label_catalog` enumerates every rule-consistent labeling of
the thirteen diagram classes up to isomorphism; `symmetry_bounds` reads off
what the labeled diagram forces about the symmetry groups of the underlying
handlebody-knot.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .diagram import (
    CharDiagram,
    DiagramType,
    Node,
    StructureError,
    Violation,
    classify_type,
    diagram_to_json_dict,
    diagram_from_json_dict,
    realization_status,
    solid_base_annotation,
    validate,
    _parse_lines,
)
from .homology import SlopeShape, slope_pair_classify

H_KINDS = ("h1", "h2")
CUT_KINDS = ("k1", "k2", "em")
NONCUT_KINDS = ("h1", "h2", "l", "l0")


def _check_k2_slope(r: Fraction) -> Fraction:
    r = Fraction(r)
    if r == 0 or abs(r.numerator) == 1:
        raise ValueError(
            f"k2 slope must be nonzero and never a reciprocal of an integer, got {r}"
        )
    return r


@dataclass(frozen=True)
class EdgeLabel:
    """One annulus-type label. Use the classmethod constructors."""

    kind: str
    slope: Fraction | None = None
    slopes: tuple[Fraction, Fraction] | None = None

    @classmethod
    def h1(cls) -> "EdgeLabel":
        return cls("h1")

    @classmethod
    def h2(cls) -> "EdgeLabel":
        return cls("h2")

    @classmethod
    def k1(cls) -> "EdgeLabel":
        return cls("k1")

    @classmethod
    def k2(cls, r) -> "EdgeLabel":
        return cls("k2", slope=_check_k2_slope(r))

    @classmethod
    def l(cls, r1, r2) -> "EdgeLabel":
        shape = slope_pair_classify(r1, r2)
        if shape.kind == "trivial":
            raise ValueError("the trivial slope pair is written l0, not l(0,0)")
        if shape.kind == "invalid":
            raise ValueError(f"slope pair ({r1}, {r2}) fits no annulus of this kind")
        pair = tuple(sorted((Fraction(r1), Fraction(r2))))
        return cls("l", slopes=pair)

    @classmethod
    def l0(cls) -> "EdgeLabel":
        return cls("l0")

    @classmethod
    def em(cls) -> "EdgeLabel":
        return cls("em")

    @property
    def slope_shape(self) -> SlopeShape | None:
        if self.kind == "l":
            return slope_pair_classify(*self.slopes)
        if self.kind == "l0":
            return slope_pair_classify(0, 0)
        return None

    def __str__(self) -> str:
        if self.kind == "k2":
            return f"k2({self.slope})"
        if self.kind == "l":
            return f"l({self.slopes[0]},{self.slopes[1]})"
        return self.kind


def parse_label(token: str) -> EdgeLabel:
    """Parse one label token, e.g. "k2(5/2)" or "l(2/3,3/2)".

    The trivial pair l(0,0) is normalized to l0 so that each label has one
    spelling.
    """
    token = token.strip()
    if token in ("h1", "h2", "k1", "l0", "em"):
        return EdgeLabel(token)
    if token.startswith("k2(") and token.endswith(")"):
        return EdgeLabel.k2(_parse_fraction(token[3:-1]))
    if token.startswith("l(") and token.endswith(")"):
        inner = token[2:-1]
        parts = inner.split(",")
        if len(parts) != 2:
            raise ValueError(f"label l needs two slopes, got {token!r}")
        r1, r2 = (_parse_fraction(p) for p in parts)
        if r1 == 0 and r2 == 0:
            return EdgeLabel.l0()
        return EdgeLabel.l(r1, r2)
    raise ValueError(f"unknown label {token!r}")


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad slope {text!r}: {exc}") from exc


@dataclass(frozen=True)
class AnnulusDiagram:
    """A characteristic diagram with a label slot per edge.

    labels[i] annotates base.edges[i]; None marks an unlabeled edge, so plain
    diagrams embed as annulus diagrams with no labels at all.
    """

    base: CharDiagram
    labels: tuple[EdgeLabel | None, ...]

    def __post_init__(self):
        if len(self.labels) != len(self.base.edges):
            raise StructureError("one label slot per edge required")

    @classmethod
    def unlabeled(cls, base: CharDiagram) -> "AnnulusDiagram":
        return cls(base, (None,) * len(base.edges))

    @classmethod
    def build(cls, base: CharDiagram, labels) -> "AnnulusDiagram":
        return cls(base, tuple(labels))

    @property
    def is_fully_labeled(self) -> bool:
        return all(lab is not None for lab in self.labels)

    @property
    def label_kinds(self) -> tuple[str, ...]:
        return tuple(sorted(lab.kind for lab in self.labels if lab is not None))

    def labels_of_kind(self, kind: str) -> tuple[int, ...]:
        return tuple(i for i, lab in enumerate(self.labels) if lab is not None and lab.kind == kind)


def validate_labels(ad: AnnulusDiagram) -> list[Violation]:
    """Structural constraints plus the labeling rules R1..R8.

    Label rules are only meaningful on a structurally valid diagram, so if
    the base has violations those are returned alone. A diagram with no
    labels at all passes vacuously; a partially labeled one is rejected.

    R1  loops and parallel edges carry h1/h2/l/l0; bridges carry k1/k2/em
    R2  h1 occurs only as the sole label of the single-loop diagram
    R3  an l label with a reciprocal slope pair occurs only alone
    R4  a theta-shape diagram is labeled exactly {h2, h2, l0}
    R5  em never coexists with any of h1/h2/l/l0
    R6  the companion edge of an h2 loop is labeled k1 or k2
    R7  two h2 labels never coexist with a k-labeled edge
    R8  h2 on a non-loop edge occurs only in a theta-shape diagram
    """
    out = list(validate(ad.base))
    if out:
        return out
    if not any(lab is not None for lab in ad.labels):
        return []
    if not ad.is_fully_labeled:
        missing = [i for i, lab in enumerate(ad.labels) if lab is None]
        a, b = ad.base.edges[missing[0]]
        out.append(Violation("labels", f"edge {a}-{b} is unlabeled"))
        return out

    d = ad.base
    dtype = classify_type(d)
    theta_shape = (dtype.edges, dtype.loops, dtype.bigons) == (3, 0, 3)
    kinds = [lab.kind for lab in ad.labels]

    for i, lab in enumerate(ad.labels):
        a, b = d.edges[i]
        if d.is_cut_edge(i):
            if lab.kind not in CUT_KINDS:
                out.append(Violation("R1", f"cut edge {a}-{b} cannot carry {lab}"))
        else:
            if lab.kind not in NONCUT_KINDS:
                out.append(Violation("R1", f"non-cut edge {a}-{b} cannot carry {lab}"))

    if "h1" in kinds:
        if dtype.as_tuple() != (1, 1, 0, "hollow") or kinds != ["h1"]:
            out.append(Violation("R2", "h1 occurs only as the sole label of the single-loop diagram"))

    for lab in ad.labels:
        shape = lab.slope_shape
        if shape is not None and shape.kind == "reciprocal" and len(d.edges) != 1:
            out.append(Violation("R3", "a reciprocal slope pair forces a single-edge diagram"))

    if theta_shape and sorted(kinds) != ["h2", "h2", "l0"]:
        out.append(Violation("R4", "a theta-shape diagram is labeled exactly {h2, h2, l0}"))

    if "em" in kinds and any(k in ("h1", "h2", "l", "l0") for k in kinds):
        out.append(Violation("R5", "em never coexists with h or l labels"))

    for i, lab in enumerate(ad.labels):
        if lab.kind == "h2" and d.is_loop(i):
            for j, other in enumerate(ad.labels):
                if j != i and d.is_cut_edge(j) and other.kind not in ("k1", "k2"):
                    a, b = d.edges[j]
                    out.append(Violation("R6", f"the companion edge {a}-{b} of an h2 loop must carry k1 or k2"))

    if kinds.count("h2") >= 2 and any(k in ("k1", "k2") for k in kinds):
        out.append(Violation("R7", "two h2 labels never coexist with a k label"))

    for i, lab in enumerate(ad.labels):
        if lab.kind == "h2" and not d.is_loop(i) and not theta_shape:
            out.append(Violation("R8", "h2 on a non-loop edge occurs only in a theta-shape diagram"))

    return out


def labeled_isomorphic(ad1: AnnulusDiagram, ad2: AnnulusDiagram) -> bool:
    """Isomorphism of the bases carrying the labels along."""
    d1, d2 = ad1.base, ad2.base
    if len(d1.nodes) != len(d2.nodes) or len(d1.edges) != len(d2.edges):
        return False

    def pair_labels(ad: AnnulusDiagram, a: str, b: str):
        key = tuple(sorted((a, b)))
        return sorted(
            str(lab) for e, lab in zip(ad.base.edges, ad.labels) if e == key
        )

    def signature(n: Node):
        return (n.kind.value, n.genus)

    for perm in itertools.permutations(d2.nodes):
        if any(signature(a) != signature(b) for a, b in zip(d1.nodes, perm)):
            continue
        rename = {a.id: b.id for a, b in zip(d1.nodes, perm)}
        ok = True
        for a, b in set(d1.edges):
            if pair_labels(ad1, a, b) != pair_labels(ad2, rename[a], rename[b]):
                ok = False
                break
        if ok and sorted(
            tuple(sorted((rename[a], rename[b]))) for a, b in d1.edges
        ) == sorted(d2.edges):
            return True
    return False


# --- what a valid labeled diagram implies ------------------------------------


class GroupBound(Enum):
    """A constraint on a finite group, ordered by the subgroups it allows."""

    TRIVIAL = "1"
    AT_MOST_Z2 = "<= Z2"
    EXACTLY_Z2 = "Z2"
    AT_MOST_Z2XZ2 = "<= Z2 x Z2"
    EXACTLY_Z2XZ2 = "Z2 x Z2"

    def allows(self, group: str) -> bool:
        """Whether a group named "1", "Z2" or "Z2xZ2" satisfies the bound."""
        table = {
            GroupBound.TRIVIAL: {"1"},
            GroupBound.AT_MOST_Z2: {"1", "Z2"},
            GroupBound.EXACTLY_Z2: {"Z2"},
            GroupBound.AT_MOST_Z2XZ2: {"1", "Z2", "Z2xZ2"},
            GroupBound.EXACTLY_Z2XZ2: {"Z2xZ2"},
        }
        return group in table[self]

    @property
    def is_exact(self) -> bool:
        return self in (GroupBound.TRIVIAL, GroupBound.EXACTLY_Z2, GroupBound.EXACTLY_Z2XZ2)


_GROUP_SIZE = {
    GroupBound.TRIVIAL: 1,
    GroupBound.AT_MOST_Z2: 2,
    GroupBound.EXACTLY_Z2: 2,
    GroupBound.AT_MOST_Z2XZ2: 4,
    GroupBound.EXACTLY_Z2XZ2: 4,
}


@dataclass(frozen=True)
class SymmetryBounds:
    """Bounds on the orientation-preserving and full symmetry groups.

    `exact` is True when both groups are pinned rather than merely bounded.
    The full group always dominates the orientation-preserving one.
    """

    sym_plus: GroupBound
    sym: GroupBound
    exact: bool

    def __post_init__(self):
        if _GROUP_SIZE[self.sym] < _GROUP_SIZE[self.sym_plus]:
            raise ValueError("the full symmetry bound cannot sit below the chiral one")


def symmetry_bounds(ad: AnnulusDiagram) -> SymmetryBounds | None:
    """Symmetry-group bounds implied by a valid labeled diagram.

    Returns None when the labels carry no h1/h2 edge: the classification of
    type-2 annuli then says nothing, and no bound is derived. Raises
    ValueError on an invalid diagram.
    """
    problems = validate_labels(ad)
    if problems:
        raise ValueError(f"invalid diagram: {problems[0]}")
    kinds = ad.label_kinds
    dtype = classify_type(ad.base)
    key = dtype.as_tuple()
    if "h1" in kinds:
        return SymmetryBounds(GroupBound.AT_MOST_Z2, GroupBound.AT_MOST_Z2XZ2, exact=False)
    if "h2" not in kinds:
        return None
    if key == (1, 1, 0, "hollow"):
        return SymmetryBounds(GroupBound.TRIVIAL, GroupBound.AT_MOST_Z2, exact=False)
    if key == (2, 1, 0, "hollow"):
        return SymmetryBounds(GroupBound.TRIVIAL, GroupBound.TRIVIAL, exact=True)
    if key == (3, 0, 3, "hollow"):
        return SymmetryBounds(GroupBound.AT_MOST_Z2, GroupBound.AT_MOST_Z2XZ2, exact=False)
    if key == (3, 0, 3, "solid"):
        return SymmetryBounds(GroupBound.EXACTLY_Z2, GroupBound.EXACTLY_Z2XZ2, exact=True)
    return None


def is_fourone(ad: AnnulusDiagram) -> bool:
    """Whether the diagram characterizes the figure-eight handlebody-knot.

    The theta-shape diagram with a solid labeled node occurs for 4_1 and for
    no other handlebody-knot, so this is an if-and-only-if test.
    """
    if validate_labels(ad):
        return False
    return classify_type(ad.base).as_tuple() == (3, 0, 3, "solid")


@dataclass(frozen=True)
class Fact:
    code: str
    text: str
    provenance: str = "rule"

    def __str__(self) -> str:
        return f"{self.text} [{self.provenance}]"


def derived_facts(ad: AnnulusDiagram) -> list[Fact]:
    """Everything the rule base can read off a valid (possibly unlabeled) diagram."""
    problems = validate_labels(ad)
    if problems:
        raise ValueError(f"invalid diagram: {problems[0]}")
    d = ad.base
    dtype = classify_type(d)
    key = dtype.as_tuple()
    kinds = ad.label_kinds
    facts: list[Fact] = []

    if key == (1, 0, 0, "solid"):
        facts.append(Fact("annuli-count", "the exterior contains exactly five essential annuli up to isotopy"))
    elif key == (2, 0, 0, "solid"):
        facts.append(Fact("annuli-count", "the exterior contains infinitely many pairwise non-isotopic essential annuli"))
    elif key[:3] == (3, 0, 3):
        facts.append(Fact("annuli-count", "the exterior contains exactly three essential annuli up to isotopy"))
    else:
        facts.append(Fact("annuli-count", "the exterior contains at most three essential annuli up to isotopy"))

    if key[:3] == (3, 0, 3):
        facts.append(Fact(
            "theta-shape",
            "the unlabeled node is a Seifert fibered solid torus without exceptional fibers",
        ))
        if key[3] == "solid":
            facts.append(Fact("fourone", "the handlebody-knot is equivalent to 4_1"))

    base = solid_base_annotation(d)
    if base is not None:
        facts.append(Fact("solid-base", f"the labeled node is an {base}"))

    if "h1" in kinds:
        facts.append(Fact("uniqueness", "the type 2-1 annulus is the unique essential annulus, up to isotopy"))
    if "h2" in kinds and key == (1, 1, 0, "hollow"):
        facts.append(Fact("uniqueness", "the type 2-2 annulus is the unique type 2-2 annulus, up to isotopy"))
    if "h2" in kinds and key == (2, 1, 0, "hollow"):
        facts.append(Fact("uniqueness", "the type 2-2 annulus is the unique type 2-2 annulus, up to isotopy"))
        facts.append(Fact("second-type", "an essential annulus of another type is present"))

    for lab in ad.labels:
        if lab is None:
            continue
        shape = lab.slope_shape
        if shape is not None and shape.kind == "reciprocal":
            facts.append(Fact("uniqueness", "the annulus is the unique essential annulus, up to isotopy"))
    if "l0" in kinds:
        facts.append(Fact("uniqueness", "the trivial-slope annulus is the unique annulus of its type, up to isotopy"))
    if "l" in kinds or "l0" in kinds:
        facts.append(Fact("l-count", "at most two non-isotopic annuli of the l kind exist"))

    if kinds and not any(k in H_KINDS for k in kinds):
        facts.append(Fact("unconstrained", "the labels are not constrained by the type-2 classification"))

    if realization_status(dtype) == "unknown":
        facts.append(Fact("realization", "no known handlebody-knot realizes this diagram type"))

    return facts


# --- the exhaustive catalog ---------------------------------------------------


@dataclass(frozen=True)
class CatalogEntry:
    diagram: AnnulusDiagram
    dtype: DiagramType
    kinds: tuple[str, ...]
    realization: str
    bounds: SymmetryBounds | None
    constrained: bool


def _alphabet_for(d: CharDiagram, index: int) -> list[EdgeLabel]:
    if d.is_cut_edge(index):
        return [EdgeLabel.k1(), EdgeLabel.k2(2), EdgeLabel.em()]
    return [
        EdgeLabel.h1(),
        EdgeLabel.h2(),
        EdgeLabel.l(Fraction(2, 3), Fraction(3, 2)),
        EdgeLabel.l(Fraction(2, 3), 6),
        EdgeLabel.l0(),
    ]


def label_catalog() -> tuple[CatalogEntry, ...]:
    """Every rule-consistent labeling of the thirteen classes, up to isomorphism.

    Parameterized labels appear with one representative slope each, so the
    catalog is finite; entries are distinguished by base class and label
    multiset. Exactly six entries carry an h label: the single h1 diagram
    and the five h2 diagrams.
    """
    entries: list[CatalogEntry] = []
    for d in _base_diagrams():
        alphabets = [_alphabet_for(d, i) for i in range(len(d.edges))]
        kept: list[AnnulusDiagram] = []
        for assignment in itertools.product(*alphabets):
            ad = AnnulusDiagram.build(d, assignment)
            if validate_labels(ad):
                continue
            if any(labeled_isomorphic(ad, seen) for seen in kept):
                continue
            kept.append(ad)
        for ad in kept:
            dtype = classify_type(d)
            kinds = ad.label_kinds
            entries.append(CatalogEntry(
                diagram=ad,
                dtype=dtype,
                kinds=kinds,
                realization=realization_status(dtype),
                bounds=symmetry_bounds(ad),
                constrained=any(k in H_KINDS for k in kinds),
            ))
    return tuple(entries)


def _base_diagrams() -> tuple[CharDiagram, ...]:
    from .diagram import enumerate_valid

    return enumerate_valid()


# --- text and JSON for labeled diagrams ---------------------------------------


def parse_annulus(text: str) -> AnnulusDiagram:
    """Parse the text format with optional label= attributes per edge."""
    diagram, raw_labels = _parse_lines(text)
    labels: list[EdgeLabel | None] = [None] * len(diagram.edges)
    for index, (token, lineno) in raw_labels.items():
        try:
            labels[index] = parse_label(token)
        except ValueError as exc:
            raise StructureError(str(exc), lineno) from exc
    return AnnulusDiagram.build(diagram, labels)


def format_annulus(ad: AnnulusDiagram) -> str:
    lines = []
    for n in ad.base.nodes:
        suffix = f" genus={n.genus}" if n.genus is not None else ""
        lines.append(f"node {n.id} {n.kind.value}{suffix}")
    for (a, b), lab in zip(ad.base.edges, ad.labels):
        suffix = f" label={lab}" if lab is not None else ""
        lines.append(f"edge {a} {b}{suffix}")
    return "\n".join(lines) + "\n"


def _label_to_json(lab: EdgeLabel | None):
    if lab is None:
        return None
    data: dict = {"kind": lab.kind}
    if lab.slope is not None:
        data["slope"] = str(lab.slope)
    if lab.slopes is not None:
        data["slopes"] = [str(s) for s in lab.slopes]
    return data


def _label_from_json(data) -> EdgeLabel | None:
    if data is None:
        return None
    kind = data.get("kind")
    if kind == "k2":
        return EdgeLabel.k2(Fraction(data["slope"]))
    if kind == "l":
        r1, r2 = (Fraction(s) for s in data["slopes"])
        return EdgeLabel.l(r1, r2)
    if kind in ("h1", "h2", "k1", "l0", "em"):
        return EdgeLabel(kind)
    raise StructureError(f"unknown label kind {kind!r}")


def annulus_to_json_dict(ad: AnnulusDiagram) -> dict:
    data = diagram_to_json_dict(ad.base)
    data["edges"] = [
        {"ends": list(e), "label": _label_to_json(lab)}
        for e, lab in zip(ad.base.edges, ad.labels)
    ]
    return data


def annulus_from_json_dict(data: dict) -> AnnulusDiagram:
    edges_field = data.get("edges", [])
    plain_edges = []
    labels = []
    for item in edges_field:
        if isinstance(item, dict):
            plain_edges.append(item["ends"])
            labels.append(_label_from_json(item.get("label")))
        else:
            plain_edges.append(item)
            labels.append(None)
    base = diagram_from_json_dict({"nodes": data.get("nodes", []), "edges": plain_edges})
    return AnnulusDiagram.build(base, labels)


__all__ = [
    "AnnulusDiagram",
    "CatalogEntry",
    "EdgeLabel",
    "Fact",
    "GroupBound",
    "SymmetryBounds",
    "annulus_from_json_dict",
    "annulus_to_json_dict",
    "derived_facts",
    "format_annulus",
    "is_fourone",
    "label_catalog",
    "labeled_isomorphic",
    "parse_annulus",
    "parse_label",
    "symmetry_bounds",
    "validate_labels",
]
