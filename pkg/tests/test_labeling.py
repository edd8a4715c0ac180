"""Label syntax, the rules R1..R8, the catalog, and symmetry bounds."""

from fractions import Fraction

import pytest

from hkdiag.diagram import CharDiagram, Node, NodeKind, classify_type
from hkdiag.labeling import (
    AnnulusDiagram,
    EdgeLabel,
    GroupBound,
    SymmetryBounds,
    annulus_from_json_dict,
    annulus_to_json_dict,
    derived_facts,
    format_annulus,
    is_fourone,
    label_catalog,
    labeled_isomorphic,
    parse_annulus,
    parse_label,
    symmetry_bounds,
    validate_labels,
)

HOLLOW = NodeKind.HOLLOW
SOLID = NodeKind.SOLID


def diagram(kind, extra_solid, edges):
    nodes = [Node("v", kind, 2)] + [Node(f"s{i}", SOLID) for i in range(1, extra_solid + 1)]
    return CharDiagram.build(nodes, edges)


def labeled(kind, extra_solid, edges, labels):
    return AnnulusDiagram.build(diagram(kind, extra_solid, edges), labels)


LOOP = [("v", "v")]
LOOP_BRIDGE = [("v", "v"), ("v", "s1")]
THETA = [("v", "s1")] * 3


# --- label syntax ---------------------------------------------------------------


@pytest.mark.parametrize("token", ["h1", "h2", "k1", "l0", "em", "k2(5/2)", "k2(-7/3)", "l(2/3,3/2)", "l(2/3,6)"])
def test_parse_label_round_trip(token):
    assert str(parse_label(token)) == token


def test_trivial_pair_normalizes_to_l0():
    assert parse_label("l(0,0)") == EdgeLabel.l0()


@pytest.mark.parametrize("token", ["h3", "k2(0)", "k2(1/2)", "k2(-1/3)", "l(0,5)", "l(1/3,1/2)", "l(2/3)", "k2(1/0)"])
def test_parse_label_rejects(token):
    with pytest.raises(ValueError):
        parse_label(token)


def test_k2_slope_guard():
    with pytest.raises(ValueError):
        EdgeLabel.k2(Fraction(1, 4))
    assert EdgeLabel.k2(Fraction(5, 2)).slope == Fraction(5, 2)


def test_l_label_sorts_slopes():
    assert EdgeLabel.l(Fraction(3, 2), Fraction(2, 3)) == EdgeLabel.l(Fraction(2, 3), Fraction(3, 2))


# --- the rules -------------------------------------------------------------------


def test_unlabeled_diagram_passes():
    ad = AnnulusDiagram.unlabeled(diagram(HOLLOW, 0, LOOP))
    assert validate_labels(ad) == []


def test_partial_labeling_is_rejected():
    ad = labeled(HOLLOW, 1, LOOP_BRIDGE, [EdgeLabel.h2(), None])
    assert [v.code for v in validate_labels(ad)] == ["labels"]


def test_invalid_base_short_circuits():
    ad = labeled(SOLID, 0, LOOP, [EdgeLabel.h1()])
    codes = [v.code for v in validate_labels(ad)]
    assert "C-iii" in codes
    assert all(not c.startswith("R") for c in codes)


@pytest.mark.parametrize(
    "kind, extra, edges, labels, rule",
    [
        # k1 sits on a loop, which no cut-edge label may do
        (HOLLOW, 0, LOOP, [EdgeLabel.k1()], "R1"),
        # h2 on the bridge, a cut edge
        (HOLLOW, 1, LOOP_BRIDGE, [EdgeLabel.l0(), EdgeLabel.h2()], "R1"),
        # h1 must be alone on the single-loop diagram
        (HOLLOW, 1, LOOP_BRIDGE, [EdgeLabel.h1(), EdgeLabel.k1()], "R2"),
        # a reciprocal slope pair on a two-edge diagram
        (HOLLOW, 1, LOOP_BRIDGE, [EdgeLabel.l(Fraction(2, 3), Fraction(3, 2)), EdgeLabel.k1()], "R3"),
        # theta shape must carry exactly {h2, h2, l0}
        (HOLLOW, 1, THETA, [EdgeLabel.h2()] * 3, "R4"),
        (SOLID, 1, THETA, [EdgeLabel.l0()] * 3, "R4"),
        # em excludes h and l labels
        (HOLLOW, 1, LOOP_BRIDGE, [EdgeLabel.l0(), EdgeLabel.em()], "R5"),
        # companion of an h2 loop must carry k1 or k2
        (HOLLOW, 1, LOOP_BRIDGE, [EdgeLabel.h2(), EdgeLabel.em()], "R6"),
        # h2 on a non-loop edge outside the theta shape
        (HOLLOW, 1, [("v", "s1"), ("v", "s1")], [EdgeLabel.h2(), EdgeLabel.l0()], "R8"),
    ],
)
def test_rule_violations(kind, extra, edges, labels, rule):
    ad = labeled(kind, extra, edges, labels)
    assert rule in [v.code for v in validate_labels(ad)]


def test_r7_two_h2_with_k():
    base = [("v", "s1"), ("v", "s1"), ("v", "s2")]
    ad = labeled(HOLLOW, 2, base, [EdgeLabel.h2(), EdgeLabel.h2(), EdgeLabel.k1()])
    assert "R7" in [v.code for v in validate_labels(ad)]


@pytest.mark.parametrize(
    "kind, extra, edges, labels",
    [
        (HOLLOW, 0, LOOP, [EdgeLabel.h1()]),
        (HOLLOW, 0, LOOP, [EdgeLabel.h2()]),
        (HOLLOW, 0, LOOP, [EdgeLabel.l(Fraction(2, 3), Fraction(3, 2))]),
        (HOLLOW, 1, LOOP_BRIDGE, [EdgeLabel.h2(), EdgeLabel.k2(Fraction(5, 2))]),
        (HOLLOW, 1, LOOP_BRIDGE, [EdgeLabel.l0(), EdgeLabel.k1()]),
        (HOLLOW, 1, THETA, [EdgeLabel.h2(), EdgeLabel.h2(), EdgeLabel.l0()]),
        (SOLID, 1, THETA, [EdgeLabel.h2(), EdgeLabel.h2(), EdgeLabel.l0()]),
        (SOLID, 1, [("v", "s1")], [EdgeLabel.em()]),
    ],
)
def test_valid_labelings(kind, extra, edges, labels):
    ad = labeled(kind, extra, edges, labels)
    assert validate_labels(ad) == []


# --- symmetry bounds -------------------------------------------------------------


def test_bounds_h1():
    ad = labeled(HOLLOW, 0, LOOP, [EdgeLabel.h1()])
    b = symmetry_bounds(ad)
    assert b == SymmetryBounds(GroupBound.AT_MOST_Z2, GroupBound.AT_MOST_Z2XZ2, exact=False)


def test_bounds_h2_loop():
    ad = labeled(HOLLOW, 0, LOOP, [EdgeLabel.h2()])
    b = symmetry_bounds(ad)
    assert b.sym_plus is GroupBound.TRIVIAL
    assert b.sym is GroupBound.AT_MOST_Z2
    assert not b.exact


def test_bounds_h2_with_companion():
    ad = labeled(HOLLOW, 1, LOOP_BRIDGE, [EdgeLabel.h2(), EdgeLabel.k2(Fraction(5, 2))])
    b = symmetry_bounds(ad)
    assert b == SymmetryBounds(GroupBound.TRIVIAL, GroupBound.TRIVIAL, exact=True)


def test_bounds_theta_solid_is_exact():
    ad = labeled(SOLID, 1, THETA, [EdgeLabel.h2(), EdgeLabel.h2(), EdgeLabel.l0()])
    b = symmetry_bounds(ad)
    assert b == SymmetryBounds(GroupBound.EXACTLY_Z2, GroupBound.EXACTLY_Z2XZ2, exact=True)
    assert is_fourone(ad)


def test_bounds_theta_hollow_not_exact():
    ad = labeled(HOLLOW, 1, THETA, [EdgeLabel.h2(), EdgeLabel.h2(), EdgeLabel.l0()])
    b = symmetry_bounds(ad)
    assert b == SymmetryBounds(GroupBound.AT_MOST_Z2, GroupBound.AT_MOST_Z2XZ2, exact=False)
    assert not is_fourone(ad)


def test_no_h_label_no_bound():
    ad = labeled(HOLLOW, 1, LOOP_BRIDGE, [EdgeLabel.l0(), EdgeLabel.k1()])
    assert symmetry_bounds(ad) is None


def test_bounds_rejects_invalid():
    ad = labeled(HOLLOW, 0, LOOP, [EdgeLabel.k1()])
    with pytest.raises(ValueError):
        symmetry_bounds(ad)


def test_group_bound_allows():
    assert GroupBound.TRIVIAL.allows("1")
    assert not GroupBound.TRIVIAL.allows("Z2")
    assert GroupBound.AT_MOST_Z2.allows("1")
    assert GroupBound.AT_MOST_Z2.allows("Z2")
    assert not GroupBound.AT_MOST_Z2.allows("Z2xZ2")
    assert GroupBound.EXACTLY_Z2XZ2.allows("Z2xZ2")
    assert not GroupBound.EXACTLY_Z2XZ2.allows("Z2")


def test_bounds_ordering_guard():
    with pytest.raises(ValueError):
        SymmetryBounds(GroupBound.EXACTLY_Z2XZ2, GroupBound.TRIVIAL, exact=True)


# --- derived facts ----------------------------------------------------------------


def fact_codes(ad):
    return [f.code for f in derived_facts(ad)]


def test_fourone_fact():
    ad = labeled(SOLID, 1, THETA, [EdgeLabel.h2(), EdgeLabel.h2(), EdgeLabel.l0()])
    facts = derived_facts(ad)
    assert any("4_1" in f.text for f in facts)
    assert any(f.code == "annuli-count" and "exactly three" in f.text for f in facts)


def test_annuli_counts():
    five = AnnulusDiagram.unlabeled(diagram(SOLID, 1, [("v", "s1")]))
    assert any("exactly five" in f.text for f in derived_facts(five))
    infinite = AnnulusDiagram.unlabeled(diagram(SOLID, 2, [("v", "s1"), ("v", "s2")]))
    assert any("infinitely many" in f.text for f in derived_facts(infinite))


def test_uniqueness_facts():
    h1 = labeled(HOLLOW, 0, LOOP, [EdgeLabel.h1()])
    assert "uniqueness" in fact_codes(h1)
    reciprocal = labeled(HOLLOW, 0, LOOP, [EdgeLabel.l(Fraction(2, 3), Fraction(3, 2))])
    assert "uniqueness" in fact_codes(reciprocal)


def test_unconstrained_fact():
    ad = labeled(HOLLOW, 1, LOOP_BRIDGE, [EdgeLabel.l0(), EdgeLabel.k1()])
    assert "unconstrained" in fact_codes(ad)


def test_realization_fact():
    ad = AnnulusDiagram.unlabeled(
        diagram(HOLLOW, 3, [("v", "s1"), ("v", "s2"), ("v", "s3")])
    )
    assert "realization" in fact_codes(ad)


def test_derived_facts_rejects_invalid():
    with pytest.raises(ValueError):
        derived_facts(labeled(HOLLOW, 0, LOOP, [EdgeLabel.k1()]))


# --- the catalog -------------------------------------------------------------------


@pytest.fixture(scope="module")
def catalog():
    return label_catalog()


def test_catalog_size(catalog):
    assert len(catalog) == 66


def test_catalog_h_split(catalog):
    constrained = [e for e in catalog if e.constrained]
    assert len(constrained) == 6
    h1_entries = [e for e in constrained if "h1" in e.kinds]
    h2_entries = [e for e in constrained if "h2" in e.kinds]
    assert len(h1_entries) == 1
    assert len(h2_entries) == 5
    assert h1_entries[0].dtype.as_tuple() == (1, 1, 0, "hollow")


def test_catalog_bounds_agree_with_constraint(catalog):
    for e in catalog:
        assert (e.bounds is not None) == e.constrained


def test_catalog_covers_all_classes(catalog):
    assert len({e.dtype.as_tuple() for e in catalog}) == 13


def test_catalog_entries_validate(catalog):
    for e in catalog:
        assert validate_labels(e.diagram) == []


def test_catalog_entries_distinct(catalog):
    for i, e1 in enumerate(catalog):
        for e2 in catalog[i + 1:]:
            assert not labeled_isomorphic(e1.diagram, e2.diagram)


# --- formats -----------------------------------------------------------------------


def test_text_round_trip(catalog):
    for e in catalog[:20]:
        assert parse_annulus(format_annulus(e.diagram)) == e.diagram


def test_json_round_trip(catalog):
    for e in catalog[:20]:
        assert annulus_from_json_dict(annulus_to_json_dict(e.diagram)) == e.diagram


def test_parse_annulus_accepts_plain_diagram():
    ad = parse_annulus("node v hollow genus=2\nedge v v\n")
    assert ad.labels == (None,)
    assert classify_type(ad.base).as_tuple() == (1, 1, 0, "hollow")
