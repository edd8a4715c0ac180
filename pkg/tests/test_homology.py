"""Exact-arithmetic checks for the integer homology toolbox.

The Smith normal form implementation is cross-checked against sympy's,
which serves as an independent oracle; everything downstream (group
presentations, subgroup indices, slope classification) is checked against
hand-computed values.
"""

import random
from fractions import Fraction

import pytest
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import invariant_factors as sympy_invariant_factors

from hkdiag.homology import (
    AbelianGroup,
    INFINITE,
    IntMatrix,
    LaurentPoly,
    LoopClass,
    invariant_factors_of,
    klein_case_group,
    meridional_pair_predict,
    primitivity_necessary,
    random_unimodular,
    slope_pair_classify,
    smith_normal_form,
    subgroup_index,
)


def random_matrix(rng, max_dim=6, bound=20):
    rows = rng.randint(1, max_dim)
    cols = rng.randint(1, max_dim)
    return IntMatrix.from_rows(
        [[rng.randint(-bound, bound) for _ in range(cols)] for _ in range(rows)]
    )


def test_snf_decomposition_is_exact():
    rng = random.Random(20210)
    for _ in range(300):
        m = random_matrix(rng)
        d, u, v = smith_normal_form(m)
        assert (u @ m @ v) == d
        assert u.is_unimodular
        assert v.is_unimodular
        diag = [x for x in d.diagonal() if x]
        assert all(x > 0 for x in diag)
        for a, b in zip(diag, diag[1:]):
            assert b % a == 0
        # off-diagonal entries must all be zero
        for i, row in enumerate(d.entries):
            for j, x in enumerate(row):
                if i != j:
                    assert x == 0


def test_snf_matches_sympy():
    rng = random.Random(999)
    for _ in range(200):
        m = random_matrix(rng, max_dim=5, bound=15)
        expected = tuple(
            int(x) for x in sympy_invariant_factors(Matrix(m.entries), domain=ZZ) if x != 0
        )
        assert invariant_factors_of(m) == expected


def test_invariant_factors_stable_under_unimodular_change():
    rng = random.Random(4242)
    for _ in range(120):
        m = random_matrix(rng, max_dim=5, bound=10)
        p = random_unimodular(rng, m.nrows)
        q = random_unimodular(rng, m.ncols)
        assert invariant_factors_of(p @ m @ q) == invariant_factors_of(m)


def test_det_matches_sympy():
    rng = random.Random(77)
    for _ in range(100):
        n = rng.randint(1, 5)
        m = IntMatrix.from_rows(
            [[rng.randint(-9, 9) for _ in range(n)] for _ in range(n)]
        )
        assert m.det() == int(Matrix(m.entries).det())


def test_presentation_hand_cases():
    assert AbelianGroup.from_presentation(2, [[2, 0]]) == AbelianGroup(1, (2,))
    assert AbelianGroup.from_presentation(2, [[1, 1]]) == AbelianGroup(1)
    assert AbelianGroup.from_presentation(3, []) == AbelianGroup(3)
    assert AbelianGroup.from_presentation(2, [[2, 0], [0, 4]]) == AbelianGroup(0, (2, 4))
    assert AbelianGroup.from_presentation(1, [[1]]).is_trivial


def test_group_str():
    assert str(AbelianGroup(2)) == "Z^2"
    assert str(AbelianGroup(1, (3,))) == "Z x Z/3"
    assert str(AbelianGroup(0)) == "1"


def test_group_rejects_bad_invariants():
    with pytest.raises(ValueError):
        AbelianGroup(0, (3, 4))
    with pytest.raises(ValueError):
        AbelianGroup(0, (1,))


@pytest.mark.parametrize(
    "classes, expected",
    [
        ([(1, 0), (0, 1)], 1),
        ([(2, 0), (0, 3)], 6),
        ([(1, 1), (1, -1)], 2),
        ([(1, 0), (2, 0)], INFINITE),
        ([(0, 0)], INFINITE),
    ],
)
def test_subgroup_index(classes, expected):
    got = subgroup_index(classes)
    if expected is INFINITE:
        assert got is INFINITE
    else:
        assert got == expected


def test_subgroup_index_accepts_loop_classes():
    assert subgroup_index([LoopClass((3, 1)), LoopClass((1, 1))]) == 2


def test_primitivity():
    assert primitivity_necessary([(1, 0)])
    assert primitivity_necessary([(2, 1)])
    assert not primitivity_necessary([(2, 0)])
    assert not primitivity_necessary([(1, 0), (1, 0)])
    assert primitivity_necessary([(1, 0, 0), (0, 1, 0)])


def test_loop_class_arithmetic():
    a = LoopClass((1, 2))
    b = LoopClass((3, -2))
    assert a + b == LoopClass((4, 0))
    assert -a == LoopClass((-1, -2))
    assert a.scaled(3) == LoopClass((3, 6))
    assert LoopClass((0, 0)).is_zero
    with pytest.raises(ValueError):
        a + LoopClass((1,))


def test_meridional_pair_index_is_abs_p():
    """The pair spans an index-|p| subgroup whenever p is nonzero."""
    rng = random.Random(5150)
    for _ in range(100):
        p = rng.choice([x for x in range(-50, 51) if x != 0])
        p1 = rng.randint(-50, 50)
        pair = meridional_pair_predict(p, 1, p1)
        assert subgroup_index(pair) == abs(p)
        mirrored = meridional_pair_predict(p, 1, p1, mirror=True)
        assert subgroup_index(mirrored) == abs(p)


def test_meridional_pair_degenerates_at_p_zero():
    pair = meridional_pair_predict(0, 1, 1)
    assert pair == ((1, -1), (0, 0))
    assert subgroup_index(pair) is INFINITE


def test_meridional_pair_requires_lowest_terms():
    with pytest.raises(ValueError):
        meridional_pair_predict(4, 2, 1)


def test_klein_case_bases():
    for k in (2, 3, -2, 7):
        g = klein_case_group(k)
        assert g.group == AbelianGroup(2)
        assert g.v_plus_u_basis
        assert g.v_minus_u_basis
        assert g.v_plus + g.v_minus == g.u.scaled(g.k)
    mirrored = klein_case_group(3, mirror=True)
    assert mirrored.k == -3
    with pytest.raises(ValueError):
        klein_case_group(1)


@pytest.mark.parametrize(
    "r1, r2, kind",
    [
        (0, 0, "trivial"),
        (Fraction(2, 3), Fraction(3, 2), "reciprocal"),
        (Fraction(3, 2), Fraction(2, 3), "reciprocal"),
        (Fraction(2, 3), 6, "product"),
        (6, Fraction(2, 3), "product"),
        (Fraction(-1, 2), -2, "reciprocal"),
        (0, 5, "invalid"),
        (Fraction(1, 3), Fraction(1, 2), "invalid"),
    ],
)
def test_slope_pair_classify(r1, r2, kind):
    shape = slope_pair_classify(r1, r2)
    assert shape.kind == kind
    assert shape.is_nontrivial_valid == (kind in ("reciprocal", "product"))


def test_laurent_arithmetic():
    t = LaurentPoly.t()
    one = LaurentPoly.constant(1)
    p = t * t - t + one
    assert str(p) == "t^2 - t + 1"
    assert p.coeff(2) == 1 and p.coeff(1) == -1 and p.coeff(0) == 1
    assert p.evaluated_at_one == 1
    assert (p - p).is_zero
    q = LaurentPoly.from_dict({-1: 1, 1: 1})
    assert (q * q) == LaurentPoly.from_dict({-2: 1, 0: 2, 2: 1})


def test_laurent_normalization():
    p = LaurentPoly.from_dict({-3: -2, -1: 2})
    n = p.normalized()
    assert n == LaurentPoly.from_dict({0: 2, 2: -2}).normalized()
    assert min(e for e, _ in n.terms) == 0
    assert p.equals_up_to_units(LaurentPoly.from_dict({4: 2, 2: -2}))
    assert not p.equals_up_to_units(LaurentPoly.constant(1))


def test_laurent_ring_axioms_spot_check():
    rng = random.Random(31337)

    def rand_poly():
        return LaurentPoly.from_dict(
            {rng.randint(-3, 3): rng.randint(-4, 4) for _ in range(rng.randint(0, 4))}
        )

    for _ in range(200):
        a, b, c = rand_poly(), rand_poly(), rand_poly()
        assert a * b == b * a
        assert (a + b) * c == a * c + b * c
        assert (a * b) * c == a * (b * c)
        assert a.evaluated_at_one * b.evaluated_at_one == (a * b).evaluated_at_one
