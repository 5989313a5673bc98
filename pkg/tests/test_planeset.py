"""Tests for configurations, embedding, audits, and inversion."""

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ratdist.planeset import (
    AuditReport,
    Configuration,
    DistanceMatrix,
    LatticePoint,
    MixedFieldError,
    NotPlanarError,
    NotRdsMatrixError,
    PlanesetError,
    audit_general_position,
    collinear,
    concyclic,
    distance_matrix,
    embed_from_distances,
    invert,
    normalize,
    squared_distance,
    verify_rds,
)

F = Fraction


def pt(x, yc=0) -> LatticePoint:
    return LatticePoint(F(x), F(yc))


def cfg(k, *pts, provenance="") -> Configuration:
    return Configuration(k, tuple(pt(*p) for p in pts), provenance)


TRIANGLE_345 = cfg(1, (0, 0), (3, 0), (0, 4))
UNIT_SQUARE = cfg(1, (0, 0), (1, 0), (0, 1), (1, 1))
RECTANGLE_34 = cfg(1, (0, 0), (3, 0), (0, 4), (3, 4))


def two_circle_intersection_oracle(d0: F, d1: F):
    """Intersect circles of radius d0 around (0,0) and d1 around (1,0).

    Returns (x, t) with t the squared height; independent check for the
    embedding formulas.
    """
    x = (d0 * d0 + 1 - d1 * d1) / 2
    return x, d0 * d0 - x * x


# ---------------------------------------------------------------------------
# squared_distance / verify


def test_squared_distance_examples():
    assert squared_distance(pt(0, 0), pt(1, 0), 7) == 1
    assert squared_distance(pt(0, 0), pt(3, 0), 1) == 9
    assert squared_distance(pt(0, 0), pt(0, 4), 1) == 16
    assert squared_distance(pt(0, 0), LatticePoint(F(1, 2), F(1, 2)), 3) == 1


def test_verify_rds_345():
    report = verify_rds(TRIANGLE_345)
    assert report.is_rds
    assert report.distances[0][1] == 3
    assert report.distances[0][2] == 4
    assert report.distances[1][2] == 5


def test_verify_rds_unit_square_fails_on_diagonal():
    report = verify_rds(cfg(1, (0, 0), (1, 0), (0, 1)))
    assert not report.is_rds
    assert report.failing_pairs == ((1, 2, F(2)),)
    assert report.distances[1][2] is None


def test_verify_rds_single_point_vacuous():
    assert verify_rds(cfg(5, (2, 3))).is_rds


def test_configuration_validation():
    with pytest.raises(PlanesetError):
        cfg(1, (0, 0), (0, 0))
    with pytest.raises(PlanesetError):
        cfg(12, (0, 0), (1, 0))  # 12 is not squarefree
    with pytest.raises(PlanesetError):
        cfg(0, (0, 0))


# ---------------------------------------------------------------------------
# embedding / normalization


def test_embed_equilateral_triangle():
    m = DistanceMatrix(((F(0), F(1), F(1)), (F(1), F(0), F(1)), (F(1), F(1), F(0))))
    c = embed_from_distances(m)
    x, t = two_circle_intersection_oracle(F(1), F(1))
    assert x == F(1, 2) and t == F(3, 4)
    assert c.k == 3
    assert c.points == (pt(0, 0), pt(1, 0), LatticePoint(F(1, 2), F(1, 2)))


def test_embed_collinear():
    m = DistanceMatrix(((F(0), F(1), F(4)), (F(1), F(0), F(1)), (F(4), F(1), F(0))))
    c = embed_from_distances(m)
    assert c.k == 1
    assert c.points == (pt(0, 0), pt(1, 0), pt(2, 0))


def test_embed_345_rescales_first_edge():
    m = distance_matrix(TRIANGLE_345)
    c = embed_from_distances(m)
    assert c.k == 1
    assert c.points == (pt(0, 0), pt(1, 0), LatticePoint(F(0), F(4, 3)))
    # entrywise: embedded matrix equals input scaled by 1/d(0,1)^2
    got = distance_matrix(c)
    for i in range(3):
        for j in range(3):
            assert got.entries[i][j] == m.entries[i][j] / m.entries[0][1]


def test_embed_rejects_non_square_entry():
    m = DistanceMatrix(((F(0), F(1), F(2)), (F(1), F(0), F(1)), (F(2), F(1), F(0))))
    with pytest.raises(NotRdsMatrixError):
        embed_from_distances(m)


def test_embed_rejects_mixed_field():
    # equilateral triangle (k=3) plus a fourth point whose vertical part has
    # squarefree part 2
    m = DistanceMatrix(
        (
            (F(0), F(1), F(1), F(9, 4)),
            (F(1), F(0), F(1), F(9, 4)),
            (F(1), F(1), F(0), F(1)),
            (F(9, 4), F(9, 4), F(1), F(0)),
        )
    )
    with pytest.raises(MixedFieldError):
        embed_from_distances(m)


def test_embed_rejects_regular_tetrahedron():
    ones = [[F(1)] * 4 for _ in range(4)]
    for i in range(4):
        ones[i][i] = F(0)
    with pytest.raises(NotPlanarError):
        embed_from_distances(DistanceMatrix(tuple(tuple(r) for r in ones)))


def test_normalize_translated_fixture():
    c = cfg(1, (5, 0), (8, 0), (5, 4))
    out = normalize(c)
    assert out.k == 1
    assert out.points == (pt(0, 0), pt(1, 0), LatticePoint(F(0), F(4, 3)))


def test_normalize_idempotent_and_scale_invariant():
    side1 = normalize(embed_from_distances(
        DistanceMatrix(((F(0), F(1), F(1)), (F(1), F(0), F(1)), (F(1), F(1), F(0))))
    ))
    side2 = normalize(embed_from_distances(
        DistanceMatrix(((F(0), F(4), F(4)), (F(4), F(0), F(4)), (F(4), F(4), F(0))))
    ))
    assert normalize(side1) == side1
    assert side1.points == side2.points and side1.k == side2.k


def test_normalize_requires_rds():
    with pytest.raises(PlanesetError):
        normalize(cfg(1, (0, 0), (1, 0), (0, 1)))


# ---------------------------------------------------------------------------
# predicates


def test_collinear_examples():
    assert collinear(pt(0, 0), pt(1, 0), pt(2, 0))
    assert not collinear(pt(0, 0), pt(1, 0), pt(0, 1))
    assert collinear(pt(0, 0), pt(1, 1), pt(2, 2))


def test_concyclic_examples():
    assert concyclic(pt(0, 0), pt(3, 0), pt(0, 4), pt(3, 4), 1)
    assert concyclic(pt(0, 0), pt(1, 0), pt(0, 1), pt(1, 1), 1)
    assert not concyclic(pt(0, 0), pt(1, 0), pt(2, 0), pt(0, 1), 1)
    with pytest.raises(PlanesetError):
        concyclic(pt(0, 0), pt(0, 0), pt(1, 0), pt(2, 0), 1)


def test_rectangle_circumcircle_center_oracle():
    # center (3/2, 2), radius^2 = 25/4: every corner satisfies it
    cx, cy = F(3, 2), F(2)
    for p in RECTANGLE_34.points:
        assert (p.x - cx) ** 2 + (p.yc - cy) ** 2 == F(25, 4)


@given(st.permutations(range(3)))
def test_collinear_permutation_invariant(perm):
    pts = [pt(0, 0), pt(2, 1), pt(4, 2)]
    assert collinear(*(pts[i] for i in perm))
    pts2 = [pt(0, 0), pt(2, 1), pt(4, 3)]
    assert not collinear(*(pts2[i] for i in perm))


@given(st.permutations(range(4)))
def test_concyclic_permutation_invariant(perm):
    pts = list(UNIT_SQUARE.points)
    assert concyclic(*(pts[i] for i in perm), 1)


# ---------------------------------------------------------------------------
# audit


def test_audit_seven_point_thresholds():
    pts = [(0, 0), (3, 0), (0, 4), (3, 4), (7, 1), (2, 9), (5, 5)]
    report = audit_general_position(cfg(1, *pts))
    assert (report.line_threshold, report.circle_threshold) == (3, 4)


def test_audit_rectangle():
    report = audit_general_position(RECTANGLE_34)
    assert report.max_concyclic == 4
    assert not report.strong_ok
    assert not report.literal_ok  # n-4 = 0 is vacuously violated
    assert report.witnesses["concyclic"] == (0, 1, 2, 3)


def test_audit_five_collinear():
    report = audit_general_position(cfg(1, (0, 0), (1, 0), (2, 0), (3, 0), (4, 0)))
    assert report.max_collinear == 5
    assert not report.literal_ok and not report.strong_ok
    # the audit never mistakes the common line for a circle
    assert report.max_concyclic == 2


def test_concyclic_degenerate_line_semantics():
    # with three collinear points the determinant vanishes exactly when the
    # fourth point is on the same line; the audit separates the cases via
    # collinear seeds
    assert concyclic(pt(0, 0), pt(1, 0), pt(2, 0), pt(3, 0), 1)
    assert not concyclic(pt(0, 0), pt(1, 0), pt(2, 0), pt(3, 1), 1)


def test_audit_small_sets():
    assert audit_general_position(cfg(1, (0, 0), (1, 0))).literal_ok
    r3 = audit_general_position(cfg(1, (0, 0), (1, 0), (0, 1)))
    assert not r3.literal_ok  # n-3 = 0: empty subset lies on a circle
    assert r3.strong_ok


def test_audit_monotone_under_point_removal():
    base = cfg(1, (0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (0, 3))
    full = audit_general_position(base)
    for drop in range(base.n):
        kept = tuple(p for i, p in enumerate(base.points) if i != drop)
        sub = audit_general_position(Configuration(1, kept))
        assert sub.max_collinear <= full.max_collinear
        assert sub.max_concyclic <= full.max_concyclic


# ---------------------------------------------------------------------------
# inversion


def test_invert_345_at_origin():
    out = invert(TRIANGLE_345, 0)
    assert out.points == (pt(0, 0), LatticePoint(F(1, 3), F(0)), LatticePoint(F(0), F(1, 4)))
    # |phi(A) - phi(B)| = |AB| / (|PA| |PB|) = 5 / 12
    sq = squared_distance(out.points[1], out.points[2], 1)
    assert sq == F(5, 12) ** 2


def test_invert_fixes_unit_distance_points():
    c = cfg(1, (0, 0), (1, 0), (-3, 0))
    out = invert(c, 0)
    assert out.points[1] == pt(1, 0)


def test_invert_is_involution():
    for center in range(TRIANGLE_345.n):
        assert invert(invert(TRIANGLE_345, center), center) == TRIANGLE_345


def test_invert_output_verifies():
    fixtures = [
        TRIANGLE_345,
        UNIT_SQUARE_RDS := cfg(1, (0, 0), (3, 0), (0, 4), (3, 4)),
        cfg(1, (0, 0), (5, 0), (9, 0), (20, 0)),
    ]
    for c in fixtures:
        for center in range(c.n):
            assert verify_rds(invert(c, center)).is_rds


def test_invert_requires_rds():
    with pytest.raises(PlanesetError):
        invert(cfg(1, (0, 0), (1, 0), (0, 1)), 0)


# ---------------------------------------------------------------------------
# serialization


def test_configuration_json_roundtrip():
    c = cfg(3, (0, 0), (1, 0), provenance="fixture")
    assert Configuration.from_dict(c.to_dict()) == c


def test_distance_matrix_json_roundtrip():
    m = distance_matrix(TRIANGLE_345)
    assert DistanceMatrix.from_dict(m.to_dict()) == m


# ---------------------------------------------------------------------------
# randomized embedding property


@settings(max_examples=30, deadline=None)
@given(
    st.lists(
        st.tuples(
            st.integers(min_value=-6, max_value=6),
            st.integers(min_value=-6, max_value=6),
        ),
        min_size=2,
        max_size=5,
        unique=True,
    )
)
def test_embed_reproduces_matrix_of_collinear_and_grid_rds(coords):
    pts = tuple(LatticePoint(F(x), F(y)) for x, y in coords)
    c = Configuration(1, pts)
    if not verify_rds(c).is_rds:
        return
    m = distance_matrix(c)
    out = embed_from_distances(m)
    got = distance_matrix(out)
    scale = m.entries[0][1]
    for i in range(m.n):
        for j in range(m.n):
            assert got.entries[i][j] == m.entries[i][j] / scale
