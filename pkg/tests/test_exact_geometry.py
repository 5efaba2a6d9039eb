import math
from fractions import Fraction as F

import pytest
from hypothesis import assume, given, strategies as st

from conftest import rationals, rvectors
from isoparam.errors import DegenerateConfiguration, InvalidHyperplane, PreconditionError
from isoparam.exact_geometry import (
    AffineHyperplane,
    AffineIsometry,
    AngleClass,
    EuclidVerdict,
    ParallelFamily,
    RationalVector,
    angle_class,
    colinear,
    euclid_check,
    euclid_scan,
    reflect,
)


def V(*xs):
    return RationalVector(xs)


class TestReflect:
    @pytest.mark.parametrize(
        "normal, offset, x, expected",
        [
            ((1, 0), 0, (3, 1), (-3, 1)),
            ((1, 0), 1, (1, 5), (1, 5)),
            ((1, 1), 0, (1, 0), (0, -1)),
        ],
    )
    def test_examples(self, normal, offset, x, expected):
        assert reflect(AffineHyperplane(normal, offset), V(*x)) == V(*expected)

    def test_zero_normal(self):
        with pytest.raises(InvalidHyperplane):
            AffineHyperplane((0, 0), 1)

    @given(rvectors(3), rationals(), rvectors(3))
    def test_involution(self, n, c, x):
        assume(any(n))
        h = AffineHyperplane(n, c)
        assert reflect(h, reflect(h, V(*x))) == V(*x)

    @given(rvectors(2), rationals(), rationals())
    def test_fixes_hyperplane(self, n, c, t):
        assume(any(n))
        h = AffineHyperplane(n, c)
        n = V(*n)
        p = n * (F(c) / n.norm2()) + V(-n[1], n[0]) * t
        assert h.contains(p)
        assert reflect(h, p) == p

    @given(rvectors(3), rationals(), rvectors(3), rvectors(3))
    def test_isometry(self, n, c, x, y):
        assume(any(n))
        h = AffineHyperplane(n, c)
        x, y = V(*x), V(*y)
        d = reflect(h, x) - reflect(h, y)
        assert d.norm2() == (x - y).norm2()

    def test_isometry_matches_reflect(self):
        h = AffineHyperplane((1, 2), F(1, 3))
        g = AffineIsometry.reflection(h)
        x = V(F(5, 7), -2)
        assert g.apply(x) == reflect(h, x)
        assert g.compose(g) == AffineIsometry.identity(2)


class TestHyperplane:
    @given(rvectors(3), rationals(), rationals())
    def test_scaling_equality(self, n, c, q):
        assume(any(n) and q != 0)
        a = AffineHyperplane(n, c)
        b = AffineHyperplane([q * x for x in n], q * c)
        assert a == b and hash(a) == hash(b)

    def test_distinct(self):
        assert AffineHyperplane((1, 0), 0) != AffineHyperplane((1, 0), 1)


class TestAngleClass:
    @pytest.mark.parametrize(
        "n1, n2, tag",
        [
            ((1, 0), (0, 1), AngleClass.RIGHT),
            ((1, 0), (1, 1), AngleClass.PI4),
            ((1, -1, 0), (2, -1, -1), AngleClass.PI6),
            ((1, -1, 0), (0, 1, -1), AngleClass.PI3),
            ((2, 0), (-3, 0), AngleClass.PARALLEL),
            ((1, 0), (1, 2), AngleClass.OTHER),
        ],
    )
    def test_examples(self, n1, n2, tag):
        assert angle_class(AffineHyperplane(n1, 0), AffineHyperplane(n2, 0)) is tag

    @given(rvectors(3), rvectors(3), rationals(), rationals())
    def test_symmetric_and_scale_invariant(self, u, w, p, q):
        assume(any(u) and any(w) and p != 0 and q != 0)
        h1, h2 = AffineHyperplane(u, 0), AffineHyperplane(w, 1)
        s1 = AffineHyperplane([p * x for x in u], 3)
        s2 = AffineHyperplane([q * x for x in w], -2)
        assert angle_class(h1, h2) is angle_class(h2, h1) is angle_class(s1, s2)

    def test_links(self):
        assert [c.link for c in (AngleClass.RIGHT, AngleClass.PI3, AngleClass.PI4, AngleClass.PI6)] == [0, 1, 2, 3]


class TestColinear:
    def test_examples(self):
        assert colinear([V(0, 0), V(1, 1), V(2, 2)])
        assert not colinear([V(0, 0), V(1, 0), V(0, 1)])
        assert colinear([V(5, 5)])

    @given(rvectors(3), rvectors(3), st.lists(rationals(), min_size=1, max_size=5))
    def test_points_on_a_line(self, a, d, ts):
        a, d = V(*a), V(*d)
        assert colinear([a + d * t for t in ts] + [a])


def _lines(*cs):
    return [AffineHyperplane((1, 0), c) for c in cs]


class TestEuclidCheck:
    def test_examples(self):
        assert euclid_check(_lines(0, 1, 2), [V(0, 0), V(1, 1), V(2, 2)]) is EuclidVerdict.COLINEAR
        assert euclid_check(_lines(0, 1, 2), [V(0, 0), V(1, 1), V(2, 0)]) is EuclidVerdict.MIDLINE_ORTHOGONAL
        assert euclid_check(_lines(0, 1, 3), [V(0, 0), V(1, 1), V(3, 0)]) is EuclidVerdict.CONSTRAINTS_NOT_SATISFIED

    def test_point_off_line(self):
        with pytest.raises(PreconditionError):
            euclid_check(_lines(0, 1, 2), [V(0, 0), V(2, 1), V(2, 2)])

    def test_coincident(self):
        with pytest.raises((DegenerateConfiguration, PreconditionError)):
            euclid_check(_lines(0, 1, 2), [V(0, 0), V(0, 0), V(2, 2)])

    def test_nonparallel(self):
        with pytest.raises(PreconditionError):
            euclid_check([AffineHyperplane((1, 0), 0), AffineHyperplane((0, 1), 1), AffineHyperplane((1, 0), 2)],
                         [V(0, 0), V(0, 1), V(2, 0)])

    @given(st.lists(st.integers(-3, 3), min_size=3, max_size=3, unique=True),
           st.lists(st.integers(-8, 8), min_size=3, max_size=3))
    def test_verdict_against_float_angles(self, cs, ss):
        # independent oracle: float angles between the six lines
        pts = [V(c, F(s, 2)) for c, s in zip(cs, ss)]
        assume(len(set(pts)) == 3)
        v = euclid_check(_lines(*cs), pts)
        dirs = [(0.0, 1.0)] * 3 + [
            (float(pts[j][0] - pts[i][0]), float(pts[j][1] - pts[i][1])) for i, j in ((0, 1), (0, 2), (1, 2))
        ]

        def mult_of(a, step):
            return abs(a / step - round(a / step)) < 1e-9

        angles = []
        for i in range(6):
            for j in range(i + 1, 6):
                a = math.atan2(dirs[i][1], dirs[i][0]) - math.atan2(dirs[j][1], dirs[j][0])
                angles.append(a)
        pi6 = all(mult_of(a, math.pi / 6) and not mult_of(a - math.pi / 2, math.pi) for a in angles)
        pi4 = all(mult_of(a, math.pi / 4) for a in angles)
        if pi6 or pi4:
            assert v in (EuclidVerdict.COLINEAR, EuclidVerdict.MIDLINE_ORTHOGONAL)
        else:
            assert v is EuclidVerdict.CONSTRAINTS_NOT_SATISFIED

    def test_pi6_embedding(self):
        # three hexagonal lines in the plane sum(x) = 0 of Q^3
        n = (1, -1, 0)
        lines = [AffineHyperplane(n, c) for c in (0, 1, 2)]
        across = V(F(1, 2), F(-1, 2), 0)
        pts = [across * c for c in (0, 1, 2)]
        assert euclid_check(lines, pts, plane=((1, -1, 0), (1, 1, -2))) is EuclidVerdict.COLINEAR

    def test_small_scan(self):
        for regime in ("pi4", "pi6"):
            rep = euclid_scan(regime, offsets=range(4), span=(0, 3), max_den=2)
            assert rep.ok and rep.hypothesis_met > 0


class TestParallelFamily:
    def test_normalisation(self):
        f = ParallelFamily("a", (-2, 0), 1, F(1, 4))
        assert f.normal == V(1, 0)
        assert f.spacing == F(1, 2)
        assert 0 <= f.phase < f.spacing

    @given(rvectors(2), rationals(), rationals(), st.integers(-5, 5))
    def test_index_round_trip(self, n, s, p, k):
        assume(any(n) and s != 0)
        f = ParallelFamily("a", n, s, p)
        assert f.index_of(f.hyperplane(k)) == k
