import json
import math
from fractions import Fraction as F
from pathlib import Path

import pytest
from hypothesis import assume, given, strategies as st

from conftest import rationals, rvectors
from isoparam.errors import (
    DivergentSum,
    FocalBasepoint,
    FocalTranslation,
    InvalidInput,
    InvalidPair,
    UnclassifiedDiagram,
    UndefinedRatio,
)
from isoparam.exact_geometry import AffineHyperplane, RationalVector
from isoparam.slice_engine import (
    DiagramContext,
    HyperplaneFamily,
    bound_exponent,
    codazzi_ratio,
    component_support,
    curvature_normals,
    exception_set,
    gamma_norm_bound,
    general_support,
    normal_sum,
    parallel_translate,
    rank_one_envelope,
    refl_spacing,
)
from isoparam.weyl_group import model_arrangement

GOLDEN = json.loads((Path(__file__).parent / "golden" / "index_calculus.json").read_text())
PAIRS = [(i, j) for i in range(-8, 9) for j in range(-8, 9) if i != j]


def V(*xs):
    return RationalVector(xs)


class TestCurvatureNormals:
    def test_examples(self):
        f = HyperplaneFamily("a", (1, 0), F(1, 2), 1)
        assert curvature_normals(f, [0, 1]) == {0: V(2, 0), 1: V(F(2, 3), 0)}

    def test_focal(self):
        with pytest.raises(FocalBasepoint):
            curvature_normals(HyperplaneFamily("a", (1, 0), 0, 1), [0])

    def test_decreasing_distances_rejected(self):
        with pytest.raises(InvalidInput):
            HyperplaneFamily("a", (1, 0), 1, -1)

    @given(rationals(), st.integers(1, 5), st.integers(-6, 6))
    def test_on_focal_hyperplane(self, d0, d, k):
        f = HyperplaneFamily("a", (1, 2), d0, d)
        assume(f.distance(k) != 0)
        v = f.normal(k)
        # the focal hyperplane {<eta, v> = 1} is the k-th hyperplane {<eta, w> = d0 + k d}
        eta = V(f.distance(k), 0)
        assert eta.dot(v) == 1 and f.hyperplane(k).contains(eta)


class TestCodazziRatio:
    def test_examples(self):
        assert codazzi_ratio(V(1, 0), V(2, 0), V(3, 0)) == F(1, 2)
        assert codazzi_ratio(V(1, 0), V(0, 1), V(2, 0)) == 0
        assert codazzi_ratio(V(1, 0), V(5, 5), V(5, 5)) == 0

    def test_undefined(self):
        with pytest.raises(UndefinedRatio):
            codazzi_ratio(V(1, 1), V(0, 1), V(1, 1))

    @given(rvectors(2), rvectors(2), rationals())
    def test_recovers_multiple(self, vi, vk, lam):
        vi, vk = V(*vi), V(*vk)
        assume(vi != vk)
        vj = vk + (vi - vk) * lam
        assert codazzi_ratio(vi, vj, vk) == lam


class TestExceptionSet:
    def test_examples(self):
        assert exception_set(0, 4).values == tuple(F(x) for x in (16, 8, 4, 2, 1, -2, -4, -8))
        e = exception_set(0, 1)
        assert e.values == (4, 2, 1, F(1, 2), F(1, 4), F(-1, 2), -1, -2)
        assert e.integral.count(False) == 3

    def test_equal(self):
        with pytest.raises(InvalidPair):
            exception_set(3, 3)

    @pytest.mark.parametrize("i, j", PAIRS)
    def test_golden(self, i, j):
        got = [str(v) for v in exception_set(i, j).values]
        assert got == GOLDEN["exception_set"]["%d,%d" % (i, j)]

    @given(st.integers(-50, 50), st.integers(-50, 50))
    def test_contains_j(self, i, j):
        assume(i != j)
        assert j in exception_set(i, j)

    @given(st.integers(-20, 20))
    def test_formulas_injective_in_j(self, i):
        js = [j for j in range(-30, 31) if j != i]
        for slot in range(8):
            vals = [exception_set(i, j).values[slot] for j in js]
            assert len(set(vals)) == len(vals)


def _ctx(name):
    parts = name.split()
    return parts[0], (len(parts) > 1), (parts[2:] or ["full", "full"])


class TestComponentSupport:
    def test_examples(self):
        assert component_support("A~3", 0, 7).render() == ["zero"]
        assert component_support("C~3", 0, 4).render() == ["zero"]
        assert set(component_support("C~3", 0, 1).render()) == {"zero", "(a,-1)", "(a,2)"}
        assert component_support("C~3", 0, 2, "double_primed", "double_primed", reducible=True).render() == ["zero"]

    @pytest.mark.parametrize("context", sorted(GOLDEN["support"]))
    def test_golden(self, context):
        sym, red, (bx, by) = _ctx(context)
        table = GOLDEN["support"][context]
        for i, j in PAIRS:
            got = component_support(sym, i, j, bx, by, True if red else None)
            assert sorted(got.render()) == table["%d,%d" % (i, j)], (context, i, j)

    @given(st.sampled_from(["A~4", "B~3", "C~3", "C~3'", "(C~3^v,C~3')", "G~2", "F~4"]),
           st.integers(-20, 20), st.integers(-20, 20), st.booleans(),
           st.sampled_from(["full", "primed", "double_primed"]), st.sampled_from(["full", "primed", "double_primed"]))
    def test_within_general_bound(self, sym, i, j, red, bx, by):
        assume(i != j)
        red = red and sym[0] in "BC"
        if not red:
            bx = by = "full"
        sup = component_support(sym, i, j, bx, by, True if red else None)
        allowed = {it if it == "zero" else it[0] for it in general_support(i, j)}
        assert {it if it == "zero" else it[0] for it in sup.allowed} <= allowed

    def test_equal_indices(self):
        with pytest.raises(InvalidPair):
            component_support("C~3", 2, 2)

    def test_unclassified(self):
        with pytest.raises(UnclassifiedDiagram):
            component_support("X~9", 0, 1)

    def test_primed_needs_reducible(self):
        with pytest.raises(InvalidInput):
            component_support("C~3", 0, 2, "primed", "full")

    def test_exceptional_flag(self):
        # C~n' diagram: right extremal vertex at i, left one at (i+j)/2
        ctx = DiagramContext("C~3'", "extremal", 0)
        sup = component_support(ctx, 0, 2)
        assert sup.exceptional and (1, "full") in sup.allowed
        assert not component_support(DiagramContext("C~3", "extremal", 0), 0, 2).exceptional
        # i conjugate to the left vertex: no exception
        assert not component_support(ctx, 1, 3).exceptional


class TestRankOneEnvelope:
    def test_examples(self):
        assert all(rank_one_envelope("A~3", v) == "A~2" for v in range(4))
        from isoparam.weyl_group import template

        D = template("(B~3,B~3^v)")
        ext = next(v for v in range(len(D)) if [m for m in D.links[v] if m] == [2])
        assert rank_one_envelope("(B~3,B~3^v)", ext) == "(C~2,C~2^v)"
        D = template("C~3")
        mid = next(v for v in range(len(D)) if sum(1 for b in range(len(D)) if D.links[v][b] == 1))
        assert rank_one_envelope("C~3", mid) == "A~2"

    def test_rank_one(self):
        with pytest.raises(InvalidInput):
            rank_one_envelope("A~1", 0)


class TestReflSpacing:
    def setup_method(self):
        self.W = model_arrangement("C~2").window(3)

    def test_narrow_h(self):
        assert refl_spacing(self.W, AffineHyperplane((1, 0), 0), AffineHyperplane((1, 1), 0)) == "every_second"

    def test_wide_h(self):
        assert refl_spacing(self.W, AffineHyperplane((1, 1), 0), AffineHyperplane((1, 0), 0)) == "every"

    def test_orthogonal(self):
        assert refl_spacing(self.W, AffineHyperplane((1, 0), 0), AffineHyperplane((0, 1), 0)) == "every"
        assert refl_spacing(self.W, AffineHyperplane((1, 1), 0), AffineHyperplane((1, -1), 0)) == "every"

    def test_parallel(self):
        with pytest.raises(InvalidPair):
            refl_spacing(self.W, AffineHyperplane((1, 0), 0), AffineHyperplane((1, 0), F(1, 2)))


class TestParallelTranslate:
    def test_example(self):
        f = HyperplaneFamily("a", (1, 0), F(1, 2), 1)
        assert f.normal(0) == V(2, 0)
        (g,) = parallel_translate([f], V(F(1, 4), 0))
        assert g.normal(0) == V(4, 0)
        assert g.d0 == F(1, 2) - F(1, 4)

    def test_identity(self):
        f = HyperplaneFamily("a", (1, 2), F(1, 3), 2)
        assert parallel_translate([f], V(0, 0)) == [f]

    def test_focal(self):
        f = HyperplaneFamily("a", (1, 0), F(1, 2), 1)
        with pytest.raises(FocalTranslation):
            parallel_translate([f], V(F(1, 2), 0))

    @given(rvectors(2), rationals(), st.integers(1, 4), st.integers(-4, 4))
    def test_shape_formula_and_round_trip(self, xi, d0, d, k):
        f = HyperplaneFamily("a", (1, 1), d0, d)
        xi = V(*xi)
        assume(f.focal_index() is None and f.distance(k) != 0)
        try:
            (g,) = parallel_translate([f], xi)
        except FocalTranslation:
            return
        v = f.normal(k)
        assert g.normal(k) == v / (1 - xi.dot(v))
        assert parallel_translate([g], -xi) == [f]


class TestNormalSum:
    def test_pi_squared(self):
        lo, hi = normal_sum(HyperplaneFamily("a", (1,), F(1, 2), 1), F(1, 10**6))
        assert hi - lo <= F(1, 10**6)
        assert float(lo) <= math.pi**2 <= float(hi)

    def test_wider_spacing(self):
        # d0 = 1/2, d = 2: sum_k (1/2 + 2k)^-2 = pi^2/2, not a quarter of the d = 1 value
        lo, hi = normal_sum(HyperplaneFamily("a", (1,), F(1, 2), 2), F(1, 10**8))
        assert float(lo) <= math.pi**2 / 2 <= float(hi)

    def test_homogeneity(self):
        # scaling both d0 and d by 2 scales the sum by 1/4
        lo1, hi1 = normal_sum(HyperplaneFamily("a", (1,), F(1, 2), 1), F(1, 10**8))
        lo2, hi2 = normal_sum(HyperplaneFamily("a", (1,), 1, 2), F(1, 10**8))
        assert max(lo2, lo1 / 4) <= min(hi2, hi1 / 4)

    def test_direction_weight(self):
        lo1, hi1 = normal_sum(HyperplaneFamily("a", (1, 0), F(1, 3), 1), F(1, 10**8))
        lo2, hi2 = normal_sum(HyperplaneFamily("a", (1, 1), F(1, 3), 1), F(1, 10**8))
        assert max(lo2, 2 * lo1) <= min(hi2, 2 * hi1)

    def test_divergent(self):
        with pytest.raises(DivergentSum):
            normal_sum(HyperplaneFamily("a", (1,), 0, 1))

    @given(st.integers(1, 9), st.integers(2, 10), st.integers(1, 3))
    def test_closed_form(self, p, q, d):
        # sum_k 1/(d0 + k d)^2 = (pi/d)^2 / sin^2(pi d0/d)
        d0 = F(p, q)
        assume((d0 / d).denominator != 1)
        lo, hi = normal_sum(HyperplaneFamily("a", (1,), d0, d), F(1, 10**6))
        closed = (math.pi / d) ** 2 / math.sin(math.pi * float(d0) / d) ** 2
        assert float(lo) - 1e-9 <= closed <= float(hi) + 1e-9


class TestGammaNormBound:
    def test_odd(self):
        assert gamma_norm_bound(0, 1, 2, 3, 5) == 30

    def test_two_mod_four(self):
        assert gamma_norm_bound(0, 2, 2, 3, 5) == 120

    def test_equal(self):
        with pytest.raises(InvalidPair):
            gamma_norm_bound(1, 1, 1, 1, 1)

    @given(st.integers(-100, 100).filter(bool))
    def test_exponent(self, d):
        k = bound_exponent(d)
        assert d % 2**k != 0 and all(d % 2**m == 0 for m in range(1, k))
