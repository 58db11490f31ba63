from fractions import Fraction

import pytest

from ampleangles.constraints import (
    ConstraintSystem,
    NearOriginReduction,
    Provenance,
    QuadraticVerdict,
    StrictInequality,
    boundary_constraints,
    build_system,
    catalog_curves,
    classify_quadratic,
    curve_constraints,
    near_origin_reduce,
    quadratic_constraint,
)
from ampleangles.forms import LinearForm, QuadraticForm
from ampleangles.lattice import make_hirzebruch, make_projective_plane
from ampleangles.logpair import BoundaryChain, tail_blow_ups


def blown_up_plane():
    S = make_projective_plane().blow_up()
    return S, BoundaryChain(["E1"])


class TestStrictInequality:
    def test_holds(self):
        row = StrictInequality(LinearForm.of(1, [-1]), Provenance.BOUNDARY, "E1")
        assert row.holds([Fraction(1, 2)])
        assert not row.holds([1])
        assert row.closure_holds([1])
        assert StrictInequality.deserialize(row.serialize()) == row


class TestConstraintSystem:
    def test_rows(self):
        sys = ConstraintSystem.of([LinearForm.of(1, [-1, -1])])
        assert sys.dim == 2
        assert sys.names == ("b1", "b2")
        assert len(sys.orthant_rows()) == 2
        assert len(sys.box_rows()) == 2
        assert len(sys.all_rows()) == 5
        assert sys.holds([Fraction(1, 3), Fraction(1, 3)])
        assert not sys.holds([Fraction(2, 3), Fraction(2, 3)])
        assert not sys.holds([0, Fraction(1, 3)])

    def test_box(self):
        sys = ConstraintSystem.of([LinearForm.of(0, [1])], box=None)
        assert sys.box_rows() == []
        assert sys.holds([5])
        assert not sys.replace(box=2).holds([5])
        with pytest.raises(ValueError):
            ConstraintSystem.of([LinearForm.of(0, [1])], box=0)

    def test_quadratic(self):
        q = QuadraticForm(1, 0, {0: 2}, {(0, 0): -1})
        sys = ConstraintSystem(1, [], q, box=None)
        assert sys.holds([1])
        assert not sys.holds([2])
        assert sys.linear_holds([2])

    def test_dimension_errors(self):
        with pytest.raises(ConstraintSystem.DimensionMismatch):
            ConstraintSystem(0)
        with pytest.raises(ConstraintSystem.DimensionMismatch):
            ConstraintSystem.of([])
        with pytest.raises(ConstraintSystem.DimensionMismatch):
            ConstraintSystem(2, [StrictInequality(LinearForm.of(0, [1]), Provenance.CURVE)])
        with pytest.raises(ConstraintSystem.DimensionMismatch):
            ConstraintSystem(2, [], QuadraticForm(1))
        with pytest.raises(ConstraintSystem.DimensionMismatch):
            ConstraintSystem(2, names=["x"])

    def test_hrep(self):
        sys = ConstraintSystem.of([LinearForm.of(Fraction(1, 2), [-1])])
        assert sys.to_hrep() == "1/2 -1 > 0\n0 1 > 0\n1 -1 > 0\n"

    def test_serialize(self):
        sys = ConstraintSystem(
            1,
            [StrictInequality(LinearForm.of(1, [-1]), Provenance.BOUNDARY, "E1")],
            QuadraticForm(1, 0, {0: 2}),
            box=Fraction(1, 2),
            names=["beta1"],
        )
        data = sys.serialize()
        assert data["box"] == "1/2"
        assert ConstraintSystem.deserialize(data).serialize() == data
        assert ConstraintSystem.deserialize(dict(data, box=None)).box is None


class TestBuilders:
    def test_hirzebruch_boundary(self):
        for n in range(1, 5):
            S = make_hirzebruch(n)
            (row,) = boundary_constraints(S, BoundaryChain(["Z"]))
            assert row.form == LinearForm.of(2, [-n])
            assert row.provenance == Provenance.BOUNDARY
            assert row.label == "Z"

    def test_hirzebruch_catalog(self):
        S = make_hirzebruch(2)
        catalog = catalog_curves(S, BoundaryChain(["Z"]))
        assert catalog == [("tracked:F", S.generator("F"))]

    def test_blown_up_plane(self):
        S, C = blown_up_plane()
        catalog = catalog_curves(S, C)
        assert catalog == [
            ("tracked:H", S.generator("H")),
            ("H-through-E1", S.evaluate("H-E1")),
        ]
        sys = build_system(S, C, L=S.generator("H"))
        assert [row.form for row in sys.linear] == [
            LinearForm.of(1, [-1]),
            LinearForm.of(1, [0]),
            LinearForm.of(0, [1]),
        ]
        assert [row.provenance for row in sys.linear] == [
            Provenance.BOUNDARY,
            Provenance.CATALOG,
            Provenance.CATALOG,
        ]
        assert sys.quadratic == QuadraticForm(1, 0, {0: 2}, {(0, 0): -1})
        assert quadratic_constraint(S, C, S.generator("H")) == sys.quadratic

    def test_anti(self):
        S, C = blown_up_plane()
        sys = build_system(S, C, L=S.generator("H"), sign=-1)
        assert sys.linear[0].form == LinearForm.of(-1, [1])
        assert sys.quadratic == QuadraticForm(1, 0, {0: 2}, {(0, 0): -1})
        with pytest.raises(ValueError):
            build_system(S, C, sign=0)

    def test_tail_rows_are_exceptional(self):
        S, C = tail_blow_ups(make_hirzebruch(1), BoundaryChain(["Z", "F"]), 1, 0)
        rows = boundary_constraints(S, C)
        assert [row.label for row in rows] == ["Z", "F", "E1"]
        assert [row.provenance for row in rows] == [
            Provenance.BOUNDARY,
            Provenance.BOUNDARY,
            Provenance.EXCEPTIONAL,
        ]

    def test_user_curves(self):
        S = make_hirzebruch(1)
        C = BoundaryChain(["Z"])
        (row,) = curve_constraints(S, C, [("section", S.evaluate("Z+F"))])
        # Z.(Z + F) = 0 on F_1
        assert row.form == LinearForm.of(3, [0])
        assert row.provenance == Provenance.CURVE
        section = [("section", S.evaluate("Z+F"))]
        sys = build_system(S, C, curves=section, catalog=False, quadratic=False)
        assert [r.label for r in sys.linear] == ["Z", "section"]
        assert sys.quadratic is None


class TestClassifyQuadratic:
    def test_trichotomy(self):
        assert classify_quadratic(QuadraticForm(2, 1, {0: -1})) is QuadraticVerdict.SUBCRITICAL
        assert classify_quadratic(QuadraticForm(2, -1, {0: 1})) is QuadraticVerdict.SUPERCRITICAL
        assert classify_quadratic(QuadraticForm(2, 0, {0: 2, 1: 2})) is QuadraticVerdict.CRITICAL
        assert classify_quadratic(QuadraticForm(2, 0, {0: 2})) is QuadraticVerdict.CRITICAL

    def test_general(self):
        assert classify_quadratic(QuadraticForm(2, 0, {0: 1, 1: -1})) is QuadraticVerdict.GENERAL
        assert classify_quadratic(QuadraticForm(2, 0, {}, {(0, 1): 1})) is QuadraticVerdict.GENERAL
        assert classify_quadratic(QuadraticForm(2), "tail") is QuadraticVerdict.GENERAL


class TestNearOriginReduce:
    def test_reduced(self):
        S, C = blown_up_plane()
        sys = build_system(S, C, L=S.generator("H"))
        reduction = near_origin_reduce(sys)
        assert reduction.verdict == NearOriginReduction.REDUCED
        assert not reduction.infeasible
        assert [row.label for row in reduction.rows] == ["H-through-E1"]
        assert [row.label for row in reduction.dropped] == ["E1", "tracked:H"]
        assert reduction.matrix(1) == [[1]]

    def test_infeasible(self):
        sys = ConstraintSystem.of([LinearForm.of(0, [1]), LinearForm.of(-1, [1])])
        reduction = near_origin_reduce(sys)
        assert reduction.infeasible
        assert reduction.blocking.label == "row2"
