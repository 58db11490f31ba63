import pytest

from ampleangles.constraints import QuadraticVerdict
from ampleangles.lattice import make_hirzebruch
from ampleangles.logpair import AngleLayout, BoundaryChain, ChainKind, resolve_chain, verify_chain
from ampleangles.reports import check_report
from ampleangles.tailblowup import (
    BlockLPMatrix,
    TailSequenceSpec,
    TailVerdict,
    apply_tail_sequence,
    budget,
    build_block_lp_matrix,
    build_tilde_lp,
    classify_tail,
    cross_derivation,
    derive_lp_matrix,
    neighbour_correction,
    self_intersections,
    standard_chain,
    verify_tail_lp,
)


def disjoint_sections(n=2):
    s = make_hirzebruch(n)
    s = s.register("S", s.evaluate("Z+%dF" % n))
    return s, BoundaryChain(["Z", "S"])


def fiber_cycle():
    return resolve_chain(make_hirzebruch(1), ["Z", "F", "S=Z+F", "F"])


class TestStandardChain:
    def test_budgets(self):
        for n in range(1, 4):
            assert budget(*standard_chain(n, 1)) == n + 4
            assert budget(*standard_chain(n, 2)) == n + 2
            assert budget(*standard_chain(n, 3)) == 0
            assert budget(*standard_chain(n, 4)) == 0

    def test_chains(self):
        for r in range(1, 5):
            S, C = standard_chain(2, r)
            assert C.r == r
            assert verify_chain(S, C) is ChainKind.CHAIN
        assert standard_chain(2, 4)[1].labels == ("Z", "F", "E1", "S")
        with pytest.raises(ValueError):
            standard_chain(2, 5)

    def test_self_intersections(self):
        assert self_intersections(*standard_chain(3, 2)) == (-3, 0)
        assert self_intersections(*standard_chain(3, 3)) == (-3, 3)

    def test_disjoint_budget(self):
        S, C = disjoint_sections()
        assert verify_chain(S, C) is ChainKind.DISJOINT_CHAINS
        assert budget(S, C) == 0

    def test_budget_drops_by_one_per_blow_up(self):
        s, c = standard_chain(1, 2)
        for h, v in ((1, 0), (0, 1), (2, 1), (1, 2)):
            S, C = apply_tail_sequence(TailSequenceSpec(s, c, h, v))
            assert budget(S, C) == 3 - h - v


class TestBlockLPMatrix:
    def test_shape(self):
        matrix = build_block_lp_matrix(2, 2, 2, -1, 0)
        assert matrix.shape == (6, 10)
        assert matrix.block_columns() == ["v_r", "v_1", "T_h:1", "T_v:1"]

    def test_right_end_column(self):
        matrix = build_block_lp_matrix(2, 1, 0, -1, 0)
        assert matrix.tags == ("v_r", "I:1", "I:2", "I:3")
        assert matrix.column("v_r") == (0, -1, 1)

    def test_left_end_column(self):
        matrix = build_block_lp_matrix(2, 0, 1, -3, 0)
        assert matrix.column("v_1") == (-4, 0, 1)

    def test_second_differences(self):
        matrix = build_block_lp_matrix(2, 3, 0, -1, 0)
        assert matrix.column("T_h:1") == (0, 1, -2, 1, 0)
        assert matrix.column("T_h:2") == (0, 0, 1, -2, 1)

    def test_invalid(self):
        with pytest.raises(BlockLPMatrix.InvalidShape):
            build_block_lp_matrix(0, 1, 0, 0, 0)
        with pytest.raises(BlockLPMatrix.InvalidShape):
            build_block_lp_matrix(2, 0, 0, 0, 0)
        with pytest.raises(BlockLPMatrix.InvalidShape):
            build_block_lp_matrix(2, 1, 0, 0, 0) + build_block_lp_matrix(2, 0, 1, 0, 0)

    def test_neighbour_correction(self):
        correction = neighbour_correction(2, 1, 1)
        assert correction.column("v_r") == (1, 0, 0, 0)
        assert correction.column("v_1") == (0, 1, 0, 0)
        assert not any(any(row) for row in neighbour_correction(1, 1, 1).entries)

    def test_to_text(self):
        text = build_block_lp_matrix(2, 1, 0, -1, 0).to_text()
        assert text.splitlines()[0].split() == ["v_r", "I:1", "I:2", "I:3"]
        assert len(text.splitlines()) == 4


class TestCrossDerivation:
    def test_right_blow_up(self):
        s, c = standard_chain(2, 2)
        S, C = apply_tail_sequence(TailSequenceSpec(s, c, 1, 0))
        derived = derive_lp_matrix(S, C)
        # beta1 - beta2 + eta1 from the strict transform of F
        assert derived.matrix.column("v_r") == (1, -1, 1)
        assert derived.unmatched == ()

    def test_left_blow_up(self):
        s, c = standard_chain(2, 2)
        S, C = apply_tail_sequence(TailSequenceSpec(s, c, 0, 1))
        assert derive_lp_matrix(S, C).matrix.column("v_1") == (-3, 1, 1)

    def test_matches_closed_form(self):
        for n in range(1, 3):
            s, c = standard_chain(n, 2)
            for h, v in ((1, 0), (0, 1), (1, 1), (2, 1)):
                assert cross_derivation(s, c, h, v)

    def test_single_component(self):
        s, c = standard_chain(2, 1)
        S, C = apply_tail_sequence(TailSequenceSpec(s, c, 1, 0))
        with pytest.raises(BlockLPMatrix.InvalidShape):
            derive_lp_matrix(S, C)


class TestVerifyTailLP:
    def test_feasible(self):
        for r in (1, 2, 3):
            for h, v in ((1, 0), (0, 1), (2, 1), (2, 2)):
                for c1_sq, cr_sq in ((-3, 0), (0, 1), (-1, -1)):
                    feasible, certificate, matrix = verify_tail_lp(r, h, v, c1_sq, cr_sq)
                    assert feasible
                    assert certificate.verify(matrix.homogeneous_system())

    def test_tilde_lp(self):
        s, c = standard_chain(1, 2)
        S, C = apply_tail_sequence(TailSequenceSpec(s, c, 2, 1))
        system = build_tilde_lp(S, C)
        assert [row.label for row in system.linear] == list(C.labels)
        assert system.quadratic is None


class TestTailSequenceSpec:
    def test_layout(self):
        s, c = standard_chain(1, 2)
        spec = TailSequenceSpec(s, c, 1, 1, "LR")
        assert spec.x == 2
        assert spec.word == "LR"
        assert spec.validate() is ChainKind.CHAIN
        S, C = apply_tail_sequence(spec)
        assert C.layout == AngleLayout(2, 1, 1)
        assert C.labels == ("Z", "F", "E2", "E1")

    def test_invalid(self):
        s, c = standard_chain(1, 2)
        with pytest.raises(TailSequenceSpec.InvalidSpec):
            TailSequenceSpec(s, c, -1, 0).validate()
        with pytest.raises(TailSequenceSpec.InvalidSpec):
            TailSequenceSpec(s, c, 1, 0, "RR").validate()
        S, C = apply_tail_sequence(TailSequenceSpec(s, c, 1, 0))
        with pytest.raises(TailSequenceSpec.InvalidSpec):
            TailSequenceSpec(S, C, 1, 0).validate()
        double = s.register("D", s.evaluate("2F"))
        with pytest.raises(TailSequenceSpec.InvalidSpec):
            TailSequenceSpec(double, BoundaryChain(["D"]), 1, 0).validate()

    def test_cycle(self):
        S, C = fiber_cycle()
        assert verify_chain(S, C) is ChainKind.CYCLE
        with pytest.raises(BoundaryChain.NoTails):
            classify_tail(TailSequenceSpec(S, C, 1, 0))


class TestClassifyTail:
    def test_subcritical(self):
        s, c = standard_chain(1, 2)
        report = classify_tail(TailSequenceSpec(s, c, 1, 0))
        assert report.verdict is TailVerdict.ALF_MODULO_CURVES
        assert report.quadratic is QuadraticVerdict.SUBCRITICAL
        assert report.budget == 3
        assert report.block["feasible"] is True
        assert report.curves[:3] == ["Z", "F", "E1"]

    def test_curves_complete(self):
        s, c = standard_chain(1, 2)
        report = classify_tail(TailSequenceSpec(s, c, 1, 0), curves_complete=True)
        assert report.verdict is TailVerdict.ALF_VERIFIED

    def test_critical(self):
        s, c = standard_chain(1, 2)
        report = classify_tail(TailSequenceSpec(s, c, 3, 0))
        assert report.quadratic is QuadraticVerdict.CRITICAL
        assert report.origin.contains is True
        assert report.verdict is TailVerdict.ALF_MODULO_CURVES

    def test_over_budget(self):
        s, c = standard_chain(1, 2)
        report = classify_tail(TailSequenceSpec(s, c, 2, 2))
        assert report.verdict is TailVerdict.NOT_ALF_BUDGET
        assert report.origin is None and report.quadratic is None
        assert budget(report.surface, report.chain) == -1
        assert report.tilde_origin is not None
        assert report.block["feasible"] is True
        data = report.serialize()
        assert data["verdict"] == "NotALF_Budget"
        assert len(data["angles"]) == 6

    def test_disjoint(self):
        s, c = disjoint_sections()
        report = classify_tail(TailSequenceSpec(s, c, 1, 0))
        assert report.budget == 0
        assert report.verdict is TailVerdict.NOT_ALF_BUDGET
        assert report.surface is None

    def test_no_blow_ups(self):
        s, c = standard_chain(2, 2)
        report = classify_tail(TailSequenceSpec(s, c))
        assert report.verdict is TailVerdict.ALF_MODULO_CURVES
        assert report.block is None

    def test_single_component(self):
        s, c = standard_chain(2, 1)
        report = classify_tail(TailSequenceSpec(s, c, 1, 0))
        assert any("single-component" in note for note in report.notes)

    def test_extra_curves(self):
        s, c = standard_chain(1, 2)
        report = classify_tail(TailSequenceSpec(s, c, 1, 0), extra_curves=[("section", "Z+F")])
        assert report.curves[-1] == "section"

    def test_serialize(self):
        s, c = standard_chain(1, 2)
        data = classify_tail(TailSequenceSpec(s, c, 2, 1)).serialize()
        assert data["x"] == 3
        assert data["angles"] == ["beta1", "beta2", "eta1", "eta2", "nu1"]
        assert data["block_lp"]["feasible"] is True
        results = check_report(data)
        assert results
        assert all(ok for _, ok in results)
