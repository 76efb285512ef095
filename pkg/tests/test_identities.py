import json
import math

import pytest

from confcalc import (
    CallableFn,
    ConfParams,
    IdentityCase,
    IdentityReport,
    PointPatchedFn,
    SuiteGrid,
    Tolerance,
    builtin,
    check_algebra_rules,
    check_avg_recovery,
    check_continuity,
    check_equivalence,
    check_left_inverse,
    check_lower_vanishing,
    check_order_relation,
    check_right_inverse,
    default_corpus,
    power_fn,
    run_case,
    run_suite,
    vector_fn,
)
from confcalc.identities import IDENTITY_IDS, STATEMENTS


def test_identity_id_enumeration_is_stable():
    # these strings are wire format for reports; renames break consumers
    assert IDENTITY_IDS == (
        "CONTINUITY_3_1",
        "ORDER_REL_3_3",
        "EQUIV_3_4",
        "LEFT_INV_3_5",
        "RIGHT_INV_3_7",
        "RIGHT_INV_AT_A_3_8",
        "LOWER_VANISH_4_3",
        "LINEARITY_i",
        "CONST_ii",
        "PRODUCT_iii",
        "QUOTIENT_iv",
        "AVG_2_10",
        "CLASS_EQ_4_5",
    )
    assert set(STATEMENTS) == set(IDENTITY_IDS)


def test_case_rejects_unknown_id():
    with pytest.raises(ValueError):
        IdentityCase("NOT_AN_ID", builtin("exp"), ConfParams(0.5), 1.0)


class TestSingleCheckers:
    def test_continuity_smooth(self):
        r = check_continuity(builtin("exp"), ConfParams(0.5), 1.0)
        assert r.status == "passed"

    def test_equivalence_smooth(self):
        r = check_equivalence(builtin("sin"), ConfParams(0.5), 1.5)
        assert r.status == "passed"
        assert r.residual <= r.threshold

    def test_order_relation(self):
        r = check_order_relation(builtin("square"), 0.25, 0.75, a=0.0, t=2.0)
        assert r.status == "passed"

    def test_left_inverse_smooth(self):
        r = check_left_inverse(builtin("exp"), ConfParams(0.5), 1.0)
        assert r.status == "passed"

    def test_left_inverse_route_validated(self):
        with pytest.raises(ValueError):
            check_left_inverse(builtin("exp"), ConfParams(0.5), 1.0,
                               route="exact")

    def test_left_inverse_theta_route(self):
        # force every quadrature sample through the limit quotient
        r = check_left_inverse(builtin("sin"), ConfParams(0.5), 1.0,
                               route="theta")
        assert r.status == "passed"
        assert "limit-quotient" in r.diagnostics

    def test_left_inverse_flags_terminal_jump(self):
        # value patched at the terminal only; the comparison must use the
        # right limit, so the identity still holds, with a note
        f = PointPatchedFn(power_fn(0.5), at=0.0, value=2.0,
                           label="patched sqrt")
        r = check_left_inverse(f, ConfParams(0.5), 1.0)
        assert r.status == "passed"
        assert "jump" in r.diagnostics

    def test_left_inverse_na_without_right_limit(self):
        def chatter(s):
            return math.sin(1.0 / s) if s > 0.0 else 0.0

        f = CallableFn(chatter, domain=(0.0, 10.0))
        r = check_left_inverse(f, ConfParams(0.5), 1.0)
        assert r.status == "not_applicable"

    def test_right_inverse_interior(self):
        r = check_right_inverse(builtin("sin"), ConfParams(0.5), 1.5)
        assert r.identity_id == "RIGHT_INV_3_7"
        assert r.status == "passed"

    def test_right_inverse_at_terminal(self):
        r = check_right_inverse(builtin("exp"), ConfParams(0.5), 0.0)
        assert r.identity_id == "RIGHT_INV_AT_A_3_8"
        assert r.status == "passed"

    def test_right_inverse_na_unbounded_integrand(self):
        f = CallableFn(lambda s: 1.0 / s, domain=(0.0, 10.0), label="1/t")
        r = check_right_inverse(f, ConfParams(0.5), 1.0)
        assert r.status == "not_applicable"
        assert "bound" in r.diagnostics

    def test_right_inverse_na_discontinuous_at_t(self):
        def step(s):
            return 1.0 if s >= 1.0 else 0.0

        f = CallableFn(step, domain=(0.0, 10.0), label="step")
        r = check_right_inverse(f, ConfParams(0.5), 1.0)
        assert r.status == "not_applicable"

    def test_lower_vanishing_passes(self):
        r = check_lower_vanishing(builtin("exp"), alpha=0.9, beta=0.5, a=0.0)
        assert r.status == "passed"
        # the target value is literally zero, so the threshold is the
        # plain tolerance sum rather than a relative quantity
        assert r.threshold == pytest.approx(1e-4)

    def test_lower_vanishing_requires_lower_beta(self):
        with pytest.raises(ValueError):
            check_lower_vanishing(builtin("exp"), alpha=0.5, beta=0.5, a=0.0)

    def test_lower_vanishing_na_when_hypothesis_fails(self):
        # T^0.9 of t^0.5 diverges at the terminal: nothing to conclude
        r = check_lower_vanishing(power_fn(0.5), alpha=0.9, beta=0.25, a=0.0)
        assert r.status == "not_applicable"

    def test_avg_recovery(self):
        r = check_avg_recovery(builtin("exp"), 1.0)
        assert r.status == "passed"


class TestAlgebraRules:
    def test_scalar_members_all_four(self):
        out = check_algebra_rules(
            builtin("exp"), builtin("sin"), 2.0, -3.0, ConfParams(0.5), 1.0
        )
        ids = [r.identity_id for r in out]
        assert ids == ["LINEARITY_i", "CONST_ii", "PRODUCT_iii", "QUOTIENT_iv"]
        assert all(r.status == "passed" for r in out)

    def test_vector_members_skip_product_and_quotient(self):
        f = vector_fn([builtin("exp"), builtin("sin")])
        g = vector_fn([builtin("one"), builtin("square")])
        out = check_algebra_rules(f, g, 1.0, 1.0, ConfParams(0.5), 1.0)
        by_id = {r.identity_id: r for r in out}
        assert by_id["LINEARITY_i"].status == "passed"
        assert by_id["CONST_ii"].status == "passed"
        assert by_id["PRODUCT_iii"].status == "not_applicable"
        assert by_id["QUOTIENT_iv"].status == "not_applicable"

    def test_quotient_skips_singular_g(self):
        out = check_algebra_rules(
            builtin("exp"), builtin("sin"), 1.0, 1.0, ConfParams(0.5), math.pi
        )
        by_id = {r.identity_id: r for r in out}
        assert by_id["QUOTIENT_iv"].status == "not_applicable"
        assert "invertible" in by_id["QUOTIENT_iv"].diagnostics
        assert by_id["PRODUCT_iii"].status == "passed"


class TestRunCase:
    @pytest.mark.parametrize("iid", ["CONTINUITY_3_1", "EQUIV_3_4",
                                     "LEFT_INV_3_5", "RIGHT_INV_3_7",
                                     "AVG_2_10", "LINEARITY_i", "CONST_ii",
                                     "PRODUCT_iii", "QUOTIENT_iv"])
    def test_dispatch_simple(self, iid):
        case = IdentityCase(iid, builtin("exp"), ConfParams(0.5), 1.0)
        r = run_case(case)
        assert r.identity_id == iid
        assert r.status == "passed"

    @pytest.mark.parametrize("iid", ["ORDER_REL_3_3", "LOWER_VANISH_4_3",
                                     "CLASS_EQ_4_5"])
    def test_dispatch_needs_beta(self, iid):
        case = IdentityCase(iid, builtin("exp"), ConfParams(0.9), 1.0)
        with pytest.raises(ValueError):
            run_case(case)
        r = run_case(IdentityCase(iid, builtin("exp"), ConfParams(0.9), 1.0,
                                  beta=0.5))
        assert r.status == "passed"

    def test_terminal_dispatch(self):
        case = IdentityCase("RIGHT_INV_AT_A_3_8", builtin("exp"),
                            ConfParams(0.5), 0.0)
        r = run_case(case)
        assert r.identity_id == "RIGHT_INV_AT_A_3_8"
        assert r.status == "passed"


_SMALL_GRID = SuiteGrid(alphas=(0.5, 1.0), betas=(0.5,), a_values=(0.0,),
                        t_offsets=(1.0,))


class TestSuite:
    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError):
            run_suite(corpus=[])

    def test_empty_grid_empty_report(self):
        grid = SuiteGrid(alphas=(), betas=(), a_values=(), t_offsets=())
        rep = run_suite(grid=grid)
        assert rep.summary["total"] == 0
        assert rep.all_passed

    def test_small_suite_passes(self):
        corpus = [builtin("exp"), builtin("sin")]
        rep = run_suite(corpus=corpus, grid=_SMALL_GRID)
        assert rep.summary["failed"] == 0
        assert rep.summary["total"] > 0
        assert rep.all_passed

    def test_report_is_deterministic(self):
        corpus = [builtin("exp"), builtin("square")]
        a = run_suite(corpus=corpus, grid=_SMALL_GRID)
        b = run_suite(corpus=corpus, grid=_SMALL_GRID)
        assert a.to_json() == b.to_json()

    def test_report_shape(self):
        corpus = [builtin("exp")]
        rep = run_suite(corpus=corpus, grid=_SMALL_GRID)
        doc = json.loads(rep.to_json())
        assert set(doc) == {"summary", "config", "statements", "cases"}
        assert doc["config"]["alphas"] == [0.5, 1.0]
        for case in doc["cases"]:
            assert case["identity_id"] in IDENTITY_IDS
            assert case["status"] in ("passed", "failed", "not_applicable")

    def test_table_output(self):
        corpus = [builtin("exp")]
        rep = run_suite(corpus=corpus, grid=_SMALL_GRID)
        table = rep.to_table()
        lines = table.splitlines()
        assert "identity" in lines[0]
        assert lines[-1].startswith("total ")
        # one row per case plus header, rule, rule, summary
        assert len(lines) == len(rep.cases) + 4

    def test_default_corpus_contents(self):
        members = default_corpus(0.0)
        kinds = {m.eval(1.0).kind for m in members}
        assert kinds == {"scalar", "vector", "matrix"}
