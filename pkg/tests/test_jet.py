"""
Tests for rankings, orthonomic validation and normal forms on solutions
"""

import pytest
import sympy
from joblib import Parallel, delayed

from jetlaw.core.errors import InvalidSystem
from jetlaw.expr import JetSpace, JetVar, Verdict, canonicalize, total_derivative
from jetlaw.jet import (
    Classification,
    Order,
    PdeSystem,
    Ranking,
    reduce_modulo,
    solve_for_lead,
)


def _liouville(space):
    u, v = space.jet("u"), space.jet("v")
    return PdeSystem.from_components(
        space,
        [
            space.jet("u", "xt") - sympy.exp(2 * u - v),
            space.jet("v", "xt") - sympy.exp(2 * v - u),
        ],
    )


class TestRanking:
    """Orderly and elimination rankings"""

    def test_grlex_compares_order_first(self, xt_space):
        ranking = Ranking(xt_space)
        u_t = JetVar("u", xt_space.index("t"))
        u_xx = JetVar("u", xt_space.index("xx"))
        assert ranking.compare(u_t, u_xx) == Order.LT
        assert ranking.highest([u_t, u_xx]) == u_xx

    def test_lex_follows_declared_priority(self, xt_space):
        ranking = Ranking(xt_space, "lex", independent=["t", "x"])
        u_t = JetVar("u", xt_space.index("t"))
        u_xx = JetVar("u", xt_space.index("xx"))
        assert ranking.compare(u_t, u_xx) == Order.GT
        assert ranking.describe() == "lex; independent t > x; dependent u"

    def test_dependent_priority_breaks_ties(self):
        space = JetSpace(["x", "t"], ["u", "v"])
        ranking = Ranking(space, dependent=["v", "u"])
        u_x = JetVar("u", space.index("x"))
        v_x = JetVar("v", space.index("x"))
        assert ranking.compare(v_x, u_x) == Order.GT

    def test_invalid_rankings(self, xt_space):
        with pytest.raises(InvalidSystem):
            Ranking(xt_space, "revlex")
        with pytest.raises(InvalidSystem):
            Ranking(xt_space, independent=["x"])
        with pytest.raises(InvalidSystem):
            Ranking(xt_space, "custom")


class TestClassification:
    """Principal and parametric derivatives"""

    def test_heat_equation(self, heat, xt_space):
        assert heat.classify(JetVar("u", xt_space.index("xt"))) == Classification.PRINCIPAL
        assert heat.classify(JetVar("u", xt_space.index("xxx"))) == Classification.PARAMETRIC
        assert heat.describe() == ["u_t = u_xx"]

    def test_match_returns_shift(self, heat, xt_space):
        mu, idx = heat.match(JetVar("u", xt_space.index("xxt")))
        assert mu == 0
        assert idx == xt_space.index("xx")


class TestOrthonomicValidation:
    """Conditions on leads and right-hand sides"""

    def test_heat_is_orthonomic(self, heat):
        report = heat.validate_orthonomic()
        assert report.valid
        assert report.lines() == ["orthonomic: conditions 1-3 hold"]

    def test_right_hand_side_must_rank_below_lead(self, xt_space):
        u_t = JetVar("u", xt_space.index("t"))
        component = xt_space.jet("u", "t") - xt_space.jet("u", "xx")
        system = PdeSystem.from_components(xt_space, [component], leads=[u_t])
        report = system.validate_orthonomic()
        assert not report.valid
        assert [item.condition for item in report.violations] == [1]

    def test_lead_may_not_be_derivative_of_another(self):
        space = JetSpace(["x", "t"], ["u", "v"])
        v = space.jet("v")
        system = PdeSystem.from_components(
            space,
            [space.jet("u", "x") - v, space.jet("u", "xx") - v],
            leads=[JetVar("u", space.index("x")), JetVar("u", space.index("xx"))],
        )
        report = system.validate_orthonomic()
        assert {item.condition for item in report.violations} == {2}

    def test_right_hand_side_must_be_parametric(self):
        space = JetSpace(["x", "t"], ["u", "v"])
        ranking = Ranking(space, "lex", independent=["t", "x"])
        u_t, v_t, u_xx = space.jet("u", "t"), space.jet("v", "t"), space.jet("u", "xx")
        system = PdeSystem.from_components(
            space,
            [u_t - v_t, v_t - u_xx],
            ranking,
            leads=[JetVar("u", space.index("t")), JetVar("v", space.index("t"))],
            solved=[v_t, u_xx],
        )
        report = system.validate_orthonomic()
        assert {item.condition for item in report.violations} == {3}
        assert report.violations[0].equation == 0


class TestNormalForm:
    """Reduction modulo the system and its prolongations"""

    def test_heat_prolongations(self, heat, xt_space):
        assert heat.normal_form(xt_space.jet("u", "xt")) == xt_space.jet("u", "xxx")
        assert heat.normal_form(xt_space.jet("u", "tt")) == xt_space.jet("u", "xxxx")

    def test_parametric_expressions_are_unchanged(self, heat, xt_space):
        e = xt_space.jet("u", "x") ** 2 + xt_space.jet("u")
        assert heat.normal_form(e) == canonicalize(e)

    def test_liouville_prolongation(self):
        space = JetSpace(["x", "t"], ["u", "v"])
        system = _liouville(space)
        u, v = space.jet("u"), space.jet("v")
        expected = (2 * space.jet("u", "x") - space.jet("v", "x")) * sympy.exp(2 * u - v)
        assert canonicalize(system.normal_form(space.jet("u", "xxt")) - expected) == 0

    def test_restricted_zero_test(self, settings):
        space = JetSpace(["x", "t"], ["u", "v"])
        system = _liouville(space)
        u, v = space.jet("u"), space.jet("v")
        component = space.jet("u", "xt") - sympy.exp(2 * u - v)
        assert system.restricted_is_zero(component, settings) == Verdict.PROVED_ZERO
        assert (
            system.restricted_is_zero(space.jet("u", "xt"), settings)
            == Verdict.PROVED_NONZERO
        )

    def test_depth_cap(self, xt_space):
        ranking = Ranking(xt_space, "lex", independent=["t", "x"])
        component = xt_space.jet("u", "t") - xt_space.jet("u", "xx")
        system = PdeSystem.from_components(
            xt_space,
            [component],
            ranking,
            leads=[JetVar("u", xt_space.index("t"))],
            max_depth=1,
        )
        with pytest.raises(InvalidSystem):
            system.normal_form(xt_space.jet("u", "ttt"))

    def test_principal_substitution_introduces_placeholders(self, heat, xt_space):
        in_a = heat.principal_substitution(xt_space.jet("u", "t") - xt_space.jet("u", "xx"))
        placeholder = heat.a_symbol(0, xt_space.index(""))
        assert in_a == placeholder
        assert heat.a_index(placeholder) == (0, xt_space.index(""))

    def test_reduce_modulo_skips_missing_systems(self, heat, xt_space):
        e = xt_space.jet("u", "t")
        assert reduce_modulo(e, [None, heat]) == xt_space.jet("u", "xx")

    def test_general_form_lead_is_solved(self, xt_space):
        ranking = Ranking(xt_space, "lex", independent=["t", "x"])
        u = xt_space.jet("u")
        component = 2 * xt_space.jet("u", "t") - u * xt_space.jet("u", "xx")
        system = PdeSystem.from_components(xt_space, [component], ranking)
        assert system.leads == [JetVar("u", xt_space.index("t"))]
        assert canonicalize(system.equations[0].rhs - u * xt_space.jet("u", "xx") / 2) == 0

    def test_nonlinear_lead_is_rejected(self, xt_space):
        ranking = Ranking(xt_space, "lex", independent=["t", "x"])
        component = xt_space.jet("u", "t") ** 2 - xt_space.jet("u", "xx")
        with pytest.raises(InvalidSystem):
            PdeSystem.from_components(xt_space, [component], ranking)


class TestExponentialSystems:
    """Normal forms on the Liouville-type system, whose right-hand sides are exponentials"""

    @pytest.fixture
    def targets(self, liouville):
        space = liouville.space
        lam = liouville.lambdas["lambda1"]
        return [
            total_derivative(space, lam, space.independents.index("t")),
            space.jet("u", "xxtt"),
            space.jet("v", "xxt") * space.jet("u", "xt"),
        ]

    def test_solve_for_exponential_lead(self):
        space = JetSpace(["x", "t"], ["u", "v"])
        u, v = space.jet("u"), space.jet("v")
        lead = JetVar("u", space.index("xt"))
        component = space.jet("u", "xt") - sympy.exp(2 * u - v)
        coefficient, rhs = solve_for_lead(space, component, lead)
        assert coefficient == 1
        assert space.symbol(lead) not in rhs.free_symbols
        assert canonicalize(rhs - sympy.exp(2 * u - v)) == 0

    def test_first_integral_reduces_to_zero(self, liouville):
        space = liouville.space
        lam = liouville.lambdas["lambda1"]
        d_t = total_derivative(space, lam, space.independents.index("t"))
        assert liouville.system.normal_form(d_t) == 0

    def test_normal_form_is_idempotent(self, liouville, targets):
        system = liouville.system
        for e in targets:
            once = system.normal_form(e)
            assert system.normal_form(once) == once

    def test_memoized_and_plain_agree(self, liouville, targets):
        system = liouville.system
        plain = PdeSystem(system.space, system.equations, system.ranking, memoize=False)
        for e in targets:
            assert canonicalize(system.normal_form(e) - plain.normal_form(e)) == 0

    def test_threaded_normal_forms_agree(self, liouville, targets):
        system = liouville.system
        fresh = PdeSystem(system.space, system.equations, system.ranking)
        expected = [system.normal_form(e) for e in targets]
        results = Parallel(n_jobs=4, backend="threading")(
            delayed(fresh.normal_form)(e) for e in targets * 4
        )
        assert results == expected * 4
