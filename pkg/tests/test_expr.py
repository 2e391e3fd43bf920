"""
Tests for jet coordinates, canonical forms, opaque functions and the zero test
"""

import pytest
import sympy

from jetlaw.core.errors import DomainError, InvalidSystem, MissingAssignment
from jetlaw.expr import (
    FieldSpec,
    JetSpace,
    JetVar,
    MultiIndex,
    OpaqueRegistry,
    Verdict,
    canonicalize,
    eval_numeric,
    is_zero,
    jet_order,
    partial,
    print_expr,
    total_derivative,
)
from jetlaw.expr.jetspace import field_antiderivative


class TestMultiIndex:
    """Multi-index arithmetic used for derivative bookkeeping"""

    def test_order_and_directions(self):
        idx = MultiIndex((2, 1))
        assert idx.order == 3
        assert sorted(idx.directions()) == [0, 0, 1]
        assert not idx.is_zero()
        assert MultiIndex.zero(2).is_zero()

    def test_partial_order(self):
        small = MultiIndex((1, 0))
        big = MultiIndex((2, 1))
        assert small.le(big)
        assert not big.le(small)
        assert big - small == MultiIndex((1, 1))
        assert small + MultiIndex.unit(2, 1) == MultiIndex((1, 1))

    def test_below_enumerates_all_sub_indices(self):
        assert len(MultiIndex((1, 1)).below()) == 4
        assert len(MultiIndex((2, 0)).below()) == 3


class TestJetSpace:
    """Naming, validation and total derivatives"""

    def test_suffix_letters_in_any_order(self, xt_space):
        assert xt_space.jet("u", "xt") is xt_space.jet("u", "tx")
        assert xt_space.name(JetVar("u", MultiIndex((1, 1)))) == "u_xt"

    def test_parse_name_rejects_unknown_letters(self, xt_space):
        assert xt_space.parse_name("u_xy") is None
        assert xt_space.parse_name("w_x") is None

    def test_invalid_declarations(self):
        with pytest.raises(InvalidSystem):
            JetSpace(["xy"], ["u"])
        with pytest.raises(InvalidSystem):
            JetSpace(["x", "t"], ["x"])
        with pytest.raises(InvalidSystem):
            JetSpace([], ["u"])

    def test_total_derivative_chain_rule(self, xt_space):
        u_x = xt_space.jet("u", "x")
        u_xt = xt_space.jet("u", "xt")
        result = total_derivative(xt_space, u_x**2, 1)
        assert canonicalize(result - 2 * u_x * u_xt) == 0

    def test_total_derivative_explicit_dependence(self, xt_space):
        x = xt_space.indep("x")
        u = xt_space.jet("u")
        u_x = xt_space.jet("u", "x")
        assert canonicalize(total_derivative(xt_space, x * u, 0) - (u + x * u_x)) == 0

    def test_jet_order_and_partial(self, xt_space):
        u = xt_space.jet("u")
        u_x = xt_space.jet("u", "x")
        u_xxt = xt_space.jet("u", "xxt")
        x = xt_space.indep("x")
        assert jet_order(xt_space, u * u_xxt) == 3
        assert partial(xt_space, x * u_x**2, "u_x") == 2 * x * u_x
        assert partial(xt_space, x * u_x**2, "x") == u_x**2


class TestFields:
    """Given functions of a subset of the independents"""

    @pytest.fixture
    def space(self):
        space = JetSpace(
            ["x", "y"],
            ["u"],
            fields=[FieldSpec("kappa", ("y",)), FieldSpec("Phi", ("y",))],
        )
        space.fields["Phi"].relations[space.index("y")] = space.jet("kappa")
        return space

    def test_field_is_constant_in_other_directions(self, space):
        kappa = space.jet("kappa")
        assert space.parse_name("kappa_x") is None
        assert canonicalize(space.total_derivative(kappa, 0)) == 0
        assert space.total_derivative(kappa, 1) == space.jet("kappa", "y")

    def test_relation_and_antiderivative(self, space):
        kappa = space.jet("kappa")
        phi = space.jet("Phi")
        assert canonicalize(space.total_derivative(phi, 1)) == kappa
        assert field_antiderivative(space, kappa, 1) == phi
        assert field_antiderivative(space, space.jet("kappa", "y"), 1) == kappa


class TestCanonicalForm:
    """Canonicalisation and printing"""

    def test_rational_cancellation(self, xt_space):
        u_x = xt_space.jet("u", "x")
        assert canonicalize((u_x**2 - 1) / (u_x - 1)) == u_x + 1

    def test_exponentials_share_generators(self, xt_space):
        u = xt_space.jet("u")
        e = sympy.exp(2 * u - 1) * sympy.exp(1 - u) - sympy.exp(u)
        assert canonicalize(e) == 0

    def test_exponential_denominator_is_distributed(self):
        space = JetSpace(["x", "t"], ["u", "v"])
        u, v, u_xt = space.jet("u"), space.jet("v"), space.jet("u", "xt")
        e = canonicalize(u_xt - sympy.exp(2 * u - v))
        assert canonicalize(e - u_xt).free_symbols == {u, v}
        assert sympy.fraction(e)[1] == 1
        assert canonicalize(e) == e

    def test_idempotent(self, xt_space):
        u, u_x = xt_space.jet("u"), xt_space.jet("u", "x")
        for e in [
            (u_x**2 - 1) / (u_x + u),
            sympy.exp(u) * u_x - sympy.exp(-u) / (1 + u_x),
            u_x / sympy.sqrt(1 + u_x**2) + sympy.log(u * u_x),
        ]:
            once = canonicalize(e)
            assert canonicalize(once) == once

    def test_print_uses_caret_and_ln(self, xt_space):
        u = xt_space.jet("u")
        u_x = xt_space.jet("u", "x")
        assert print_expr(u_x**2) == "u_x^2"
        assert print_expr(sympy.log(u)) == "ln(u)"


class TestOpaqueFunctions:
    """Named unary functions with optional derivative rules"""

    @pytest.fixture
    def registry(self):
        registry = OpaqueRegistry()
        registry.declare("Psi")
        registry.declare("M")
        registry.set_rule("G", registry.apply("M", registry.variable))
        return registry

    def test_derivative_is_new_atom(self, registry):
        space = JetSpace(["x", "t"], ["u"], functions=registry)
        u = space.jet("u")
        u_x = space.jet("u", "x")
        psi = registry.apply("Psi", u)
        expected = registry.apply("Psi", u, 1) * u_x
        assert canonicalize(space.total_derivative(psi, 0) - expected) == 0
        assert print_expr(registry.apply("Psi", u, 2)) == "Psi''(u)"

    def test_rule_replaces_derivative(self, registry):
        u = sympy.Symbol("u")
        derivative = sympy.diff(registry.apply("G", u), u)
        assert canonicalize(derivative - registry.apply("M", u)) == 0

    def test_undeclared_function(self, registry):
        with pytest.raises(KeyError):
            registry.function("Nope")


class TestVerdict:
    """Verdict scale and conjunction"""

    def test_conjunction(self):
        assert Verdict.conjunction([]) == Verdict.PROVED_ZERO
        assert (
            Verdict.conjunction([Verdict.PROVED_ZERO, Verdict.PROBABLY_ZERO])
            == Verdict.PROBABLY_ZERO
        )
        assert (
            Verdict.conjunction(
                [Verdict.UNKNOWN, Verdict.PROVED_NONZERO, Verdict.PROVED_ZERO]
            )
            == Verdict.PROVED_NONZERO
        )

    def test_holds_and_negation(self):
        assert Verdict.PROVED_ZERO.holds
        assert Verdict.PROBABLY_ZERO.holds
        assert not Verdict.UNKNOWN.holds
        assert Verdict.PROVED_ZERO.negated() == Verdict.PROVED_NONZERO
        assert Verdict.UNKNOWN.negated() == Verdict.UNKNOWN


class TestZeroTest:
    """Exact-then-probabilistic zero testing"""

    def test_exact_zero(self, xt_space, settings):
        u_x = xt_space.jet("u", "x")
        assert is_zero(u_x - u_x, settings) == Verdict.PROVED_ZERO

    def test_nonzero_is_proved(self, xt_space, settings):
        assert is_zero(xt_space.jet("u", "x"), settings) == Verdict.PROVED_NONZERO

    def test_trig_identity_is_probably_zero(self, xt_space, settings):
        u = xt_space.jet("u")
        e = sympy.sin(u) ** 2 + sympy.cos(u) ** 2 - 1
        assert is_zero(e, settings) == Verdict.PROBABLY_ZERO

    def test_unknown_functions_give_unknown(self, xt_space, settings):
        f = sympy.Function("f")
        assert is_zero(f(xt_space.jet("u")), settings) == Verdict.UNKNOWN

    def test_opaque_instances(self, settings):
        registry = OpaqueRegistry()
        registry.declare("Psi")
        registry.set_rule("G", registry.variable)
        u = sympy.Symbol("u")
        psi = registry.apply("Psi", u)
        assert is_zero(psi - psi**2, settings, registry) == Verdict.PROVED_NONZERO
        # G' = s integrates from the base point at 1 (or -1 for negative arguments)
        g = registry.apply("G", u)
        assert is_zero(g - (u**2 - 1) / 2, settings, registry) == Verdict.PROBABLY_ZERO

    def test_rule_singular_at_origin(self, settings):
        registry = OpaqueRegistry()
        registry.set_rule("L", 1 / (2 * registry.variable))
        u = sympy.Symbol("u", positive=True)
        e = registry.apply("L", u) - sympy.log(u) / 2
        assert is_zero(e, settings, registry) == Verdict.PROBABLY_ZERO
        assert is_zero(e + u, settings, registry) == Verdict.PROVED_NONZERO

    def test_same_seed_same_verdict(self, xt_space, settings):
        u = xt_space.jet("u")
        e = sympy.sqrt(u**2) - u
        assert is_zero(e, settings) == is_zero(e, settings)


class TestEvalNumeric:
    """Point evaluation"""

    def test_value(self, xt_space):
        u_x = xt_space.jet("u", "x")
        assert eval_numeric(u_x**2 + 1, {u_x: 2.0}) == pytest.approx(5.0)

    def test_missing_assignment(self, xt_space):
        u_x = xt_space.jet("u", "x")
        with pytest.raises(MissingAssignment):
            eval_numeric(u_x + xt_space.jet("u"), {u_x: 1.0})

    def test_domain_error(self, xt_space):
        u = xt_space.jet("u")
        with pytest.raises(DomainError):
            eval_numeric(sympy.log(u), {u: -1.0})
