"""
Tests for Euler operators, adjoints and homotopy flux reconstruction
"""

import pytest
import sympy

from jetlaw.core.errors import (
    FluxReconstructionFailed,
    HomotopySingular,
    NotExactDerivative,
)
from jetlaw.expr import MultiIndex, Verdict, canonicalize
from jetlaw.variational import (
    FluxVector,
    LinDiffOp,
    euler,
    euler_lagrange_system,
    homotopy_fluxes,
    invert_total_derivative,
    is_divergence,
)


class TestEulerOperator:
    """E_u and the divergence test"""

    def test_wave_lagrangian(self, xt_space):
        u_x, u_t = xt_space.jet("u", "x"), xt_space.jet("u", "t")
        result = euler(xt_space, u_x * u_t / 2, "u")
        assert canonicalize(result + xt_space.jet("u", "xt")) == 0

    def test_divergence_is_annihilated(self, xt_space, settings):
        u, u_t = xt_space.jet("u"), xt_space.jet("u", "t")
        e = xt_space.total_derivative(u * u_t, 0)
        assert euler(xt_space, e, "u") == 0
        assert is_divergence(xt_space, e, ["u"], settings) == Verdict.PROVED_ZERO

    def test_non_divergence(self, xt_space, settings):
        u = xt_space.jet("u")
        assert euler(xt_space, u**2, "u") == 2 * u
        assert is_divergence(xt_space, u**2, ["u"], settings) == Verdict.PROVED_NONZERO

    def test_euler_lagrange_system(self, xt_space):
        u_x, u_t = xt_space.jet("u", "x"), xt_space.jet("u", "t")
        system = euler_lagrange_system(xt_space, u_x * u_t / 2)
        assert len(system) == 1
        assert system.normal_form(xt_space.jet("u", "xxt")) == 0


class TestLinDiffOp:
    """Linear total-differential operators and formal adjoints"""

    @pytest.fixture
    def op(self, xt_space):
        return LinDiffOp.from_terms([(xt_space.jet("u"), xt_space.index("x"))])

    def test_apply(self, op, xt_space):
        u, u_t = xt_space.jet("u"), xt_space.jet("u", "t")
        assert canonicalize(op.apply(xt_space, u_t) - u * xt_space.jet("u", "xt")) == 0

    def test_adjoint_of_multiplication_then_derivative(self, op, xt_space):
        u, u_x, u_t = xt_space.jet("u"), xt_space.jet("u", "x"), xt_space.jet("u", "t")
        expected = -u_x * u_t - u * xt_space.jet("u", "xt")
        assert canonicalize(op.adjoint(xt_space).apply(xt_space, u_t) - expected) == 0

    def test_adjoint_is_an_involution(self, op, xt_space):
        assert op.adjoint(xt_space).adjoint(xt_space).equals(op)

    def test_single_derivative_shape(self, op, xt_space):
        coefficient, direction = op.single_derivative()
        assert coefficient == xt_space.jet("u")
        assert direction == 0
        second = LinDiffOp.from_terms([(1, xt_space.index("xx"))])
        assert second.single_derivative() is None

    def test_cancelling_terms_give_zero(self, xt_space):
        idx = xt_space.index("t")
        op = LinDiffOp.from_terms([(2, idx), (-2, idx)])
        assert op.is_zero()
        assert op.describe(xt_space) == "0"


class TestFluxVector:
    def test_divergence_and_nonzero(self, xt_space):
        u, u_x = xt_space.jet("u"), xt_space.jet("u", "x")
        fluxes = FluxVector.of([-u_x, u])
        expected = xt_space.jet("u", "t") - xt_space.jet("u", "xx")
        assert canonicalize(fluxes.divergence(xt_space) - expected) == 0
        assert fluxes.nonzero() == [0, 1]
        assert (fluxes - fluxes).nonzero() == []
        assert FluxVector.zero(2).equals(fluxes.scaled(0))


class TestHomotopy:
    """Flux reconstruction from a divergence"""

    def test_fluxes_reproduce_divergence(self, xt_space):
        u, u_x, u_t = xt_space.jet("u"), xt_space.jet("u", "x"), xt_space.jet("u", "t")
        e = xt_space.total_derivative(u * u_t, 0) + xt_space.total_derivative(u_x**2, 1)
        fluxes = homotopy_fluxes(xt_space, e)
        assert canonicalize(fluxes.divergence(xt_space) - e) == 0

    def test_explicit_part(self, xt_space):
        x = xt_space.indep("x")
        u = xt_space.jet("u")
        e = x + xt_space.total_derivative(u**2, 0)
        fluxes = homotopy_fluxes(xt_space, e)
        assert canonicalize(fluxes.divergence(xt_space) - e) == 0

    def test_zero_gives_zero_fluxes(self, xt_space):
        assert homotopy_fluxes(xt_space, sympy.S.Zero).equals(FluxVector.zero(2))

    def test_singular_integrand(self, xt_space):
        u, u_x = xt_space.jet("u"), xt_space.jet("u", "x")
        with pytest.raises(HomotopySingular):
            homotopy_fluxes(xt_space, u_x / u)

    def test_restricted_directions(self, xt_space):
        u, u_t = xt_space.jet("u"), xt_space.jet("u", "t")
        e = xt_space.total_derivative(u * u_t, 0)
        fluxes = homotopy_fluxes(xt_space, e, directions=[0])
        assert fluxes.nonzero() == [0]
        assert canonicalize(fluxes.components[0] - u * u_t) == 0

    def test_non_divergence_is_rejected(self, xt_space, settings):
        u, u_x = xt_space.jet("u"), xt_space.jet("u", "x")
        with pytest.raises(FluxReconstructionFailed):
            homotopy_fluxes(xt_space, u**2, settings=settings)
        with pytest.raises(FluxReconstructionFailed):
            homotopy_fluxes(xt_space, u * u_x, directions=[1], settings=settings)


class TestInverseTotalDerivative:
    def test_antiderivative(self, xt_space, settings):
        u, u_x = xt_space.jet("u"), xt_space.jet("u", "x")
        result = invert_total_derivative(xt_space, u * u_x, 0, settings=settings)
        assert canonicalize(result - u**2 / 2) == 0

    def test_not_exact(self, xt_space, settings):
        u = xt_space.jet("u")
        with pytest.raises(NotExactDerivative):
            invert_total_derivative(xt_space, u**2, 0, settings=settings)

    def test_wrong_direction(self, xt_space, settings):
        u, u_x = xt_space.jet("u"), xt_space.jet("u", "x")
        with pytest.raises(NotExactDerivative):
            invert_total_derivative(xt_space, u * u_x, 1, settings=settings)

    def test_index_helpers(self, xt_space):
        assert MultiIndex.from_directions(2, [0, 1, 0]) == xt_space.index("xxt")
