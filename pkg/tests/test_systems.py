"""Tests for control-affine systems: Jacobians, E(x), reduced operators and transversality."""

import numpy as np
import pytest

from lieccm.exceptions import InvalidInputError, NotTangentError
from lieccm.infrastructure.linalg import central_difference, numerical_jacobian
from lieccm.manifolds import Euclidean, projector_from_frame, so3
from lieccm.systems import ControlAffineSystem, builtin_system, o2xr_toy


@pytest.fixture(scope="module")
def se3_points(se3_system):
    return se3_system.manifold.sample_grid(100, seed=21)


def reduced_by_hand(system, field, x):
    """S_v = D_v(P_Sᵀ) S + P_Sᵀ (∂v/∂x) S, with the Jacobian taken numerically."""
    m = system.manifold
    s = m.frame(x)
    d_pt = central_difference(lambda y: m.projector(y, check=False).T, x, field(x), 1e-5, retract=m.retract)
    jac = numerical_jacobian(field, x, 1e-6)
    return d_pt @ s + projector_from_frame(s).T @ jac @ s


class TestVectorFields:
    """Drift, input fields and their Jacobians."""

    def test_se3_drift_at_identity(self, se3_system):
        x = se3_system.manifold.identity()
        np.testing.assert_array_equal(se3_system.vector_field(x, np.zeros(3))[9:], [0.0, 0.0, 1.0])
        np.testing.assert_array_equal(se3_system.vector_field(x, np.zeros(3))[:9], np.zeros(9))

    def test_scalar_linear_fields(self, scalar_system):
        np.testing.assert_array_equal(scalar_system.drift([2.0]), [-2.0])
        np.testing.assert_array_equal(scalar_system.input_matrix([2.0]), [[1.0]])

    def test_analytic_jacobians_match_finite_differences(self, se3_system, se3_points):
        for x in se3_points:
            np.testing.assert_allclose(
                se3_system.jacobian_f(x), numerical_jacobian(se3_system.drift, x, 1e-4), atol=1e-6
            )
            for i in range(se3_system.m):
                numeric = numerical_jacobian(lambda y: se3_system.input_field(i, y), x, 1e-4)
                np.testing.assert_allclose(se3_system.jacobian_b(i, x), numeric, atol=1e-6)

    def test_variational_matrix(self, se3_system, se3_points):
        u = np.array([0.3, -1.2, 0.7])
        x = se3_points[0]
        numeric = numerical_jacobian(lambda y: se3_system.vector_field(y, u), x, 1e-4)
        np.testing.assert_allclose(se3_system.variational_matrix(x, u), numeric, atol=1e-6)

    def test_scalar_variational_matrix(self, scalar_system):
        np.testing.assert_array_equal(scalar_system.variational_matrix([0.4], [2.0]), [[-1.0]])

    def test_wrong_control_length(self, se3_system):
        with pytest.raises(InvalidInputError):
            se3_system.vector_field(se3_system.manifold.identity(), np.zeros(2))

    def test_input_index_is_zero_based(self, se3_system):
        x = se3_system.manifold.identity()
        se3_system.input_field(0, x)
        with pytest.raises(InvalidInputError):
            se3_system.input_field(3, x)

    def test_fallback_jacobian(self):
        sys = ControlAffineSystem("quad", Euclidean(2), lambda x, t: x ** 2, [lambda x, t: np.ones(2)])
        np.testing.assert_allclose(sys.jacobian_f([1.0, 3.0]), np.diag([2.0, 6.0]), atol=1e-8)


class TestFactorE:
    """B = S E."""

    def test_se3_selects_rotation_inputs(self, se3_system, se3_points):
        expected = np.vstack([np.zeros((3, 3)), np.eye(3)])
        for x in se3_points[:10]:
            e = se3_system.factor_E(x)
            np.testing.assert_allclose(e, expected, atol=1e-12)
            s = se3_system.manifold.frame(x)
            assert np.linalg.norm(s @ e - se3_system.input_matrix(x)) <= 1e-10

    def test_recovers_known_factor(self):
        group = so3()
        known = np.array([[1.0, 0.5], [0.0, -2.0], [0.25, 0.0]])
        fields = [lambda x, t, c=c: group.frame(x, check=False) @ known[:, c] for c in range(2)]
        sys = ControlAffineSystem("known", group, lambda x, t: np.zeros(9), fields)
        for x in group.sample_grid(5, seed=1):
            np.testing.assert_allclose(sys.factor_E(x), known, atol=1e-10)

    def test_zero_input(self):
        sys = ControlAffineSystem("zero", Euclidean(2), lambda x, t: -x, [lambda x, t: np.zeros(2)])
        np.testing.assert_array_equal(sys.factor_E(np.ones(2)), np.zeros((2, 1)))

    def test_non_tangent_input(self):
        group = so3()
        sys = ControlAffineSystem("bad", group, lambda x, t: np.zeros(9), [lambda x, t: np.eye(9)[0]])
        with pytest.raises(NotTangentError):
            sys.factor_E(group.identity())


class TestReducedOperators:
    """S_f and S_{b_i}."""

    def test_scalar_linear(self, scalar_system):
        np.testing.assert_allclose(scalar_system.reduced_drift([0.7]), [[-1.0]], atol=1e-12)
        np.testing.assert_allclose(scalar_system.reduced_input([0.7]), [[0.0]], atol=1e-12)

    def test_zero_drift(self):
        group = so3()
        sys = ControlAffineSystem("still", group, lambda x, t: np.zeros(9), [lambda x, t: group.frame(x, check=False)[:, 0]])
        np.testing.assert_allclose(sys.reduced_drift(group.random_point(3)), np.zeros((3, 3)), atol=1e-12)

    def test_se3_drift_block_form(self, se3_system, se3_points):
        e = np.array([0.0, 0.0, 1.0])
        for x in se3_points[:20]:
            s_rot = se3_system.manifold.frame(x)[:9, 3:]
            coupling = np.kron(np.eye(3), e) @ s_rot
            expected = np.block([[-np.eye(3), coupling], [np.zeros((3, 3)), np.zeros((3, 3))]])
            np.testing.assert_allclose(se3_system.reduced_drift(x), expected, atol=1e-8)

    def test_se3_inputs_match_definition(self, se3_system, se3_points):
        for x in se3_points:
            for i in range(3):
                expected = reduced_by_hand(se3_system, lambda y: se3_system.input_field(i, y), x)
                np.testing.assert_allclose(se3_system.reduced_input(x, i=i), expected, atol=1e-5)

    def test_se3_inputs_are_skew(self, se3_system, se3_points):
        for x in se3_points:
            for s_b in se3_system.reduced_operators(x).S_b:
                assert np.linalg.norm(s_b + s_b.T) <= 1e-8

    def test_input_equal_to_drift(self):
        group = so3()
        field = lambda x, t: group.frame(x, check=False) @ np.array([1.0, -0.5, 0.25])  # noqa: E731
        sys = ControlAffineSystem("same", group, field, [field])
        x = group.random_point(4)
        np.testing.assert_allclose(sys.reduced_input(x), sys.reduced_drift(x), atol=1e-12)

    @pytest.mark.parametrize("name", ["se3-heading", "o2xr-toy", "scalar-linear"])
    def test_shapes(self, name):
        sys = builtin_system(name)
        x = sys.manifold.identity()
        ops = sys.reduced_operators(x)
        n = sys.manifold.n_dim
        assert ops.S_f.shape == (n, n)
        assert all(s.shape == (n, n) for s in ops.S_b)
        assert ops.E.shape == (n, sys.m)


class TestTransversality:
    """Fields must be tangent to the constraint set."""

    def test_se3_passes(self, se3_system, se3_points):
        report = se3_system.transversality_check(se3_points)
        assert report.passed
        assert report.max_drift_residual <= 1e-12

    def test_euclidean_is_trivial(self, scalar_system):
        assert scalar_system.transversality_check([np.array([1.0]), np.array([-3.0])]).passed

    def test_broken_input_is_named(self):
        group = so3()
        sys = ControlAffineSystem(
            "broken", group, lambda x, t: np.zeros(9),
            [lambda x, t: group.frame(x, check=False)[:, 0], lambda x, t: np.eye(9)[0]],
        )
        report = sys.transversality_check(group.sample_grid(10, seed=0))
        assert not report.passed
        assert report.failing_fields == ("b2",)

    def test_o2xr_toy_passes_on_both_components(self):
        sys = o2xr_toy()
        samples = sys.manifold.sample_grid(10, seed=0) + sys.manifold.sample_grid(10, seed=0, component=-1)
        assert sys.transversality_check(samples).passed


class TestBuiltins:
    """Built-in system lookup and parameter validation."""

    def test_params_are_recorded(self):
        sys = builtin_system("se3-heading", {"k": 2.0})
        assert sys.params == {"k": 2.0, "e": [0.0, 0.0, 1.0]}

    def test_unknown_system(self):
        with pytest.raises(InvalidInputError):
            builtin_system("cartpole")

    def test_unknown_parameter(self):
        with pytest.raises(InvalidInputError):
            builtin_system("se3-heading", {"mass": 1.0})

    def test_non_unit_heading(self):
        with pytest.raises(InvalidInputError):
            builtin_system("se3-heading", {"e": [0.0, 0.0, 2.0]})

    def test_non_positive_damping(self):
        with pytest.raises(InvalidInputError):
            builtin_system("se3-heading", {"k": 0.0})
