"""Tests for the embedded group catalog: constraints, frames, projectors, retraction, sampling."""

import numpy as np
import pytest
from scipy.linalg import expm

from lieccm.exceptions import (
    DegenerateInputError,
    InvalidInputError,
    NumericalRankError,
    OffManifoldError,
)
from lieccm.manifolds import Euclidean, get_manifold, o2xr, projector_from_frame, se3, so3


def skew(w):
    return np.array([[0.0, -w[2], w[1]], [w[2], 0.0, -w[0]], [-w[1], w[0], 0.0]])


@pytest.fixture(scope="module")
def groups():
    return {"o2xr": o2xr(), "so3": so3(), "se3": se3()}


class TestDimensions:
    """Ambient, constraint and manifold dimensions."""

    @pytest.mark.parametrize(
        "name, n_amb, n_con, n_dim",
        [("o2xr", 5, 3, 2), ("so3", 9, 6, 3), ("se3", 12, 6, 6)],
    )
    def test_group_dimensions(self, groups, name, n_amb, n_con, n_dim):
        m = groups[name]
        assert (m.n_amb, m.n_con, m.n_dim) == (n_amb, n_con, n_dim)

    def test_euclidean(self):
        m = Euclidean(4)
        assert (m.n_amb, m.n_con, m.n_dim) == (4, 0, 4)

    def test_catalog_lookup(self):
        assert get_manifold("se3").n_dim == 6
        assert get_manifold("rn:3").n_amb == 3
        assert get_manifold("rn", n=2).n_amb == 2

    def test_catalog_unknown_name(self):
        with pytest.raises(InvalidInputError):
            get_manifold("sl2")

    def test_catalog_rn_needs_dimension(self):
        with pytest.raises(InvalidInputError):
            get_manifold("rn")


class TestConstraints:
    """h(x) and its Jacobian."""

    def test_identity_is_on_manifold(self, groups):
        for m in groups.values():
            assert m.residual_norm(m.identity()) == 0.0

    def test_jacobian_matches_finite_differences(self, groups):
        m = groups["se3"]
        x = m.random_point(3)
        step = 1e-6
        numeric = np.column_stack([
            (m.constraint_residual(x + step * e) - m.constraint_residual(x - step * e)) / (2 * step)
            for e in np.eye(m.n_amb)
        ])
        np.testing.assert_allclose(m.jac_h(x), numeric, atol=1e-8)

    def test_wrong_length_rejected(self, groups):
        with pytest.raises(InvalidInputError):
            groups["so3"].constraint_residual(np.zeros(5))

    def test_off_manifold_point_rejected_by_frame(self, groups):
        m = groups["so3"]
        with pytest.raises(OffManifoldError, match="h"):
            m.frame(2.0 * m.identity())


class TestFrame:
    """Tangent frames S(x)."""

    def test_o2xr_frame_at_identity(self, groups):
        s = groups["o2xr"].frame(np.array([1.0, 0.0, 0.0, 1.0, 0.0]))
        np.testing.assert_allclose(s[:, 0], [0, 0, 0, 0, 1], atol=1e-15)
        np.testing.assert_allclose(s[:, 1], np.array([0, 1, -1, 0, 0]) / np.sqrt(2), atol=1e-15)

    @pytest.mark.parametrize("name", ["o2xr", "se3"])
    def test_frames_are_orthonormal(self, groups, name):
        m = groups[name]
        for x in m.sample_grid(1000, seed=11):
            s = m.frame(x)
            assert np.linalg.norm(s.T @ s - np.eye(m.n_dim)) <= 1e-12

    @pytest.mark.parametrize("name", ["o2xr", "so3", "se3"])
    def test_frames_are_tangent(self, groups, name):
        m = groups[name]
        for x in m.sample_grid(1000, seed=5):
            assert np.linalg.norm(m.jac_h(x) @ m.frame(x)) <= 1e-10

    def test_euclidean_frame_is_identity(self):
        m = Euclidean(3)
        np.testing.assert_array_equal(m.frame(np.ones(3)), np.eye(3))

    def test_frame_bound_is_one_for_orthonormal_frames(self, groups):
        for m in groups.values():
            assert m.frame_bound(m.sample_grid(20, seed=2)) == pytest.approx(1.0, abs=1e-10)


class TestProjector:
    """P_S = S(SᵀS)⁻¹ and tangent projection."""

    def test_orthonormal_frame_projector_equals_frame(self, groups):
        m = groups["o2xr"]
        x = m.random_point(4)
        np.testing.assert_allclose(m.projector(x), m.frame(x), atol=1e-14)

    def test_euclidean_projector_is_identity(self):
        np.testing.assert_array_equal(Euclidean(2).projector(np.zeros(2)), np.eye(2))

    def test_scaled_frame(self, groups):
        m = groups["se3"]
        s = 2.0 * m.frame(m.random_point(1))
        p = projector_from_frame(s)
        np.testing.assert_allclose(p, s / 4.0, atol=1e-14)
        np.testing.assert_allclose(p.T @ s, np.eye(6), atol=1e-13)

    def test_rank_deficient_frame(self):
        s = np.array([[1.0, 1.0], [0.0, 0.0], [0.0, 0.0]])
        with pytest.raises(NumericalRankError):
            projector_from_frame(s)

    def test_tangent_project_is_tangent_and_idempotent(self, groups):
        m = groups["se3"]
        x = m.random_point(8)
        v = np.random.default_rng(0).standard_normal(m.n_amb)
        p = m.tangent_project(x, v)
        assert np.linalg.norm(m.jac_h(x) @ p) <= 1e-12
        np.testing.assert_allclose(m.tangent_project(x, p), p, atol=1e-14)


class TestRetract:
    """Per-factor polar retraction."""

    def test_on_manifold_point_is_fixed(self, groups):
        m = groups["se3"]
        x = m.random_point(9)
        np.testing.assert_allclose(m.retract(x), x, atol=1e-12)

    def test_scaled_identity(self, groups):
        m = groups["so3"]
        np.testing.assert_allclose(m.retract((1.1 * np.eye(3)).ravel()), np.eye(3).ravel(), atol=1e-14)

    def test_perturbed_rotation(self, groups):
        m = groups["se3"]
        y = m.join(np.eye(3) + 1e-3 * skew([0.3, -1.0, 0.5]), [1.0, 2.0, 3.0])
        x = m.retract(y)
        r, v = m.split(x)
        assert np.linalg.det(r) == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.norm(r.T @ r - np.eye(3)) <= 1e-10
        np.testing.assert_array_equal(v, [1.0, 2.0, 3.0])

    def test_idempotent(self, groups):
        m = groups["se3"]
        y = m.random_point(2) + 0.05 * np.random.default_rng(1).standard_normal(12)
        once = m.retract(y)
        np.testing.assert_allclose(m.retract(once), once, atol=1e-12)
        assert m.residual_norm(once) <= 1e-10

    def test_singular_rotation_block(self, groups):
        with pytest.raises(DegenerateInputError):
            groups["so3"].retract(np.zeros(9))


class TestSampling:
    """Seeded random points and grids."""

    def test_same_seed_same_point(self, groups):
        m = groups["se3"]
        np.testing.assert_array_equal(m.random_point(42), m.random_point(42))

    def test_so3_samples_on_manifold(self, groups):
        m = groups["so3"]
        assert max(m.residual_norm(x) for x in m.sample_grid(1000, seed=0)) <= 1e-10

    def test_se3_rotation_is_proper(self, groups):
        m = groups["se3"]
        for x in m.sample_grid(50, seed=3):
            assert np.linalg.det(m.split(x)[0]) == pytest.approx(1.0, abs=1e-12)

    def test_o2_components(self, groups):
        m = groups["o2xr"]
        assert np.linalg.det(m.split(m.random_point(0))[0]) == pytest.approx(1.0)
        assert np.linalg.det(m.split(m.random_point(0, component=-1))[0]) == pytest.approx(-1.0)

    def test_special_group_has_one_component(self, groups):
        with pytest.raises(InvalidInputError):
            groups["so3"].random_point(0, component=-1)

    def test_grid_size_must_be_positive(self, groups):
        with pytest.raises(InvalidInputError):
            groups["so3"].sample_grid(0, seed=0)

    def test_rotation_exponential_lands_on_group(self, groups):
        m = groups["so3"]
        x = expm(skew([0.4, 0.1, -0.7])).ravel()
        assert m.is_on_manifold(x)
