"""Tests for the SDPA sparse-format export of the sampled feasibility problem."""

import numpy as np
import pytest

from lieccm.exceptions import InvalidInputError, UnsupportedDegreeError
from lieccm.synthesis import build_sdpa_problem, export_sdpa, read_sdpa
from lieccm.synthesis.sdpa import format_sdpa, write_sdpa

SCALAR_GRID = [np.array([-1.0]), np.array([0.0]), np.array([2.0])]


@pytest.fixture(scope="module")
def scalar_problem(scalar_system):
    return build_sdpa_problem(scalar_system, 0.5, SCALAR_GRID)


def slack(problem, y):
    """Σ y_v F_v - F_0 for every block."""
    return [
        sum(y[v] * problem.matrices[v + 1][b] for v in range(problem.n_vars)) - problem.matrices[0][b]
        for b in range(problem.n_blocks)
    ]


class TestBuildProblem:
    """Block layout and feasibility of the assembled problem."""

    def test_scalar_block_count(self, scalar_problem):
        assert scalar_problem.n_blocks == 5
        assert scalar_problem.block_dims == [1, 1, 1, 2, 1]
        assert scalar_problem.n_vars == 2

    def test_known_feasible_point(self, scalar_problem):
        for block in slack(scalar_problem, [1.0, 1.0]):
            assert np.linalg.eigvalsh(block).min() > 0

    def test_contraction_blocks(self, scalar_problem):
        for b in range(3):
            np.testing.assert_allclose(scalar_problem.matrices[1][b], [[1.0]], atol=1e-12)
            np.testing.assert_allclose(scalar_problem.matrices[2][b], [[1.0]])
            np.testing.assert_allclose(scalar_problem.matrices[0][b], [[1e-6]])

    def test_infeasible_point_detected(self, scalar_problem):
        blocks = slack(scalar_problem, [20.0, 0.0])
        assert np.linalg.eigvalsh(blocks[-1]).min() < 0

    def test_se3_killing_blocks(self, se3_system):
        grid = se3_system.manifold.sample_grid(2, seed=0)
        problem = build_sdpa_problem(se3_system, 0.2, grid)
        assert problem.n_vars == 22
        assert problem.n_blocks == 6
        assert problem.block_dims[:4] == [6, 6, 7, 6]
        assert all(d < 0 for d in problem.block_dims[4:])

    def test_unsupported_degree(self, scalar_system):
        with pytest.raises(UnsupportedDegreeError):
            build_sdpa_problem(scalar_system, 0.5, SCALAR_GRID, degree=1)
        with pytest.raises(NotImplementedError):
            build_sdpa_problem(scalar_system, 0.5, SCALAR_GRID, degree=2)

    def test_empty_grid(self, scalar_system):
        with pytest.raises(InvalidInputError):
            build_sdpa_problem(scalar_system, 0.5, [])


class TestFileFormat:
    """Writing and reading .dat-s files."""

    def test_header(self, scalar_problem):
        lines = format_sdpa(scalar_problem).splitlines()
        assert lines[0].startswith('"scalar-linear')
        assert lines[1:4] == ["2", "5", "1 1 1 2 1"]

    def test_round_trip(self, scalar_problem, tmp_path):
        path = tmp_path / "problem.dat-s"
        write_sdpa(scalar_problem, path)
        loaded = read_sdpa(path)
        assert loaded.block_dims == scalar_problem.block_dims
        for v in range(scalar_problem.n_vars + 1):
            for b in range(scalar_problem.n_blocks):
                np.testing.assert_array_equal(loaded.matrices[v][b], scalar_problem.matrices[v][b])

    def test_repeated_export_is_byte_identical(self, scalar_system, tmp_path):
        first = tmp_path / "a.dat-s"
        second = tmp_path / "b.dat-s"
        export_sdpa(scalar_system, 0.5, SCALAR_GRID, first)
        export_sdpa(scalar_system, 0.5, SCALAR_GRID, second)
        assert first.read_bytes() == second.read_bytes()

    def test_braces_and_comments_accepted(self, tmp_path):
        path = tmp_path / "braces.dat-s"
        path.write_text('* hand written\n1\n1\n{2}\n{0.0}\n0 1 1 1 1.5\n1 1 1 2 -2\n', encoding="utf-8")
        problem = read_sdpa(path)
        np.testing.assert_array_equal(problem.matrices[1][0], [[0.0, -2.0], [-2.0, 0.0]])
        assert problem.matrices[0][0][0, 0] == 1.5

    def test_truncated_file(self, tmp_path):
        path = tmp_path / "short.dat-s"
        path.write_text("2\n5\n", encoding="utf-8")
        with pytest.raises(InvalidInputError):
            read_sdpa(path)
