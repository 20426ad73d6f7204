import numpy as np
import pytest

from kweave.errors import DimTooSmall
from kweave.generators import EXAMPLE_NAMES, paper_example


def e(dim, k):
    v = np.zeros(dim, dtype=complex)
    if k:
        v[k - 1] = 1.0
    return v


def cols(dim, indices):
    return np.column_stack([e(dim, k) for k in indices])


def test_example_a_dim4_matrices():
    ex = paper_example("example_a", 4)
    np.testing.assert_array_equal(ex.frames[0].matrix, cols(4, [0, 2, 0, 3, 0, 4, 0]))
    np.testing.assert_array_equal(ex.frames[1].matrix, cols(4, [0, 2, 2, 3, 3, 4, 4]))
    assert ex.u is None


def test_example_b_dim4_matrices():
    ex = paper_example("example_b", 4)
    np.testing.assert_array_equal(ex.frames[0].matrix, cols(4, [1, 2, 0, 3, 4]))
    np.testing.assert_array_equal(ex.frames[1].matrix, cols(4, [1, 0, 2, 3, 4]))


def test_example_pr2_dim4_matrices():
    ex = paper_example("example_pr2", 4)
    np.testing.assert_array_equal(ex.frames[0].matrix, cols(4, [1, 0, 2, 0, 3, 0, 4]))
    np.testing.assert_array_equal(ex.frames[1].matrix, cols(4, [0, 1, 0, 2, 3, 3, 4]))
    np.testing.assert_array_equal(np.asarray(ex.u), np.diag([0, 0, 1.0, 1.0]))


def test_example_a_dim6_matrices():
    ex = paper_example("example_a", 6)
    np.testing.assert_array_equal(
        ex.frames[0].matrix, cols(6, [0, 2, 0, 3, 0, 4, 0, 5, 0, 6, 0])
    )
    np.testing.assert_array_equal(
        ex.frames[1].matrix, cols(6, [0, 2, 2, 3, 3, 4, 4, 5, 5, 6, 6])
    )


def test_example_b_dim6_matrices():
    ex = paper_example("example_b", 6)
    np.testing.assert_array_equal(ex.frames[0].matrix, cols(6, [1, 2, 0, 3, 4, 5, 6]))
    np.testing.assert_array_equal(ex.frames[1].matrix, cols(6, [1, 0, 2, 3, 4, 5, 6]))


def test_example_pr2_dim6_matrices():
    ex = paper_example("example_pr2", 6)
    np.testing.assert_array_equal(
        ex.frames[0].matrix, cols(6, [1, 0, 2, 0, 3, 0, 4, 0, 5, 0, 6])
    )
    np.testing.assert_array_equal(
        ex.frames[1].matrix, cols(6, [0, 1, 0, 2, 3, 3, 4, 4, 5, 5, 6])
    )


@pytest.mark.parametrize("dim", [4, 5, 6, 9])
def test_counts_scale_with_dimension(dim):
    assert paper_example("example_a", dim).count == 2 * dim - 1
    assert paper_example("example_b", dim).count == dim + 1
    assert paper_example("example_pr2", dim).count == 2 * dim - 1


@pytest.mark.parametrize("name", EXAMPLE_NAMES)
def test_k_is_projection_dropping_e1(name):
    ex = paper_example(name, 5)
    expected = np.diag([0, 1.0, 1.0, 1.0, 1.0])
    np.testing.assert_array_equal(np.asarray(ex.k.matrix), expected)
    assert ex.dim == 5
    assert ex.name == name
    assert len(ex.frames) == 2


def test_u_is_projection_dropping_e1_e2():
    ex = paper_example("example_pr2", 5)
    np.testing.assert_array_equal(np.asarray(ex.u), np.diag([0, 0, 1.0, 1.0, 1.0]))


def test_small_dimensions_rejected():
    for dim in (0, 1, 2, 3):
        with pytest.raises(DimTooSmall):
            paper_example("example_a", dim)


def test_unknown_name_rejected():
    with pytest.raises(ValueError, match="unknown example"):
        paper_example("example_z", 4)
