import numpy as np
import pytest

from linalg.core import as_matrix, as_vector, delete_column, determinant, generalized_cross
from utils.errors import DimensionMismatchError


def laplace_determinant(matrix):
    """Recursive cofactor expansion along the first row."""
    size = len(matrix)
    if size == 1:
        return matrix[0][0]
    total = 0.0
    for j in range(size):
        minor = [row[:j] + row[j + 1:] for row in matrix[1:]]
        total += (-1) ** j * matrix[0][j] * laplace_determinant(minor)
    return total


class TestDeterminant:
    """Tests for determinant."""

    @pytest.mark.parametrize("size", [1, 2, 3, 4, 5, 6, 7])
    def test_matches_cofactor_expansion(self, size):
        """Test determinant against a recursive Laplace expansion."""
        rng = np.random.default_rng(size)
        for _ in range(5):
            matrix = rng.uniform(-3.0, 3.0, size=(size, size))
            expected = laplace_determinant(matrix.tolist())
            assert determinant(matrix) == pytest.approx(expected, rel=1e-10, abs=1e-10)

    def test_pivoting_sign(self):
        """Test that a single row swap of the identity gives -1."""
        matrix = np.eye(5)
        matrix[[0, 3]] = matrix[[3, 0]]
        assert determinant(matrix) == pytest.approx(-1.0)

    def test_singular_matrix(self):
        """Test that linearly dependent rows give a zero determinant."""
        matrix = np.array(
            [
                [1.0, 2.0, 3.0, 4.0],
                [2.0, 4.0, 6.0, 8.0],
                [0.0, 1.0, 0.0, 1.0],
                [5.0, 1.0, 2.0, 0.0],
            ]
        )
        assert determinant(matrix) == pytest.approx(0.0, abs=1e-12)

    def test_multiplicative(self):
        """Test det(A) det(B) = det(AB) on random 5x5 pairs."""
        rng = np.random.default_rng(11)
        for _ in range(20):
            a, b = rng.uniform(-2.0, 2.0, size=(2, 5, 5))
            assert determinant(a) * determinant(b) == pytest.approx(determinant(a @ b), rel=1e-9, abs=1e-12)

    def test_non_square_rejected(self):
        """Test that a non-square matrix raises DimensionMismatchError."""
        with pytest.raises(DimensionMismatchError):
            determinant(np.ones((2, 3)))


class TestDeleteColumn:
    """Tests for delete_column."""

    def test_removes_one_based_column(self):
        """Test that index 2 removes the second column."""
        matrix = np.arange(12.0).reshape(3, 4)
        result = delete_column(matrix, 2)
        np.testing.assert_array_equal(result, matrix[:, [0, 2, 3]])

    @pytest.mark.parametrize("j", [0, 5, -1])
    def test_out_of_range(self, j):
        """Test that indices outside 1..d raise IndexError."""
        with pytest.raises(IndexError):
            delete_column(np.ones((3, 4)), j)


class TestGeneralizedCross:
    """Tests for generalized_cross."""

    def test_matches_cross_product_in_r3(self):
        """Test that two vectors in R^3 give the ordinary cross product."""
        a = np.array([1.0, -2.0, 0.5])
        b = np.array([0.3, 4.0, -1.0])
        np.testing.assert_allclose(generalized_cross([a, b]), np.cross(a, b), atol=1e-12)

    def test_two_dimensional_rotation(self):
        """Test that one vector in R^2 is rotated to [b, -a]."""
        np.testing.assert_allclose(generalized_cross([[2.0, 3.0]]), [3.0, -2.0])

    @pytest.mark.parametrize("dim", [3, 4, 5, 6, 7])
    def test_orthogonal_to_inputs(self, dim):
        """Test that the product is orthogonal to every input vector."""
        rng = np.random.default_rng(dim)
        vectors = rng.normal(size=(dim - 1, dim))
        result = generalized_cross(list(vectors))
        scale = np.linalg.norm(result) * np.max(np.linalg.norm(vectors, axis=1))
        np.testing.assert_allclose(vectors @ result, 0.0, atol=1e-10 * max(1.0, scale))

    def test_dependent_inputs_give_zero(self):
        """Test that linearly dependent inputs give the zero vector."""
        a = np.array([1.0, 2.0, 3.0, 4.0])
        vectors = [a, 2.0 * a, np.array([0.0, 1.0, 0.0, 1.0])]
        np.testing.assert_allclose(generalized_cross(vectors), 0.0, atol=1e-12)

    def test_linear_in_each_input(self):
        """Test that scaling one input by c scales the product by c."""
        rng = np.random.default_rng(5)
        vectors = rng.normal(size=(4, 5))
        base = generalized_cross(list(vectors))
        for idx in range(4):
            scaled = vectors.copy()
            scaled[idx] *= 3.7
            np.testing.assert_allclose(generalized_cross(list(scaled)), 3.7 * base, rtol=1e-9, atol=1e-12)

    @pytest.mark.parametrize("dim", [3, 4, 6])
    def test_adjacent_swap_flips_sign(self, dim):
        """Test that swapping two adjacent inputs negates the product."""
        rng = np.random.default_rng(dim + 20)
        vectors = rng.uniform(-1.0, 1.0, size=(dim - 1, dim))
        swapped = vectors.copy()
        swapped[[0, 1]] = swapped[[1, 0]]
        base = generalized_cross(list(vectors))
        np.testing.assert_allclose(generalized_cross(list(swapped)), -base, atol=1e-12 * max(1.0, np.abs(base).max()))

    def test_wrong_count_rejected(self):
        """Test that d-1 vectors are required."""
        with pytest.raises(DimensionMismatchError):
            generalized_cross([np.ones(4), np.ones(4)])

    def test_mixed_dimensions_rejected(self):
        """Test that vectors of different dimensions are rejected."""
        with pytest.raises(DimensionMismatchError):
            generalized_cross([np.ones(3), np.ones(2)])


class TestValidation:
    """Tests for as_vector and as_matrix."""

    def test_vector_dimension(self):
        """Test that the expected dimension is enforced."""
        with pytest.raises(DimensionMismatchError):
            as_vector([1.0, 2.0], dim=3)

    def test_vector_non_finite(self):
        """Test that NaN entries are rejected."""
        with pytest.raises(ValueError):
            as_vector([1.0, np.nan])

    def test_matrix_shape(self):
        """Test that row and column counts are enforced."""
        with pytest.raises(DimensionMismatchError):
            as_matrix(np.ones((2, 3)), rows=3)
