import numpy as np
import pytest

from tensordepth import (
    DenseTensor,
    DimensionError,
    TensorSample,
    bilinear_project,
    frobenius_norm,
    inner_product,
    mode_contract,
    reshape,
    vectorize,
)


class TestDenseTensor:
    def test_dims_and_order(self):
        t = DenseTensor([[1.0, 2.0], [3.0, 4.0]])
        assert t.dims == (2, 2)
        assert t.order == 2

    def test_flat_with_dims(self):
        t = DenseTensor([1, 2, 3, 4, 5, 6], dims=(2, 3))
        assert t.dims == (2, 3)
        assert t.array[1, 2] == 6

    def test_scalar_becomes_order_one(self):
        t = DenseTensor(3.5)
        assert t.dims == (1,)
        assert t.item() == 3.5

    def test_wrong_count_rejected(self):
        with pytest.raises(DimensionError):
            DenseTensor([1, 2, 3], dims=(2, 2))

    def test_empty_rejected(self):
        with pytest.raises(DimensionError):
            DenseTensor(np.empty((0, 2)))

    def test_immutable(self):
        t = DenseTensor([[1.0, 2.0], [3.0, 4.0]])
        with pytest.raises(ValueError):
            t.array[0, 0] = 9.0

    def test_item_rejects_non_scalar(self):
        with pytest.raises(DimensionError):
            DenseTensor([1.0, 2.0]).item()


class TestTensorSample:
    def test_members_round_trip(self):
        members = [DenseTensor([[1, 2], [3, 4]]), DenseTensor([[5, 6], [7, 8]])]
        s = TensorSample(members)
        assert len(s) == 2
        assert s.shape == (2, 2)
        np.testing.assert_array_equal(s[1].array, members[1].array)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(DimensionError):
            TensorSample([DenseTensor([[1, 2]]), DenseTensor([[1], [2]])])

    def test_empty_rejected(self):
        with pytest.raises(DimensionError):
            TensorSample([])

    def test_mean_tensor(self):
        s = TensorSample.from_array(np.array([[[0.0, 2.0]], [[4.0, 6.0]]]))
        np.testing.assert_allclose(s.mean_tensor().array, [[2.0, 4.0]])

    def test_vectorized_layout(self):
        s = TensorSample.from_array(np.arange(8.0).reshape(2, 2, 2))
        np.testing.assert_array_equal(s.vectorized(), [[0, 1, 2, 3], [4, 5, 6, 7]])


class TestInnerProduct:
    def test_all_ones(self):
        ones = DenseTensor(np.ones((2, 2)))
        assert inner_product(ones, ones) == 4.0

    def test_zero_annihilates(self):
        z = DenseTensor(np.zeros((3, 2)))
        b = DenseTensor(np.arange(6.0).reshape(3, 2))
        assert inner_product(z, b) == 0.0

    def test_hand_checked_value(self):
        a = DenseTensor([[1, 2], [3, 4]])
        b = DenseTensor([[5, 6], [7, 8]])
        assert inner_product(a, b) == 70.0
        assert inner_product(b, a) == 70.0

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            inner_product(DenseTensor([[1, 2]]), DenseTensor([[1], [2]]))

    def test_cauchy_schwarz(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            a = DenseTensor(rng.standard_normal((3, 4)))
            b = DenseTensor(rng.standard_normal((3, 4)))
            assert abs(inner_product(a, b)) <= (
                frobenius_norm(a) * frobenius_norm(b) + 1e-12
            )


class TestFrobeniusNorm:
    def test_zero(self):
        assert frobenius_norm(DenseTensor(np.zeros((4, 3)))) == 0.0

    def test_all_ones(self):
        assert frobenius_norm(DenseTensor(np.ones((2, 2)))) == 2.0

    def test_three_four_five(self):
        assert frobenius_norm(DenseTensor([[3.0, 4.0]])) == 5.0


class TestModeContract:
    def test_sum_of_unit_slices(self):
        t = DenseTensor(np.ones((2, 2, 2)))
        out = mode_contract(t, 1, [1.0, 1.0])
        assert out.dims == (2, 2)
        np.testing.assert_allclose(out.array, np.full((2, 2), 2.0))

    def test_basis_vector_selects_slice(self):
        rng = np.random.default_rng(1)
        t = DenseTensor(rng.standard_normal((3, 4, 2)))
        for mode in (1, 2, 3):
            j = 1
            e = np.zeros(t.dims[mode - 1])
            e[j] = 1.0
            out = mode_contract(t, mode, e)
            np.testing.assert_allclose(out.array, np.take(t.array, j, axis=mode - 1))

    def test_double_contraction_matches_bilinear(self):
        rng = np.random.default_rng(2)
        t = DenseTensor(rng.standard_normal((3, 4)))
        u = rng.standard_normal(3)
        v = rng.standard_normal(4)
        u /= np.linalg.norm(u)
        v /= np.linalg.norm(v)
        chained = mode_contract(mode_contract(t, 1, u), 1, v).item()
        # independent double-loop oracle
        total = sum(
            u[i] * t.array[i, j] * v[j] for i in range(3) for j in range(4)
        )
        assert abs(chained - total) < 1e-12
        assert abs(chained - bilinear_project(t, u, v)) < 1e-12

    def test_linear_in_weights(self):
        rng = np.random.default_rng(3)
        t = DenseTensor(rng.standard_normal((4, 3, 2)))
        a = rng.standard_normal(3)
        b = rng.standard_normal(3)
        alpha, beta = rng.standard_normal(2)
        left = mode_contract(t, 2, alpha * a + beta * b).array
        right = (
            alpha * mode_contract(t, 2, a).array
            + beta * mode_contract(t, 2, b).array
        )
        np.testing.assert_allclose(left, right, atol=1e-12)

    def test_full_contraction_reproduces_entry(self):
        rng = np.random.default_rng(4)
        t = DenseTensor(rng.standard_normal((2, 3, 4)))
        idx = (1, 2, 3)
        out = t
        for i in reversed(idx):
            e = np.zeros(out.dims[-1])
            e[i] = 1.0
            out = mode_contract(out, out.order, e)
        assert out.dims == (1,)
        assert abs(out.item() - t.array[idx]) < 1e-12

    def test_mode_out_of_range(self):
        t = DenseTensor(np.ones((2, 2)))
        with pytest.raises(DimensionError):
            mode_contract(t, 0, [1, 1])
        with pytest.raises(DimensionError):
            mode_contract(t, 3, [1, 1])

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            mode_contract(DenseTensor(np.ones((2, 2))), 1, [1, 1, 1])


class TestBilinearProject:
    def test_identity_diagonal(self):
        x = DenseTensor(np.eye(2))
        assert bilinear_project(x, [1, 0], [1, 0]) == 1.0

    def test_off_diagonal_pick(self):
        x = DenseTensor([[0, 1], [1, 0]])
        assert bilinear_project(x, [1, 0], [0, 1]) == 1.0

    def test_matches_double_loop(self):
        rng = np.random.default_rng(5)
        x = DenseTensor(rng.standard_normal((3, 2)))
        u = rng.standard_normal(3)
        v = rng.standard_normal(2)
        u /= np.linalg.norm(u)
        v /= np.linalg.norm(v)
        oracle = sum(
            u[i] * x.array[i, j] * v[j] for i in range(3) for j in range(2)
        )
        assert abs(bilinear_project(x, u, v) - oracle) < 1e-12

    def test_matches_inner_with_outer(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            x = DenseTensor(rng.standard_normal((4, 3)))
            u = rng.standard_normal(4)
            v = rng.standard_normal(3)
            u /= np.linalg.norm(u)
            v /= np.linalg.norm(v)
            lhs = bilinear_project(x, u, v)
            rhs = inner_product(x, DenseTensor(np.outer(u, v)))
            assert abs(lhs - rhs) < 1e-12

    def test_requires_order_two(self):
        with pytest.raises(DimensionError):
            bilinear_project(DenseTensor([1.0, 2.0]), [1.0], [1.0])


class TestVectorize:
    def test_layout(self):
        np.testing.assert_array_equal(
            vectorize(DenseTensor([[1, 2], [3, 4]])), [1, 2, 3, 4]
        )

    def test_round_trip(self):
        t = reshape([1, 2, 3, 4], dims=(2, 2))
        np.testing.assert_array_equal(vectorize(t), [1, 2, 3, 4])

    def test_order_three_layout(self):
        t = DenseTensor(np.arange(1.0, 9.0), dims=(2, 2, 2))
        np.testing.assert_array_equal(vectorize(t), np.arange(1.0, 9.0))
