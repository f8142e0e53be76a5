import numpy as np
import pytest
import scipy.linalg

from tensordepth import (
    DegenerateSampleError,
    LocationScale,
    RankDeficiencyError,
    SearchBudget,
    VectorSample,
    approx_outlyingness_medmad,
    depth_from_outlyingness,
    pca_project,
    projection_depth,
    rayleigh_outlyingness,
)


def grid_directions(p, count, rng=None):
    """Direction grid for brute-force maximisation of the outlyingness."""
    if p == 2:
        theta = np.linspace(0.0, np.pi, count, endpoint=False)
        return np.stack([np.cos(theta), np.sin(theta)], axis=1)
    if p == 3:
        # Fibonacci sphere: quasi-uniform coverage
        i = np.arange(count) + 0.5
        phi = np.pi * (1.0 + np.sqrt(5.0)) * i
        z = 1.0 - 2.0 * i / count
        r = np.sqrt(1.0 - z * z)
        return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)
    rng = rng or np.random.default_rng(12345)
    dirs = rng.standard_normal((count, p))
    return dirs / np.linalg.norm(dirs, axis=1, keepdims=True)


def grid_meanstd_outlyingness(points, x, dirs):
    proj = dirs @ points.T
    mean = proj.mean(axis=1)
    std = proj.std(axis=1)
    num = np.abs(dirs @ x - mean)
    return float((num / std).max())


class TestRayleigh:
    def test_query_at_mean_is_zero(self):
        rng = np.random.default_rng(0)
        vs = VectorSample(rng.standard_normal((40, 3)))
        res = rayleigh_outlyingness(vs.mean, vs)
        assert res.value == pytest.approx(0.0, abs=1e-12)
        assert np.linalg.norm(res.direction) == pytest.approx(1.0, abs=1e-12)
        assert projection_depth(vs.mean, vs) == pytest.approx(1.0, abs=1e-12)

    def test_unit_covariance_square(self):
        # mean (1,1), covariance exactly I; value is the plain distance
        vs = VectorSample([[0, 0], [2, 0], [0, 2], [2, 2]])
        res = rayleigh_outlyingness([3.0, 1.0], vs)
        assert res.value == pytest.approx(2.0, abs=1e-12)
        # the same value from a dense direction grid
        grid = grid_meanstd_outlyingness(vs.points, np.array([3.0, 1.0]),
                                         grid_directions(2, 100000))
        assert res.value == pytest.approx(grid, rel=1e-3)

    @pytest.mark.parametrize("p", [2, 3])
    def test_grid_oracle(self, p):
        rng = np.random.default_rng(10 + p)
        for _ in range(5):
            pts = rng.standard_normal((60, p))
            x = rng.standard_normal(p) * 2
            vs = VectorSample(pts)
            closed = rayleigh_outlyingness(x, vs).value
            grid = grid_meanstd_outlyingness(pts, x, grid_directions(p, 100000, rng))
            assert closed == pytest.approx(grid, rel=1e-3)
            assert closed >= grid - 1e-9  # grid is a lower bound

    def test_direction_attains_value(self):
        rng = np.random.default_rng(5)
        pts = rng.standard_normal((50, 4))
        x = rng.standard_normal(4) * 3
        vs = VectorSample(pts)
        res = rayleigh_outlyingness(x, vs)
        u = res.direction
        attained = abs(u @ x - u @ vs.mean) / np.sqrt(u @ vs.covariance @ u)
        assert attained == pytest.approx(res.value, rel=1e-10)

    def test_generalized_eigenproblem_route(self):
        rng = np.random.default_rng(6)
        for _ in range(10):
            p = int(rng.integers(2, 6))
            pts = rng.standard_normal((30 * p, p))
            x = rng.standard_normal(p)
            vs = VectorSample(pts)
            y = x - vs.mean
            lam = scipy.linalg.eigh(np.outer(y, y), vs.covariance, eigvals_only=True)
            assert rayleigh_outlyingness(x, vs).value ** 2 == pytest.approx(
                float(lam[-1]), rel=1e-8, abs=1e-12
            )

    def test_affine_invariance(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            p = int(rng.integers(2, 5))
            pts = rng.standard_normal((40, p))
            x = rng.standard_normal(p)
            A = rng.standard_normal((p, p)) + np.eye(p) * 2
            b = rng.standard_normal(p)
            before = rayleigh_outlyingness(x, VectorSample(pts)).value
            after = rayleigh_outlyingness(A @ x + b, VectorSample(pts @ A.T + b)).value
            assert after == pytest.approx(before, rel=1e-8)

    def test_rank_deficiency_reports_count(self):
        rng = np.random.default_rng(8)
        base = rng.standard_normal((30, 2))
        pts = np.hstack([base, base[:, :1]])  # third coordinate duplicates first
        vs = VectorSample(pts)
        with pytest.raises(RankDeficiencyError) as err:
            rayleigh_outlyingness(np.zeros(3), vs)
        assert err.value.deficient == 1
        assert "1 of 3" in str(err.value)


class TestDepthValue:
    def test_formula(self):
        assert depth_from_outlyingness(0.0) == 1.0
        assert depth_from_outlyingness(1.0) == 0.5
        assert depth_from_outlyingness(np.inf) == 0.0

    def test_chained_with_rayleigh(self):
        rng = np.random.default_rng(9)
        vs = VectorSample(rng.standard_normal((50, 3)))
        x = rng.standard_normal(3) * 4
        v = rayleigh_outlyingness(x, vs).value
        assert projection_depth(x, vs) == pytest.approx(1.0 / (1.0 + v), rel=1e-12)


class TestConvexityAndRays:
    def test_outlyingness_convex(self):
        rng = np.random.default_rng(11)
        vs = VectorSample(rng.standard_normal((60, 3)))
        for _ in range(30):
            x1 = rng.standard_normal(3) * 2
            x2 = rng.standard_normal(3) * 2
            lam = rng.uniform(0.05, 0.95)
            mid = (1 - lam) * x1 + lam * x2
            o = lambda x: rayleigh_outlyingness(x, vs).value
            assert o(mid) <= (1 - lam) * o(x1) + lam * o(x2) + 1e-9

    def test_depth_monotone_along_rays(self):
        rng = np.random.default_rng(12)
        vs = VectorSample(rng.standard_normal((60, 3)))
        for _ in range(10):
            d = rng.standard_normal(3)
            d /= np.linalg.norm(d)
            depths = [
                projection_depth(vs.mean + t * d, vs) for t in (0, 0.5, 1, 2, 4)
            ]
            assert all(a >= b - 1e-12 for a, b in zip(depths, depths[1:]))

    def test_depth_vanishes_at_infinity(self):
        rng = np.random.default_rng(13)
        pts = rng.standard_normal((50, 3))
        vs = VectorSample(pts)
        radius = np.linalg.norm(pts - vs.mean, axis=1).max()
        for _ in range(5):
            d = rng.standard_normal(3)
            d /= np.linalg.norm(d)
            assert projection_depth(vs.mean + 100 * radius * d, vs) < 0.1


class TestMedianMadSearch:
    def test_one_dimensional_exact(self):
        vs = VectorSample(np.array([[1.0], [2.0], [3.0], [4.0], [5.0]]))
        res = approx_outlyingness_medmad(np.array([5.0]), vs)
        assert res.value == pytest.approx(2.0, abs=1e-12)

    def test_center_of_symmetric_data(self):
        # axis-aligned symmetric cloud: the coordinatewise median is deepest
        pts = np.array(
            [[1, 0], [-1, 0], [0, 2], [0, -2], [3, 0], [-3, 0], [0, 5], [0, -5]],
            dtype=float,
        )
        vs = VectorSample(pts)
        res = approx_outlyingness_medmad(np.zeros(2), vs)
        assert res.value == pytest.approx(0.0, abs=1e-12)

    def test_matches_dense_grid_within_one_percent(self):
        rng = np.random.default_rng(14)
        pts = rng.standard_normal((5, 2)) * np.array([2.0, 0.5]) + 1.0
        x = rng.standard_normal(2) * 3
        vs = VectorSample(pts)
        res = approx_outlyingness_medmad(x, vs, rng=np.random.default_rng(1))
        dirs = grid_directions(2, 1_000_000)
        proj = dirs @ pts.T
        med = np.median(proj, axis=1)
        mad = np.median(np.abs(proj - med[:, None]), axis=1)
        with np.errstate(divide="ignore"):
            vals = np.abs(dirs @ x - med) / mad
        oracle = float(vals[np.isfinite(vals)].max())
        assert res.value == pytest.approx(oracle, rel=0.01)

    def test_zero_mad_with_nonzero_numerator_is_infinite(self):
        # a strict majority of duplicated points forces MAD = 0 in every
        # direction; off the duplicate the numerator cannot vanish
        pts = np.array([[1.0, 1.0]] * 4 + [[2.0, 0.0], [0.0, 3.0]])
        vs = VectorSample(pts)
        res = approx_outlyingness_medmad(
            np.array([5.0, 5.0]), vs, rng=np.random.default_rng(2)
        )
        assert res.value == np.inf
        assert depth_from_outlyingness(res.value) == 0.0

    def test_zero_mad_with_zero_numerator_contributes_zero(self):
        pts = np.array([[1.0, 1.0]] * 4 + [[2.0, 0.0], [0.0, 3.0]])
        vs = VectorSample(pts)
        res = approx_outlyingness_medmad(
            np.array([1.0, 1.0]), vs, rng=np.random.default_rng(2)
        )
        assert res.value == 0.0

    def test_direction_is_unit(self):
        rng = np.random.default_rng(15)
        vs = VectorSample(rng.standard_normal((20, 3)))
        res = approx_outlyingness_medmad(
            rng.standard_normal(3), vs, rng=np.random.default_rng(3)
        )
        assert np.linalg.norm(res.direction) == pytest.approx(1.0, abs=1e-9)

    def test_budget_reproducible_with_seeded_rng(self):
        rng_data = np.random.default_rng(16)
        vs = VectorSample(rng_data.standard_normal((15, 3)))
        x = rng_data.standard_normal(3)
        a = approx_outlyingness_medmad(x, vs, rng=np.random.default_rng(7))
        b = approx_outlyingness_medmad(x, vs, rng=np.random.default_rng(7))
        assert a.value == b.value
        np.testing.assert_array_equal(a.direction, b.direction)


class TestPcaProject:
    def test_full_rank_projection_preserves_value(self):
        rng = np.random.default_rng(17)
        pts = rng.standard_normal((40, 3))
        x = rng.standard_normal(3)
        vs = VectorSample(pts)
        projected, px = pca_project(vs, x)
        assert projected.dim == 3
        before = rayleigh_outlyingness(x, vs).value
        after = rayleigh_outlyingness(px, projected).value
        assert after == pytest.approx(before, rel=1e-9)

    def test_duplicated_coordinate_drops_one_dimension(self):
        rng = np.random.default_rng(18)
        base = rng.standard_normal((30, 3))
        pts = np.hstack([base, base[:, 2:3]])
        projected, _ = pca_project(VectorSample(pts), np.zeros(4))
        assert projected.dim == 3
        assert projected.rank == 3

    def test_small_sample_rank_bound(self):
        rng = np.random.default_rng(19)
        pts = rng.standard_normal((3, 10))
        projected, _ = pca_project(VectorSample(pts), np.zeros(10))
        assert projected.dim <= 2

    def test_zero_covariance_degenerate(self):
        pts = np.ones((5, 3))
        with pytest.raises(DegenerateSampleError):
            pca_project(VectorSample(pts), np.zeros(3))


def test_search_budget_validation():
    with pytest.raises(ValueError):
        SearchBudget(directions=0)
