"""Packing/cover estimators, bound-direction properties, volume and transfer."""

import math

import numpy as np
import pytest

from freefractal.errors import (
    DegenerateGridError,
    EmptyCloudError,
    PackingPremiseError,
    ZeroHitsError,
)
from freefractal.metricgeom import (
    Cover,
    PointCloud,
    best_cover,
    constrained_cover_sum,
    cover_sum,
    greedy_cover,
    minkowski_log_volume,
    monotone_cover_sums,
    normalized_log_entropy,
    normalized_log_entropy_from_logs,
    packing_measure_transfer,
    packing_number,
    scaling_exponent,
)


def collinear(count, spacing):
    return PointCloud(vectors=np.array([[i * spacing, 0.0] for i in range(count)]))


def random_cloud(rng, kind):
    if kind == "box":
        dim = int(rng.integers(1, 4))
        n = int(rng.integers(40, 160))
        return PointCloud(vectors=rng.random((n, dim)))
    if kind == "circle":
        n = int(rng.integers(40, 160))
        th = rng.random(n) * 2 * math.pi
        return PointCloud(vectors=np.stack([np.cos(th), np.sin(th)], 1))
    n = int(rng.integers(30, 100))
    centers = rng.random((3, 2)) * 4
    pts = centers[rng.integers(0, 3, n)] + 0.1 * rng.standard_normal((n, 2))
    return PointCloud(vectors=pts)


class TestPackingNumber:
    def test_collinear_small_eps(self):
        assert packing_number(collinear(5, 1.0), 0.4) == 5

    def test_collinear_large_eps(self):
        assert packing_number(collinear(5, 1.0), 0.6) == 3

    def test_grid_keeps_all_at_exact_spacing(self):
        # dyadic spacing keeps the boundary case exactly representable
        xs = np.arange(10) * 0.125
        grid = np.stack(np.meshgrid(xs, xs), -1).reshape(-1, 2)
        assert packing_number(PointCloud(vectors=grid), 0.0625) == 100

    def test_empty_cloud(self):
        with pytest.raises(EmptyCloudError):
            packing_number(PointCloud(vectors=np.zeros((0, 2))), 0.1)

    def test_matrix_free_matches_matrix_path(self):
        rng = np.random.Generator(np.random.Philox(key=np.uint64(3)))
        pts = rng.random((120, 3))
        fresh = PointCloud(vectors=pts)
        cached = PointCloud(vectors=pts)
        cached.distance_matrix()
        for eps in (0.05, 0.1, 0.3):
            assert packing_number(fresh, eps) == packing_number(cached, eps)


class TestCoverSum:
    def test_line_sample_near_length(self):
        line = PointCloud(vectors=np.array([[0.01 * i, 0.0] for i in range(101)]))
        val = cover_sum(line, 0.05, 1.0)
        assert 0.9 <= val <= 1.2

    def test_s_zero_counts_cells(self):
        line = collinear(7, 1.0)
        cov = greedy_cover(line, 0.4)
        assert cover_sum(line, 0.4, 0.0) <= cov.count
        assert cover_sum(line, 0.4, 0.0) == float(int(cover_sum(line, 0.4, 0.0)))

    def test_single_point(self):
        single = PointCloud(vectors=np.zeros((1, 2)))
        assert cover_sum(single, 0.3, 1.0) == 0.0
        assert cover_sum(single, 0.3, 0.0) == 1.0

    def test_diameters_capped(self):
        rng = np.random.Generator(np.random.Philox(key=np.uint64(5)))
        cloud = PointCloud(vectors=rng.random((80, 2)))
        for eps in (0.1, 0.25):
            cov = greedy_cover(cloud, eps)
            assert all(d <= 2 * eps + 1e-12 for d in cov.diameters)


class TestConstrainedCoverSum:
    def test_single_point_inflated(self):
        single = PointCloud(vectors=np.zeros((1, 2)))
        assert constrained_cover_sum(single, 0.1, 0.2, 1.0) == pytest.approx(0.1)

    def test_two_separated_points(self):
        two = PointCloud(vectors=np.array([[0.0, 0.0], [1.0, 0.0]]))
        assert constrained_cover_sum(two, 0.1, 0.2, 1.0) == pytest.approx(0.2)

    def test_vanishing_delta_matches_cover_sum(self):
        rng = np.random.Generator(np.random.Philox(key=np.uint64(6)))
        cloud = PointCloud(vectors=rng.random((60, 2)))
        plain = cover_sum(cloud, 0.2, 1.5)
        constrained = constrained_cover_sum(cloud, 1e-15, 0.2, 1.5)
        assert constrained == pytest.approx(plain, abs=1e-12)

    def test_delta_must_be_below_eps(self):
        two = PointCloud(vectors=np.array([[0.0, 0.0], [1.0, 0.0]]))
        with pytest.raises(ValueError):
            constrained_cover_sum(two, 0.3, 0.2, 1.0)


class TestBoundDirections:
    """The packing/cover inequalities that hold exactly on greedy outputs."""

    @pytest.mark.parametrize("kind", ["box", "circle", "clusters"])
    def test_cover_packing_chain(self, kind):
        rng = np.random.Generator(np.random.Philox(key=np.uint64(17)))
        for trial in range(25):
            cloud = random_cloud(rng, kind)
            eps = float(rng.random() * 0.4 + 0.02)
            c_2e = greedy_cover(cloud, 2 * eps).count
            p_half = packing_number(cloud, eps / 2)
            p_e = packing_number(cloud, eps)
            c_half = greedy_cover(cloud, eps / 2).count
            assert c_2e <= p_half
            assert p_e <= c_half

    def test_cover_bound_inequality(self):
        # greedy cover sum at 2*eps against packing at eps/2 times (4 eps)^s
        rng = np.random.Generator(np.random.Philox(key=np.uint64(23)))
        for trial in range(50):
            cloud = random_cloud(
                rng, ("box", "circle", "clusters")[trial % 3]
            )
            eps = float(rng.random() * 0.3 + 0.05)
            s = float(rng.random() * 3.0)
            lhs = cover_sum(cloud, 2 * eps, s, restarts=4, seed=trial)
            rhs = packing_number(cloud, eps / 2) * (4 * eps) ** s
            assert lhs <= rhs * (1 + 1e-12)

    def test_exponent_comparison_same_cover(self):
        # for r < s, the r-sum dominates the s-sum rescaled by the diameter cap
        rng = np.random.Generator(np.random.Philox(key=np.uint64(29)))
        for trial in range(30):
            cloud = random_cloud(rng, "box")
            eps = float(rng.random() * 0.3 + 0.05)
            r = float(rng.random() * 1.5)
            s = r + float(rng.random() * 2.0) + 1e-6
            cov = greedy_cover(cloud, eps)
            lhs = cov.pow_sum(r)
            rhs = cov.pow_sum(s) * (2 * eps) ** (r - s)
            assert lhs >= rhs * (1 - 1e-12)

    def test_monotone_grid(self):
        rng = np.random.Generator(np.random.Philox(key=np.uint64(31)))
        cloud = random_cloud(rng, "box")
        grid = [0.4, 0.2, 0.1, 0.05]
        vals = monotone_cover_sums(cloud, grid, 1.2)
        assert all(v1 <= v2 for v1, v2 in zip(vals, vals[1:]))


class TestLogSpace:
    def test_normalized_log_entropy(self):
        got = normalized_log_entropy([math.exp(100.0)], [10])
        assert got == pytest.approx([1.0], abs=1e-12)

    def test_single_cell_identity(self):
        cov = Cover(eps=0.5, cells=((0, 1),), diameters=(0.3,))
        r, k = 1.0, 20
        s = r * k * k
        assert cov.log_pow_sum(s) / (k * k) == pytest.approx(r * math.log(0.3))

    def test_two_cell_log_sum_exp(self):
        cov = Cover(eps=0.5, cells=((0,), (1,)), diameters=(0.07, 0.07))
        s = 1.0 * 4  # r = 1, k = 2
        want = (math.log(2) + 4 * math.log(0.07)) / 4
        assert cov.log_pow_sum(s) / 4 == pytest.approx(want, abs=1e-12)

    def test_huge_exponent_no_overflow(self):
        cov = Cover(eps=0.5, cells=((0,),) * 3, diameters=(0.5, 0.4, 0.3))
        val = cov.log_pow_sum(5000.0)
        assert math.isfinite(val)

    def test_nonpositive_rejected(self):
        with pytest.raises(Exception):
            normalized_log_entropy([0.0], [4])

    def test_from_logs(self):
        assert normalized_log_entropy_from_logs([50.0], [5]) == [2.0]


class TestScalingExponent:
    def test_square_cloud(self):
        rng = np.random.Generator(np.random.Philox(key=np.uint64(1)))
        cloud = PointCloud(vectors=rng.random((4000, 2)) * 2.0)
        grid = list(np.geomspace(0.28, 0.028, 9))
        counts = [packing_number(cloud, e) for e in grid]
        est = scaling_exponent(grid, [math.log(c) for c in counts])
        assert est.slope == pytest.approx(2.0, abs=0.35)

    def test_circle_cloud(self):
        rng = np.random.Generator(np.random.Philox(key=np.uint64(2)))
        th = rng.random(1200) * 2 * math.pi
        cloud = PointCloud(vectors=np.stack([np.cos(th), np.sin(th)], 1))
        grid = list(np.geomspace(0.4, 0.025, 9))
        counts = [packing_number(cloud, e) for e in grid]
        est = scaling_exponent(grid, [math.log(c) for c in counts])
        assert est.slope == pytest.approx(1.0, abs=0.15)

    def test_single_point_slope_zero(self):
        grid = [0.4, 0.1, 0.025]
        est = scaling_exponent(grid, [0.0, 0.0, 0.0])
        assert est.slope == 0.0

    def test_narrow_grid_rejected(self):
        with pytest.raises(DegenerateGridError):
            scaling_exponent([0.4, 0.3, 0.2], [1.0, 2.0, 3.0])

    def test_too_few_scales_rejected(self):
        with pytest.raises(DegenerateGridError):
            scaling_exponent([0.4, 0.025], [1.0, 2.0])


class TestMinkowskiVolume:
    def test_disk_area(self):
        single = PointCloud(vectors=np.zeros((1, 2)))
        log_v, (lo, hi) = minkowski_log_volume(single, 0.5, trials=100_000, seed=4)
        want = math.log(math.pi * 0.25)
        assert abs(log_v - want) < 0.1
        assert lo <= log_v <= hi

    def test_monotone_in_eps(self):
        rng = np.random.Generator(np.random.Philox(key=np.uint64(8)))
        cloud = PointCloud(vectors=rng.random((10, 2)))
        v1, _ = minkowski_log_volume(cloud, 0.1, trials=50_000, seed=4)
        v2, _ = minkowski_log_volume(cloud, 0.2, trials=50_000, seed=4)
        assert v2 > v1

    def test_two_far_disks(self):
        two = PointCloud(vectors=np.array([[0.0, 0.0], [10.0, 0.0]]))
        log_v, _ = minkowski_log_volume(two, 0.5, trials=200_000, seed=5)
        want = math.log(2 * math.pi * 0.25)
        assert abs(log_v - want) < 0.1

    def test_normalization_hook(self):
        single = PointCloud(vectors=np.zeros((1, 2)))
        base, _ = minkowski_log_volume(single, 0.5, trials=10_000, seed=6)
        shifted, _ = minkowski_log_volume(
            single, 0.5, trials=10_000, seed=6, log_k_normalization=3.5
        )
        assert shifted - base == pytest.approx(3.5, abs=1e-12)


class TestPackingTransfer:
    def circle_scan(self, eps_list):
        """Dense circle of circumference 4: P_eps ~ 2/eps, so C > 1 certifies."""
        th = np.linspace(0.0, 2 * math.pi, 8001)[:-1]
        r = 4.0 / (2 * math.pi)
        cloud = PointCloud(vectors=np.stack([r * np.cos(th), r * np.sin(th)], 1))
        return [(e, packing_number(cloud, e)) for e in eps_list]

    def test_half_arc_bound(self):
        scan = self.circle_scan([0.02, 0.01, 0.005])
        C = 1.5
        bound = packing_measure_transfer(scan, C, 1.0, 0.05, 0.5)
        assert bound == pytest.approx(C / 2)

    def test_full_set_ratio_one(self):
        scan = self.circle_scan([0.02, 0.01])
        assert packing_measure_transfer(scan, 1.5, 1.0, 0.05, 1.0) == pytest.approx(1.5)

    def test_null_set(self):
        scan = self.circle_scan([0.02])
        assert packing_measure_transfer(scan, 1.5, 1.0, 0.05, 0.0) == 0.0

    def test_premise_failure(self):
        scan = [(0.01, 3)]
        with pytest.raises(PackingPremiseError):
            packing_measure_transfer(scan, 50.0, 1.0, 0.05, 0.5)


class TestCloudBasics:
    def test_metric_axioms_spot_check(self):
        rng = np.random.Generator(np.random.Philox(key=np.uint64(9)))
        cloud = PointCloud(vectors=rng.random((50, 3)))
        assert cloud.check_metric_axioms()

    def test_metric_callback_cloud(self):
        pts = [0.0, 1.0, 3.0]
        cloud = PointCloud(metric=lambda i, j: abs(pts[i] - pts[j]), size=3)
        assert packing_number(cloud, 0.4) == 3
        assert greedy_cover(cloud, 1.0).count == 2
