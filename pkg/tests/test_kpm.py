import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pascluster import (KpmConfig, WeightedPoint, kpm_assign, kpm_modified,
                        kpm_standard, kpm_standard_pas, mcd, otsu_background,
                        otsu_split_db, power_threshold)
from pascluster.kpm import kpm_cost
from pascluster.grid import from_db

import oracles
from conftest import make_pas


class TestMcd:
    def test_identical_points(self):
        p = WeightedPoint(10.0, -5.0, 1.0)
        assert mcd(p, p) == 0.0

    def test_pythagorean(self):
        assert mcd((0.0, 0.0), (3.0, 4.0)) == 5.0

    @given(st.tuples(*[st.floats(-90, 90) for _ in range(4)]))
    def test_matches_formula(self, vals):
        a0, e0, a1, e1 = vals
        assert mcd((a0, e0), (a1, e1)) == pytest.approx(
            np.sqrt((a0 - a1) ** 2 + (e0 - e1) ** 2), abs=1e-12)


class TestOtsu:
    def test_split_matches_exhaustive(self, rng):
        vals = np.concatenate([rng.normal(-60, 3, 800), rng.normal(-20, 4, 200)])
        assert otsu_split_db(vals) == oracles.brute_otsu_split(vals)

    def test_split_matches_exhaustive_random(self, rng):
        for _ in range(20):
            vals = rng.normal(0, 10, size=300)
            assert otsu_split_db(vals) == oracles.brute_otsu_split(vals)

    def test_two_valued_majority_low(self):
        data = np.ones((10, 10))
        data[0, :5] = 100.0
        p_back = otsu_background(make_pas(data))
        assert p_back == pytest.approx(1.0, rel=0.1)

    def test_constant_map(self):
        assert otsu_background(make_pas(np.full((5, 5), 7.0))) == pytest.approx(7.0)

    def test_bimodal_db_histogram(self, rng):
        low = from_db(rng.normal(-50, 2, size=900))
        high = from_db(rng.normal(-10, 2, size=100))
        data = np.concatenate([low, high]).reshape(40, 25)
        split = otsu_split_db(10 * np.log10(data))
        assert -45 < split < -15
        p_back = otsu_background(make_pas(data))
        assert -55 < 10 * np.log10(p_back) < -45


class TestPowerThreshold:
    def test_zero_sigma_collapses(self):
        assert power_threshold(2.5, 20.0, 0.0) == pytest.approx(2.5, rel=1e-12)

    def test_paper_statistics_factor(self):
        # mu=21.03 dB, sigma=4 dB: factor evaluated straight from the rule
        a = 10 ** 2.103
        b = 10 ** 0.903
        expect = a * (b + 1) / (b * (a + 1))
        assert power_threshold(1.0, 21.03, 4.0) == pytest.approx(expect, rel=1e-12)

    def test_formula_oracle(self):
        a = 10 ** 2.0
        b = 10 ** ((20.0 - 6.0) / 10)
        expect = a * (b + 1) / (b * (a + 1)) * 3.0
        assert power_threshold(3.0, 20.0, 2.0) == pytest.approx(expect, rel=1e-12)

    def test_rejects_bad_background(self):
        with pytest.raises(ValueError):
            power_threshold(0.0, 20.0, 2.0)


class TestAssignment:
    def test_matches_argmin_oracle(self, rng):
        for _ in range(100):
            n, k = 30, 4
            coords = rng.uniform(-90, 90, size=(n, 2))
            powers = rng.random(n) + 0.01
            cents = rng.uniform(-90, 90, size=(k, 2))
            got = kpm_assign(coords, powers, cents)
            for l in range(n):
                costs = [powers[l] * mcd(tuple(coords[l]), tuple(c)) for c in cents]
                assert got[l] == int(np.argmin(costs))

    def test_tie_goes_to_lowest_index(self):
        coords = np.array([[0.0, 0.0]])
        powers = np.array([1.0])
        cents = np.array([[1.0, 0.0], [-1.0, 0.0]])
        assert kpm_assign(coords, powers, cents)[0] == 0

    def test_equal_powers_reduce_to_kmeans(self, rng):
        coords = rng.uniform(-50, 50, size=(40, 2))
        powers = np.full(40, 3.7)
        cents = rng.uniform(-50, 50, size=(5, 2))
        got = kpm_assign(coords, powers, cents)
        plain = np.argmin(
            np.sqrt(((coords[:, None, :] - cents[None]) ** 2).sum(-1)), axis=1)
        assert np.array_equal(got, plain)

    def test_scaling_invariance(self, rng):
        coords = rng.uniform(-50, 50, size=(40, 2))
        powers = rng.random(40) + 0.1
        cents = rng.uniform(-50, 50, size=(4, 2))
        a = kpm_assign(coords, powers, cents)
        b = kpm_assign(coords, powers * 4.0, cents)  # power of two: exact scaling
        assert np.array_equal(a, b)


class TestKpmStandard:
    def test_k1_centroid_is_weighted_mean(self, rng):
        coords = rng.uniform(-20, 20, size=(25, 2))
        powers = rng.random(25) + 0.1
        res = kpm_standard(coords, powers, KpmConfig(seed=1, restarts=2), k=1)
        assert np.all(res.labels == 0)
        expect = (coords * powers[:, None]).sum(0) / powers.sum()
        assert np.allclose(res.centroids[0], expect, atol=1e-9)

    def test_two_blobs_exact(self, rng):
        a = rng.normal(0, 0.5, size=(6, 2)) + [-40, -20]
        b = rng.normal(0, 0.5, size=(6, 2)) + [40, 20]
        coords = np.vstack([a, b])
        powers = np.ones(12)
        res = kpm_standard(coords, powers, KpmConfig(seed=0), k=2)
        assert len(set(res.labels[:6])) == 1 and len(set(res.labels[6:])) == 1
        assert res.labels[0] != res.labels[6]
        # beats or matches every one of the 2^12 assignments (centroids from
        # the assignment's own weighted means)
        best = np.inf
        for code in range(2 ** 12):
            lab = np.array([(code >> i) & 1 for i in range(12)])
            if len(set(lab)) < 2:
                continue
            cents = np.array([coords[lab == j].mean(0) for j in (0, 1)])
            best = min(best, kpm_cost(coords, powers, cents, lab))
        assert res.cost <= best + 1e-9

    def test_cost_history_non_increasing(self, rng):
        for seed in range(6):
            coords = rng.uniform(-60, 60, size=(60, 2))
            powers = rng.random(60) + 0.05
            res = kpm_standard(coords, powers,
                               KpmConfig(seed=seed, restarts=1), k=4)
            assert all(b <= a + 1e-12 for a, b in
                       zip(res.cost_history, res.cost_history[1:]))

    def test_deterministic(self, rng):
        coords = rng.uniform(-60, 60, size=(50, 2))
        powers = rng.random(50)
        r1 = kpm_standard(coords, powers, KpmConfig(seed=9), k=3)
        r2 = kpm_standard(coords, powers, KpmConfig(seed=9), k=3)
        assert np.array_equal(r1.labels, r2.labels)
        assert np.array_equal(r1.centroids, r2.centroids)

    def test_full_run_power_scaling_invariance(self, rng):
        coords = rng.uniform(-60, 60, size=(40, 2))
        powers = rng.random(40) + 0.1
        r1 = kpm_standard(coords, powers, KpmConfig(seed=4), k=3)
        r2 = kpm_standard(coords, powers * 4.0, KpmConfig(seed=4), k=3)
        assert np.array_equal(r1.labels, r2.labels)

    def test_k_exceeding_points_rejected(self):
        with pytest.raises(ValueError):
            kpm_standard(np.zeros((3, 2)), np.ones(3), KpmConfig(), k=4)

    def test_k_required(self):
        with pytest.raises(ValueError):
            kpm_standard(np.zeros((3, 2)), np.ones(3), KpmConfig())

    def test_pas_wrapper_labels_every_pixel(self, rng):
        data = rng.random((9, 13)) + 0.01
        lab = kpm_standard_pas(make_pas(data), KpmConfig(seed=2, restarts=2), k=3)
        assert np.all(lab.labels > 0)
        assert lab.n_clusters == 3


def bump(shape, cy, cx, height, sigma=2.0):
    yy, xx = np.mgrid[0:shape[0], 0:shape[1]]
    return height * np.exp(-((yy - cy) ** 2 + (xx - cx) ** 2) / (2 * sigma ** 2))


class TestKpmModified:
    def test_single_bump_covers_support(self, rng):
        arr = bump((21, 21), 10, 10, 1000.0) + rng.exponential(0.5, (21, 21))
        res = kpm_modified(make_pas(arr))
        lab = res.labels
        assert lab.n_clusters == 1
        # everything above the threshold is in the one cluster
        assert np.all((lab.labels > 0) == (lab.labels >= 1))

    def test_two_bumps_split_along_argmin(self, rng):
        arr = (bump((21, 41), 10, 10, 1000.0) + bump((21, 41), 10, 30, 800.0)
               + rng.exponential(0.5, (21, 41)))
        res = kpm_modified(make_pas(arr))
        assert res.labels.n_clusters == 2
        assert res.centroids.shape == (2, 2)
        # positive pixels follow the nearest-centroid rule
        lab = res.labels.labels
        ys, xs = np.nonzero(lab)
        g = res.labels.grid
        az = g.az_angles()
        el = g.el_angles()
        for y, x in zip(ys[::7], xs[::7]):
            d = [mcd((az[x], el[y]), tuple(c)) for c in res.centroids]
            assert lab[y, x] == int(np.argmin(d)) + 1

    def test_below_threshold_stays_background(self, rng):
        arr = bump((21, 21), 10, 10, 1000.0) + rng.exponential(0.5, (21, 21))
        f = make_pas(arr)
        res = kpm_modified(f)
        from pascluster.morphology import despeckle_smooth
        sm = despeckle_smooth(f)
        cfg = KpmConfig()
        p_thre = power_threshold(otsu_background(sm), cfg.mu_snr_db, cfg.sigma_snr_db)
        assert np.all(res.labels.labels[sm.data < p_thre] == 0)

    def test_deterministic(self, rng):
        arr = bump((15, 15), 7, 7, 100.0) + rng.exponential(0.1, (15, 15))
        f = make_pas(arr)
        a = kpm_modified(f)
        b = kpm_modified(f)
        assert np.array_equal(a.labels.labels, b.labels.labels)

    def test_all_zero_rejected(self):
        with pytest.raises(ValueError):
            kpm_modified(make_pas(np.zeros((8, 8))))
