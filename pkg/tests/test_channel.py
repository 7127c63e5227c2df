import numpy as np
import pytest

from pascluster import (AngularGrid, AntennaModel, ChannelParams, NoiseSpec,
                        PasMap, add_noise_speckles, antenna_gain,
                        antenna_gain_db, cluster_fields, generate_channel,
                        grid_for_shape, spatial_snr_stats, synthesize_pas)
from pascluster.channel import ChannelCluster, ChannelRealization, Ray

GRID = AngularGrid(-60, 1, 121, -30, 1, 61)
PARAMS = ChannelParams(az_range=(-60, 60), el_range=(-30, 30))


class TestGenerate:
    def test_single_ray_at_cluster_mean(self):
        p = ChannelParams(n_clusters=1, poisson_clusters=False, rays_per_cluster=1,
                          intra_cluster_spread_deg=1e-9, los=False, seed=5,
                          az_range=(-60, 60), el_range=(-30, 30))
        ch = generate_channel(p)
        assert ch.n_clusters == 1
        ray = ch.clusters[0].rays[0]
        assert ray.az == pytest.approx(ch.clusters[0].mean_az, abs=1e-6)
        assert ray.el == pytest.approx(ch.clusters[0].mean_el, abs=1e-6)

    def test_same_seed_identical(self):
        a = generate_channel(PARAMS)
        b = generate_channel(PARAMS)
        assert a == b

    def test_different_seed_differs(self):
        from dataclasses import replace
        a = generate_channel(PARAMS)
        b = generate_channel(replace(PARAMS, seed=1))
        assert a != b

    def test_los_cluster_at_boresight(self):
        ch = generate_channel(PARAMS)
        assert ch.clusters[0].mean_az == 0.0 and ch.clusters[0].mean_el == 0.0

    def test_ray_offsets_match_laplacian_scale(self):
        from dataclasses import replace
        # wide ranges so clipping cannot bias the spread estimate
        base = ChannelParams(n_clusters=3, rays_per_cluster=8, los=False,
                             intra_cluster_spread_deg=2.0,
                             az_range=(-150, 150), el_range=(-75, 75))
        offs = []
        for seed in range(1000):
            ch = generate_channel(replace(base, seed=seed))
            for cl in ch.clusters:
                for r in cl.rays:
                    offs.append(r.az - cl.mean_az)
                    offs.append(r.el - cl.mean_el)
        # mean absolute deviation of a Laplacian equals its scale
        assert np.mean(np.abs(offs)) == pytest.approx(2.0, rel=0.05)

    def test_angles_respect_ranges(self):
        from dataclasses import replace
        for seed in range(20):
            ch = generate_channel(replace(PARAMS, seed=seed,
                                          intra_cluster_spread_deg=10.0))
            for r in ch.all_rays():
                assert -60 <= r.az <= 60
                assert -30 <= r.el <= 30


class TestAntennaGain:
    def test_boresight(self):
        m = AntennaModel(beamwidth_deg=5.0, max_gain_db=25.0)
        assert antenna_gain_db(0.0, m) == 25.0
        assert antenna_gain(0.0, m) == pytest.approx(316.2277660168379)

    def test_half_beamwidth_is_3db_down(self):
        m = AntennaModel(beamwidth_deg=10.0)
        assert antenna_gain_db(5.0, m) == pytest.approx(m.max_gain_db - 3.0)

    def test_full_beamwidth_is_12db_down(self):
        m = AntennaModel(beamwidth_deg=10.0)
        assert antenna_gain_db(10.0, m) == pytest.approx(m.max_gain_db - 12.0)

    def test_beamwidth_bounds(self):
        with pytest.raises(ValueError):
            AntennaModel(beamwidth_deg=0.5)


class TestSynthesize:
    def test_single_ray_peak_and_halfpower(self):
        ray = Ray(10.0, 5.0, 1.0)
        ch = ChannelRealization((ChannelCluster(10.0, 5.0, (ray,)),))
        ant = AntennaModel(beamwidth_deg=5.0, max_gain_db=25.0)
        f = synthesize_pas(ch, ant, GRID)
        iy, ix = 5 + 30, 10 + 60
        assert f.data[iy, ix] == pytest.approx(antenna_gain(0.0, ant))
        assert np.unravel_index(np.argmax(f.data), f.data.shape) == (iy, ix)
        off = f.data[iy, ix + 3]  # 3 degrees off in azimuth
        assert 10 * np.log10(f.data[iy, ix] / off) == pytest.approx(
            3.0 * (2 * 3 / 5.0) ** 2)

    def test_superposition(self):
        c1 = ChannelCluster(-20.0, 0.0, (Ray(-20.0, 0.0, 2.0),))
        c2 = ChannelCluster(30.0, 10.0, (Ray(30.0, 10.0, 1.0),))
        ant = AntennaModel(beamwidth_deg=8.0)
        both = synthesize_pas(ChannelRealization((c1, c2)), ant, GRID)
        one = synthesize_pas(ChannelRealization((c1,)), ant, GRID)
        two = synthesize_pas(ChannelRealization((c2,)), ant, GRID)
        assert np.allclose(both.data, one.data + two.data, rtol=1e-12)

    def test_matches_per_ray_oracle(self):
        ch = generate_channel(PARAMS)
        ant = AntennaModel(beamwidth_deg=10.0)
        f = synthesize_pas(ch, ant, GRID)
        az = GRID.az_angles()
        el = GRID.el_angles()
        expect = np.zeros(GRID.shape)
        for ray in ch.all_rays():
            for i, e in enumerate(el):
                for j, a in enumerate(az):
                    off = np.hypot(a - ray.az, e - ray.el)
                    expect[i, j] += ray.power * 10 ** (
                        (ant.max_gain_db - 3 * (2 * off / ant.beamwidth_deg) ** 2) / 10)
        assert np.allclose(f.data, expect, rtol=1e-9)

    def test_cluster_fields_sum_to_total(self):
        ch = generate_channel(PARAMS)
        ant = AntennaModel(beamwidth_deg=10.0)
        f = synthesize_pas(ch, ant, GRID)
        fields = cluster_fields(ch, ant, GRID)
        assert len(fields) == ch.n_clusters
        assert np.allclose(np.sum(fields, axis=0), f.data, rtol=1e-12)

    def test_ray_outside_grid_rejected(self):
        ch = ChannelRealization((ChannelCluster(0, 0, (Ray(100.0, 0.0, 1.0),)),))
        with pytest.raises(ValueError):
            synthesize_pas(ch, AntennaModel(), GRID)


def clean_map(seed=0):
    ch = generate_channel(ChannelParams(seed=seed, az_range=(-60, 60),
                                        el_range=(-30, 30)))
    return synthesize_pas(ch, AntennaModel(beamwidth_deg=10.0), GRID)


class TestNoise:
    def test_no_noise_identity(self):
        f = clean_map()
        out = add_noise_speckles(f, NoiseSpec(snr_db=np.inf, n_speckles=0), seed=0)
        assert np.array_equal(out.data, f.data)

    def test_exact_speckle_count(self):
        f = clean_map()
        out = add_noise_speckles(f, NoiseSpec(snr_db=20.0, n_speckles=100), seed=1)
        assert (out.data == f.data.max()).sum() == 100

    def test_measured_snr_in_band(self):
        f = clean_map()
        means = []
        for seed in range(50):
            noisy = add_noise_speckles(f, NoiseSpec(snr_db=20.0, n_speckles=0), seed)
            mean_db, _ = spatial_snr_stats(f, noisy)
            means.append(mean_db)
        assert all(18.0 <= m <= 24.0 for m in means)

    def test_deterministic(self):
        f = clean_map()
        a = add_noise_speckles(f, NoiseSpec(), seed=3)
        b = add_noise_speckles(f, NoiseSpec(), seed=3)
        assert np.array_equal(a.data, b.data)

    def test_too_many_speckles_rejected(self):
        f = PasMap(grid_for_shape((3, 3)), np.ones((3, 3)))
        with pytest.raises(ValueError):
            add_noise_speckles(f, NoiseSpec(n_speckles=10), seed=0)
