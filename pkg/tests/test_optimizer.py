import numpy as np
import pytest

from sgrouter.channel import Band, BandParams, ExponentialFading, HopLink, avg_snr, unit_power_snr
from sgrouter.optimizer import (
    Regime,
    RegimeViolation,
    Scenario,
    allocate_power,
    allocate_power_high_snr,
    allocate_power_low_snr,
    allocation_regime,
    equal_split_throughput,
    hop_cap,
    hop_cap_bound,
    hop_count_root,
    ideal_route,
    optimal_hop_count,
    stepwise_hop_count,
)


def rf_beta2(rf):
    return BandParams(
        band=Band.RF,
        gain=rf.gain,
        mean_additional_loss=rf.mean_additional_loss,
        noise_power=rf.noise_power,
        bandwidth=rf.bandwidth,
        fading=ExponentialFading(),
        pathloss_exponent=2.0,
    )


class TestLowSnrAllocation:
    def test_equal_distances_split_evenly(self, thz):
        s = allocate_power_low_snr(thz, [25.0] * 4, 2.0)
        assert np.allclose(s, 0.5)

    def test_beta2_two_to_one(self, rf):
        s = allocate_power_low_snr(rf_beta2(rf), [20.0, 10.0], 1.0)
        assert np.allclose(s, [2.0 / 3.0, 1.0 / 3.0], rtol=1e-12)

    def test_stationarity(self, thz, rng):
        dist = rng.uniform(10.0, 60.0, size=6)
        s = allocate_power_low_snr(thz, dist, 1.0)
        prod = unit_power_snr(thz, dist) * s**2  # avg_snr(r,s)*s = a s^2
        assert (prod.max() - prod.min()) / prod.mean() < 1e-9
        assert np.sum(s) == pytest.approx(1.0, rel=1e-12)


class TestHighSnrAllocation:
    def test_equal_distances_split_evenly(self, thz):
        s = allocate_power_high_snr(thz, [30.0] * 3, 1.0)
        assert np.allclose(s, 1.0 / 3.0, rtol=1e-9)

    def test_weaker_hop_gets_more_power(self, thz):
        s = allocate_power_high_snr(thz, [40.0, 25.0], 1.0)
        a = unit_power_snr(thz, np.array([40.0, 25.0]))
        assert a[0] < a[1] and s[0] > s[1]

    def test_stationarity_spread(self, thz, rng):
        dist = rng.uniform(15.0, 45.0, size=5)
        s = allocate_power_high_snr(thz, dist, 1.0)
        cond = np.log2(unit_power_snr(thz, dist) * s) * np.sqrt(s)
        assert (cond.max() - cond.min()) / cond.mean() < 1e-8
        assert np.sum(s) == pytest.approx(1.0, rel=1e-9)

    def test_beats_random_search(self, thz, rng):
        dist = rng.uniform(15.0, 45.0, size=5)
        a = unit_power_snr(thz, dist)
        s_opt = allocate_power_high_snr(thz, dist, 1.0)

        def objective(powers):
            tau = thz.bandwidth * np.log2(1.0 + a * powers)
            return 1.0 / np.sum(1.0 / tau, axis=-1)

        random_s = rng.dirichlet(np.ones(5), size=10**6)
        assert objective(s_opt[None, :])[0] >= objective(random_s).max()

    def test_regime_violation(self, thz):
        # 1 uW over two 80 m THz hops cannot reach SNR 1 anywhere
        with pytest.raises(RegimeViolation):
            allocate_power_high_snr(thz, [80.0, 80.0], 1e-6)

    def test_uniqueness_perturbation(self, thz, rng):
        # pushing any hop's power up while holding the stationarity constant
        # forces the budget above S
        from scipy.optimize import brentq

        for _ in range(10):
            dist = rng.uniform(15.0, 45.0, size=4)
            a = unit_power_snr(thz, dist)
            s = allocate_power_high_snr(thz, dist, 1.0)
            k = rng.integers(0, 4)
            c_new = np.log2(a[k] * s[k] * 1.001) * np.sqrt(s[k] * 1.001)
            total = 0.0
            for j in range(4):
                g = lambda x: np.log2(a[j] * x) * np.sqrt(x) - c_new
                total += brentq(g, 1.0 / a[j], 10.0)
            assert total > 1.0


class TestAllocationRegime:
    def test_dispatch(self, thz):
        # strong scenario -> high-SNR branch, starved scenario -> low-SNR
        s, regime = allocate_power(thz, [25.0] * 4, 1.0)
        assert regime is Regime.HIGH_SNR
        s, regime = allocate_power(thz, [25.0] * 4, 1e-4)
        assert regime is Regime.LOW_SNR
        assert np.sum(s) == pytest.approx(1e-4, rel=1e-12)

    def test_equal_distances_equal_powers_both_regimes(self, thz):
        for S in (1.0, 1e-4):
            s, _ = allocate_power(thz, [25.0] * 4, S)
            assert np.allclose(s, S / 4, rtol=1e-9)


class TestHopCount:
    def test_thz_matches_exhaustive(self, thz):
        sc = Scenario(thz, 100.0, 1.0, 1e-2)
        ks = np.arange(1, 201)
        ex = int(ks[np.argmax(equal_split_throughput(sc, ks))])
        assert optimal_hop_count(sc) == ex == 2

    def test_rf_matches_exhaustive(self, rf):
        sc = Scenario(rf, 1000.0, 1.0, 5e-4)
        ks = np.arange(1, 201)
        ex = int(ks[np.argmax(equal_split_throughput(sc, ks))])
        assert optimal_hop_count(sc) == ex == 1

    def test_root_below_one_clamps(self, rf):
        sc = Scenario(rf, 1000.0, 1.0, 5e-4)
        assert hop_count_root(sc) < 1.0
        assert optimal_hop_count(sc) == 1

    def test_runaway_root_returns_cap(self, thz):
        sc = Scenario(thz, 500.0, 1e-12, 1e-2)
        assert not np.isfinite(hop_count_root(sc))
        assert optimal_hop_count(sc) == hop_cap(1e-2, 500.0)

    def test_randomized_exhaustive_match(self, thz, rf, rng):
        for band, lam, r_rng in ((thz, 1e-2, (30, 300)), (rf, 5e-4, (200, 2000))):
            for _ in range(30):
                sc = Scenario(
                    band, rng.uniform(*r_rng), 10 ** (rng.uniform(-10, 40) / 10) / 1000, lam
                )
                ks = np.arange(1, 201)
                ex = int(ks[np.argmax(equal_split_throughput(sc, ks))])
                got = optimal_hop_count(sc)
                if got <= 200:
                    assert got == ex


class TestHopCap:
    def test_table1_case(self):
        assert hop_cap_bound(1e-2, 100.0, 0.01) == pytest.approx(4.1297, abs=1e-3)
        assert hop_cap(1e-2, 100.0, 0.01) == 4

    def test_low_density_clamps_to_one(self):
        assert hop_cap(1e-9, 100.0, 0.01) == 1

    def test_sqrt_scaling(self):
        b1 = hop_cap_bound(1e-3, 200.0, 0.01)
        b4 = hop_cap_bound(4e-3, 200.0, 0.01)
        assert b4 == pytest.approx(2.0 * b1, rel=1e-12)

    def test_strictly_below_bound(self):
        # integer bound: largest K with K < bound, even when bound is integral
        lam = 4.0 * np.log(100.0) * 9.0 / (np.pi * 100.0**2)  # bound exactly 3
        assert hop_cap_bound(lam, 100.0, 0.01) == pytest.approx(3.0)
        assert hop_cap(lam, 100.0, 0.01) == 2

    def test_epsilon_domain(self):
        with pytest.raises(ValueError):
            hop_cap(1e-2, 100.0, 0.0)
        with pytest.raises(ValueError):
            hop_cap(1e-2, 100.0, 1.0)


class TestIdealRoute:
    def test_single_hop_bound(self, rf):
        sc = Scenario(rf, 1000.0, 1.0, 5e-4)
        plan, bound = ideal_route(sc)
        assert plan.hop_count == 1
        from sgrouter.channel import hop_throughput_avg

        assert bound == pytest.approx(hop_throughput_avg(rf, HopLink(1000.0, 1.0)))

    def test_equal_split_plan(self, thz):
        sc = Scenario(thz, 100.0, 1.0, 1e-2)
        plan, bound = ideal_route(sc)
        assert plan.hop_count == 2
        assert np.allclose(plan.hop_distances, 50.0)
        assert np.allclose(plan.hop_powers, 0.5)
        assert bound == pytest.approx(equal_split_throughput(sc, 2))

    def test_unimodal_scan(self, thz):
        sc = Scenario(thz, 100.0, 1.0, 1e-2)
        k_star = optimal_hop_count(sc)
        vals = equal_split_throughput(sc, np.arange(1, 3 * k_star + 1))
        peak = int(np.argmax(vals))
        assert np.all(np.diff(vals[: peak + 1]) > 0)
        assert np.all(np.diff(vals[peak:]) < 0)

    def test_stepwise_clamps_by_cap(self, thz):
        sc = Scenario(thz, 100.0, 1e-4, 1e-2)
        assert optimal_hop_count(sc) > 4
        assert stepwise_hop_count(sc) == 4
