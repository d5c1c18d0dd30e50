"""Serial dimension test, distance metric, decision tree, bound, and flops."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from sfbcid import waveform as wf
from sfbcid.classifier import (
    LEVEL1_BRANCHES,
    LEVEL2_MEMBERS,
    DetectorConfig,
    FeatureVector,
    IdentificationResult,
    SubsetDecision,
    distance,
    estimate_dimension,
    feature_vector,
    flops,
    identify,
    level1_decision,
    level1_indices,
    level2_decision,
    level2_indices,
    upper_bound,
)
from sfbcid.codebook import SCHEMES, template
from sfbcid.rmt import threshold_table
from sfbcid.subspace import TestStatistics as UStats
from sfbcid.subspace import pair_covariance, statistics


def received(scheme_name, snr_db, *, n_fft=32, n_rx=4, n_b=100, seed=0,
             modulation="4-PSK"):
    """One propagated grid; cp_len=10 keeps the 6-tap channel inside the CP."""
    cfg = wf.OfdmConfig(n_fft=n_fft, cp_len=10, n_rx=n_rx, n_symbols=n_b)
    rng = np.random.default_rng(seed)
    sch = SCHEMES[scheme_name]
    ch = wf.draw_channel(cfg, sch.n_t, rng)
    tx = wf.transmit(sch, cfg, modulation, rng)
    return wf.propagate(tx, ch, snr_db, wf.Impairments(), rng)


def noise_grid(rng, n_b, n_fft, n_rx):
    shape = (n_b, n_fft, n_rx)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


class TestDetectorConfig:
    def test_valid(self):
        cfg = DetectorConfig(pr_f=1e-4, n_r=8, n_b=100, n_fft=128)
        assert cfg.n_fft == 128

    @pytest.mark.parametrize("pr_f", [0.0, 0.5, 0.7, -0.1])
    def test_pr_f_out_of_range(self, pr_f):
        with pytest.raises(ValueError, match="pr_f"):
            DetectorConfig(pr_f=pr_f, n_r=8, n_b=100, n_fft=128)

    def test_too_few_antennas(self):
        with pytest.raises(ValueError, match="antennas"):
            DetectorConfig(pr_f=0.01, n_r=3, n_b=100, n_fft=128)

    def test_too_few_symbols(self):
        with pytest.raises(ValueError, match="symbols"):
            DetectorConfig(pr_f=0.01, n_r=4, n_b=1, n_fft=128)

    @pytest.mark.parametrize("n_fft", [12, 4, 0, 100])
    def test_bad_fft_size(self, n_fft):
        with pytest.raises(ValueError, match="power of two"):
            DetectorConfig(pr_f=0.01, n_r=4, n_b=100, n_fft=n_fft)


class TestEstimateDimension:
    CFG = DetectorConfig(pr_f=0.01, n_r=4, n_b=100, n_fft=32)

    def gammas(self):
        return threshold_table(self.CFG.n_r, self.CFG.n_b, self.CFG.pr_f)

    def test_first_acceptance_wins(self):
        g = self.gammas()
        u = (g + 1.0) / self.CFG.n_b  # reject everywhere ...
        u[4] = g[4] / self.CFG.n_b * 0.999  # ... except q=5
        assert estimate_dimension(UStats(u=u), self.CFG) == 4
        u[2] = g[2] / self.CFG.n_b * 0.999  # earlier acceptance shadows it
        assert estimate_dimension(UStats(u=u), self.CFG) == 2

    def test_boundary_equality_accepts(self):
        # power-of-two n_b so n_b * (gamma / n_b) reproduces gamma exactly
        cfg = DetectorConfig(pr_f=0.01, n_r=4, n_b=128, n_fft=32)
        g = threshold_table(cfg.n_r, cfg.n_b, cfg.pr_f)
        u = (g + 1.0) / cfg.n_b
        u[0] = g[0] / cfg.n_b  # exactly on the threshold
        assert estimate_dimension(UStats(u=u), cfg) == 0

    def test_saturation(self):
        u = (self.gammas() + 1.0) / self.CFG.n_b
        assert estimate_dimension(UStats(u=u), self.CFG) == 15

    def test_length_mismatch_rejected(self):
        stats = UStats(u=np.ones(31))
        with pytest.raises(ValueError, match="candidate dimensions"):
            estimate_dimension(stats, self.CFG)

    def test_agrees_with_covariance_path(self):
        rng = np.random.default_rng(5)
        grid = noise_grid(rng, 100, 32, 4)
        cov = pair_covariance(grid, 7)
        q = estimate_dimension(statistics(cov), self.CFG)
        accept = self.CFG.n_b * statistics(cov).u <= self.gammas()
        expected = int(np.argmax(accept)) if accept.any() else 15
        assert q == expected


class TestFeatureVector:
    CFG = DetectorConfig(pr_f=0.01, n_r=4, n_b=50, n_fft=32)

    def per_pair(self, grid, indices):
        return {
            k: estimate_dimension(statistics(pair_covariance(grid, k)), self.CFG)
            for k in indices
        }

    def test_matches_per_pair_path_on_noise(self):
        rng = np.random.default_rng(11)
        grid = noise_grid(rng, 50, 32, 4)
        fv = feature_vector(grid, self.CFG, range(1, 32))
        assert fv.entries == self.per_pair(grid, range(1, 32))

    def test_matches_per_pair_path_on_signal(self):
        # moderate SNR so the estimates span several values, not one
        grid = received("AL", 5.0, n_b=50, seed=3)
        fv = feature_vector(grid, self.CFG, range(1, 32))
        assert fv.entries == self.per_pair(grid, range(1, 32))
        assert len(set(fv.entries.values())) > 1

    def test_only_requested_indices(self):
        rng = np.random.default_rng(2)
        grid = noise_grid(rng, 50, 32, 4)
        fv = feature_vector(grid, self.CFG, [3, 9, 20])
        assert sorted(fv.entries) == [3, 9, 20]
        assert all(0 <= q <= 15 for q in fv.entries.values())

    def test_shape_mismatch_rejected(self):
        rng = np.random.default_rng(2)
        with pytest.raises(ValueError, match="does not match"):
            feature_vector(noise_grid(rng, 50, 64, 4), self.CFG, [1])
        with pytest.raises(ValueError, match="n_symbols"):
            feature_vector(np.zeros((50, 32)), self.CFG, [1])

    def test_bad_indices_rejected(self):
        rng = np.random.default_rng(2)
        grid = noise_grid(rng, 50, 32, 4)
        with pytest.raises(ValueError, match="no pair"):
            feature_vector(grid, self.CFG, [])
        for bad in ([0], [32]):
            with pytest.raises(IndexError):
                feature_vector(grid, self.CFG, bad)

    def test_zero_grid_rejected(self):
        with pytest.raises(ValueError, match="all eigenvalues zero"):
            feature_vector(np.zeros((50, 32, 4), complex), self.CFG, [1, 5])


class TestCalibration:
    def test_pure_noise_false_alarm_rate(self):
        # disjoint odd pairs of a white grid: every estimate is a fresh
        # H0 sample, so Pr{q_hat >= 1} must track pr_f
        cfg = DetectorConfig(pr_f=0.01, n_r=4, n_b=100, n_fft=64)
        rng = np.random.default_rng(0)
        hits = n = 0
        for _ in range(300):
            grid = noise_grid(rng, 100, 64, 4)
            for q in feature_vector(grid, cfg, level1_indices(64)).entries.values():
                hits += q >= 1
                n += 1
        rate = hits / n
        sigma = np.sqrt(0.01 * 0.99 / n)
        assert abs(rate - 0.01) < 4 * sigma

    def test_al_odd_pairs_high_snr(self):
        # four signal dimensions at odd pairs; at SNR 10 dB with 400
        # symbols the serial test should recover all of them essentially
        # every time
        cfg = DetectorConfig(pr_f=1e-4, n_r=8, n_b=400, n_fft=16)
        qs = []
        for seed in range(60):
            grid = received("AL", 10.0, n_fft=16, n_rx=8, n_b=400, seed=seed)
            qs.extend(feature_vector(grid, cfg, level1_indices(16)).entries.values())
        qs = np.asarray(qs)
        assert np.mean(qs == 4) >= 0.98

    def test_low_snr_skews_toward_underestimation(self):
        # weak signal eigenvalues sink into the noise bulk, so misses at
        # q=3 must dominate false extra dimensions at q=5
        cfg = DetectorConfig(pr_f=1e-4, n_r=8, n_b=400, n_fft=16)
        qs = []
        for seed in range(120):
            grid = received("AL", -7.0, n_fft=16, n_rx=8, n_b=400, seed=seed)
            qs.extend(feature_vector(grid, cfg, level1_indices(16)).entries.values())
        qs = np.asarray(qs)
        threes = int(np.sum(qs == 3))
        fives = int(np.sum(qs == 5))
        assert threes > 5 * fives
        assert threes >= 5


class TestDistance:
    def fv(self, indices, values):
        if np.isscalar(values):
            values = [values] * len(indices)
        return FeatureVector(entries=dict(zip(indices, values)))

    def test_perfect_match_scores_correction_not_zero(self):
        idx = list(range(1, 128, 2))
        d = distance(self.fv(idx, 4), 4, idx, 128, 1e-4)
        assert d == 1

    def test_single_overestimate_cancels_correction(self):
        idx = list(range(1, 128, 2))
        vals = [4] * len(idx)
        vals[17] = 5
        assert distance(self.fv(idx, vals), 4, idx, 128, 1e-4) == 0

    def test_underestimates_never_count(self):
        idx = list(range(1, 128, 2))
        rng = np.random.default_rng(9)
        vals = rng.integers(0, 4, size=len(idx))  # all strictly below 4
        assert distance(self.fv(idx, list(vals)), 4, idx, 128, 1e-4) == 1

    def test_correction_uses_full_fft_size(self):
        # 64 sampled indices but the correction is ceil(128 * 0.1) = 13
        idx = list(range(1, 128, 2))
        assert distance(self.fv(idx, 4), 4, idx, 128, 0.1) == 13

    def test_per_pair_template_targets(self):
        tpl = template(SCHEMES["AL"], 16)  # alternating 4, 8
        idx = list(range(1, 16))
        vals = [tpl.q[k - 1] for k in idx]
        assert distance(self.fv(idx, vals), tpl, idx, 16, 1e-4) == 1
        vals[0] += 1
        assert distance(self.fv(idx, vals), tpl, idx, 16, 1e-4) == 0

    def test_missing_index_is_an_error(self):
        with pytest.raises(KeyError):
            distance(self.fv([1, 3], 4), 4, [1, 3, 5], 128, 1e-4)

    @given(st.data())
    @settings(max_examples=50, deadline=None)
    def test_deepening_underestimates_never_changes_d(self, data):
        idx = list(range(1, 32, 2))
        vals = data.draw(
            st.lists(st.integers(0, 15), min_size=len(idx), max_size=len(idx))
        )
        d0 = distance(self.fv(idx, vals), 8, idx, 32, 0.01)
        deeper = [
            data.draw(st.integers(0, v)) if v <= 8 else v for v in vals
        ]
        assert distance(self.fv(idx, deeper), 8, idx, 32, 0.01) == d0


class TestIndices:
    def test_level1_is_every_odd_pair(self):
        assert list(level1_indices(16)) == [1, 3, 5, 7, 9, 11, 13, 15]
        assert len(level1_indices(128)) == 64

    @pytest.mark.parametrize(
        "subset,n_fft,expected",
        [
            ("SFC1", 16, [2, 4, 6, 8, 10, 12, 14]),
            ("SFC2", 16, [4, 8, 12]),
            ("SFC3", 16, [8]),
            ("SFC1", 128, list(range(2, 127, 2))),
            ("SFC2", 128, list(range(4, 125, 4))),
            ("SFC3", 128, list(range(8, 121, 8))),
        ],
    )
    def test_level2_index_sets(self, subset, n_fft, expected):
        assert list(level2_indices(subset, n_fft)) == expected

    def test_level2_counts(self):
        assert len(level2_indices("SFC1", 128)) == 63
        assert len(level2_indices("SFC2", 128)) == 31
        assert len(level2_indices("SFC3", 128)) == 15

    def test_leaf_has_no_level2(self):
        with pytest.raises(ValueError, match="SM3"):
            level2_indices("SM3", 128)


class TestDecisionLevels:
    """Tree arithmetic on synthetic, perfectly estimated feature vectors."""

    CFG = DetectorConfig(pr_f=1e-4, n_r=4, n_b=100, n_fft=32)

    def perfect(self, scheme_name, indices):
        tpl = template(SCHEMES[scheme_name], 32)
        return FeatureVector(entries={k: int(tpl.q[k - 1]) for k in indices})

    @pytest.mark.parametrize(
        "scheme_name,expected_subset",
        [
            ("SA", "SFC1"),
            ("AL", "SFC1"),
            ("SM2", "SFC3"),
            ("SFBC1", "SFC3"),
            ("SFBC2", "SFC2"),
            ("SFBC3", "SFC2"),
            ("SM3", "SM3"),
        ],
    )
    def test_level1_subset(self, scheme_name, expected_subset):
        fv = self.perfect(scheme_name, level1_indices(32))
        decision = level1_decision(fv, self.CFG)
        assert decision.chosen == expected_subset
        assert decision.tested_pairs == 16
        assert set(decision.distances) == {name for name, _ in LEVEL1_BRANCHES}

    def test_level1_tie_breaks_to_smallest_template(self):
        # constant 4 fits SFC1 exactly and undershoots all others, so
        # every branch scores the same d = 1; smallest template wins
        fv = self.perfect("SA", level1_indices(32))
        decision = level1_decision(fv, self.CFG)
        assert all(d == 1 for d in decision.distances.values())
        assert decision.chosen == "SFC1"

    @pytest.mark.parametrize(
        "scheme_name,subset",
        [
            ("SA", "SFC1"),
            ("AL", "SFC1"),
            ("SM2", "SFC3"),
            ("SFBC1", "SFC3"),
            ("SFBC2", "SFC2"),
            ("SFBC3", "SFC2"),
        ],
    )
    def test_level2_member(self, scheme_name, subset):
        fv = self.perfect(scheme_name, level2_indices(subset, 32))
        decision = level2_decision(subset, fv, self.CFG)
        assert decision.chosen == scheme_name
        assert set(decision.distances) == set(LEVEL2_MEMBERS[subset])

    def test_smallest_fft_cannot_separate_the_largest_pair(self):
        # with n_fft=16 the SFC3 level tests a single pair while the
        # correction still expects ceil(16 * pr_f) = 1 overestimate, so a
        # perfectly estimated 12 at pair 8 scores better against the
        # 8-template than against its own; the tree needs n_fft >= 32 to
        # tell these two schemes apart
        cfg16 = DetectorConfig(pr_f=1e-4, n_r=4, n_b=100, n_fft=16)
        fv = FeatureVector(entries={8: 12})
        decision = level2_decision("SFC3", fv, cfg16)
        assert decision.distances == {"SM2": 0, "SFBC1": 1}
        assert decision.chosen == "SM2"


class TestIdentify:
    CFG = DetectorConfig(pr_f=1e-4, n_r=4, n_b=100, n_fft=32)
    EXPECTED_SUBSET = {
        "SA": "SFC1",
        "SM2": "SFC3",
        "SM3": "SM3",
        "AL": "SFC1",
        "SFBC1": "SFC3",
        "SFBC2": "SFC2",
        "SFBC3": "SFC2",
    }

    @pytest.mark.parametrize("scheme_name", list(SCHEMES))
    def test_end_to_end_high_snr(self, scheme_name):
        grid = received(scheme_name, 40.0, seed=100 + list(SCHEMES).index(scheme_name))
        result = identify(grid, self.CFG)
        assert result.scheme.name == scheme_name
        assert result.level1.chosen == self.EXPECTED_SUBSET[scheme_name]
        assert result.level1.tested_pairs == 16
        if scheme_name == "SM3":
            assert result.level2 is None
        else:
            assert result.level2 is not None
            assert result.level2.chosen == scheme_name

    def test_grid_too_small(self):
        cfg = DetectorConfig(pr_f=1e-4, n_r=4, n_b=100, n_fft=8)
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError, match="n_fft >= 16"):
            identify(noise_grid(rng, 100, 8, 4), cfg)

    @pytest.mark.parametrize("alpha", [3.7, 1e-3])
    def test_scale_invariance(self, alpha):
        grid = received("AL", 3.0, seed=42)
        base = identify(grid, self.CFG)
        scaled = identify(alpha * np.asarray(grid.y), self.CFG)
        assert scaled.scheme.name == base.scheme.name
        assert scaled.level1 == base.level1
        assert scaled.level2 == base.level2

    def test_deterministic(self):
        grid = received("SFBC2", 6.0, seed=8)
        assert identify(grid, self.CFG) == identify(grid, self.CFG)


class TestUpperBound:
    def test_zero_overestimation_is_certain(self):
        assert upper_bound(0.0, 64, 128, 1e-4) == 1.0

    def test_certain_overestimation_is_hopeless(self):
        assert upper_bound(1.0, 64, 128, 1e-4) == 0.0

    def test_matches_binomial_cdf(self):
        from math import ceil

        for pr_o in (1e-3, 0.1, 0.5, 0.9):
            for k in (1, 5, 64):
                for pr_f in (1e-4, 0.01, 0.2):
                    cap = min(ceil(128 * pr_f), k)
                    want = sps.binom.cdf(cap, k, pr_o)
                    assert upper_bound(pr_o, k, 128, pr_f) == pytest.approx(
                        want, rel=1e-12
                    )

    def test_documented_point(self):
        # K=64 and a correction of 1: only the 0- and 1-overestimate terms
        want = sps.binom.cdf(1, 64, 1e-3)
        assert upper_bound(1e-3, 64, 128, 1e-4) == pytest.approx(want, rel=1e-12)

    def test_nonincreasing_in_pr_o(self):
        vals = [upper_bound(p, 64, 128, 1e-2) for p in np.linspace(0, 1, 21)]
        assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))

    def test_saturates_when_correction_covers_all_tests(self):
        assert upper_bound(0.3, 5, 128, 0.2) == pytest.approx(1.0, abs=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError, match="pr_o"):
            upper_bound(-0.1, 64, 128, 1e-4)
        with pytest.raises(ValueError, match="pr_o"):
            upper_bound(1.1, 64, 128, 1e-4)
        with pytest.raises(ValueError, match="k_tests"):
            upper_bound(0.5, 0, 128, 1e-4)


class TestFlops:
    @pytest.mark.parametrize(
        "algorithm,n_fft,n_r,n_b,expected",
        [
            ("proposed", 128, 4, 100, 5_308_416),
            ("proposed", 64, 8, 100, 11_403_264),
            ("proposed", 128, 8, 50, 12_976_128),
            ("proposed", 128, 8, 100, 22_806_528),
            ("ref19", 128, 4, 100, 5_299_200),
            ("ref19", 64, 8, 100, 13_260_800),
            ("ref19", 128, 8, 50, 12_364_800),
            ("ref19", 128, 8, 100, 24_729_600),
            ("ref20", 128, 4, 100, 7_077_888),
            ("ref20", 64, 8, 100, 15_204_352),
            ("ref20", 128, 8, 50, 17_301_504),
            ("ref20", 128, 8, 100, 30_408_704),
        ],
    )
    def test_tabulated_counts(self, algorithm, n_fft, n_r, n_b, expected):
        assert flops(algorithm, n_fft, n_r, n_b) == expected

    def test_antenna_pair_count_override(self):
        assert flops("ref19", 128, 8, 100) == flops(
            "ref19", 128, 8, 100, card_xi=28
        )
        assert flops("ref19", 128, 8, 100, card_xi=1) == 8 * 100 * 138 * 8

    def test_unknown_algorithm(self):
        with pytest.raises(ValueError, match="unknown algorithm"):
            flops("mystery", 128, 8, 100)

    def test_bad_dimensions(self):
        with pytest.raises(ValueError):
            flops("proposed", 0, 8, 100)
        with pytest.raises(ValueError):
            flops("proposed", 128, 8, 100, cp_len=-1)
