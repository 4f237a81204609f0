from collections import Counter

import numpy as np
import pytest

from dppcluster import (
    BaselineConfig,
    ConfigError,
    DegenerateData,
    GeneratorSet,
    ResampleExhausted,
    RngStream,
    SpectralDecomposition,
    default_k_max,
    dpp_log_likelihood,
    kmeanspp_init,
    sample_dpp,
    sample_uniform,
)
from dppcluster.sampling import kmeanspp_indices
from oracles import enumerate_dpp_probs


class TestSampleDpp:
    def test_identity_kernel_uniform_over_subsets(self):
        # L = I: every point enters independently with probability 1/2
        spec = SpectralDecomposition(np.ones(3), np.eye(3))
        stream = RngStream(0, 0)
        n_draws = 60_000
        counts = Counter()
        for _ in range(n_draws):
            counts[frozenset(sample_dpp(spec, stream, min_size=0).indices)] += 1
        for subset, c in counts.items():
            assert c / n_draws == pytest.approx(1 / 8, abs=0.01)
        assert len(counts) == 8

    def test_law_matches_enumeration(self, small_kernel_artifacts):
        arts = small_kernel_artifacts
        probs = enumerate_dpp_probs(np.asarray(arts.kernel))
        stream = RngStream(5, 0)
        n_draws = 40_000
        counts = Counter()
        for _ in range(n_draws):
            counts[frozenset(sample_dpp(arts.spectral, stream, min_size=0).indices)] += 1
        tv = 0.5 * sum(abs(counts.get(s, 0) / n_draws - p) for s, p in probs.items())
        assert tv <= 0.02

    def test_negative_association_exact(self, small_kernel_artifacts):
        # P({i,j} in Y) <= P(i in Y) P(j in Y), from the enumerated law
        probs = enumerate_dpp_probs(np.asarray(small_kernel_artifacts.kernel))
        n = 5
        single = np.zeros(n)
        joint = np.zeros((n, n))
        for s, p in probs.items():
            for i in s:
                single[i] += p
                for j in s:
                    if i != j:
                        joint[i, j] += p
        for i in range(n):
            for j in range(i + 1, n):
                assert joint[i, j] <= single[i] * single[j] + 1e-12

    def test_min_size_rejection(self, small_kernel_artifacts):
        stream = RngStream(9, 0)
        for _ in range(200):
            gens = sample_dpp(small_kernel_artifacts.spectral, stream, min_size=2)
            assert len(gens) >= 2

    def test_resample_exhausted_on_null_spectrum(self):
        spec = SpectralDecomposition(np.zeros(4), np.eye(4))
        with pytest.raises(ResampleExhausted):
            sample_dpp(spec, RngStream(0, 0), min_size=2, max_attempts=50)

    def test_determinism_across_streams(self, small_kernel_artifacts):
        spec = small_kernel_artifacts.spectral
        first = sample_dpp(spec, RngStream(123, 7))
        # interleave other streams, then redraw stream 7 from scratch
        for sid in range(5):
            sample_dpp(spec, RngStream(123, sid))
        again = sample_dpp(spec, RngStream(123, 7))
        assert first.indices == again.indices

    def test_indices_distinct_and_in_range(self, small_kernel_artifacts):
        stream = RngStream(4, 2)
        for _ in range(300):
            gens = sample_dpp(small_kernel_artifacts.spectral, stream, min_size=0)
            assert len(set(gens.indices)) == len(gens.indices)
            assert all(0 <= i < 5 for i in gens.indices)


class TestLogLikelihood:
    def test_identity_kernel_singleton(self):
        assert dpp_log_likelihood(np.eye(2), GeneratorSet((0,), "dpp")) == pytest.approx(
            -np.log(4.0)
        )

    def test_duplicate_points_give_minus_inf(self):
        x = np.array([[0.0, 0.0], [0.0, 0.0], [5.0, 5.0]])
        from dppcluster import BandwidthConfig, build_rbf_kernel

        k = build_rbf_kernel(x, BandwidthConfig(1.0))
        assert dpp_log_likelihood(k, (0, 1)) == float("-inf")

    def test_power_set_normalization(self, small_kernel_artifacts):
        L = np.asarray(small_kernel_artifacts.kernel)
        norm = small_kernel_artifacts.log_det_norm
        total = 0.0
        import itertools

        for r in range(6):
            for sub in itertools.combinations(range(5), r):
                total += np.exp(dpp_log_likelihood(L, sub, log_det_norm=norm))
        assert total == pytest.approx(1.0, abs=1e-9)

    def test_empty_subset(self, small_kernel_artifacts):
        L = np.asarray(small_kernel_artifacts.kernel)
        val = dpp_log_likelihood(L, ())
        assert val == pytest.approx(-small_kernel_artifacts.log_det_norm)


class TestSampleUniform:
    def test_kmax_two_always_pairs(self):
        stream = RngStream(0, 1)
        counts = Counter()
        n_draws = 30_000
        for _ in range(n_draws):
            gens = sample_uniform(5, BaselineConfig(2), stream)
            assert len(gens) == 2
            counts[frozenset(gens.indices)] += 1
        assert len(counts) == 10
        for c in counts.values():
            assert c / n_draws == pytest.approx(1 / 10, abs=0.01)

    def test_size_law(self):
        # k ~ U{2, 3}: sizes 2 and 3 each with probability 1/2
        stream = RngStream(1, 0)
        n_draws = 100_000
        sizes = Counter(len(sample_uniform(5, BaselineConfig(3), stream)) for _ in range(n_draws))
        assert sizes[2] / n_draws == pytest.approx(0.5, abs=0.01)
        assert sizes[3] / n_draws == pytest.approx(0.5, abs=0.01)

    def test_indices_distinct(self):
        stream = RngStream(2, 0)
        for _ in range(500):
            gens = sample_uniform(20, BaselineConfig(10), stream)
            assert len(set(gens.indices)) == len(gens.indices)

    def test_kmax_exceeding_n_rejected(self):
        with pytest.raises(ConfigError):
            sample_uniform(3, BaselineConfig(10), RngStream(0, 0))


class TestKmeansppInit:
    def test_k_one_returns_single_point(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=(10, 2))
        centers = kmeanspp_init(x, 1, RngStream(0, 0))
        assert centers.shape == (1, 2)
        assert any(np.array_equal(centers[0], row) for row in x)

    def test_duplicate_pairs_forces_opposite_pick(self):
        x = np.array([[0.0, 0.0], [0.0, 0.0], [10.0, 10.0], [10.0, 10.0]])
        for seed in range(20):
            centers = kmeanspp_init(x, 2, RngStream(seed, 0))
            # second center must come from the opposite duplicate pair
            assert not np.array_equal(centers[0], centers[1])

    def test_k_equals_n_exhausts_points(self):
        x = np.array([[0.0], [1.0], [2.0], [5.0]])
        idx = kmeanspp_indices(x, 4, RngStream(3, 0))
        assert sorted(idx) == [0, 1, 2, 3]

    def test_insufficient_distinct_points(self):
        x = np.array([[1.0, 1.0], [1.0, 1.0], [1.0, 1.0]])
        with pytest.raises(DegenerateData):
            kmeanspp_init(x, 2, RngStream(0, 0))

    def test_bad_k_rejected(self):
        with pytest.raises(ConfigError):
            kmeanspp_init(np.zeros((3, 1)), 5, RngStream(0, 0))


class TestDefaults:
    def test_default_k_max_bounds(self):
        assert default_k_max(2) == 2
        assert default_k_max(100) == 2 * int(np.ceil(np.sqrt(50)))
        assert default_k_max(3) == 3  # clipped to n

    def test_generator_set_rejects_duplicates(self):
        with pytest.raises(ConfigError):
            GeneratorSet((1, 1, 2), "dpp")
