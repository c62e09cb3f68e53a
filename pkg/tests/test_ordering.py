import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kdecoreset import ordering

from helpers import dyadic_balance_violations, naive_bit_reverse


class TestSizeFormulas:
    def test_coreset_size_small_eps_delta(self):
        spec = ordering.CoresetSpec(eps=0.5, delta=0.5)
        expected = math.ceil(
            (1 / 0.5) * math.log(2.0) ** 2.5 * math.log(2.0)
        )
        assert ordering.coreset_size_for_eps(spec) == max(1, expected)

    def test_rs_size_exact_example(self):
        spec = ordering.CoresetSpec(eps=0.1, delta=math.exp(-1))
        assert ordering.random_sample_size_for_eps(spec) == 100

    def test_coreset_beats_rs_at_small_eps(self):
        spec = ordering.CoresetSpec(eps=0.01, delta=0.1)
        assert ordering.coreset_size_for_eps(
            spec
        ) < ordering.random_sample_size_for_eps(spec)

    def test_halving_eps_more_than_doubles(self):
        for eps in (0.4, 0.2, 0.1, 0.05):
            big = ordering.coreset_size_for_eps(
                ordering.CoresetSpec(eps=eps / 2, delta=0.1)
            )
            small = ordering.coreset_size_for_eps(
                ordering.CoresetSpec(eps=eps, delta=0.1)
            )
            assert big > 2 * small

    def test_ratio_grows_as_eps_shrinks(self):
        # 1/eps^2 vs (1/eps) * polylog; the gap widens once the polylog's
        # growth slows, i.e. below eps ~ e^-2.5
        ratios = []
        for eps in (0.05, 0.02, 0.01, 0.005, 0.002):
            spec = ordering.CoresetSpec(eps=eps, delta=0.1)
            ratios.append(
                ordering.random_sample_size_for_eps(spec)
                / ordering.coreset_size_for_eps(spec)
            )
        assert ratios == sorted(ratios)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            ordering.CoresetSpec(eps=0.0, delta=0.5)
        with pytest.raises(ValueError):
            ordering.CoresetSpec(eps=0.5, delta=1.0)
        with pytest.raises(ValueError):
            ordering.CoresetSpec(eps=0.5, delta=0.5, c_rs=-1.0)


class TestBlockCoreset:
    def test_k_equals_n_selects_everything(self):
        idx = ordering.zorder_block_coreset(17, 17, seed=0)
        assert sorted(idx.tolist()) == list(range(17))

    def test_k_one_uniform_over_ranks(self):
        n = 8
        counts = np.zeros(n)
        trials = 10_000
        for seed in range(trials):
            counts[ordering.zorder_block_coreset(n, 1, seed=seed)[0]] += 1
        expected = trials / n
        sigma = math.sqrt(trials * (1 / n) * (1 - 1 / n))
        assert np.all(np.abs(counts - expected) <= 5 * sigma)

    @given(
        n=st.integers(min_value=1, max_value=400),
        k=st.integers(min_value=1, max_value=400),
    )
    def test_ranges_partition(self, n, k):
        if k > n:
            with pytest.raises(ValueError):
                ordering.zorder_block_coreset(n, k, seed=0)
            return
        edges = ordering.block_edges(n, k)
        assert edges[0] == 0 and edges[-1] == n
        assert np.all(np.diff(edges) >= 1)

    def test_one_pick_per_range(self):
        n, k = 103, 17
        edges = ordering.block_edges(n, k)
        idx = ordering.zorder_block_coreset(n, k, seed=5)
        assert len(idx) == k
        for i, chosen in enumerate(idx):
            assert edges[i] <= chosen < edges[i + 1]

    def test_accepts_point_array(self):
        pts = np.random.default_rng(0).random((29, 2))
        idx = ordering.zorder_block_coreset(pts, 5, seed=1)
        assert len(idx) == 5


class TestBitReversal:
    def test_table_golden(self):
        o = ordering.bit_reverse_permute(7, mask=0b101)
        assert o.permutation.tolist() == [5, 1, 3, 4, 0, 6, 2]
        assert ordering.priority_index_per_rank(o).tolist() == [
            5, 2, 7, 3, 4, 1, 6,
        ]
        assert o.padded_count == 8
        assert o.mask == 0b101

    def test_single_element_identity(self):
        o = ordering.bit_reverse_permute(1)
        assert o.permutation.tolist() == [0]
        assert o.padded_count == 1

    def test_power_of_two_zero_mask_is_pure_bit_reversal(self):
        m = 6
        n = 1 << m
        o = ordering.bit_reverse_permute(n, mask=0)
        expected_keys = [naive_bit_reverse(i, m) for i in range(n)]
        expected = sorted(range(n), key=lambda i: expected_keys[i])
        assert o.permutation.tolist() == expected

    def test_mask_drawn_from_seed_is_deterministic(self):
        a = ordering.bit_reverse_permute(100, seed=9)
        b = ordering.bit_reverse_permute(100, seed=9)
        assert a.mask == b.mask
        assert np.array_equal(a.permutation, b.permutation)

    def test_mask_out_of_range(self):
        with pytest.raises(ValueError):
            ordering.bit_reverse_permute(7, mask=8)

    @settings(max_examples=80, deadline=None)
    @given(
        n=st.integers(min_value=1, max_value=512),
        seed=st.integers(min_value=0, max_value=2**32),
    )
    def test_balance_holds_with_dummies(self, n, seed):
        o = ordering.bit_reverse_permute(n, seed=seed)
        m = o.padded_count.bit_length() - 1
        assert dyadic_balance_violations(o.padded_order, m) == 0
        assert sorted(o.permutation.tolist()) == list(range(n))


class TestTreeReorder:
    def test_n2_fair_coin(self):
        first = sum(
            ordering.tree_priority_reorder(2, seed=s).permutation[0]
            for s in range(10_000)
        )
        assert abs(first / 10_000 - 0.5) <= 0.05

    def test_figure_shape_14_points(self):
        for seed in range(25):
            o = ordering.tree_priority_reorder(14, seed=seed)
            assert sorted(o.permutation.tolist()) == list(range(14))
            assert o.padded_count == 16
            assert np.all(o.permutation < 14)

    def test_balance_small_sizes_many_seeds(self):
        for n in range(1, 65):
            m = ordering.padded_size(n)[0]
            for seed in range(100):
                o = ordering.tree_priority_reorder(n, seed=seed)
                assert dyadic_balance_violations(o.padded_order, m) == 0

    def test_deterministic_given_seed(self):
        a = ordering.tree_priority_reorder(37, seed=4)
        b = ordering.tree_priority_reorder(37, seed=4)
        assert np.array_equal(a.permutation, b.permutation)


class TestExtractAndSample:
    def test_extract_whole_set(self):
        o = ordering.bit_reverse_permute(20, seed=1)
        assert sorted(ordering.extract_coreset(o, 20).tolist()) == list(range(20))

    def test_extract_table_first_point(self):
        o = ordering.bit_reverse_permute(7, mask=0b101)
        assert ordering.extract_coreset(o, 1).tolist() == [5]

    def test_prefix_grows_by_one(self):
        o = ordering.bit_reverse_permute(50, seed=3)
        for k in range(1, 50):
            small = set(ordering.extract_coreset(o, k).tolist())
            big = set(ordering.extract_coreset(o, k + 1).tolist())
            assert small < big and len(big - small) == 1

    def test_extract_out_of_range(self):
        o = ordering.bit_reverse_permute(5, seed=0)
        with pytest.raises(ValueError):
            ordering.extract_coreset(o, 0)
        with pytest.raises(ValueError):
            ordering.extract_coreset(o, 6)

    def test_random_sample_full(self):
        assert sorted(ordering.random_sample(9, 9, seed=0).tolist()) == list(
            range(9)
        )

    def test_random_sample_deterministic(self):
        assert np.array_equal(
            ordering.random_sample(1000, 50, seed=11),
            ordering.random_sample(1000, 50, seed=11),
        )

    def test_random_sample_marginals(self):
        n, k, trials = 20, 5, 10_000
        counts = np.zeros(n)
        for seed in range(trials):
            counts[ordering.random_sample(n, k, seed=seed)] += 1
        p = k / n
        sigma = math.sqrt(trials * p * (1 - p))
        assert np.all(np.abs(counts - trials * p) <= 5 * sigma)

    def test_apply_to_sorted_composes(self):
        o = ordering.bit_reverse_permute(7, mask=0b101)
        zperm = np.array([6, 5, 4, 3, 2, 1, 0])
        composed = ordering.apply_to_sorted(o, zperm)
        assert composed.permutation.tolist() == [
            zperm[r] for r in o.permutation
        ]
