import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xnb.dataset import Dataset
from xnb.hellinger import HellingerTable, hellinger, hellinger_table, normalize_to_distribution
from xnb.kde import fit_kde


def hellinger_oracle(p, q):
    """Direct per-entry summation, independently of the library path."""
    acc = 0.0
    for a, b in zip(p, q):
        acc += (math.sqrt(a) - math.sqrt(b)) ** 2
    return math.sqrt(acc) / math.sqrt(2.0)


def random_distribution(rng, size):
    raw = rng.uniform(0, 1, size=size)
    return raw / raw.sum()


class TestNormalize:
    def test_uniform_input(self):
        np.testing.assert_allclose(normalize_to_distribution([1, 1, 1, 1]), [0.25] * 4)

    def test_single_mass(self):
        np.testing.assert_allclose(normalize_to_distribution([2, 0, 0]), [1, 0, 0])

    def test_zero_sum_becomes_uniform_with_warning(self):
        with pytest.warns(UserWarning, match="zero-sum"):
            out = normalize_to_distribution([0.0, 0.0])
        np.testing.assert_allclose(out, [0.5, 0.5])

    def test_negative_entry_rejected(self):
        with pytest.raises(ValueError, match="non-negative"):
            normalize_to_distribution([0.5, -0.1])


class TestHellinger:
    def test_identical_distributions(self):
        assert hellinger([0.3, 0.7], [0.3, 0.7]) == 0.0

    def test_disjoint_support(self):
        assert hellinger([1.0, 0.0], [0.0, 1.0]) == 1.0

    def test_half_overlap(self):
        assert hellinger([0.5, 0.5], [1.0, 0.0]) == pytest.approx(
            0.5411961001461969, abs=1e-12
        )

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            hellinger([1.0], [0.5, 0.5])

    def test_matches_direct_oracle_on_random_pairs(self):
        rng = np.random.default_rng(2024)
        worst = 0.0
        for _ in range(1000):
            size = int(rng.integers(2, 80))
            p = random_distribution(rng, size)
            q = random_distribution(rng, size)
            worst = max(worst, abs(hellinger(p, q) - hellinger_oracle(p, q)))
        assert worst <= 1e-12

    @given(st.integers(0, 2**32 - 1), st.integers(2, 40))
    @settings(max_examples=60, deadline=None)
    def test_symmetric_and_bounded(self, seed, size):
        rng = np.random.default_rng(seed)
        p = random_distribution(rng, size)
        q = random_distribution(rng, size)
        d = hellinger(p, q)
        assert 0.0 <= d <= 1.0
        assert d == hellinger(q, p)

    def test_triangle_inequality_on_sampled_triples(self):
        rng = np.random.default_rng(99)
        for _ in range(200):
            size = int(rng.integers(2, 30))
            p, q, r = (random_distribution(rng, size) for _ in range(3))
            assert hellinger(p, r) <= hellinger(p, q) + hellinger(q, r) + 1e-9


def _bank(d):
    return {
        (c, v): fit_kde(d.class_column(c, v), fallback_scale=np.ptp(d.column(v)))
        for c in d.classes
        for v in d.variable_names
    }


class TestTable:
    def test_identical_classes_give_zero(self):
        base = np.array([[0.0, 1.0], [1.0, 2.0], [2.0, 0.5]])
        values = np.vstack([base, base])
        d = Dataset(("x", "y"), values, ("A",) * 3 + ("B",) * 3)
        table = hellinger_table(d, _bank(d))
        for v in d.variable_names:
            assert table.value(v, "A", "B") <= 1e-9

    def test_far_clusters_near_one(self):
        rng = np.random.default_rng(1)
        a = rng.normal(0.0, 1.0, size=20)
        b = rng.normal(1000.0, 1.0, size=20)
        d = Dataset(("x",), np.concatenate([a, b])[:, None], ("A",) * 20 + ("B",) * 20)
        table = hellinger_table(d, _bank(d))
        assert table.value("x", "A", "B") >= 0.99

    def test_entry_count_three_classes(self):
        rng = np.random.default_rng(2)
        values = rng.normal(size=(12, 2))
        d = Dataset(("x", "y"), values, tuple("ABC" * 4))
        table = hellinger_table(d, _bank(d))
        assert table.distances.shape == (2, 3)
        assert len(list(table.rows())) == 6

    def test_symmetric_lookup(self):
        rng = np.random.default_rng(3)
        values = rng.normal(size=(20, 3))
        labels = ("A",) * 7 + ("B",) * 7 + ("C",) * 6
        d = Dataset(("x", "y", "z"), values, labels)
        table = hellinger_table(d, _bank(d))
        for v in d.variable_names:
            for ci, cj in combinations(d.classes, 2):
                assert table.value(v, ci, cj) == table.value(v, cj, ci)

    def test_all_entries_bounded(self):
        rng = np.random.default_rng(4)
        values = rng.normal(size=(30, 5))
        labels = tuple(rng.choice(["A", "B", "C"], size=30))
        d = Dataset(tuple("vwxyz"), values, labels)
        table = hellinger_table(d, _bank(d))
        assert np.all(table.distances >= 0.0)
        assert np.all(table.distances <= 1.0)

    def test_incomplete_bank_rejected(self):
        rng = np.random.default_rng(5)
        d = Dataset(("x", "y"), rng.normal(size=(8, 2)), ("A",) * 4 + ("B",) * 4)
        bank = _bank(d)
        del bank[("A", "y")]
        with pytest.raises(ValueError, match="incomplete"):
            hellinger_table(d, bank)

    def test_parallel_matches_sequential(self):
        rng = np.random.default_rng(6)
        values = rng.normal(size=(24, 9))
        labels = ("A",) * 8 + ("B",) * 8 + ("C",) * 8
        d = Dataset(tuple(f"v{i}" for i in range(9)), values, labels)
        bank = _bank(d)
        seq = hellinger_table(d, bank, jobs=1)
        par = hellinger_table(d, bank, jobs=3)
        np.testing.assert_array_equal(seq.distances, par.distances)

    def test_blocked_path_matches_per_variable_reference(self):
        from xnb.hellinger import _block_distances, _pack_bank, _variable_distances

        rng = np.random.default_rng(13)
        values = rng.normal(size=(31, 23))
        values[:, 4] = 1.5  # constant column exercises grid widening
        labels = tuple(rng.choice(["A", "B", "C"], 31))
        d = Dataset(tuple(f"v{i}" for i in range(23)), values, labels)
        bank = _bank(d)
        models = [[bank[(c, v)] for c in d.classes] for v in d.variable_names]
        with pytest.warns(UserWarning, match="zero-sum"):  # constant column underflows
            reference = _variable_distances(models, 50)
        stacks, h_rows, kernel = _pack_bank(d, bank)
        with pytest.warns(UserWarning, match="zero-sum"):
            blocked = _block_distances(stacks, h_rows, kernel, 50, block=8)
        np.testing.assert_allclose(blocked, reference, rtol=0, atol=5e-16)

    def test_mixed_kernel_bank_uses_generic_path(self):
        rng = np.random.default_rng(14)
        values = rng.normal(size=(20, 4))
        d = Dataset(("w", "x", "y", "z"), values, ("A",) * 10 + ("B",) * 10)
        bank = {}
        for i, v in enumerate(d.variable_names):
            kind = "gaussian" if i % 2 else "epanechnikov"
            for c in d.classes:
                bank[(c, v)] = fit_kde(
                    d.class_column(c, v), kernel=kind, fallback_scale=np.ptp(d.column(v))
                )
        table = hellinger_table(d, bank)
        assert table.distances.shape == (4, 1)
        assert np.all((table.distances >= 0) & (table.distances <= 1))

    def test_missing_variable_lookup(self):
        table = HellingerTable(("x",), ("A", "B"), np.array([[0.5]]))
        with pytest.raises(KeyError, match="nope"):
            table.value("nope", "A", "B")
