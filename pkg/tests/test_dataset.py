import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xnb.dataset import Dataset, class_priors, load_csv, save_csv, stratified_kfold
from xnb.errors import DataError


def write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadCsv:
    def test_basic_parse(self, tmp_path):
        path = write(tmp_path, "g1,g2,class\n1,2,A\n3,4,B\n5,6,A\n7,8,B\n")
        d = load_csv(path, "class")
        assert d.n == 4 and d.m == 2
        assert d.variable_names == ("g1", "g2")
        assert d.classes == ("A", "B")
        np.testing.assert_array_equal(d.column("g1"), [1, 3, 5, 7])

    def test_class_column_by_index(self, tmp_path):
        path = write(tmp_path, "label,g1\nA,1\nB,2\n")
        d = load_csv(path, 0)
        assert d.variable_names == ("g1",)
        assert d.labels == ("A", "B")

    def test_nan_cell_reports_row_and_column(self, tmp_path):
        path = write(tmp_path, "g1,g2,class\n1,NaN,A\n3,4,B\n")
        with pytest.raises(DataError, match=r"row 2.*'g2'"):
            load_csv(path, "class")

    def test_unparseable_cell_reports_location(self, tmp_path):
        path = write(tmp_path, "g1,g2,class\n1,2,A\n3,oops,B\n")
        with pytest.raises(DataError, match=r"row 3.*'g2'.*'oops'"):
            load_csv(path, "class")

    def test_single_class_still_loads(self, tmp_path):
        path = write(tmp_path, "g1,class\n1,A\n2,A\n")
        d = load_csv(path, "class")
        assert d.classes == ("A",)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError, match="no such file"):
            load_csv(tmp_path / "absent.csv", "class")

    def test_missing_class_column(self, tmp_path):
        path = write(tmp_path, "g1,g2\n1,2\n")
        with pytest.raises(DataError, match="'label' not found"):
            load_csv(path, "label")

    def test_duplicate_header_names_rejected(self, tmp_path):
        path = write(tmp_path, "g1,g1,class\n1,2,A\n3,4,B\n")
        with pytest.raises(DataError, match="duplicate"):
            load_csv(path, "class")

    def test_scientific_notation_accepted(self, tmp_path):
        path = write(tmp_path, "g1,class\n1.5e-3,A\n-2E+2,B\n")
        d = load_csv(path, "class")
        np.testing.assert_allclose(d.column(0), [1.5e-3, -200.0])

    def test_round_trip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(31)
        values = rng.normal(size=(20, 5)) * 10.0 ** rng.integers(-8, 8, size=(20, 5))
        d = Dataset(tuple(f"v{i}" for i in range(5)), values, tuple(rng.choice(["A", "B"], 20)))
        out = tmp_path / "round.csv"
        save_csv(d, out)
        back = load_csv(out, "class")
        np.testing.assert_array_equal(back.values, d.values)
        assert back.labels == d.labels


class TestDataset:
    def test_rejects_non_finite(self):
        with pytest.raises(DataError, match="non-finite"):
            Dataset(("x",), np.array([[np.inf]]), ("A",))

    def test_rejects_shape_mismatches(self):
        with pytest.raises(DataError):
            Dataset(("x", "y"), np.zeros((2, 1)), ("A", "B"))
        with pytest.raises(DataError):
            Dataset(("x",), np.zeros((2, 1)), ("A",))

    def test_classes_sorted(self):
        d = Dataset(("x",), np.zeros((3, 1)), ("zeta", "alpha", "zeta"))
        assert d.classes == ("alpha", "zeta")

    def test_values_immutable(self):
        d = Dataset(("x",), np.zeros((2, 1)), ("A", "B"))
        with pytest.raises(ValueError):
            d.values[0, 0] = 1.0

    def test_subset_recomputes_classes(self):
        d = Dataset(("x",), np.arange(4.0)[:, None], ("A", "A", "B", "B"))
        sub = d.subset(np.array([0, 1]))
        assert sub.classes == ("A",)
        np.testing.assert_array_equal(sub.column(0), [0.0, 1.0])


class TestPriors:
    def test_balanced(self):
        d = Dataset(("x",), np.zeros((4, 1)), ("A", "A", "B", "B"))
        assert class_priors(d) == {"A": 0.5, "B": 0.5}

    def test_three_to_one(self):
        d = Dataset(("x",), np.zeros((4, 1)), ("A", "A", "A", "B"))
        assert class_priors(d) == {"A": 0.75, "B": 0.25}

    def test_single_class(self):
        d = Dataset(("x",), np.zeros((1, 1)), ("A",))
        assert class_priors(d) == {"A": 1.0}

    def test_sums_to_one(self):
        rng = np.random.default_rng(1)
        labels = tuple(rng.choice(["A", "B", "C", "D"], size=97))
        d = Dataset(("x",), np.zeros((97, 1)), labels)
        assert abs(sum(class_priors(d).values()) - 1.0) < 1e-12


class TestStratifiedKfold:
    def _counts(self, d, plan):
        labels = np.asarray(d.labels)
        return {
            c: np.bincount(plan.assignments[labels == c], minlength=plan.k)
            for c in d.classes
        }

    def test_exact_divisibility(self):
        d = Dataset(("x",), np.zeros((20, 1)), ("A",) * 10 + ("B",) * 10)
        plan = stratified_kfold(d, 5, seed=0)
        counts = self._counts(d, plan)
        assert np.all(counts["A"] == 2)
        assert np.all(counts["B"] == 2)

    def test_uneven_classes(self):
        d = Dataset(("x",), np.zeros((10, 1)), ("A",) * 7 + ("B",) * 3)
        plan = stratified_kfold(d, 3, seed=5)
        counts = self._counts(d, plan)
        assert set(counts["A"]) <= {2, 3}
        assert np.all(counts["B"] == 1)

    def test_deterministic(self):
        d = Dataset(("x",), np.zeros((30, 1)), ("A", "B", "C") * 10)
        a = stratified_kfold(d, 4, seed=42)
        b = stratified_kfold(d, 4, seed=42)
        np.testing.assert_array_equal(a.assignments, b.assignments)

    def test_seed_changes_assignment(self):
        d = Dataset(("x",), np.arange(30.0)[:, None], ("A", "B", "C") * 10)
        a = stratified_kfold(d, 5, seed=0)
        b = stratified_kfold(d, 5, seed=1)
        assert not np.array_equal(a.assignments, b.assignments)

    def test_named_generator_recorded(self):
        d = Dataset(("x",), np.zeros((4, 1)), ("A", "B", "A", "B"))
        assert stratified_kfold(d, 2, seed=0).generator == "pcg64"

    def test_k_greater_than_n_rejected(self):
        d = Dataset(("x",), np.zeros((3, 1)), ("A", "B", "A"))
        with pytest.raises(ValueError, match="exceeds"):
            stratified_kfold(d, 4, seed=0)

    def test_small_class_misses_folds(self):
        d = Dataset(("x",), np.zeros((9, 1)), ("A",) * 8 + ("B",))
        plan = stratified_kfold(d, 4, seed=0)
        counts = self._counts(d, plan)
        assert counts["B"].sum() == 1

    @given(
        st.integers(0, 2**32 - 1),
        st.integers(2, 8),
        st.lists(st.integers(1, 25), min_size=1, max_size=4),
    )
    @settings(max_examples=60, deadline=None)
    def test_folds_partition_everything(self, seed, k, class_sizes):
        n = sum(class_sizes)
        if k > n:
            return
        labels = tuple(
            f"c{ci}" for ci, size in enumerate(class_sizes) for _ in range(size)
        )
        d = Dataset(("x",), np.zeros((n, 1)), labels)
        plan = stratified_kfold(d, k, seed=seed)
        seen = np.concatenate([plan.test_rows(f) for f in range(k)])
        assert sorted(seen) == list(range(n))
        # per-fold class counts differ by at most one
        arr = np.asarray(labels)
        for c in d.classes:
            counts = np.bincount(plan.assignments[arr == c], minlength=k)
            assert counts.max() - counts.min() <= 1

    def test_fold_proportions_close_to_global(self):
        rng = np.random.default_rng(17)
        labels = tuple(rng.choice(["A", "B", "C"], size=120, p=[0.5, 0.3, 0.2]))
        d = Dataset(("x",), np.zeros((120, 1)), labels)
        k = 6
        plan = stratified_kfold(d, k, seed=3)
        global_prop = {c: len(rows) / d.n for c, rows in d.class_rows.items()}
        for f in range(k):
            fold_rows = plan.test_rows(f)
            fold_labels = [d.labels[i] for i in fold_rows]
            for c in d.classes:
                prop = fold_labels.count(c) / len(fold_rows)
                assert abs(prop - global_prop[c]) <= 1.0 / len(fold_rows) + 1e-12
