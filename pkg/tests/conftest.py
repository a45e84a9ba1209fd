import numpy as np
import pytest

from xnb.dataset import Dataset


def make_separated(
    n: int = 200,
    m: int = 50,
    k: int = 3,
    shift: float = 5.0,
    informative_per_class: int = 2,
    cross_shift: float = 0.0,
    seed: int = 0,
):
    """Noise matrix with a few mean-shifted marker variables per class.

    Class ``c`` (labels c0, c1, ...) gets ``informative_per_class`` variables
    whose mean is shifted by ``shift`` standard deviations for its own
    samples. With ``cross_shift`` > 0 the next class (cyclically) is also
    mildly elevated on those markers; that gives every class pair a unique
    strongest marker pair, the way real markers are rarely flat in every
    other class. Returns the dataset and the class -> marker mapping.
    """
    rng = np.random.default_rng(seed)
    values = rng.normal(size=(n, m))
    labels = [f"c{i % k}" for i in range(n)]
    names = tuple(f"v{j:02d}" for j in range(m))
    informative = {}
    rows_by_class = {c: [i for i, l in enumerate(labels) if l == c] for c in sorted(set(labels))}
    classes = sorted(rows_by_class)
    for ci, c in enumerate(classes):
        cols = range(ci * informative_per_class, (ci + 1) * informative_per_class)
        informative[c] = tuple(names[j] for j in cols)
        neighbor = classes[(ci + 1) % k]
        for j in cols:
            values[rows_by_class[c], j] += shift
            if cross_shift:
                values[rows_by_class[neighbor], j] += cross_shift
    return Dataset(names, values, tuple(labels)), informative


@pytest.fixture
def separated_two_class():
    """Two classes split 0 +- 0.1 vs 100 +- 0.1 on g1, plus 20 noise variables."""
    rng = np.random.default_rng(7)
    n_per = 15
    values = rng.normal(size=(2 * n_per, 21))
    values[:n_per, 0] = rng.normal(0.0, 0.1, size=n_per)
    values[n_per:, 0] = rng.normal(100.0, 0.1, size=n_per)
    names = ("g1",) + tuple(f"noise{j}" for j in range(1, 21))
    labels = ("A",) * n_per + ("B",) * n_per
    return Dataset(names, values, labels)


@pytest.fixture
def separated_three_class():
    d, informative = make_separated(seed=11)
    return d, informative
