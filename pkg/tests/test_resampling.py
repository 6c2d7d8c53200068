import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import star, undirected
from oracles import adjacency_dict, enumerate_permutation_mean, type7_percentile
from paradoxlab.errors import ParadoxError, ResamplingError
from paradoxlab.resampling import (
    ResampleDistribution,
    bootstrap,
    child_rng,
    null_model,
    percentile_ci,
    summarize,
    write_distribution_csv,
)


def dist_of(samples):
    samples = np.asarray(samples, dtype=float)
    return ResampleDistribution(samples, len(samples), 0, "bootstrap")


def test_all_true_flags_give_constant_samples():
    # every leaf of a star is paradoxed; restrict subjects to leaves
    d = bootstrap(star(6), "degree_paradox", 1.0, 200, seed=1, nodes=range(1, 7))
    assert np.all(d.samples == 1.0)


def test_star_bootstrap_mean():
    d = bootstrap(star(4), "degree_paradox", sample_frac=1.0, replicates=5000, seed=11)
    assert abs(d.mean() - 0.8) <= 0.02
    assert len(d.samples) == d.replicates == 5000


def test_bootstrap_is_deterministic(paperlike):
    a = bootstrap(paperlike, "attribute_paradox", 0.1, 300, seed=5)
    b = bootstrap(paperlike, "attribute_paradox", 0.1, 300, seed=5)
    assert a.samples.tobytes() == b.samples.tobytes()
    c = bootstrap(paperlike, "attribute_paradox", 0.1, 300, seed=6)
    assert a.samples.tobytes() != c.samples.tobytes()


@pytest.mark.parametrize("statistic", ["degree_paradox", "attribute_paradox", "pearson"])
def test_worker_count_does_not_change_samples(paperlike, statistic):
    ref = bootstrap(paperlike, statistic, 0.05, 200, seed=9, workers=1).samples.tobytes()
    for w in (4, 8):
        assert bootstrap(paperlike, statistic, 0.05, 200, seed=9, workers=w).samples.tobytes() == ref


def test_null_worker_count_independent(paperlike):
    ref = null_model(paperlike, "resample", 150, seed=2, workers=1).samples
    assert null_model(paperlike, "resample", 150, seed=2, workers=4).samples.tobytes() == ref.tobytes()


def test_child_seeds_are_distinct():
    draws = {child_rng(7, r).integers(0, 2**63) for r in range(500)}
    assert len(draws) == 500


def test_bootstrap_rejects_bad_fraction():
    with pytest.raises(ValueError):
        bootstrap(star(3), "degree_paradox", 0.0, 10)
    with pytest.raises(ValueError):
        bootstrap(star(3), "median", 0.5, 10)


def test_pearson_bootstrap_too_many_missing():
    # two distinct degrees, tiny draws: many replicates hit a constant vector
    g = star(3).with_attribute_array(np.array([0.5, 0.1, 0.2, 0.3]))
    with pytest.raises(ResamplingError):
        bootstrap(g, "pearson", 0.5, 500, seed=0)


def test_constant_attribute_permute_null_is_zero(rng):
    g = undirected(rng.integers(0, 60, size=(200, 2)).tolist())
    g = g.with_attribute_array(np.full(g.n, 0.3))
    d = null_model(g, "permute", 256, seed=3)
    assert np.all(d.samples == 0.0)


def test_null_requires_attributes():
    with pytest.raises(ParadoxError):
        null_model(star(3), "permute", 10)
    with pytest.raises(ValueError):
        null_model(star(3).with_attribute_array(np.zeros(4)), "shuffle", 10)


def test_permute_keeps_multiset_and_topology(path_graph):
    d = null_model(path_graph, "permute", 640, seed=4)
    # three distinct values over a path: each outcome is a multiple of 1/3
    assert set(np.round(d.samples * 3).astype(int)) <= {0, 1, 2, 3}


SMALL_GRAPHS = [
    ([(0, 1), (1, 2), (2, 3)], [0.1, 0.4, -0.2, 0.3]),
    ([(0, 1), (0, 2), (0, 3), (0, 4), (1, 2)], [0.05, 0.2, 0.2, -0.6, 0.9]),
    ([(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 3)],
     [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, -0.1]),
]


@pytest.mark.parametrize("edges,values", SMALL_GRAPHS)
def test_null_centering_matches_exact_enumeration(edges, values):
    n = len(values)
    exact = float(enumerate_permutation_mean(adjacency_dict(n, edges), values))
    g = undirected(edges, n).with_attribute_array(np.array(values))
    d = null_model(g, "permute", 4000, seed=21)
    se = d.samples.std(ddof=1) / np.sqrt(d.replicates)
    assert abs(d.mean() - exact) <= 3 * se


def test_percentile_interval_linear_interpolation():
    s = np.arange(1, 101, dtype=float)
    ci = percentile_ci(dist_of(s), 0.95)
    assert ci.lo == pytest.approx(type7_percentile(s.tolist(), 0.025), abs=1e-12)
    assert ci.hi == pytest.approx(type7_percentile(s.tolist(), 0.975), abs=1e-12)
    assert (ci.lo, ci.hi) == pytest.approx((3.475, 97.525), abs=1e-12)


def test_percentile_compat_rule():
    s = np.arange(1, 101, dtype=float)
    ci = percentile_ci(dist_of(s), percentiles=(5, 95))
    assert (ci.lo, ci.hi) == pytest.approx((5.95, 95.05), abs=1e-12)
    assert ci.level == pytest.approx(0.9)


def test_constant_samples_give_degenerate_interval():
    ci = percentile_ci(dist_of(np.full(200, 0.42)))
    assert ci.lo == ci.hi == 0.42


@pytest.mark.parametrize("level", [0.0, 1.0, -0.1, 1.5])
def test_invalid_level_rejected(level):
    with pytest.raises(ValueError):
        percentile_ci(dist_of(np.arange(200.0)), level)


def test_too_few_samples():
    with pytest.raises(ResamplingError):
        percentile_ci(dist_of(np.arange(99.0)))
    s = np.arange(150.0)
    s[:60] = np.nan
    with pytest.raises(ResamplingError):
        percentile_ci(dist_of(s))


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.floats(-1, 1), min_size=100, max_size=400),
    st.floats(0.01, 0.99),
)
def test_percentile_matches_oracle(values, level):
    ci = percentile_ci(dist_of(values), level)
    s = sorted(values)
    a = (1 - level) / 2
    assert ci.lo == pytest.approx(type7_percentile(s, a), abs=1e-12)
    assert ci.hi == pytest.approx(type7_percentile(s, 1 - a), abs=1e-12)
    assert ci.lo <= ci.hi


def test_summarize_without_resampling():
    r = summarize(0.6, None, "attribute_paradox", eligible=10)
    assert (r.value, r.ci_lo, r.ci_hi, r.replicates) == (0.6, None, None, 0)


def test_distribution_csv(tmp_path):
    s = np.array([0.25, np.nan, 0.5])
    write_distribution_csv(dist_of(s), tmp_path / "d.csv")
    assert (tmp_path / "d.csv").read_text() == 'attribute_paradox\n0.25\n""\n0.5\n'
