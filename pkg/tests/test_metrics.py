import math
from itertools import combinations

import numpy as np
import pytest
from sklearn.metrics import davies_bouldin_score

from pydevelop.community.assignment import Partition
from pydevelop.community.errors import MetricUndefinedError, RosterMismatchError
from pydevelop.community.intimacy import compute_intimacy
from pydevelop.community.metrics import (
    INTRINSIC_KEYS,
    METRIC_KEYS,
    SimilarityOracle,
    build_oracle,
    davies_bouldin,
    density,
    evaluate,
    inverse_purity,
    mutual_information,
    normalized_dbi,
    purity,
    rand_index,
    silhouette,
    size_entropy,
)

IDS = ("a", "b", "c", "d")


def part(labels, ids=None, k=None):
    ids = ids or tuple(f"e{i}" for i in range(len(labels)))
    return Partition.from_labels(ids, labels, k or max(labels) + 1)


def random_oracle(rng, n, edges=()):
    x = rng.random((n, n))
    x = (x + x.T) / 2
    np.fill_diagonal(x, 0.0)
    return SimilarityOracle(x, tuple(edges), tuple(f"e{i}" for i in range(n)))


class TestHandExamples:
    def test_rand(self):
        assert rand_index(part([0, 0, 0, 1]), part([0, 1, 1, 1])) == pytest.approx(2 / 6)

    def test_mutual_information(self):
        same = part([0, 0, 1, 1])
        assert mutual_information(same, same) == pytest.approx(math.log(2))

    def test_purity(self):
        pred, truth = part([0, 0, 0, 1]), part([0, 0, 1, 1])
        assert purity(pred, truth) == 0.75
        assert inverse_purity(pred, truth) == 0.75

    def test_entropy(self):
        assert size_entropy(part([0, 0, 0, 1])) == pytest.approx(0.5623, abs=1e-4)
        assert size_entropy(part([0, 0, 0], k=3)) == 0.0

    def test_density_on_path(self):
        oracle = SimilarityOracle(np.zeros((4, 4)), ((0, 1), (1, 2), (2, 3)), IDS)
        assert density(part([0, 0, 1, 1], IDS), oracle) == pytest.approx(2 / 3)


def brute_rand(a, b):
    pairs = list(combinations(range(len(a)), 2))
    agree = sum((a[i] == a[j]) == (b[i] == b[j]) for i, j in pairs)
    return agree / len(pairs)


def brute_mi(a, b):
    n = len(a)
    total = 0.0
    for x in set(a):
        for y in set(b):
            joint = sum(1 for i in range(n) if a[i] == x and b[i] == y) / n
            if joint:
                total += joint * math.log(joint / (a.count(x) / n * b.count(y) / n))
    return total


def brute_purity(pred, truth):
    hits = 0
    for c in set(pred):
        members = [truth[i] for i in range(len(pred)) if pred[i] == c]
        hits += max(members.count(t) for t in set(members))
    return hits / len(pred)


def brute_silhouette(labels, d):
    scores = []
    for i, c in enumerate(labels):
        own = [j for j, x in enumerate(labels) if x == c and j != i]
        if not own:
            scores.append(0.0)
            continue
        a = np.mean([d[i, j] for j in own])
        b = min(
            np.mean([d[i, j] for j, x in enumerate(labels) if x == other])
            for other in set(labels) - {c}
        )
        scores.append((b - a) / max(a, b))
    return float(np.mean(scores))


@pytest.mark.parametrize("seed", range(20))
def test_ground_truth_metrics_match_enumeration(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 7))
    a = [int(x) for x in rng.integers(0, 3, n)]
    b = [int(x) for x in rng.integers(0, 3, n)]
    pa, pb = part(a, k=3), part(b, k=3)
    assert rand_index(pa, pb) == pytest.approx(brute_rand(a, b))
    assert mutual_information(pa, pb) == pytest.approx(brute_mi(a, b), abs=1e-12)
    assert purity(pa, pb) == pytest.approx(brute_purity(a, b))
    assert inverse_purity(pa, pb) == pytest.approx(brute_purity(b, a))


@pytest.mark.parametrize("seed", range(10))
def test_silhouette_matches_enumeration(seed):
    rng = np.random.default_rng(seed)
    labels = [0, 0, 1, 1, 1, 2, 0]
    oracle = random_oracle(rng, len(labels))
    got = silhouette(part(labels), oracle)
    assert got == pytest.approx(brute_silhouette(labels, oracle.distances()))


@pytest.mark.parametrize("seed", range(10))
def test_davies_bouldin_matches_sklearn(seed):
    rng = np.random.default_rng(seed)
    labels = [0, 1, 0, 2, 1, 2, 2, 0]
    oracle = random_oracle(rng, len(labels))
    expected = davies_bouldin_score(oracle.distances(), labels)
    assert davies_bouldin(part(labels), oracle) == pytest.approx(expected)
    assert normalized_dbi(part(labels), oracle) == pytest.approx(1 / (1 + expected))


def test_silhouette_all_singletons_is_zero():
    oracle = random_oracle(np.random.default_rng(0), 3)
    assert silhouette(part([0, 1, 2]), oracle) == 0.0


def test_mismatched_rosters():
    with pytest.raises(RosterMismatchError):
        rand_index(part([0, 1]), part([0, 1], ids=("x", "y")))


def set_partitions(n):
    """Every partition of range(n) as a restricted growth string."""
    def grow(prefix, top):
        if len(prefix) == n:
            yield list(prefix)
            return
        for label in range(top + 2):
            yield from grow(prefix + [label], max(top, label))

    yield from grow([0], 0)


def brute_density(labels, edges):
    return sum(labels[i] == labels[j] for i, j in edges) / len(edges)


def brute_davies_bouldin(labels, d):
    clusters = sorted(set(labels))
    rows = {c: [d[i] for i, x in enumerate(labels) if x == c] for c in clusters}
    centroid = {c: np.mean(rows[c], axis=0) for c in clusters}
    scatter = {
        c: np.mean([np.linalg.norm(r - centroid[c]) for r in rows[c]]) for c in clusters
    }
    worst = []
    for c in clusters:
        worst.append(
            max(
                (scatter[c] + scatter[o]) / np.linalg.norm(centroid[c] - centroid[o])
                for o in clusters
                if o != c
            )
        )
    return float(np.mean(worst))


def brute_entropy(labels):
    n = len(labels)
    return -sum(labels.count(c) / n * math.log(labels.count(c) / n) for c in set(labels))


def test_set_partition_counts():
    assert [len(list(set_partitions(n))) for n in range(1, 7)] == [1, 2, 5, 15, 52, 203]


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_ground_truth_metrics_over_all_partition_pairs(n):
    partitions = list(set_partitions(n))
    for a in partitions:
        for b in partitions:
            pa, pb = part(a), part(b)
            assert rand_index(pa, pb) == pytest.approx(brute_rand(a, b), abs=1e-9)
            assert mutual_information(pa, pb) == pytest.approx(brute_mi(a, b), abs=1e-9)
            assert purity(pa, pb) == pytest.approx(brute_purity(a, b), abs=1e-9)
            assert inverse_purity(pa, pb) == pytest.approx(brute_purity(b, a), abs=1e-9)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_intrinsic_metrics_over_all_partitions(n):
    rng = np.random.default_rng(n)
    pairs = list(combinations(range(n), 2))
    edges = {(0, 1)} | {pair for pair in pairs if rng.random() < 0.5}
    oracle = random_oracle(rng, n, sorted(edges))
    d = oracle.distances()
    for labels in set_partitions(n):
        p = part(labels)
        expected = brute_density(labels, oracle.edge_set)
        assert density(p, oracle) == pytest.approx(expected, abs=1e-9)
        assert size_entropy(p) == pytest.approx(brute_entropy(labels), abs=1e-9)
        if p.k == 1:
            with pytest.raises(MetricUndefinedError):
                silhouette(p, oracle)
            with pytest.raises(MetricUndefinedError):
                davies_bouldin(p, oracle)
            continue
        assert silhouette(p, oracle) == pytest.approx(brute_silhouette(labels, d), abs=1e-9)
        dbi = brute_davies_bouldin(labels, d)
        assert davies_bouldin(p, oracle) == pytest.approx(dbi, abs=1e-9)
        assert normalized_dbi(p, oracle) == pytest.approx(1 / (1 + dbi), abs=1e-9)


class TestOracle:
    def test_tiny_dataset(self, tiny_dataset):
        oracle = build_oracle(tiny_dataset, compute_intimacy(tiny_dataset))
        v = oracle.values
        np.testing.assert_array_equal(v, v.T)
        assert np.all(np.diag(v) == 0)
        assert v.min() >= 0 and v.max() <= 1
        assert oracle.edge_set == ((0, 1), (0, 2), (1, 5), (2, 3), (2, 4), (3, 4))

    def test_uncovered_employee_averages_company_sources(self, tiny_dataset):
        bundle = compute_intimacy(tiny_dataset)
        oracle = build_oracle(tiny_dataset, bundle)
        # fay (index 5) has no ESN account; ben is index 1
        company = sum(m.values[5, 1] for m in bundle.company) / 3
        assert oracle.values[5, 1] == pytest.approx(company)


class TestEvaluate:
    def test_perfect_prediction(self, tiny_dataset):
        oracle = build_oracle(tiny_dataset, compute_intimacy(tiny_dataset))
        truth = Partition.from_labels(tiny_dataset.roster, [0, 0, 1, 1, 1, 0], k=2)
        results = evaluate(truth, oracle, truth)
        assert set(results) == set(METRIC_KEYS) | {"coverage"}
        assert results["rand"] == 1.0
        assert results["purity"] == 1.0
        assert results["coverage"] == 1.0

    def test_partial_prediction(self, tiny_dataset):
        oracle = build_oracle(tiny_dataset, compute_intimacy(tiny_dataset))
        pred = Partition.from_labels(("ana", "ben", "cat", "dan", "eve"), [0, 0, 1, 1, 1], k=2)
        results = evaluate(pred, oracle)
        assert set(results) == set(INTRINSIC_KEYS) | {"coverage"}
        assert results["coverage"] == pytest.approx(5 / 6)

    def test_undefined_metrics_are_none(self, tiny_dataset):
        oracle = build_oracle(tiny_dataset, compute_intimacy(tiny_dataset))
        single = Partition.from_labels(tiny_dataset.roster, [0] * 6, k=1)
        results = evaluate(single, oracle)
        assert results["silhouette"] is None
        assert results["ndbi"] is None
        assert results["density"] == 1.0
        assert results["entropy"] == 0.0

    def test_truth_must_cover_prediction(self, tiny_dataset):
        oracle = build_oracle(tiny_dataset, compute_intimacy(tiny_dataset))
        pred = Partition.from_labels(tiny_dataset.roster, [0, 0, 1, 1, 1, 0], k=2)
        truth = pred.restrict(("ana", "ben"))
        with pytest.raises(RosterMismatchError):
            evaluate(pred, oracle, truth)

    def test_stray_prediction(self, tiny_dataset):
        oracle = build_oracle(tiny_dataset, compute_intimacy(tiny_dataset))
        with pytest.raises(RosterMismatchError):
            evaluate(part([0, 1], ids=("ana", "zed")), oracle)
