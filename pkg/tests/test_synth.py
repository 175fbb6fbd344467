import numpy as np
import pytest

from pydevelop.community.dataset import load_dataset
from pydevelop.community.errors import ConfigError, InfeasibleConfigError
from pydevelop.community.intimacy import compute_intimacy, social_intimacy
from pydevelop.community.metrics import build_oracle, density
from pydevelop.community.synth import (
    SynthConfig,
    community_sizes,
    corrupt_source,
    generate,
)
from pydevelop.community.validation import validate_dataset


def test_generated_dataset_is_valid(planted):
    assert validate_dataset(planted.dataset) == []
    assert len(planted.truth) == 40
    assert planted.truth.k == 3


def test_generate_is_deterministic():
    cfg = SynthConfig(n=30, k_true=3, seed=5)
    first, second = generate(cfg), generate(cfg)
    assert first.graph == second.graph
    assert first.chart.manage_edges == second.chart.manage_edges
    assert dict(first.chart.titles) == dict(second.chart.titles)
    assert first.truth.labels == second.truth.labels


def test_seed_changes_dataset():
    a = generate(SynthConfig(n=30, k_true=3, seed=1))
    b = generate(SynthConfig(n=30, k_true=3, seed=2))
    assert a.graph.follow_edges != b.graph.follow_edges


def test_noise_free_esn_stays_inside_communities():
    result = generate(
        SynthConfig(n=36, k_true=3, p_in=0.4, p_out=0.0, group_noise=0.0, post_noise=0.0, seed=2)
    )
    label = result.truth.labels
    assert result.graph.follow_edges
    assert all(label[a] == label[b] for a, b in result.graph.follow_edges)
    by_group = {}
    for user, group in result.graph.membership_edges:
        by_group.setdefault(group, set()).add(label[user])
    assert all(len(labels) == 1 for labels in by_group.values())


def test_esn_fraction_leaves_some_employees_off_the_network():
    result = generate(SynthConfig(n=40, k_true=4, esn_fraction=0.5, seed=3))
    assert len(result.graph.users) == 20
    assert validate_dataset(result.dataset) == []
    assert len(result.alignment.pairs) == 20


def test_titles_and_workplaces_follow_communities(planted):
    chart = planted.chart
    label = planted.truth.labels
    for a in chart.employees:
        for b in chart.employees:
            if label[a] == label[b]:
                assert chart.workplaces[a] == chart.workplaces[b]


def test_write_and_reload(planted, synth_files):
    dataset = load_dataset(synth_files["esn"], synth_files["chart"])
    assert dataset.graph == planted.graph
    assert dataset.roster == planted.dataset.roster


def test_noiseless_density_counts_only_head_links(record_property):
    data = generate(SynthConfig(n=40, k_true=3, p_out=0.0, seed=6))
    oracle = build_oracle(data.dataset, compute_intimacy(data.dataset))
    label = data.truth.labels
    ids = oracle.index_order

    assert all(label[a] == label[b] for a, b in data.graph.follow_edges)
    cut = {
        frozenset((ids[i], ids[j])) for i, j in oracle.edge_set if label[ids[i]] != label[ids[j]]
    }
    root = data.chart.root
    heads = {sub for mgr, sub in data.chart.manage_edges if label[mgr] != label[sub]}
    assert len(heads) == 2
    assert all(data.chart.managers()[head] == root for head in heads)
    assert cut == {frozenset((root, head)) for head in heads}

    score = density(data.truth, oracle)
    record_property("density", score)
    assert score == pytest.approx(1 - 2 / len(oracle.edge_set))


def mean_social(data):
    m = social_intimacy(data.graph).values
    label = np.array([data.truth.labels[u] for u in data.graph.users])
    same = label[:, None] == label[None, :]
    off_diagonal = ~np.eye(len(label), dtype=bool)
    return m[same & off_diagonal], m[~same]


def pooled_social(**kwargs):
    intra, inter = [], []
    for seed in range(10):
        a, b = mean_social(generate(SynthConfig(n=90, k_true=3, seed=seed, **kwargs)))
        intra.append(a)
        inter.append(b)
    return np.concatenate(intra).mean(), np.concatenate(inter).mean()


def test_equal_probabilities_carry_no_social_signal():
    intra, inter = pooled_social(p_in=0.1, p_out=0.1)
    assert intra == pytest.approx(inter, rel=0.15)


def test_planted_probabilities_carry_social_signal():
    intra, inter = pooled_social(p_in=0.3, p_out=0.02)
    assert intra > 2 * inter


class TestCorruption:
    def test_rate_zero_is_identity(self, planted):
        assert corrupt_source(planted.dataset, "chart", 0.0, seed=1) is planted.dataset

    @pytest.mark.parametrize("source", ["title", "workplace", "chart"])
    def test_company_source_leaves_esn_alone(self, planted, source):
        corrupted = corrupt_source(planted.dataset, source, 0.5, seed=1)
        assert corrupted.graph is planted.graph
        assert validate_dataset(corrupted) == []

    @pytest.mark.parametrize("source", ["social", "group", "post"])
    def test_esn_source_leaves_chart_alone(self, planted, source):
        corrupted = corrupt_source(planted.dataset, source, 0.5, seed=1)
        assert corrupted.chart is planted.chart
        assert corrupted.graph != planted.graph
        assert validate_dataset(corrupted) == []

    def test_titles_only(self, planted):
        corrupted = corrupt_source(planted.dataset, "title", 0.5, seed=1)
        chart = corrupted.chart
        assert chart.manage_edges == planted.chart.manage_edges
        assert dict(chart.workplaces) == dict(planted.chart.workplaces)
        assert dict(chart.titles) != dict(planted.chart.titles)

    def test_edge_counts_preserved(self, planted):
        corrupted = corrupt_source(planted.dataset, "social", 1.0, seed=4)
        assert len(corrupted.graph.follow_edges) == len(planted.graph.follow_edges)

    def test_full_follow_corruption_erases_communities(self):
        inside = {"clean": 0, "corrupted": 0}
        total = 0
        intra_pairs = all_pairs = 0
        for seed in range(10):
            data = generate(SynthConfig(n=90, k_true=3, seed=seed))
            label = data.truth.labels
            corrupted = corrupt_source(data.dataset, "social", 1.0, seed=seed)
            follows = corrupted.graph.follow_edges
            assert len(set(follows)) == len(follows) == len(data.graph.follow_edges)
            inside["clean"] += sum(label[a] == label[b] for a, b in data.graph.follow_edges)
            inside["corrupted"] += sum(label[a] == label[b] for a, b in follows)
            total += len(follows)
            users = data.graph.users
            intra_pairs += sum(label[a] == label[b] for a in users for b in users if a != b)
            all_pairs += len(users) * (len(users) - 1)
        assert inside["clean"] / total > 0.8
        assert inside["corrupted"] / total == pytest.approx(intra_pairs / all_pairs, abs=0.03)

    def test_bad_arguments(self, planted):
        with pytest.raises(ConfigError):
            corrupt_source(planted.dataset, "email", 0.1, seed=0)
        with pytest.raises(ConfigError):
            corrupt_source(planted.dataset, "post", 1.5, seed=0)

    def test_config_noise_is_applied(self):
        clean = generate(SynthConfig(n=30, k_true=3, seed=8))
        noisy = generate(SynthConfig(n=30, k_true=3, seed=8, source_noise={"title": 0.5}))
        assert noisy.graph == clean.graph
        assert dict(noisy.chart.titles) != dict(clean.chart.titles)


class TestConfig:
    def test_too_many_communities(self):
        with pytest.raises(InfeasibleConfigError) as excinfo:
            SynthConfig(n=3, k_true=4)
        assert excinfo.value.exit_code == 2

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"k_true": 1},
            {"p_in": 0.1, "p_out": 0.2},
            {"esn_fraction": 0.0},
            {"skew": 0.0},
            {"source_noise": {"email": 0.1}},
            {"source_noise": {"title": 2.0}},
        ],
    )
    def test_rejected(self, kwargs):
        with pytest.raises(ConfigError):
            SynthConfig(**kwargs)

    def test_equal_probabilities_allowed(self):
        assert SynthConfig(p_in=0.1, p_out=0.1).p_out == 0.1

    def test_from_mapping(self):
        cfg = SynthConfig.from_mapping({"n": "50", "k-true": 5, "source_noise": {"post": "0.2"}})
        assert (cfg.n, cfg.k_true, cfg.source_noise["post"]) == (50, 5, 0.2)
        with pytest.raises(ConfigError):
            SynthConfig.from_mapping({"employees": 3})


def test_community_sizes():
    assert community_sizes(10, 3) == [4, 3, 3]
    assert community_sizes(10, 3, skew=2.0) == [2, 3, 5]
    assert community_sizes(3, 3) == [1, 1, 1]
