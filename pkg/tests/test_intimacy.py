import math
from dataclasses import replace

import networkx as nx
import numpy as np
import pytest

from pydevelop.community.enterprise import EsnGraph
from pydevelop.community.errors import ShapeMismatchError
from pydevelop.community.intimacy import (
    IntimacyMatrix,
    Source,
    chart_intimacy,
    compute_intimacy,
    dump_matrix,
    group_intimacy,
    load_matrix,
    normalize,
    post_intimacy,
    social_intimacy,
    title_intimacy,
    workplace_intimacy,
)
from pydevelop.community.synth import SynthConfig, generate


def entry(m: IntimacyMatrix, a: str, b: str) -> float:
    index = {x: i for i, x in enumerate(m.index_order)}
    return float(m.values[index[a], index[b]])


class TestSocial:
    def test_partial_overlap(self):
        users = ("u", "v", "a", "b", "c", "x", "y", "z")
        graph = EsnGraph(
            users=users, follow_edges=(("u", "a"), ("u", "b"), ("v", "a"), ("v", "c"))
        )
        assert entry(social_intimacy(graph), "u", "v") == pytest.approx(0.125 * math.log(2))

    def test_same_single_neighbour(self):
        graph = EsnGraph(users=("u", "v", "a", "x"), follow_edges=(("u", "a"), ("a", "v")))
        assert entry(social_intimacy(graph), "u", "v") == pytest.approx(0.25 * math.log(4))

    def test_disjoint_neighbourhoods(self):
        graph = EsnGraph(users=("u", "v", "a", "b"), follow_edges=(("u", "a"), ("v", "b")))
        assert entry(social_intimacy(graph), "u", "v") == 0.0

    def test_direction_is_ignored(self, planted):
        graph = planted.graph
        reversed_graph = replace(
            graph, follow_edges=tuple((dst, src) for src, dst in graph.follow_edges)
        )
        np.testing.assert_array_equal(
            social_intimacy(graph).values, social_intimacy(reversed_graph).values
        )


class TestGroup:
    def test_imf_sum(self):
        users = ("u", "v", "w1", "w2", "w3", "w4", "w5", "w6")
        graph = EsnGraph(
            users=users,
            groups=("g1", "g2"),
            membership_edges=(
                ("u", "g1"), ("v", "g1"),
                ("u", "g2"), ("v", "g2"), ("w1", "g2"), ("w2", "g2"),
            ),
        )
        assert entry(group_intimacy(graph), "u", "v") == pytest.approx(math.log(4) + math.log(2))
        assert entry(group_intimacy(graph), "u", "w1") == pytest.approx(math.log(2))
        assert entry(group_intimacy(graph), "w3", "w4") == 0.0

    def test_universal_group_vanishes(self):
        users = ("a", "b", "c")
        graph = EsnGraph(
            users=users, groups=("all",), membership_edges=tuple((u, "all") for u in users)
        )
        assert not group_intimacy(graph).values.any()

    def test_matches_enumeration(self, planted):
        graph = planted.graph
        m = group_intimacy(graph)
        n = len(graph.users)
        groups_of = {u: set() for u in graph.users}
        members = {g: set() for g in graph.groups}
        for u, g in graph.membership_edges:
            groups_of[u].add(g)
            members[g].add(u)
        users = graph.users[:10]
        for i, a in enumerate(users):
            for b in users[i + 1:]:
                expected = sum(math.log(n / len(members[g])) for g in groups_of[a] & groups_of[b])
                assert entry(m, a, b) == pytest.approx(expected, abs=1e-12)


class TestPost:
    def test_jaccard(self):
        graph = EsnGraph(
            users=("u", "v", "w"),
            posts=("p1", "p2", "p3"),
            post_edges=(
                ("u", "p1", "write"), ("u", "p2", "like"),
                ("v", "p2", "comment"), ("v", "p3", "write"),
            ),
        )
        m = post_intimacy(graph)
        assert entry(m, "u", "v") == pytest.approx(1 / 3)
        assert entry(m, "u", "w") == 0.0

    def test_identical_sets(self, tiny_dataset):
        assert entry(post_intimacy(tiny_dataset.graph), "ana", "ben") == 1.0


class TestChart:
    def test_hand_distances(self, tiny_dataset):
        m = chart_intimacy(tiny_dataset.chart)
        assert entry(m, "ana", "ben") == 1.0
        assert entry(m, "dan", "eve") == 0.5
        assert entry(m, "fay", "dan") == 0.25
        assert entry(m, "ana", "ana") == 0.0

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_bfs(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 51))
        result = generate(SynthConfig(n=n, k_true=2, seed=seed))
        chart = result.chart
        tree = nx.Graph(list(chart.manage_edges))
        tree.add_nodes_from(chart.employees)
        lengths = dict(nx.all_pairs_shortest_path_length(tree))
        m = chart_intimacy(chart)
        for i, a in enumerate(chart.employees):
            for j, b in enumerate(chart.employees):
                expected = 0.0 if a == b else 1.0 / lengths[a][b]
                assert m.values[i, j] == pytest.approx(expected, abs=1e-12)


class TestTitle:
    def test_shared_root(self, tiny_dataset):
        m = title_intimacy(tiny_dataset.chart)
        assert entry(m, "ben", "cat") == 0.5
        assert entry(m, "fay", "cat") == 0.5
        assert entry(m, "dan", "eve") == 0.5

    def test_different_roots(self, tiny_dataset):
        assert entry(title_intimacy(tiny_dataset.chart), "dan", "ben") == 0.0


class TestWorkplace:
    def test_levels(self, tiny_dataset):
        m = workplace_intimacy(tiny_dataset.chart)
        assert entry(m, "ana", "ben") == 1.0
        assert entry(m, "ben", "cat") == 0.5
        assert entry(m, "ana", "dan") == 0.0


class TestNormalize:
    def test_halves(self):
        m = IntimacyMatrix(Source.GROUP, [[0, 2], [2, 0]], ("a", "b"))
        np.testing.assert_array_equal(normalize(m).values, [[0, 1], [1, 0]])

    def test_zero_and_unit_are_fixed_points(self):
        zero = IntimacyMatrix(Source.POST, np.zeros((2, 2)), ("a", "b"))
        unit = IntimacyMatrix(Source.POST, [[0, 1], [1, 0]], ("a", "b"))
        assert normalize(zero) is zero
        assert normalize(unit) is unit

    def test_idempotent(self, planted):
        m = normalize(group_intimacy(planted.graph))
        np.testing.assert_array_equal(normalize(m).values, m.values)


def test_all_kernels_keep_invariants(planted):
    for m in compute_intimacy(planted.dataset, normalized=False):
        assert m.problems() == [], m.source
    for m in compute_intimacy(planted.dataset):
        assert m.values.max() <= 1.0


def test_bounded_kernels(planted):
    bundle = compute_intimacy(planted.dataset, normalized=False)
    for source in (Source.POST, Source.TITLE, Source.WORKPLACE):
        assert bundle[source].values.max() <= 1.0


def test_threaded_compute_is_identical(planted):
    serial = compute_intimacy(planted.dataset)
    threaded = compute_intimacy(planted.dataset, workers=4)
    for a, b in zip(serial, threaded):
        assert a.source is b.source
        np.testing.assert_array_equal(a.values, b.values)


def test_bundle_lookup_and_replace(planted):
    bundle = compute_intimacy(planted.dataset)
    assert [m.source for m in bundle] == list(Source)
    zero = IntimacyMatrix(Source.TITLE, np.zeros_like(bundle["title"].values),
                          bundle["title"].index_order)
    swapped = bundle.replace(zero)
    assert swapped[Source.TITLE] is zero
    assert swapped[Source.CHART] is bundle[Source.CHART]


def test_shape_checked():
    with pytest.raises(ShapeMismatchError):
        IntimacyMatrix(Source.SOCIAL, np.zeros((2, 3)), ("a", "b"))


def test_matrix_dump(tmp_path, tiny_dataset):
    m = chart_intimacy(tiny_dataset.chart)
    dump_matrix(m, tmp_path / "chart.json")
    loaded = load_matrix(tmp_path / "chart.json")
    assert loaded.source is Source.CHART
    assert loaded.index_order == m.index_order
    np.testing.assert_array_equal(loaded.values, m.values)


def random_enterprise(seed):
    rng = np.random.default_rng(seed)
    noise = {s: float(rng.uniform(0, 0.5)) for s in ("social", "group", "post", "chart", "title")}
    cfg = SynthConfig(
        n=int(rng.integers(6, 15)),
        k_true=int(rng.integers(2, 4)),
        esn_fraction=0.7,
        p_in=0.5,
        p_out=0.1,
        source_noise=noise,
        seed=seed,
    )
    return generate(cfg).dataset


def pairwise_oracles(dataset):
    graph, chart = dataset.graph, dataset.chart
    users, employees = graph.users, chart.employees
    n = len(users)

    neighbours = {u: set() for u in users}
    for src, dst in graph.follow_edges:
        if src != dst:
            neighbours[src].add(dst)
            neighbours[dst].add(src)
    groups = {u: set() for u in users}
    for user, group in graph.membership_edges:
        groups[user].add(group)
    group_size = {}
    for user, group in set(graph.membership_edges):
        group_size[group] = group_size.get(group, 0) + 1
    posts = {u: set() for u in users}
    for user, post, _ in graph.post_edges:
        posts[user].add(post)

    tree = nx.Graph()
    tree.add_nodes_from(employees)
    tree.add_edges_from(chart.manage_edges)
    steps = dict(nx.all_pairs_shortest_path_length(tree))

    def jaccard(x, y):
        return len(x & y) / len(x | y) if x | y else 0.0

    def social(a, b):
        shared = len(neighbours[a] & neighbours[b])
        if not shared:
            return 0.0
        pmi = shared / n * math.log(shared * n / (len(neighbours[a]) * len(neighbours[b])))
        return max(pmi, 0.0)

    def group(a, b):
        return sum(math.log(n / group_size[g]) for g in groups[a] & groups[b])

    def post(a, b):
        return jaccard(posts[a], posts[b])

    def chart_(a, b):
        return 1.0 / steps[a][b] if b in steps[a] else 0.0

    def title(a, b):
        ta, tb = chart.titles[a], chart.titles[b]
        if ta.root_term != tb.root_term:
            return 0.0
        return jaccard(set(ta.tokens), set(tb.tokens))

    def workplace(a, b):
        wa, wb = chart.workplaces[a], chart.workplaces[b]
        return 0.5 * ((wa.country == wb.country) + (wa.time_zone == wb.time_zone))

    return {
        Source.SOCIAL: (users, social),
        Source.GROUP: (users, group),
        Source.POST: (users, post),
        Source.CHART: (employees, chart_),
        Source.TITLE: (employees, title),
        Source.WORKPLACE: (employees, workplace),
    }


@pytest.mark.parametrize("seed", range(20))
def test_kernels_match_pairwise_formulas(seed):
    dataset = random_enterprise(seed)
    bundle = compute_intimacy(dataset, normalized=False)
    for source, (ids, formula) in pairwise_oracles(dataset).items():
        m = bundle[source]
        assert m.index_order == tuple(ids)
        expected = np.array(
            [[0.0 if a == b else formula(a, b) for b in ids] for a in ids]
        )
        np.testing.assert_allclose(m.values, expected, rtol=0, atol=1e-12, err_msg=source.value)
