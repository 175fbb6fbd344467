from dataclasses import replace

from pydevelop.community.enterprise import AlignmentMap
from pydevelop.community.validation import Violation, validate, validate_dataset


def test_valid_fixture(tiny_dataset):
    assert validate_dataset(tiny_dataset) == []


def test_self_follow_is_one_violation(tiny_dataset):
    graph = replace(
        tiny_dataset.graph, follow_edges=tiny_dataset.graph.follow_edges + (("ana", "ana"),)
    )
    violations = validate(graph, tiny_dataset.chart)
    assert [v.code for v in violations] == ["self-follow"]


def test_alignment_collision_is_one_violation(tiny_dataset):
    graph, chart = tiny_dataset.graph, tiny_dataset.chart
    align = AlignmentMap(
        pairs={"ana": "ana", "ben": "ana", "cat": "cat", "dan": "dan", "eve": "eve"},
        user_order=graph.users,
        employee_order=chart.employees,
    )
    violations = validate(graph, chart, align)
    assert len(violations) == 1
    assert violations[0].code == "alignment-collision"
    assert violations[0].record == "ana"


def test_duplicate_edges_are_rejected(tiny_dataset):
    graph = replace(
        tiny_dataset.graph,
        membership_edges=tiny_dataset.graph.membership_edges + (("ana", "g1"),),
    )
    codes = [v.code for v in validate(graph, tiny_dataset.chart)]
    assert codes == ["duplicate-membership"]


def test_dangling_edges(tiny_dataset):
    graph = replace(
        tiny_dataset.graph,
        post_edges=tiny_dataset.graph.post_edges + (("ana", "p9", "share"),),
    )
    codes = sorted(v.code for v in validate(graph, tiny_dataset.chart))
    assert codes == ["bad-post-kind", "dangling-post-link"]


def test_chart_cycle_is_unreachable(tiny_dataset):
    chart = tiny_dataset.chart
    edges = tuple(e for e in chart.manage_edges if e != ("ana", "cat")) + (("eve", "cat"),)
    violations = validate(tiny_dataset.graph, replace(chart, manage_edges=edges))
    unreachable = sorted(v.record for v in violations if v.code == "unreachable")
    assert unreachable == ["cat", "dan", "eve"]


def test_root_with_manager(tiny_dataset):
    chart = tiny_dataset.chart
    edges = chart.manage_edges + (("fay", "ana"),)
    codes = {v.code for v in validate(tiny_dataset.graph, replace(chart, manage_edges=edges))}
    assert "root-has-manager" in codes


def test_violation_rendering():
    v = Violation("self-follow", "follow a->a", "follow edges must be loop-free")
    assert str(v) == "[self-follow] follow a->a: follow edges must be loop-free"
    assert v.to_dict()["code"] == "self-follow"
