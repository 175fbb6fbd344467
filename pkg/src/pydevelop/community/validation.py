"""Structural checks for enterprise datasets.

:func:`validate` never raises. It walks the ESN graph, the org chart and the
alignment and returns one :class:`Violation` per breached invariant, so a
caller can show every problem at once.
"""

from collections import Counter
from dataclasses import dataclass
from typing import List, Optional

import networkx as nx

from .enterprise import AlignmentMap, EnterpriseDataset, EsnGraph, OrgChart, PostKind

_POST_KINDS = {kind.value for kind in PostKind}


@dataclass(frozen=True)
class Violation:
    """A single broken invariant, tied to the record that breaks it."""

    code: str
    record: str
    message: str

    def __str__(self) -> str:
        return f"[{self.code}] {self.record}: {self.message}"

    def to_dict(self):
        return {"code": self.code, "record": self.record, "message": self.message}


class DatasetValidator:
    """Collects violations for one dataset."""

    def __init__(self, graph: EsnGraph, chart: OrgChart, align: AlignmentMap):
        self.graph = graph
        self.chart = chart
        self.align = align
        self.violations: List[Violation] = []

    def run(self) -> List[Violation]:
        self._check_graph()
        self._check_chart()
        self._check_alignment()
        return self.violations

    def _add(self, code: str, record: str, message: str) -> None:
        self.violations.append(Violation(code, record, message))

    def _check_unique(self, kind: str, items) -> None:
        for item, count in Counter(items).items():
            if count > 1:
                self._add(f"duplicate-{kind}", str(item), f"declared {count} times")
        for item in items:
            if not str(item):
                self._add(f"empty-{kind}", repr(item), "identifier is empty")

    def _check_graph(self) -> None:
        graph = self.graph
        users = set(graph.users)
        groups = set(graph.groups)
        posts = set(graph.posts)

        self._check_unique("user", graph.users)
        self._check_unique("group", graph.groups)
        self._check_unique("post", graph.posts)

        for src, dst in graph.follow_edges:
            record = f"follow {src}->{dst}"
            if src not in users or dst not in users:
                self._add("dangling-follow", record, "endpoint is not a declared user")
            if src == dst:
                self._add("self-follow", record, "follow edges must be loop-free")
        self._check_duplicate_edges("follow", graph.follow_edges)

        for user, group in graph.membership_edges:
            record = f"membership {user}->{group}"
            if user not in users:
                self._add("dangling-membership", record, "user is not declared")
            if group not in groups:
                self._add("dangling-membership", record, "group is not declared")
        self._check_duplicate_edges("membership", graph.membership_edges)

        for user, post, kind in graph.post_edges:
            record = f"post-link {user}->{post} ({kind})"
            if user not in users:
                self._add("dangling-post-link", record, "user is not declared")
            if post not in posts:
                self._add("dangling-post-link", record, "post is not declared")
            if kind not in _POST_KINDS:
                self._add(
                    "bad-post-kind", record, f"kind must be one of {sorted(_POST_KINDS)}"
                )
        self._check_duplicate_edges("post-link", graph.post_edges)

    def _check_duplicate_edges(self, kind: str, edges) -> None:
        for edge, count in Counter(edges).items():
            if count > 1:
                self._add(
                    f"duplicate-{kind}",
                    f"{kind} {'->'.join(edge)}",
                    f"edge appears {count} times",
                )

    def _check_chart(self) -> None:
        chart = self.chart
        employees = set(chart.employees)
        self._check_unique("employee", chart.employees)

        if chart.root not in employees:
            self._add("missing-root", chart.root, "root is not a declared employee")

        managers_of = {}
        for manager, sub in chart.manage_edges:
            managers_of.setdefault(sub, []).append(manager)
            if manager not in employees:
                self._add(
                    "dangling-manager", sub, f"manager {manager} is not an employee"
                )
            if sub not in employees:
                self._add("dangling-subordinate", sub, "subordinate is not an employee")

        for emp in chart.employees:
            managers = managers_of.get(emp, [])
            if emp == chart.root:
                if managers:
                    self._add("root-has-manager", emp, "the root cannot have a manager")
            elif not managers:
                self._add("missing-manager", emp, "every non-root employee needs a manager")
            elif len(managers) > 1:
                self._add(
                    "multiple-managers",
                    emp,
                    f"has {len(managers)} managers: {', '.join(managers)}",
                )

        if chart.root in employees:
            tree = nx.DiGraph()
            tree.add_nodes_from(chart.employees)
            tree.add_edges_from(
                (m, s) for m, s in chart.manage_edges if m in employees and s in employees
            )
            reachable = nx.descendants(tree, chart.root) | {chart.root}
            for emp in dict.fromkeys(chart.employees):
                if emp not in reachable:
                    self._add("unreachable", emp, "not reachable from the root")

        for emp in dict.fromkeys(chart.employees):
            title = chart.titles.get(emp)
            if title is None:
                self._add("missing-title", emp, "no job title")
            elif not title.tokens:
                self._add("empty-title", emp, f"title {title.raw!r} has no tokens")
            elif title.root_term not in title.tokens:
                self._add("bad-title-root", emp, "root term is not one of the tokens")

            place = chart.workplaces.get(emp)
            if place is None:
                self._add("missing-workplace", emp, "no workplace")
            elif not place.country or not place.time_zone:
                self._add(
                    "empty-workplace", emp, "country and time zone must be non-empty"
                )

    def _check_alignment(self) -> None:
        align = self.align
        users = set(self.graph.users)
        employees = set(self.chart.employees)

        for user in dict.fromkeys(self.graph.users):
            if user not in align.pairs:
                self._add(
                    "unaligned-user", user, "ESN user has no employee in the chart"
                )
        taken = {}
        for user, emp in align.pairs.items():
            if user not in users:
                self._add("alignment-unknown-user", user, "not an ESN user")
            if emp not in employees:
                self._add(
                    "alignment-unknown-employee", user, f"maps to unknown employee {emp}"
                )
            if emp in taken:
                self._add(
                    "alignment-collision",
                    emp,
                    f"users {taken[emp]} and {user} map to the same employee",
                )
            else:
                taken[emp] = user


def validate(
    graph: EsnGraph, chart: OrgChart, align: Optional[AlignmentMap] = None
) -> List[Violation]:
    """Return every invariant violation in the dataset (empty when valid)."""
    if align is None:
        align = AlignmentMap.by_identity(graph, chart)
    return DatasetValidator(graph, chart, align).run()


def validate_dataset(dataset: EnterpriseDataset) -> List[Violation]:
    return validate(dataset.graph, dataset.chart, dataset.alignment)
