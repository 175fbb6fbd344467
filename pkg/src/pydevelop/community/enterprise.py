"""Enterprise data model: the online ESN graph, the org chart and their alignment.

The types here are plain frozen dataclasses. They do not enforce their
invariants on construction so that broken input can still be represented and
reported by :func:`pydevelop.community.validation.validate`.
"""

import re
from dataclasses import dataclass
from enum import Enum
from types import MappingProxyType
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np

DEFAULT_SENIORITY_STOPWORDS: Tuple[str, ...] = (
    "senior",
    "junior",
    "principal",
    "staff",
    "lead",
    "associate",
    "assistant",
    "chief",
    "head",
    "vp",
    "director",
    "i",
    "ii",
    "iii",
    "iv",
    "intern",
)

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


class PostKind(str, Enum):
    """Kinds of user-post interaction; all three are pooled for intimacy."""

    WRITE = "write"
    COMMENT = "comment"
    LIKE = "like"


def tokenize(text: str) -> Tuple[str, ...]:
    """Lowercase ``text`` and split it on whitespace and punctuation.

    Duplicate tokens are dropped, first occurrence wins.
    """
    seen: Dict[str, None] = {}
    for token in _TOKEN_RE.findall(text.lower()):
        seen.setdefault(token, None)
    return tuple(seen)


@dataclass(frozen=True)
class JobTitle:
    """A job title with its bag of tokens and its root job term."""

    raw: str
    tokens: Tuple[str, ...]
    root_term: str

    @classmethod
    def parse(
        cls, raw: str, stopwords: Optional[Iterable[str]] = None
    ) -> "JobTitle":
        """Parse a raw title.

        The root term is the last token that is not a seniority stopword
        ("Senior SDE" and "SDE II" both root at "sde"). A title made only of
        stopwords roots at its last token.
        """
        stop = set(DEFAULT_SENIORITY_STOPWORDS if stopwords is None else stopwords)
        tokens = tokenize(raw)
        ordered = _TOKEN_RE.findall(raw.lower())
        root = ""
        for token in reversed(ordered):
            if token not in stop:
                root = token
                break
        if not root and ordered:
            root = ordered[-1]
        return cls(raw=raw, tokens=tokens, root_term=root)


@dataclass(frozen=True)
class Workplace:
    country: str
    time_zone: str


@dataclass(frozen=True)
class EsnGraph:
    """Heterogeneous enterprise social network.

    Node and edge collections are tuples in file order; they are treated as
    sets, and duplicates are a validation error rather than being merged.
    """

    users: Tuple[str, ...]
    groups: Tuple[str, ...] = ()
    posts: Tuple[str, ...] = ()
    follow_edges: Tuple[Tuple[str, str], ...] = ()
    membership_edges: Tuple[Tuple[str, str], ...] = ()
    post_edges: Tuple[Tuple[str, str, str], ...] = ()

    def user_index(self) -> Dict[str, int]:
        return {user: i for i, user in enumerate(self.users)}

    def undirected_follows(self) -> Tuple[Tuple[str, str], ...]:
        """Follow edges with direction dropped, each unordered pair once."""
        seen: Dict[Tuple[str, str], None] = {}
        for src, dst in self.follow_edges:
            if src == dst:
                continue
            seen.setdefault((src, dst) if src < dst else (dst, src), None)
        return tuple(seen)


@dataclass(frozen=True)
class OrgChart:
    """Attribute-augmented organizational chart (a rooted management tree)."""

    employees: Tuple[str, ...]
    manage_edges: Tuple[Tuple[str, str], ...]
    root: str
    titles: Mapping[str, JobTitle]
    workplaces: Mapping[str, Workplace]
    seniority_stopwords: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "titles", MappingProxyType(dict(self.titles)))
        object.__setattr__(
            self, "workplaces", MappingProxyType(dict(self.workplaces))
        )

    def employee_index(self) -> Dict[str, int]:
        return {emp: i for i, emp in enumerate(self.employees)}

    def managers(self) -> Dict[str, str]:
        """Subordinate → manager. Later edges win when the chart is invalid."""
        return {sub: mgr for mgr, sub in self.manage_edges}


@dataclass(frozen=True)
class AlignmentMap:
    """ESN user → employee mapping, with the orders used to build T."""

    pairs: Mapping[str, str]
    user_order: Tuple[str, ...]
    employee_order: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "pairs", MappingProxyType(dict(self.pairs)))

    @classmethod
    def by_identity(cls, graph: EsnGraph, chart: OrgChart) -> "AlignmentMap":
        """Align users to the chart employees that share their id."""
        known = set(chart.employees)
        pairs = {user: user for user in graph.users if user in known}
        return cls(pairs=pairs, user_order=graph.users, employee_order=chart.employees)

    def matrix(self) -> np.ndarray:
        """Binary transition matrix T of shape |U| × |N|."""
        rows = {user: i for i, user in enumerate(self.user_order)}
        cols = {emp: j for j, emp in enumerate(self.employee_order)}
        t = np.zeros((len(self.user_order), len(self.employee_order)))
        for user, emp in self.pairs.items():
            if user in rows and emp in cols:
                t[rows[user], cols[emp]] = 1.0
        return t

    def covered_mask(self) -> np.ndarray:
        """Boolean mask over employees that have an aligned ESN user."""
        covered = set(self.pairs.values())
        return np.array([emp in covered for emp in self.employee_order], dtype=bool)

    def covered_employees(self) -> Tuple[str, ...]:
        """Employees of aligned users, in ESN user order."""
        return tuple(
            self.pairs[user] for user in self.user_order if user in self.pairs
        )


@dataclass(frozen=True)
class EnterpriseDataset:
    graph: EsnGraph
    chart: OrgChart
    alignment: Optional[AlignmentMap] = None

    def __post_init__(self):
        if self.alignment is None:
            object.__setattr__(
                self, "alignment", AlignmentMap.by_identity(self.graph, self.chart)
            )

    @property
    def roster(self) -> Tuple[str, ...]:
        return self.chart.employees


def build_chart(
    records: Sequence[Mapping[str, object]],
    root: str,
    seniority_stopwords: Optional[Sequence[str]] = None,
) -> OrgChart:
    """Build an :class:`OrgChart` from chart.json-style employee records."""
    stop = tuple(seniority_stopwords) if seniority_stopwords is not None else None
    employees = []
    edges = []
    titles = {}
    workplaces = {}
    for record in records:
        emp = str(record["id"])
        employees.append(emp)
        manager = record.get("manager")
        if manager is not None:
            edges.append((str(manager), emp))
        titles[emp] = JobTitle.parse(str(record.get("title", "")), stop)
        workplaces[emp] = Workplace(
            country=str(record.get("country", "")),
            time_zone=str(record.get("time_zone", "")),
        )
    return OrgChart(
        employees=tuple(employees),
        manage_edges=tuple(edges),
        root=root,
        titles=titles,
        workplaces=workplaces,
        seniority_stopwords=stop,
    )
