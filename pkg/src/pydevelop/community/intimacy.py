"""The six enterprise-intimacy kernels.

Three kernels read the ESN graph and produce |U|×|U| matrices in ESN user
order (social, group, post). Three read the org chart and produce |N|×|N|
matrices in chart employee order (chart, title, workplace).

Every kernel returns an :class:`IntimacyMatrix` whose values are symmetric,
finite, nonnegative and zero on the diagonal. Logarithms are natural.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Dict, Iterator, List, Sequence, Tuple, Union

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .dataset import read_json, write_json
from .enterprise import EnterpriseDataset, EsnGraph, OrgChart
from .errors import DatasetParseError, ShapeMismatchError

logger = logging.getLogger(__name__)


class Source(str, Enum):
    SOCIAL = "social"
    GROUP = "group"
    POST = "post"
    CHART = "chart"
    TITLE = "title"
    WORKPLACE = "workplace"

    @property
    def scope(self) -> "Scope":
        return Scope.ESN if self in ESN_SOURCES else Scope.COMPANY


class Scope(str, Enum):
    ESN = "esn"
    COMPANY = "company"


ESN_SOURCES: Tuple[Source, ...] = (Source.SOCIAL, Source.GROUP, Source.POST)
COMPANY_SOURCES: Tuple[Source, ...] = (Source.CHART, Source.TITLE, Source.WORKPLACE)


@dataclass(frozen=True)
class IntimacyMatrix:
    """One pairwise intimacy signal.

    ``values`` is copied on construction and made read-only.
    """

    source: Source
    values: np.ndarray
    index_order: Tuple[str, ...]

    def __post_init__(self):
        values = np.array(self.values, dtype=float, copy=True)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "source", Source(self.source))
        object.__setattr__(self, "index_order", tuple(self.index_order))
        n = len(self.index_order)
        if values.shape != (n, n):
            raise ShapeMismatchError(
                f"{self.source.value} matrix has shape {values.shape}, "
                f"expected ({n}, {n}) from its index order"
            )

    @property
    def scope(self) -> Scope:
        return self.source.scope

    @property
    def size(self) -> int:
        return len(self.index_order)

    def problems(self) -> List[str]:
        """Return the matrix invariants this instance breaks (empty when sound)."""
        v = self.values
        found = []
        if not np.all(np.isfinite(v)):
            found.append("non-finite entries")
        if not np.array_equal(v, v.T):
            found.append("not exactly symmetric")
        if np.any(v < 0):
            found.append("negative entries")
        if np.any(np.diag(v) != 0):
            found.append("non-zero diagonal")
        return found

    def to_json(self) -> Dict[str, Any]:
        return {
            "source": self.source.value,
            "ids": list(self.index_order),
            "rows": self.values.tolist(),
        }

    @classmethod
    def from_json(cls, doc: Dict[str, Any]) -> "IntimacyMatrix":
        try:
            return cls(
                source=Source(doc["source"]),
                values=np.array(doc["rows"], dtype=float).reshape(
                    len(doc["ids"]), len(doc["ids"])
                ),
                index_order=tuple(doc["ids"]),
            )
        except (KeyError, ValueError, TypeError) as e:
            raise DatasetParseError(f"invalid intimacy matrix document: {e}")


def _symmetric(values: np.ndarray) -> np.ndarray:
    """Exact symmetrization with a zero diagonal."""
    out = (values + values.T) / 2.0
    np.fill_diagonal(out, 0.0)
    return out


def _incidence(
    rows: Sequence[str], cols: Sequence[str], pairs: Iterator[Tuple[str, str]]
) -> np.ndarray:
    """0/1 integer incidence matrix for (row id, column id) pairs."""
    row_index = {r: i for i, r in enumerate(rows)}
    col_index = {c: j for j, c in enumerate(cols)}
    out = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for r, c in pairs:
        if r in row_index and c in col_index:
            out[row_index[r], col_index[c]] = 1
    return out


def _jaccard(incidence: np.ndarray) -> np.ndarray:
    """Row-pair Jaccard coefficients of a 0/1 incidence matrix; 0 on empty unions."""
    inter = incidence @ incidence.T
    sizes = incidence.sum(axis=1)
    union = sizes[:, None] + sizes[None, :] - inter
    out = np.zeros(inter.shape, dtype=float)
    np.divide(inter, union, out=out, where=union > 0)
    return out


def _log_done(m: IntimacyMatrix) -> IntimacyMatrix:
    peak = float(m.values.max()) if m.size else 0.0
    logger.debug(f"{m.source.value} intimacy: {m.size}x{m.size}, max entry {peak:.6g}")
    return m


def social_intimacy(graph: EsnGraph) -> IntimacyMatrix:
    """PMI of shared follow-neighbourhoods, direction ignored, clamped at zero."""
    users = graph.users
    n = len(users)
    adj = _incidence(
        users,
        users,
        (e for src, dst in graph.follow_edges if src != dst for e in ((src, dst), (dst, src))),
    )
    shared = adj @ adj.T
    degree = adj.sum(axis=1)
    values = np.zeros((n, n), dtype=float)
    if n:
        denom = degree[:, None] * degree[None, :]
        mask = shared > 0
        ratio = (shared[mask] * n) / denom[mask]
        values[mask] = (shared[mask] / n) * np.log(ratio)
    np.maximum(values, 0.0, out=values)
    return _log_done(IntimacyMatrix(Source.SOCIAL, _symmetric(values), users))


def group_intimacy(graph: EsnGraph) -> IntimacyMatrix:
    """Sum of inverse membership frequencies ln(|U| / |members(g)|) over shared groups."""
    users = graph.users
    n = len(users)
    member = _incidence(users, graph.groups, iter(graph.membership_edges))
    counts = member.sum(axis=0)
    ratio = np.ones(len(graph.groups), dtype=float)
    np.divide(n, counts, out=ratio, where=counts > 0)
    imf = np.log(ratio)
    values = (member * imf) @ member.T
    return _log_done(IntimacyMatrix(Source.GROUP, _symmetric(values), users))


def post_intimacy(graph: EsnGraph) -> IntimacyMatrix:
    """Jaccard coefficient of the pooled written/commented/liked post sets."""
    users = graph.users
    linked = _incidence(users, graph.posts, ((u, p) for u, p, _ in graph.post_edges))
    return _log_done(IntimacyMatrix(Source.POST, _symmetric(_jaccard(linked)), users))


def chart_intimacy(chart: OrgChart) -> IntimacyMatrix:
    """Inverse number of steps between two employees in the management tree."""
    employees = chart.employees
    index = chart.employee_index()
    n = len(employees)
    rows, cols = [], []
    for mgr, sub in chart.manage_edges:
        if mgr in index and sub in index:
            rows.append(index[mgr])
            cols.append(index[sub])
    values = np.zeros((n, n), dtype=float)
    if n:
        graph = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
        steps = shortest_path(graph, directed=False, unweighted=True)
        np.divide(1.0, steps, out=values, where=np.isfinite(steps) & (steps > 0))
    return _log_done(IntimacyMatrix(Source.CHART, _symmetric(values), employees))


def title_intimacy(chart: OrgChart) -> IntimacyMatrix:
    """Token Jaccard of job titles, counted only for titles sharing a root term."""
    employees = chart.employees
    vocab: Dict[str, int] = {}
    for emp in employees:
        for token in chart.titles[emp].tokens:
            vocab.setdefault(token, len(vocab))
    tokens = np.zeros((len(employees), len(vocab)), dtype=np.int64)
    for i, emp in enumerate(employees):
        for token in chart.titles[emp].tokens:
            tokens[i, vocab[token]] = 1
    roots = np.array([chart.titles[emp].root_term for emp in employees], dtype=object)
    same_root = roots[:, None] == roots[None, :]
    values = np.where(same_root, _jaccard(tokens), 0.0)
    return _log_done(IntimacyMatrix(Source.TITLE, _symmetric(values), employees))


def workplace_intimacy(chart: OrgChart) -> IntimacyMatrix:
    """Half a point each for sharing a country and for sharing a time zone."""
    employees = chart.employees
    _, country = np.unique(
        [chart.workplaces[e].country for e in employees], return_inverse=True
    )
    _, zone = np.unique(
        [chart.workplaces[e].time_zone for e in employees], return_inverse=True
    )
    country = country.reshape(-1)
    zone = zone.reshape(-1)
    values = 0.5 * (
        (country[:, None] == country[None, :]).astype(float)
        + (zone[:, None] == zone[None, :]).astype(float)
    )
    return _log_done(IntimacyMatrix(Source.WORKPLACE, _symmetric(values), employees))


def normalize(m: IntimacyMatrix) -> IntimacyMatrix:
    """Scale ``m`` so its largest entry is 1. All-zero matrices come back as-is."""
    peak = float(m.values.max()) if m.size else 0.0
    if peak == 0.0 or peak == 1.0:
        return m
    return IntimacyMatrix(m.source, m.values / peak, m.index_order)


ESN_KERNELS: Dict[Source, Callable[[EsnGraph], IntimacyMatrix]] = {
    Source.SOCIAL: social_intimacy,
    Source.GROUP: group_intimacy,
    Source.POST: post_intimacy,
}

COMPANY_KERNELS: Dict[Source, Callable[[OrgChart], IntimacyMatrix]] = {
    Source.CHART: chart_intimacy,
    Source.TITLE: title_intimacy,
    Source.WORKPLACE: workplace_intimacy,
}


@dataclass(frozen=True)
class IntimacyBundle:
    """The six matrices of one dataset, ESN block first."""

    esn: Tuple[IntimacyMatrix, IntimacyMatrix, IntimacyMatrix]
    company: Tuple[IntimacyMatrix, IntimacyMatrix, IntimacyMatrix]
    normalized: bool = True

    def __iter__(self) -> Iterator[IntimacyMatrix]:
        return iter(self.esn + self.company)

    def __getitem__(self, source: Union[Source, str]) -> IntimacyMatrix:
        source = Source(source)
        for m in self:
            if m.source is source:
                return m
        raise KeyError(source.value)

    def replace(self, matrix: IntimacyMatrix) -> "IntimacyBundle":
        """Copy of the bundle with the matrix of the same source swapped in."""
        esn = tuple(matrix if m.source is matrix.source else m for m in self.esn)
        company = tuple(matrix if m.source is matrix.source else m for m in self.company)
        return IntimacyBundle(esn=esn, company=company, normalized=self.normalized)


def compute_intimacy(
    dataset: EnterpriseDataset, normalized: bool = True, workers: int = 1
) -> IntimacyBundle:
    """Compute all six intimacy matrices for ``dataset``.

    Args:
        dataset: A validated dataset.
        normalized: Apply :func:`normalize` to each matrix.
        workers: Thread count. Kernels share no state, so the result does not
            depend on it.

    Returns:
        An :class:`IntimacyBundle` with matrices in source order.
    """
    jobs: List[Tuple[Callable[[Any], IntimacyMatrix], Any]] = [
        (fn, dataset.graph) for fn in ESN_KERNELS.values()
    ] + [(fn, dataset.chart) for fn in COMPANY_KERNELS.values()]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            matrices = list(pool.map(lambda job: job[0](job[1]), jobs))
    else:
        matrices = [fn(arg) for fn, arg in jobs]

    if normalized:
        matrices = [normalize(m) for m in matrices]
    return IntimacyBundle(
        esn=tuple(matrices[:3]), company=tuple(matrices[3:]), normalized=normalized
    )


def dump_matrix(m: IntimacyMatrix, path: Union[str, Path]) -> None:
    write_json(path, m.to_json())


def load_matrix(path: Union[str, Path]) -> IntimacyMatrix:
    return IntimacyMatrix.from_json(read_json(path))
