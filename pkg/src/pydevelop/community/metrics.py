"""Community quality metrics.

Four compare a prediction with a ground truth (rand, mi, purity,
inverse_purity). Four are intrinsic and read a :class:`SimilarityOracle`
built from the dataset itself (density, silhouette, ndbi, entropy).
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial.distance import cdist
from scipy.stats import entropy
from sklearn.metrics import mutual_info_score, rand_score, silhouette_score
from sklearn.metrics.cluster import contingency_matrix

from .assignment import Partition
from .enterprise import EnterpriseDataset
from .errors import MetricUndefinedError, RosterMismatchError
from .intimacy import IntimacyBundle, normalize

logger = logging.getLogger(__name__)

GROUND_TRUTH_KEYS = ("rand", "mi", "purity", "inverse_purity")
INTRINSIC_KEYS = ("density", "silhouette", "ndbi", "entropy")
METRIC_KEYS = GROUND_TRUTH_KEYS + INTRINSIC_KEYS


@dataclass(frozen=True)
class SimilarityOracle:
    """Dataset-derived similarity used by the intrinsic metrics.

    Attributes:
        values: |N|×|N| mean normalized intimacy, symmetric, in [0, 1], zero diagonal.
        edge_set: Undirected (i, j) index pairs, i < j, of follow and management links.
        index_order: Employee ids of the rows.
    """

    values: np.ndarray
    edge_set: Tuple[Tuple[int, int], ...]
    index_order: Tuple[str, ...]

    def __post_init__(self):
        values = np.array(self.values, dtype=float, copy=True)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "index_order", tuple(self.index_order))
        object.__setattr__(self, "edge_set", tuple(self.edge_set))

    def distances(self) -> np.ndarray:
        d = 1.0 - self.values
        np.fill_diagonal(d, 0.0)
        return d


def build_oracle(dataset: EnterpriseDataset, bundle: IntimacyBundle) -> SimilarityOracle:
    """Average the six normalized matrices in company index space.

    ESN matrices are carried over through T. A pair averages only the sources
    defined for both of its employees: six when both have ESN accounts, three
    otherwise.
    """
    align = dataset.alignment
    t = align.matrix()
    covered = align.covered_mask().astype(float)

    total = np.zeros((len(dataset.roster), len(dataset.roster)))
    for m in bundle.company:
        total += normalize(m).values
    for m in bundle.esn:
        total += t.T @ normalize(m).values @ t
    counts = 3.0 + 3.0 * np.outer(covered, covered)
    values = total / counts
    values = (values + values.T) / 2.0
    np.fill_diagonal(values, 0.0)

    index = dataset.chart.employee_index()
    edges = set()
    for a, b in dataset.graph.undirected_follows():
        ea, eb = align.pairs.get(a), align.pairs.get(b)
        if ea in index and eb in index and ea != eb:
            edges.add(tuple(sorted((index[ea], index[eb]))))
    for mgr, sub in dataset.chart.manage_edges:
        if mgr in index and sub in index and mgr != sub:
            edges.add(tuple(sorted((index[mgr], index[sub]))))

    return SimilarityOracle(
        values=values, edge_set=tuple(sorted(edges)), index_order=dataset.roster
    )


def _paired_labels(p: Partition, q: Partition) -> Tuple[np.ndarray, np.ndarray]:
    if set(p.index_order) != set(q.index_order):
        only_p = sorted(set(p.index_order) - set(q.index_order))
        only_q = sorted(set(q.index_order) - set(p.index_order))
        example = only_p[0] if only_p else only_q[0]
        raise RosterMismatchError(
            f"partitions cover different employees ({len(only_p)} only in the first, "
            f"{len(only_q)} only in the second, e.g. {example})"
        )
    return p.label_array(), q.label_array(p.index_order)


def _oracle_labels(p: Partition, o: SimilarityOracle) -> np.ndarray:
    if set(p.index_order) != set(o.index_order):
        raise RosterMismatchError("partition and dataset cover different employees")
    return p.label_array(o.index_order)


def rand_index(p: Partition, q: Partition) -> float:
    """Share of employee pairs that both partitions group or separate alike."""
    a, b = _paired_labels(p, q)
    return float(rand_score(a, b))


def mutual_information(p: Partition, q: Partition) -> float:
    """Mutual information of the two label distributions, natural log."""
    a, b = _paired_labels(p, q)
    return float(mutual_info_score(a, b))


def purity(p: Partition, q: Partition) -> float:
    """Fraction of employees in the majority truth class of their predicted community."""
    predicted, truth = _paired_labels(p, q)
    if predicted.size == 0:
        return 1.0
    table = contingency_matrix(truth, predicted)
    return float(table.max(axis=0).sum() / predicted.size)


def inverse_purity(p: Partition, q: Partition) -> float:
    return purity(q, p)


def density(p: Partition, o: SimilarityOracle) -> float:
    """Fraction of follow and management links that stay inside a community."""
    if not o.edge_set:
        raise MetricUndefinedError("density needs at least one link")
    labels = _oracle_labels(p, o)
    edges = np.array(o.edge_set)
    inside = labels[edges[:, 0]] == labels[edges[:, 1]]
    return float(np.count_nonzero(inside) / len(edges))


def silhouette(p: Partition, o: SimilarityOracle) -> float:
    """Mean silhouette with distance ``1 - similarity``; singletons score 0."""
    labels = _oracle_labels(p, o)
    used = len(np.unique(labels))
    if used < 2:
        raise MetricUndefinedError("silhouette needs at least two non-empty communities")
    if used == labels.size:
        return 0.0
    return float(silhouette_score(o.distances(), labels, metric="precomputed"))


def davies_bouldin(p: Partition, o: SimilarityOracle) -> float:
    """Davies-Bouldin index on the rows of the distance matrix.

    Centroid distance 0 with positive scatter gives an infinite index.
    """
    labels = _oracle_labels(p, o)
    if p.k < 2:
        raise MetricUndefinedError("Davies-Bouldin needs K >= 2")
    empty = p.empty_communities()
    if empty:
        raise MetricUndefinedError(f"Davies-Bouldin is undefined with empty community {empty[0]}")

    embedding = o.distances()
    centroids = np.stack([embedding[labels == c].mean(axis=0) for c in range(p.k)])
    scatter = np.array(
        [
            np.linalg.norm(embedding[labels == c] - centroids[c], axis=1).mean()
            for c in range(p.k)
        ]
    )
    separation = cdist(centroids, centroids)
    spread = scatter[:, None] + scatter[None, :]
    ratio = np.zeros_like(separation)
    positive = separation > 0
    ratio[positive] = spread[positive] / separation[positive]
    ratio[~positive & (spread > 0)] = np.inf
    np.fill_diagonal(ratio, -np.inf)
    return float(ratio.max(axis=1).mean())


def normalized_dbi(p: Partition, o: SimilarityOracle) -> float:
    """``1 / (1 + DBI)``: 1 for tight separated communities, toward 0 for overlap."""
    return float(1.0 / (1.0 + davies_bouldin(p, o)))


def size_entropy(p: Partition) -> float:
    """Shannon entropy (natural log) of the community size distribution."""
    sizes = p.sizes()
    sizes = sizes[sizes > 0]
    if sizes.size == 0:
        return 0.0
    return float(entropy(sizes))


def _safe(name: str, fn, *args) -> Optional[float]:
    try:
        return fn(*args)
    except MetricUndefinedError as e:
        logger.warning(f"{name} is undefined here: {e.format_message()}")
        return None


def evaluate(
    pred: Partition,
    oracle: SimilarityOracle,
    truth: Optional[Partition] = None,
) -> Dict[str, Any]:
    """Run the metric suite.

    Ground-truth metrics (only with ``truth``) compare the employees the
    prediction labels. Intrinsic metrics run on the whole roster, with
    unlabeled employees gathered in one extra "unassigned" community. Metrics
    that are undefined for the input come back as ``None``.

    Raises:
        RosterMismatchError: The prediction labels employees outside the
            dataset, or the truth misses a predicted employee.
    """
    roster = oracle.index_order
    known = set(roster)
    stray = [emp for emp in pred.index_order if emp not in known]
    if stray:
        raise RosterMismatchError(f"predicted employee {stray[0]} is not in the dataset")

    results: Dict[str, Any] = {}
    if truth is not None:
        missing = [emp for emp in pred.index_order if emp not in truth.labels]
        if missing:
            raise RosterMismatchError(
                f"truth has no label for predicted employee {missing[0]} "
                f"({len(missing)} missing)"
            )
        covered_truth = truth.restrict(pred.index_order)
        results["rand"] = rand_index(pred, covered_truth)
        results["mi"] = mutual_information(pred, covered_truth)
        results["purity"] = purity(pred, covered_truth)
        results["inverse_purity"] = inverse_purity(pred, covered_truth)

    extended = pred.with_sentinel(roster)
    results["density"] = _safe("density", density, extended, oracle)
    results["silhouette"] = _safe("silhouette", silhouette, extended, oracle)
    results["ndbi"] = _safe("ndbi", normalized_dbi, extended, oracle)
    results["entropy"] = size_entropy(extended)
    results["coverage"] = pred.coverage(roster)
    return results


def metric_subset(results: Dict[str, Any], keys: Sequence[str]) -> Dict[str, Any]:
    return {key: results[key] for key in keys if key in results}
