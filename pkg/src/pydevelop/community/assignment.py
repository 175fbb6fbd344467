"""Turning factor matrices into disjoint community partitions."""

import logging
import warnings
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from sklearn.cluster import KMeans
from sklearn.exceptions import ConvergenceWarning
from sklearn.preprocessing import normalize as l2_normalize

from .dataset import read_json, write_json
from .errors import DatasetParseError, NumericalError, RosterMismatchError, ShapeMismatchError

logger = logging.getLogger(__name__)

KMEANS_MAX_ITER = 200


@dataclass(frozen=True)
class Partition:
    """Disjoint assignment of ``index_order`` ids to communities ``0..k-1``.

    Empty communities are allowed. ``warnings`` carries notes from the
    assignment step (for example a degenerate k-means input).
    """

    k: int
    labels: Mapping[str, int]
    index_order: Tuple[str, ...]
    warnings: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "labels", MappingProxyType(dict(self.labels)))
        object.__setattr__(self, "index_order", tuple(self.index_order))
        object.__setattr__(self, "warnings", tuple(self.warnings))
        if set(self.labels) != set(self.index_order) or len(self.labels) != len(
            self.index_order
        ):
            raise RosterMismatchError("partition labels do not cover its index order exactly")
        if self.k < 1:
            raise ShapeMismatchError(f"partition needs k >= 1, got {self.k}")
        for emp, label in self.labels.items():
            if not 0 <= label < self.k:
                raise ShapeMismatchError(f"label {label} of {emp} is outside [0, {self.k})")

    @classmethod
    def from_labels(
        cls,
        index_order: Sequence[str],
        labels: Iterable[int],
        k: int,
        warnings: Sequence[str] = (),
    ) -> "Partition":
        labels = [int(x) for x in labels]
        if len(labels) != len(index_order):
            raise ShapeMismatchError(
                f"{len(labels)} labels for {len(index_order)} ids"
            )
        return cls(
            k=k,
            labels=dict(zip(index_order, labels)),
            index_order=tuple(index_order),
            warnings=tuple(warnings),
        )

    def __len__(self) -> int:
        return len(self.index_order)

    def label_array(self, order: Optional[Sequence[str]] = None) -> np.ndarray:
        order = self.index_order if order is None else order
        try:
            return np.array([self.labels[emp] for emp in order], dtype=np.int64)
        except KeyError as e:
            raise RosterMismatchError(f"employee {e.args[0]} has no label")

    def sizes(self) -> np.ndarray:
        return np.bincount(self.label_array(), minlength=self.k)

    def empty_communities(self) -> List[int]:
        return [int(c) for c in np.flatnonzero(self.sizes() == 0)]

    def communities(self) -> List[Tuple[str, ...]]:
        groups: List[List[str]] = [[] for _ in range(self.k)]
        for emp in self.index_order:
            groups[self.labels[emp]].append(emp)
        return [tuple(g) for g in groups]

    def restrict(self, ids: Iterable[str]) -> "Partition":
        """The sub-partition over ``ids`` (which must all be labeled); k is kept."""
        keep = list(dict.fromkeys(ids))
        missing = [emp for emp in keep if emp not in self.labels]
        if missing:
            raise RosterMismatchError(f"cannot restrict to unlabeled employee {missing[0]}")
        return Partition(
            k=self.k,
            labels={emp: self.labels[emp] for emp in keep},
            index_order=tuple(keep),
            warnings=self.warnings,
        )

    def with_sentinel(self, roster: Sequence[str]) -> "Partition":
        """Extend to ``roster``; employees without a label go to community ``k``."""
        known = set(roster)
        extra = [emp for emp in self.index_order if emp not in known]
        if extra:
            raise RosterMismatchError(f"employee {extra[0]} is not in the roster")
        if all(emp in self.labels for emp in roster):
            return self.restrict(roster)
        labels = {emp: self.labels.get(emp, self.k) for emp in roster}
        return Partition(
            k=self.k + 1, labels=labels, index_order=tuple(roster), warnings=self.warnings
        )

    def coverage(self, roster: Sequence[str]) -> float:
        if not roster:
            return 1.0
        return sum(1 for emp in roster if emp in self.labels) / len(roster)

    def to_json(self) -> Dict[str, Any]:
        return {"k": self.k, "labels": {emp: self.labels[emp] for emp in self.index_order}}

    @classmethod
    def from_json(cls, doc: Any, source: str = "<partition>") -> "Partition":
        if not isinstance(doc, dict) or not isinstance(doc.get("labels"), dict):
            raise DatasetParseError(f'{source}: expected {{"k": int, "labels": {{id: int}}}}')
        k = doc.get("k")
        if not isinstance(k, int) or isinstance(k, bool):
            raise DatasetParseError(f"{source}: 'k' must be an integer")
        for emp, label in doc["labels"].items():
            if not isinstance(label, int) or isinstance(label, bool):
                raise DatasetParseError(f"{source}: label of {emp} must be an integer")
        try:
            return cls(k=k, labels=doc["labels"], index_order=tuple(doc["labels"]))
        except (ShapeMismatchError, RosterMismatchError) as e:
            raise DatasetParseError(f"{source}: {e.format_message()}")


def save_partition(partition: Partition, path: Union[str, Path]) -> None:
    write_json(path, partition.to_json())


def load_partition(path: Union[str, Path]) -> Partition:
    return Partition.from_json(read_json(path), str(path))


def _first_seen_relabel(labels: np.ndarray) -> np.ndarray:
    """Renumber labels by order of first appearance (0, 1, 2, ...)."""
    mapping: Dict[int, int] = {}
    for label in labels:
        mapping.setdefault(int(label), len(mapping))
    return np.array([mapping[int(x)] for x in labels], dtype=np.int64)


def kmeans_rows(x: np.ndarray, k: int, seed: int) -> Tuple[np.ndarray, List[str]]:
    """Seeded k-means++ on the rows of ``x``.

    One initialization, at most 200 Lloyd iterations, ties to the lowest
    centroid index. Returns the labels and any degeneracy warnings.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    notes: List[str] = []
    if n == 0:
        return np.zeros(0, dtype=np.int64), notes
    if not np.all(np.isfinite(x)):
        raise NumericalError("cannot cluster rows with non-finite entries")
    if k > 1 and np.all(x == x[0]):
        notes.append(f"degenerate input: all {n} rows are identical, using one community")
        logger.warning(notes[-1])
        return np.zeros(n, dtype=np.int64), notes

    clusters = k
    distinct = len(np.unique(x, axis=0))
    if distinct < k:
        clusters = distinct
        notes.append(f"only {distinct} distinct rows for k={k}; some communities stay empty")
        logger.warning(notes[-1])

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        model = KMeans(
            n_clusters=clusters,
            init="k-means++",
            n_init=1,
            max_iter=KMEANS_MAX_ITER,
            random_state=seed,
        )
        labels = model.fit_predict(x)
    return _first_seen_relabel(labels), notes


def _default_order(n: int, index_order: Optional[Sequence[str]]) -> Tuple[str, ...]:
    if index_order is None:
        return tuple(str(i) for i in range(n))
    if len(index_order) != n:
        raise ShapeMismatchError(f"factor has {n} rows but {len(index_order)} ids were given")
    return tuple(index_order)


def assign(
    v: np.ndarray, seed: int, index_order: Optional[Sequence[str]] = None
) -> Partition:
    """k-means communities of the L2-normalized rows of ``v`` (K = columns of ``v``).

    Args:
        v: Nonnegative factor matrix, one row per employee.
        seed: k-means seed.
        index_order: Ids of the rows; defaults to "0", "1", ...

    Returns:
        The :class:`Partition`. A degenerate input yields a single community and
        a note in ``Partition.warnings``.
    """
    v = np.asarray(v, dtype=float)
    order = _default_order(v.shape[0], index_order)
    k = v.shape[1]
    labels, notes = kmeans_rows(l2_normalize(v, norm="l2", axis=1), k, seed)
    return Partition.from_labels(order, labels, k, notes)


def argmax_assign(v: np.ndarray, index_order: Optional[Sequence[str]] = None) -> Partition:
    """Each row goes to its largest column; ties go to the lowest index."""
    v = np.asarray(v, dtype=float)
    order = _default_order(v.shape[0], index_order)
    return Partition.from_labels(order, np.argmax(v, axis=1), v.shape[1])
