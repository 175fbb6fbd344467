"""Comparison methods: k-means and normalized cut on one adjacency matrix, and
the single-source fusion variants."""

import logging
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import LinAlgError, eigh
from sklearn.preprocessing import normalize as l2_normalize

from .assignment import Partition, assign, kmeans_rows
from .enterprise import EnterpriseDataset
from .errors import ConfigError, NumericalError
from .fusion import FactorPair, FusionConfig, FusionMode, solve
from .intimacy import IntimacyBundle, IntimacyMatrix, compute_intimacy

logger = logging.getLogger(__name__)

ISOLATED_DEGREE = 1e-12


def kmeans_adjacency(a: IntimacyMatrix, k: int, seed: int) -> Partition:
    """k-means on the raw rows of ``a``; ids are ``a.index_order``."""
    labels, notes = kmeans_rows(a.values, k, seed)
    return Partition.from_labels(a.index_order, labels, k, notes)


def normalized_laplacian(a: np.ndarray) -> np.ndarray:
    """``D^-1/2 (D - A) D^-1/2``; isolated nodes get degree 1e-12."""
    a = np.asarray(a, dtype=float)
    degree = a.sum(axis=1)
    degree = np.where(degree > 0, degree, ISOLATED_DEGREE)
    scale = 1.0 / np.sqrt(degree)
    lap = (np.diag(degree) - a) * scale[:, None] * scale[None, :]
    return (lap + lap.T) / 2.0


def normalized_cut(a: IntimacyMatrix, k: int, seed: int) -> Partition:
    """Spectral relaxation of the normalized cut.

    Takes the ``k`` eigenvectors of smallest eigenvalue of the normalized
    Laplacian, L2-normalizes their rows and clusters them with k-means.
    """
    n = a.size
    if n == 0:
        return Partition.from_labels((), (), k)
    lap = normalized_laplacian(a.values)
    dims = min(k, n)
    try:
        _, vectors = eigh(lap, subset_by_index=[0, dims - 1])
    except (LinAlgError, ValueError) as e:
        raise NumericalError(f"eigen-solver failed on the {a.source.value} Laplacian: {e}")
    embedding = l2_normalize(vectors, norm="l2", axis=1)
    labels, notes = kmeans_rows(embedding, k, seed)
    return Partition.from_labels(a.index_order, labels, k, notes)


def fit_single_source(
    dataset: EnterpriseDataset,
    which: str,
    cfg: FusionConfig,
    bundle: Optional[IntimacyBundle] = None,
) -> Tuple[FactorPair, Tuple[str, ...]]:
    """Run the one-sided solver; returns the factors and the employee ids of its rows."""
    if which not in ("esn", "chart"):
        raise ConfigError(f"single-source mode must be 'esn' or 'chart', got {which!r}")
    if bundle is None:
        bundle = compute_intimacy(dataset)
    if which == "esn":
        pair = solve(bundle.esn, (), None, cfg.with_(mode=FusionMode.ESN_ONLY))
        ids = tuple(dataset.alignment.pairs[u] for u in dataset.graph.users)
    else:
        pair = solve((), bundle.company, None, cfg.with_(mode=FusionMode.CHART_ONLY))
        ids = tuple(dataset.roster)
    logger.debug(f"Single-source fit on {which}: {pair.iters} iterations")
    return pair, ids


def humor_single_source(
    dataset: EnterpriseDataset,
    which: str,
    cfg: FusionConfig,
    bundle: Optional[IntimacyBundle] = None,
) -> Partition:
    """Fusion restricted to one information source, then k-means assignment.

    ``which="esn"`` fits U on the three ESN matrices and labels only employees
    with an ESN account. ``which="chart"`` fits V on the company matrices and
    labels the whole roster.
    """
    pair, ids = fit_single_source(dataset, which, cfg, bundle)
    return assign(pair.factor, cfg.seed, ids)
