"""Registry of community detection methods used by ``detect``, ``bench`` and ``sweep``."""

from dataclasses import dataclass
from typing import Dict, Optional, Tuple, Type

from .assignment import Partition, assign
from .baselines import fit_single_source, kmeans_adjacency, normalized_cut
from .enterprise import AlignmentMap, EnterpriseDataset
from .errors import UnknownMethodError
from .fusion import FactorPair, FusionConfig, FusionMode, solve
from .intimacy import IntimacyBundle, IntimacyMatrix, Scope, Source

OUT_OF_SCOPE = {
    "inf-esn": "influence-propagation baselines are out of scope",
    "inf-chart": "influence-propagation baselines are out of scope",
}


@dataclass(frozen=True)
class MethodResult:
    name: str
    partition: Partition
    pair: Optional[FactorPair] = None


def _to_employees(partition: Partition, align: AlignmentMap) -> Partition:
    ids = [align.pairs[user] for user in partition.index_order]
    return Partition.from_labels(
        ids, partition.label_array(), partition.k, partition.warnings
    )


class MethodRunner:
    """Base class for methods; subclasses implement :meth:`run`."""

    name = ""
    description = ""

    def __init__(self, cfg: FusionConfig):
        self.cfg = cfg

    def run(self, dataset: EnterpriseDataset, bundle: IntimacyBundle) -> MethodResult:
        raise NotImplementedError


class HumorRunner(MethodRunner):
    name = "humor"
    description = "joint fusion of all six sources"

    def run(self, dataset, bundle):
        cfg = self.cfg
        if cfg.mode not in (FusionMode.JOINT, FusionMode.ALPHA_RELAXED):
            cfg = cfg.with_(mode=FusionMode.JOINT)
        pair = solve(bundle.esn, bundle.company, dataset.alignment, cfg)
        partition = assign(pair.factor, cfg.seed, dataset.roster)
        return MethodResult(self.name, partition, pair)


class HumorEsnRunner(MethodRunner):
    name = "humor-esn"
    description = "fusion of the three ESN sources only"
    which = "esn"

    def run(self, dataset, bundle):
        pair, ids = fit_single_source(dataset, self.which, self.cfg, bundle)
        return MethodResult(self.name, assign(pair.factor, self.cfg.seed, ids), pair)


class HumorChartRunner(HumorEsnRunner):
    name = "humor-chart"
    description = "fusion of the three company sources only"
    which = "chart"


class _AdjacencyRunner(MethodRunner):
    source: Source = Source.SOCIAL

    def cluster(self, matrix: IntimacyMatrix) -> Partition:
        raise NotImplementedError

    def run(self, dataset, bundle):
        matrix = bundle[self.source]
        partition = self.cluster(matrix)
        if matrix.scope is Scope.ESN:
            partition = _to_employees(partition, dataset.alignment)
        return MethodResult(self.name, partition)


class CutEsnRunner(_AdjacencyRunner):
    name = "cut-esn"
    description = "normalized cut of the social-connection matrix"
    source = Source.SOCIAL

    def cluster(self, matrix):
        return normalized_cut(matrix, self.cfg.k, self.cfg.seed)


class CutChartRunner(CutEsnRunner):
    name = "cut-chart"
    description = "normalized cut of the org-chart matrix"
    source = Source.CHART


class KMeansEsnRunner(_AdjacencyRunner):
    name = "kmeans-esn"
    description = "k-means on rows of the social-connection matrix"
    source = Source.SOCIAL

    def cluster(self, matrix):
        return kmeans_adjacency(matrix, self.cfg.k, self.cfg.seed)


class KMeansChartRunner(KMeansEsnRunner):
    name = "kmeans-chart"
    description = "k-means on rows of the org-chart matrix"
    source = Source.CHART


RUNNERS: Dict[str, Type[MethodRunner]] = {
    cls.name: cls
    for cls in (
        HumorRunner,
        HumorEsnRunner,
        HumorChartRunner,
        CutEsnRunner,
        CutChartRunner,
        KMeansEsnRunner,
        KMeansChartRunner,
    )
}

METHOD_NAMES: Tuple[str, ...] = tuple(RUNNERS)


def get_runner(name: str, cfg: FusionConfig) -> MethodRunner:
    """Get the runner for a method name (case-insensitive)."""
    key = name.strip().lower()
    if key in OUT_OF_SCOPE:
        raise UnknownMethodError(f"{key}: {OUT_OF_SCOPE[key]}")
    if key not in RUNNERS:
        raise UnknownMethodError(
            f"unknown method {name!r}; choose from {', '.join(METHOD_NAMES)}"
        )
    return RUNNERS[key](cfg)


def run_method(
    name: str, dataset: EnterpriseDataset, bundle: IntimacyBundle, cfg: FusionConfig
) -> MethodResult:
    return get_runner(name, cfg).run(dataset, bundle)
