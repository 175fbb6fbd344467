"""PyDevelop Community Detection.

Finds employee communities that agree across an enterprise social network
(who follows whom, shared groups, shared posts) and the company's own records
(org chart distance, job titles, workplaces). Six intimacy matrices are fused
by a joint symmetric nonnegative matrix factorization and the resulting
factors are clustered with k-means.

Quick Start:
    1. Generate data: pydevelop-community generate --out data/
    2. Detect: pydevelop-community detect --esn data/esn.json --chart data/chart.json --out run/
    3. Evaluate: pydevelop-community evaluate --esn data/esn.json --chart data/chart.json \\
       --pred run/partition.json --truth data/truth.json

Example:
    >>> from pydevelop.community import (
    ...     FusionConfig, SynthConfig, assign, compute_intimacy, generate, solve,
    ... )
    >>> data = generate(SynthConfig(n=60, k_true=3, seed=1))
    >>> bundle = compute_intimacy(data.dataset)
    >>> pair = solve(bundle.esn, bundle.company, data.alignment, FusionConfig(k=3))
    >>> partition = assign(pair.factor, seed=0, index_order=data.dataset.roster)
"""

__version__ = "0.1.0"

from .assignment import Partition, argmax_assign, assign, load_partition, save_partition
from .baselines import humor_single_source, kmeans_adjacency, normalized_cut
from .dataset import load_dataset, save_dataset
from .enterprise import AlignmentMap, EnterpriseDataset, EsnGraph, OrgChart
from .errors import CommunityError
from .fusion import FactorPair, FusionConfig, FusionMode, solve, solve_single
from .intimacy import IntimacyBundle, IntimacyMatrix, Source, compute_intimacy, normalize
from .metrics import build_oracle, evaluate
from .methods import get_runner, run_method
from .synth import SynthConfig, SyntheticEnterprise, generate
from .validation import Violation, validate

__all__ = [
    "AlignmentMap",
    "CommunityError",
    "EnterpriseDataset",
    "EsnGraph",
    "FactorPair",
    "FusionConfig",
    "FusionMode",
    "IntimacyBundle",
    "IntimacyMatrix",
    "OrgChart",
    "Partition",
    "Source",
    "SynthConfig",
    "SyntheticEnterprise",
    "Violation",
    "argmax_assign",
    "assign",
    "build_oracle",
    "compute_intimacy",
    "evaluate",
    "generate",
    "get_runner",
    "humor_single_source",
    "kmeans_adjacency",
    "load_dataset",
    "load_partition",
    "normalize",
    "normalized_cut",
    "run_method",
    "save_dataset",
    "save_partition",
    "solve",
    "solve_single",
    "validate",
]
