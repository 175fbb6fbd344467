"""Command implementations for pydevelop-community.

The click layer in :mod:`.cli` parses flags and hands plain values to these
classes; they do the work, report through :class:`EnhancedDisplay` and return
JSON-ready payloads.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Callable, Dict, Hashable, List, Optional, Sequence

import numpy as np
from rich.progress import Progress, SpinnerColumn, TextColumn

from .assignment import Partition, save_partition
from .dataset import load_dataset, write_json
from .display import EnhancedDisplay
from .enterprise import EnterpriseDataset
from .errors import CommunityError, ConfigError
from .fusion import FusionConfig
from .intimacy import IntimacyBundle, compute_intimacy, dump_matrix
from .methods import get_runner, run_method
from .metrics import (
    INTRINSIC_KEYS,
    METRIC_KEYS,
    SimilarityOracle,
    build_oracle,
    evaluate,
    metric_subset,
)
from .synth import SynthConfig, generate, write_synthetic
from .validation import Violation, validate_dataset

logger = logging.getLogger(__name__)

MODE_METHODS = {
    "joint": "humor",
    "relaxed": "humor",
    "esn": "humor-esn",
    "chart": "humor-chart",
}


def median_or_none(values: Sequence[Optional[float]]) -> Optional[float]:
    """Median of the defined values; ``None`` when every run was undefined."""
    defined = [v for v in values if v is not None]
    if not defined:
        return None
    return float(np.median(defined))


@dataclass(frozen=True)
class Workload:
    """Everything a method run needs besides its config."""

    dataset: EnterpriseDataset
    bundle: IntimacyBundle
    oracle: SimilarityOracle
    truth: Optional[Partition] = None

    @classmethod
    def prepare(
        cls,
        dataset: EnterpriseDataset,
        truth: Optional[Partition] = None,
        normalized: bool = True,
        workers: int = 1,
    ) -> "Workload":
        bundle = compute_intimacy(dataset, normalized=normalized, workers=workers)
        # The oracle always reads normalized matrices.
        oracle_bundle = bundle if normalized else compute_intimacy(dataset, workers=workers)
        return cls(dataset, bundle, build_oracle(dataset, oracle_bundle), truth)


class CommunityCommand:
    """Base class for CLI commands."""

    def __init__(self, display: Optional[EnhancedDisplay] = None):
        self.display = display or EnhancedDisplay()
        self.console = self.display.console

    def run_cells(
        self,
        cells: Dict[Hashable, Callable[[], Any]],
        workers: int = 1,
        label: str = "Running",
    ) -> Dict[Hashable, Any]:
        """Run independent jobs, optionally on a thread pool.

        Results are keyed like ``cells`` so callers never depend on completion
        order.
        """
        results: Dict[Hashable, Any] = {}
        with Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            console=self.console,
            transient=True,
            disable=self.display.quiet,
        ) as progress:
            task = progress.add_task(f"{label} 0/{len(cells)}", total=len(cells))

            def tick():
                progress.update(
                    task, advance=1, description=f"{label} {len(results)}/{len(cells)}"
                )

            if workers > 1:
                with ThreadPoolExecutor(max_workers=workers) as pool:
                    futures = {key: pool.submit(job) for key, job in cells.items()}
                    for key, future in futures.items():
                        results[key] = future.result()
                        tick()
            else:
                for key, job in cells.items():
                    results[key] = job()
                    tick()
        return results


class GenerateCommand(CommunityCommand):
    """Generate a synthetic enterprise with planted communities."""

    def run(self, cfg: SynthConfig, out_dir: Path) -> Dict[str, Any]:
        result = generate(cfg)
        try:
            paths = write_synthetic(result, out_dir)
        except OSError as e:
            raise CommunityError(f"cannot write to {out_dir}: {e.strerror or e}")

        summary = {
            "n": cfg.n,
            "k_true": cfg.k_true,
            "esn_users": len(result.graph.users),
            "seed": cfg.seed,
            "files": {name: str(path) for name, path in paths.items()},
        }
        self.display.show_generated(paths, summary)
        return summary


class DetectCommand(CommunityCommand):
    """Compute intimacy, fit, assign and write partition.json plus trace.json."""

    def run(
        self,
        dataset: EnterpriseDataset,
        cfg: FusionConfig,
        method: str,
        out_dir: Path,
        normalized: bool = True,
        workers: int = 1,
        dump_matrices: bool = False,
    ) -> Dict[str, Any]:
        runner = get_runner(method, cfg)
        self.display.debug(f"Computing intimacy matrices with {workers} worker(s)")
        bundle = compute_intimacy(dataset, normalized=normalized, workers=workers)
        result = runner.run(dataset, bundle)
        partition, pair = result.partition, result.pair
        records = pair.trace_records() if pair is not None else []

        out = Path(out_dir)
        try:
            save_partition(partition, out / "partition.json")
            write_json(out / "trace.json", records)
            if dump_matrices:
                for matrix in bundle:
                    dump_matrix(matrix, out / "matrices" / f"{matrix.source.value}.json")
        except OSError as e:
            raise CommunityError(f"cannot write to {out}: {e.strerror or e}")

        coverage = partition.coverage(dataset.roster)
        notes = list(partition.warnings)
        if coverage < 1.0:
            missing = len(dataset.roster) - len(partition)
            notes.append(
                f"partition covers {coverage:.0%} of employees; "
                f"{missing} without an ESN account are unlabeled"
            )
        if pair is not None and pair.stalled:
            notes.append(
                f"solver stalled at iteration {pair.iters}: no step lowered the objective; "
                f"try a smaller --eta (now {cfg.eta})"
            )

        summary = {
            "method": runner.name,
            "mode": pair.mode.value if pair is not None else None,
            "k": cfg.k,
            "iters": pair.iters if pair is not None else 0,
            "converged": pair.converged if pair is not None else True,
            "stalled": pair.stalled if pair is not None else False,
            "converged_within_30": pair.converged_within(30) if pair is not None else None,
            "objective": pair.trace[-1] if pair is not None else None,
            "labeled": len(partition),
            "coverage": coverage,
            "sizes": [int(s) for s in partition.sizes()],
            "notes": notes,
            "partition": str(out / "partition.json"),
            "trace": str(out / "trace.json"),
        }
        self.display.show_detect(summary)
        self.display.show_notes(notes)
        return summary


class EvaluateCommand(CommunityCommand):
    """Score a partition against the dataset and, optionally, a ground truth."""

    def run(
        self,
        dataset: EnterpriseDataset,
        pred: Partition,
        truth: Optional[Partition] = None,
    ) -> Dict[str, Any]:
        workload = Workload.prepare(dataset, truth)
        results = evaluate(pred, workload.oracle, truth)
        self.display.show_metrics(results)
        if results["coverage"] < 1.0:
            self.display.info(f"prediction covers {results['coverage']:.0%} of employees")
        return metric_subset(results, METRIC_KEYS)


class BenchCommand(CommunityCommand):
    """Run each method over several seeds and report the median of every metric."""

    def run(
        self,
        workloads: Dict[int, Workload],
        methods: Sequence[str],
        cfg: FusionConfig,
        workers: int = 1,
    ) -> Dict[str, Any]:
        seeds = list(workloads)
        for name in methods:
            get_runner(name, cfg)

        def cell(name: str, seed: int) -> Callable[[], Dict[str, Any]]:
            def job() -> Dict[str, Any]:
                w = workloads[seed]
                result = run_method(name, w.dataset, w.bundle, cfg.with_(seed=seed))
                return evaluate(result.partition, w.oracle, w.truth)

            return job

        cells = {(name, seed): cell(name, seed) for name in methods for seed in seeds}
        done = self.run_cells(cells, workers, label="Benchmarking")

        has_truth = all(w.truth is not None for w in workloads.values())
        keys = list(METRIC_KEYS if has_truth else INTRINSIC_KEYS) + ["coverage"]
        rows = []
        for name in methods:
            row: Dict[str, Any] = {"method": name, "runs": len(seeds)}
            for key in keys:
                row[key] = median_or_none([done[(name, s)].get(key) for s in seeds])
            rows.append(row)

        runs = [
            {"method": name, "seed": seed, "metrics": done[(name, seed)]}
            for name in methods
            for seed in seeds
        ]
        self.display.show_rows(
            rows, ["method"] + keys, f"Median over {len(seeds)} seed(s)"
        )
        return {"seeds": seeds, "metrics": keys, "rows": rows, "runs": runs}


class SweepCommand(CommunityCommand):
    """Intrinsic metrics of each method across a range of community numbers."""

    def run(
        self,
        workload: Workload,
        methods: Sequence[str],
        ks: Sequence[int],
        cfg: FusionConfig,
        workers: int = 1,
    ) -> Dict[str, Any]:
        configs = {}
        for k in ks:
            try:
                configs[k] = cfg.with_(k=k)
            except ConfigError as e:
                raise ConfigError(f"--ks: {e.format_message()}")
        for name in methods:
            get_runner(name, cfg)

        def cell(name: str, k: int) -> Callable[[], Dict[str, Any]]:
            def job() -> Dict[str, Any]:
                result = run_method(name, workload.dataset, workload.bundle, configs[k])
                return evaluate(result.partition, workload.oracle)

            return job

        cells = {(name, k): cell(name, k) for name in methods for k in ks}
        done = self.run_cells(cells, workers, label="Sweeping")

        keys = list(INTRINSIC_KEYS) + ["coverage"]
        rows = []
        for name in methods:
            for k in ks:
                row: Dict[str, Any] = {"method": name, "k": k}
                row.update(metric_subset(done[(name, k)], keys))
                rows.append(row)
        self.display.show_rows(rows, ["method", "k"] + keys, "Community-number sweep")
        return {"seed": cfg.seed, "ks": list(ks), "metrics": keys, "rows": rows}


class ValidateCommand(CommunityCommand):
    """Check a dataset against every structural invariant."""

    def run(
        self,
        esn_path: Path,
        chart_path: Path,
        alignment_path: Optional[Path] = None,
    ) -> List[Violation]:
        dataset = load_dataset(esn_path, chart_path, alignment_path, check=False)
        violations = validate_dataset(dataset)
        self.display.show_violations(violations)
        return violations


def synthetic_workloads(
    synth: SynthConfig, seeds: Sequence[int], workers: int = 1
) -> Dict[int, Workload]:
    """One generated dataset per seed, with its planted truth."""
    workloads = {}
    for seed in seeds:
        result = generate(replace(synth, seed=seed))
        workloads[seed] = Workload.prepare(result.dataset, result.truth, workers=workers)
    return workloads


def shared_workloads(workload: Workload, seeds: Sequence[int]) -> Dict[int, Workload]:
    """The same on-disk dataset for every seed; only solver seeds vary."""
    return {seed: workload for seed in seeds}

