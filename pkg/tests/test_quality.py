"""Statistical recovery checks on planted enterprises. Run with ``-m slow``."""

import numpy as np
import pytest

from pydevelop.community.assignment import argmax_assign
from pydevelop.community.commands import Workload
from pydevelop.community.fusion import FusionConfig, solve
from pydevelop.community.methods import run_method
from pydevelop.community.metrics import evaluate, rand_index
from pydevelop.community.synth import SOURCE_ORDER, SynthConfig, generate

pytestmark = pytest.mark.slow

SEEDS = range(10)


def median_scores(method, synth, cfg):
    rand, purity = [], []
    for seed in SEEDS:
        data = generate(SynthConfig(**{**synth, "seed": seed}))
        w = Workload.prepare(data.dataset, data.truth)
        result = run_method(method, w.dataset, w.bundle, cfg.with_(seed=seed))
        scores = evaluate(result.partition, w.oracle, w.truth)
        rand.append(scores["rand"])
        purity.append(scores["purity"])
    return float(np.median(rand)), float(np.median(purity))


def test_joint_fusion_recovers_planted_communities():
    synth = {"n": 120, "k_true": 4, "source_noise": {s: 0.1 for s in SOURCE_ORDER}}
    rand, purity = median_scores("humor", synth, FusionConfig(k=4))
    assert rand >= 0.9
    assert purity >= 0.9


def test_fusion_beats_single_sources_under_corruption():
    synth = {"n": 120, "k_true": 4, "source_noise": {s: 0.4 for s in SOURCE_ORDER}}
    cfg = FusionConfig(k=4)
    joint, _ = median_scores("humor", synth, cfg)
    assert joint >= median_scores("humor-esn", synth, cfg)[0]
    assert joint >= median_scores("humor-chart", synth, cfg)[0]


def test_default_dataset_converges_monotonically(record_property):
    data = generate(SynthConfig())
    w = Workload.prepare(data.dataset)
    pair = solve(w.bundle.esn, w.bundle.company, data.alignment, FusionConfig(k=4))
    trace = np.array(pair.trace)
    assert np.all(trace[1:] <= trace[:-1] * (1 + 1e-12))
    assert pair.converged and pair.iters <= 300
    assert not pair.stalled
    record_property("converged_within_30", pair.converged_within(30))
    assert pair.converged_within(30) == (pair.iters <= 30)


@pytest.mark.parametrize("seed", SEEDS)
def test_exact_factorization_is_recovered(seed):
    rng = np.random.default_rng(seed)
    labels = np.repeat(np.arange(3), 4)
    rng.shuffle(labels)
    h = np.eye(3)[labels]
    a = h @ h.T
    pair = solve([a] * 3, [a] * 3, np.eye(12), FusionConfig(k=3, seed=seed, max_iters=3000, tol=1e-12))
    assert pair.trace[-1] < 1e-4 * pair.trace[0]

    ids = [str(i) for i in range(12)]
    planted = argmax_assign(h, ids)
    assert rand_index(argmax_assign(pair.v, ids), planted) == 1.0
