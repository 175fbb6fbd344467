import pytest

from pydevelop.community.errors import UnknownMethodError
from pydevelop.community.fusion import FusionConfig, FusionMode
from pydevelop.community.intimacy import compute_intimacy
from pydevelop.community.methods import METHOD_NAMES, get_runner, run_method

CFG = FusionConfig(k=2, max_iters=20)


def test_registry():
    assert METHOD_NAMES == (
        "humor",
        "humor-esn",
        "humor-chart",
        "cut-esn",
        "cut-chart",
        "kmeans-esn",
        "kmeans-chart",
    )
    assert get_runner(" HUMOR ", CFG).name == "humor"


@pytest.mark.parametrize("name", ["inf-esn", "inf-chart"])
def test_influence_methods_are_out_of_scope(name):
    with pytest.raises(UnknownMethodError, match="out of scope") as excinfo:
        get_runner(name, CFG)
    assert excinfo.value.exit_code == 2


def test_unknown_method():
    with pytest.raises(UnknownMethodError, match="choose from"):
        get_runner("louvain", CFG)


@pytest.mark.parametrize("name", METHOD_NAMES)
def test_every_method_labels_known_employees(tiny_dataset, name):
    bundle = compute_intimacy(tiny_dataset)
    result = run_method(name, tiny_dataset, bundle, CFG)
    assert result.name == name
    assert set(result.partition.index_order) <= set(tiny_dataset.roster)
    if name.endswith("esn"):
        assert "fay" not in result.partition.labels
    else:
        assert len(result.partition) == 6


def test_humor_keeps_relaxed_mode(tiny_dataset):
    bundle = compute_intimacy(tiny_dataset)
    relaxed = run_method("humor", tiny_dataset, bundle, CFG.with_(mode=FusionMode.ALPHA_RELAXED))
    assert relaxed.pair.mode is FusionMode.ALPHA_RELAXED
    forced = run_method("humor", tiny_dataset, bundle, CFG.with_(mode=FusionMode.ESN_ONLY))
    assert forced.pair.mode is FusionMode.JOINT
