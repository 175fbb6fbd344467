"""Shared fixtures: a hand-built six-employee enterprise and small generated ones."""

import json
from pathlib import Path

import pytest

from pydevelop.community.dataset import parse_chart, parse_esn
from pydevelop.community.enterprise import EnterpriseDataset
from pydevelop.community.synth import SynthConfig, generate, write_synthetic

ESN_DOC = {
    "users": ["ana", "ben", "cat", "dan", "eve"],
    "groups": ["g1", "g2"],
    "posts": ["p1", "p2", "p3"],
    "follows": [["ana", "ben"], ["ben", "ana"], ["cat", "dan"], ["dan", "eve"]],
    "memberships": [["ana", "g1"], ["ben", "g1"], ["cat", "g2"], ["dan", "g2"], ["eve", "g2"]],
    "post_links": [
        ["ana", "p1", "write"],
        ["ben", "p1", "like"],
        ["cat", "p2", "write"],
        ["dan", "p2", "comment"],
        ["dan", "p3", "write"],
    ],
}

CHART_DOC = {
    "root": "ana",
    "employees": [
        {"id": "ana", "manager": None, "title": "Director", "country": "US",
         "time_zone": "America/New_York"},
        {"id": "ben", "manager": "ana", "title": "Senior SDE", "country": "US",
         "time_zone": "America/New_York"},
        {"id": "cat", "manager": "ana", "title": "SDE", "country": "US",
         "time_zone": "America/Los_Angeles"},
        {"id": "dan", "manager": "cat", "title": "Senior Researcher", "country": "CN",
         "time_zone": "Asia/Shanghai"},
        {"id": "eve", "manager": "cat", "title": "Researcher", "country": "CN",
         "time_zone": "Asia/Shanghai"},
        {"id": "fay", "manager": "ben", "title": "SDE II", "country": "US",
         "time_zone": "America/New_York"},
    ],
}


def write_json(path: Path, doc) -> Path:
    path.write_text(json.dumps(doc, indent=2), encoding="utf-8")
    return path


@pytest.fixture
def esn_doc():
    return json.loads(json.dumps(ESN_DOC))


@pytest.fixture
def chart_doc():
    return json.loads(json.dumps(CHART_DOC))


@pytest.fixture
def tiny_dataset(esn_doc, chart_doc) -> EnterpriseDataset:
    return EnterpriseDataset(graph=parse_esn(esn_doc), chart=parse_chart(chart_doc))


@pytest.fixture
def tiny_files(tmp_path, esn_doc, chart_doc):
    """The hand-built dataset on disk; returns ``(esn_path, chart_path)``."""
    return (
        write_json(tmp_path / "esn.json", esn_doc),
        write_json(tmp_path / "chart.json", chart_doc),
    )


@pytest.fixture(scope="session")
def planted():
    """A small, clean planted enterprise shared across tests."""
    cfg = SynthConfig(
        n=40, k_true=3, p_in=0.5, p_out=0.01, group_noise=0.0, post_noise=0.0, seed=11
    )
    return generate(cfg)


@pytest.fixture
def synth_files(tmp_path, planted):
    return write_synthetic(planted, tmp_path / "data")

