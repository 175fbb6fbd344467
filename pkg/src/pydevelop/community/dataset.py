"""Reading and writing the on-disk dataset formats.

``esn.json``::

    {"users": [...], "groups": [...], "posts": [...],
     "follows": [[src, dst], ...], "memberships": [[user, group], ...],
     "post_links": [[user, post, "write" | "comment" | "like"], ...]}

``chart.json``::

    {"root": id,
     "employees": [{"id": id, "manager": id | null, "title": str,
                    "country": str, "time_zone": str}, ...],
     "seniority_stopwords": [...]}          # optional

``alignment.json`` (optional, overrides id-equality alignment)::

    {"pairs": {user_id: employee_id, ...}}
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from .enterprise import (
    AlignmentMap,
    EnterpriseDataset,
    EsnGraph,
    OrgChart,
    build_chart,
)
from .errors import DatasetParseError, DatasetValidationError
from .validation import validate

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

ESN_KEYS = ("users", "groups", "posts", "follows", "memberships", "post_links")
CHART_KEYS = ("root", "employees", "seniority_stopwords")
EMPLOYEE_KEYS = ("id", "manager", "title", "country", "time_zone")


def _read_json(path: PathLike) -> Any:
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError:
        raise DatasetParseError(f"{path}: file not found")
    except UnicodeDecodeError as e:
        raise DatasetParseError(f"{path}: not valid UTF-8 ({e.reason} at byte {e.start})")
    except json.JSONDecodeError as e:
        raise DatasetParseError(f"{path}:{e.lineno}: {e.msg}")
    except OSError as e:
        raise DatasetParseError(f"{path}: cannot read ({e.strerror or e})")


def _write_json(path: PathLike, payload: Any) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps_canonical(payload))


def dumps_canonical(payload: Any) -> str:
    """The one JSON layout every writer in this package uses."""
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def _expect(cond: bool, path: PathLike, message: str) -> None:
    if not cond:
        raise DatasetParseError(f"{path}: {message}")


def _id_list(doc: Dict[str, Any], key: str, path: PathLike) -> Tuple[str, ...]:
    values = doc.get(key, [])
    _expect(isinstance(values, list), path, f"'{key}' must be a list")
    for i, value in enumerate(values):
        _expect(isinstance(value, str), path, f"'{key}[{i}]' must be a string id")
    return tuple(values)


def _tuple_list(
    doc: Dict[str, Any], key: str, width: int, path: PathLike
) -> Tuple[Tuple[str, ...], ...]:
    values = doc.get(key, [])
    _expect(isinstance(values, list), path, f"'{key}' must be a list")
    rows = []
    for i, row in enumerate(values):
        _expect(
            isinstance(row, list)
            and len(row) == width
            and all(isinstance(x, str) for x in row),
            path,
            f"'{key}[{i}]' must be a list of {width} strings",
        )
        rows.append(tuple(row))
    return tuple(rows)


def parse_esn(doc: Any, path: PathLike = "<esn>") -> EsnGraph:
    _expect(isinstance(doc, dict), path, "top level must be an object")
    unknown = set(doc) - set(ESN_KEYS)
    _expect(not unknown, path, f"unknown keys {sorted(unknown)}")
    _expect("users" in doc, path, "missing 'users'")
    return EsnGraph(
        users=_id_list(doc, "users", path),
        groups=_id_list(doc, "groups", path),
        posts=_id_list(doc, "posts", path),
        follow_edges=_tuple_list(doc, "follows", 2, path),
        membership_edges=_tuple_list(doc, "memberships", 2, path),
        post_edges=_tuple_list(doc, "post_links", 3, path),
    )


def parse_chart(doc: Any, path: PathLike = "<chart>") -> OrgChart:
    _expect(isinstance(doc, dict), path, "top level must be an object")
    unknown = set(doc) - set(CHART_KEYS)
    _expect(not unknown, path, f"unknown keys {sorted(unknown)}")
    _expect(isinstance(doc.get("root"), str), path, "'root' must be a string id")
    records = doc.get("employees")
    _expect(isinstance(records, list), path, "'employees' must be a list")
    for i, record in enumerate(records):
        where = f"employees[{i}]"
        _expect(isinstance(record, dict), path, f"{where} must be an object")
        missing = [k for k in EMPLOYEE_KEYS if k not in record]
        _expect(not missing, path, f"{where} is missing {missing}")
        _expect(isinstance(record["id"], str), path, f"{where}.id must be a string")
        _expect(
            record["manager"] is None or isinstance(record["manager"], str),
            path,
            f"{where}.manager must be a string or null",
        )
        for key in ("title", "country", "time_zone"):
            _expect(isinstance(record[key], str), path, f"{where}.{key} must be a string")
    stopwords = doc.get("seniority_stopwords")
    if stopwords is not None:
        _expect(
            isinstance(stopwords, list) and all(isinstance(w, str) for w in stopwords),
            path,
            "'seniority_stopwords' must be a list of strings",
        )
        stopwords = [w.lower() for w in stopwords]
    return build_chart(records, doc["root"], stopwords)


def parse_alignment(
    doc: Any, graph: EsnGraph, chart: OrgChart, path: PathLike = "<alignment>"
) -> AlignmentMap:
    _expect(isinstance(doc, dict) and isinstance(doc.get("pairs"), dict), path,
            "expected {\"pairs\": {user: employee}}")
    pairs = doc["pairs"]
    for user, emp in pairs.items():
        _expect(isinstance(emp, str), path, f"pairs[{user!r}] must be a string id")
    return AlignmentMap(pairs=pairs, user_order=graph.users, employee_order=chart.employees)


def load_alignment(path: PathLike, graph: EsnGraph, chart: OrgChart) -> AlignmentMap:
    """Read an explicit ``{"pairs": {...}}`` alignment file for ``graph``/``chart``."""
    return parse_alignment(_read_json(path), graph, chart, path)


def load_dataset(
    esn_path: PathLike,
    chart_path: PathLike,
    alignment_path: Optional[PathLike] = None,
    check: bool = True,
) -> EnterpriseDataset:
    """Load, align and validate a dataset.

    Args:
        esn_path: Path to ``esn.json``.
        chart_path: Path to ``chart.json``.
        alignment_path: Optional explicit alignment file. Without it users are
            aligned to chart employees sharing their id.
        check: Run :func:`validate` and raise on the first violation.

    Returns:
        The validated :class:`EnterpriseDataset`.

    Raises:
        DatasetParseError: A file is missing, not JSON, or off-schema.
        DatasetValidationError: The data breaks a structural invariant.
    """
    graph = parse_esn(_read_json(esn_path), esn_path)
    chart = parse_chart(_read_json(chart_path), chart_path)
    if alignment_path is not None:
        align = load_alignment(alignment_path, graph, chart)
    else:
        align = AlignmentMap.by_identity(graph, chart)

    if check:
        violations = validate(graph, chart, align)
        if violations:
            raise DatasetValidationError(violations, source=str(chart_path))

    logger.debug(
        f"Loaded dataset: {len(graph.users)} ESN users, "
        f"{len(chart.employees)} employees, {len(align.pairs)} aligned"
    )
    return EnterpriseDataset(graph=graph, chart=chart, alignment=align)


def esn_document(graph: EsnGraph) -> Dict[str, Any]:
    return {
        "users": list(graph.users),
        "groups": list(graph.groups),
        "posts": list(graph.posts),
        "follows": [list(e) for e in graph.follow_edges],
        "memberships": [list(e) for e in graph.membership_edges],
        "post_links": [list(e) for e in graph.post_edges],
    }


def chart_document(chart: OrgChart) -> Dict[str, Any]:
    managers = chart.managers()
    records: List[Dict[str, Any]] = []
    for emp in chart.employees:
        place = chart.workplaces[emp]
        records.append(
            {
                "id": emp,
                "manager": managers.get(emp),
                "title": chart.titles[emp].raw,
                "country": place.country,
                "time_zone": place.time_zone,
            }
        )
    doc: Dict[str, Any] = {"root": chart.root, "employees": records}
    if chart.seniority_stopwords is not None:
        doc["seniority_stopwords"] = list(chart.seniority_stopwords)
    return doc


def save_dataset(
    dataset: EnterpriseDataset, esn_path: PathLike, chart_path: PathLike
) -> None:
    """Write ``dataset`` in the canonical esn.json/chart.json layout."""
    _write_json(esn_path, esn_document(dataset.graph))
    _write_json(chart_path, chart_document(dataset.chart))


def save_alignment(align: AlignmentMap, path: PathLike) -> None:
    _write_json(path, {"pairs": dict(align.pairs)})


def read_json(path: PathLike) -> Any:
    return _read_json(path)


def write_json(path: PathLike, payload: Any) -> None:
    _write_json(path, payload)
