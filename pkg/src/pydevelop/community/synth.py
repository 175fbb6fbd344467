"""Synthetic enterprises with planted communities.

All randomness comes from one ``numpy.random.Generator`` seeded by
``SynthConfig.seed``. Draws happen in this order:

1. employee permutation (community membership)
2. ESN members of each community
3. integer seed of the follow-graph stochastic block model
4. group memberships, community by community
5. posts: author, then engagement of every user, community by community
6. org chart: the manager of every non-head employee
7. job titles: root term, then seniority prefix, per employee in roster order
8. six integer seeds for :func:`corrupt_source`, in source order

Workplaces carry no draws: each community has a home country and time zone.
"""

import logging
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from types import MappingProxyType
from typing import Any, Dict, List, Mapping, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from .assignment import Partition, save_partition
from .dataset import save_dataset
from .enterprise import (
    AlignmentMap,
    EnterpriseDataset,
    EsnGraph,
    JobTitle,
    OrgChart,
    PostKind,
    Workplace,
)
from .errors import ConfigError, InfeasibleConfigError
from .intimacy import Source

logger = logging.getLogger(__name__)

SOURCE_ORDER: Tuple[str, ...] = tuple(s.value for s in Source)

ROOT_TERMS = (
    "engineer",
    "researcher",
    "designer",
    "analyst",
    "scientist",
    "architect",
    "consultant",
    "developer",
    "administrator",
    "specialist",
    "planner",
    "writer",
    "recruiter",
    "accountant",
    "marketer",
    "technician",
)
AREAS = ("cloud", "data", "security", "mobile", "web", "finance", "hardware", "media")
SENIORITY = ("", "senior", "junior", "principal", "staff")
COUNTRIES = ("US", "CN", "IN", "GB", "DE", "FR", "JP", "BR", "CA", "AU")
TIME_ZONES = (
    "America/Los_Angeles",
    "America/New_York",
    "Europe/London",
    "Europe/Berlin",
    "Asia/Kolkata",
    "Asia/Shanghai",
    "Asia/Tokyo",
    "Australia/Sydney",
)


def _default_noise() -> Dict[str, float]:
    return {source: 0.0 for source in SOURCE_ORDER}


@dataclass(frozen=True)
class SynthConfig:
    """Planted-partition generator settings.

    ``source_noise`` maps each of the six sources (social, group, post, chart,
    title, workplace) to a corruption rate in [0, 1]; missing sources get 0.
    """

    n: int = 120
    k_true: int = 4
    esn_fraction: float = 1.0
    p_in: float = 0.3
    p_out: float = 0.02
    groups_per_community: int = 3
    group_join: float = 0.5
    group_noise: float = 0.1
    posts_per_community: int = 20
    post_engagement: float = 0.3
    post_noise: float = 0.1
    title_vocab_per_community: int = 2
    country_count: int = 4
    zone_count: int = 6
    skew: float = 1.0
    source_noise: Mapping[str, float] = field(default_factory=_default_noise)
    seed: int = 0

    def __post_init__(self):
        noise = _default_noise()
        for key, rate in dict(self.source_noise).items():
            if key not in noise:
                raise ConfigError(
                    f"unknown noise source {key!r}; expected one of {', '.join(SOURCE_ORDER)}"
                )
            noise[key] = float(rate)
        object.__setattr__(self, "source_noise", MappingProxyType(noise))
        self.validate()

    def validate(self) -> None:
        if self.n < 1:
            raise ConfigError(f"n must be positive, got {self.n}")
        if self.k_true < 2:
            raise ConfigError(f"k_true must be at least 2, got {self.k_true}")
        if self.k_true > self.n:
            raise InfeasibleConfigError(
                f"k_true={self.k_true} communities cannot be planted in n={self.n} employees"
            )
        if not 0.0 <= self.p_out <= self.p_in <= 1.0:
            raise ConfigError(
                f"need 0 <= p_out <= p_in <= 1, got p_in={self.p_in}, p_out={self.p_out}"
            )
        if not 0.0 < self.esn_fraction <= 1.0:
            raise ConfigError(f"esn_fraction must be in (0, 1], got {self.esn_fraction}")
        for name in ("group_join", "group_noise", "post_engagement", "post_noise"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1], got {value}")
        for source, rate in self.source_noise.items():
            if not 0.0 <= rate <= 1.0:
                raise ConfigError(f"noise rate for {source} must be in [0, 1], got {rate}")
        for name in ("groups_per_community", "posts_per_community"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0, got {getattr(self, name)}")
        for name in ("title_vocab_per_community", "country_count", "zone_count"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        if not self.skew > 0:
            raise ConfigError(f"skew must be > 0, got {self.skew}")

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any]) -> "SynthConfig":
        known = {f.name for f in fields(cls)}
        ints = {"n", "k_true", "groups_per_community", "posts_per_community",
                "title_vocab_per_community", "country_count", "zone_count", "seed"}
        kwargs: Dict[str, Any] = {}
        for raw_key, value in values.items():
            key = raw_key.replace("-", "_")
            if key not in known:
                raise ConfigError(f"unknown generator setting {raw_key!r}")
            try:
                if key == "source_noise":
                    kwargs[key] = {str(s): float(r) for s, r in dict(value).items()}
                else:
                    kwargs[key] = int(value) if key in ints else float(value)
            except (TypeError, ValueError):
                raise ConfigError(f"invalid value for {raw_key}: {value!r}")
        return cls(**kwargs)


@dataclass(frozen=True)
class SyntheticEnterprise:
    """A generated dataset with its planted ground truth."""

    dataset: EnterpriseDataset
    truth: Partition
    config: SynthConfig

    @property
    def graph(self) -> EsnGraph:
        return self.dataset.graph

    @property
    def chart(self) -> OrgChart:
        return self.dataset.chart

    @property
    def alignment(self) -> AlignmentMap:
        return self.dataset.alignment


def community_sizes(n: int, k: int, skew: float = 1.0) -> List[int]:
    """Split ``n`` into ``k`` sizes proportional to ``skew**c``, each at least 1.

    Largest-remainder rounding; ``skew=1`` gives near-equal sizes.
    """
    weights = np.array([skew**c for c in range(k)], dtype=float)
    spare = n - k
    quotas = weights / weights.sum() * spare
    sizes = np.floor(quotas).astype(int)
    leftover = spare - int(sizes.sum())
    order = np.argsort(-(quotas - sizes), kind="stable")
    sizes[order[:leftover]] += 1
    return [int(s) + 1 for s in sizes]


def _ids(prefix: str, count: int) -> List[str]:
    width = len(str(max(count - 1, 0)))
    return [f"{prefix}{i:0{width}d}" for i in range(count)]


def _root_vocab(c: int, size: int) -> List[str]:
    out = []
    for j in range(size):
        slot = c * size + j
        term = ROOT_TERMS[slot % len(ROOT_TERMS)]
        cycle = slot // len(ROOT_TERMS)
        out.append(f"{term}{cycle}" if cycle else term)
    return out


def _home(values: Sequence[str], index: int, prefix: str) -> str:
    if index < len(values):
        return values[index]
    return f"{prefix}{index}"


def generate(cfg: SynthConfig) -> SyntheticEnterprise:
    """Generate a synthetic enterprise and its planted partition.

    Args:
        cfg: Generator settings.

    Returns:
        A :class:`SyntheticEnterprise`; its dataset always passes validation.

    Raises:
        InfeasibleConfigError: ``k_true`` exceeds ``n``.
    """
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    roster = _ids("e", cfg.n)
    k = cfg.k_true

    # 1. communities
    sizes = community_sizes(cfg.n, k, cfg.skew)
    perm = rng.permutation(cfg.n)
    members: List[List[str]] = []
    start = 0
    for size in sizes:
        members.append([roster[i] for i in perm[start : start + size]])
        start += size
    community = {emp: c for c, group in enumerate(members) for emp in group}

    # 2. ESN membership
    esn_members: List[List[str]] = []
    for group in members:
        count = min(len(group), max(1, int(round(cfg.esn_fraction * len(group)))))
        picked = rng.choice(len(group), size=count, replace=False)
        esn_members.append([group[i] for i in sorted(picked)])
    on_esn = {emp for group in esn_members for emp in group}
    users = [emp for emp in roster if emp in on_esn]
    user_pos = {u: i for i, u in enumerate(users)}
    user_comm = np.array([community[u] for u in users])

    # 3. follows
    probs = [[cfg.p_in if a == b else cfg.p_out for b in range(k)] for a in range(k)]
    nodelist = [u for group in esn_members for u in group]
    sbm = nx.stochastic_block_model(
        [len(group) for group in esn_members],
        probs,
        nodelist=nodelist,
        seed=int(rng.integers(2**32)),
        directed=True,
        selfloops=False,
    )
    follows = sorted(sbm.edges(), key=lambda e: (user_pos[e[0]], user_pos[e[1]]))

    # 4. groups
    groups: List[str] = []
    memberships: List[Tuple[str, str]] = []
    for c in range(k):
        join = np.where(user_comm == c, cfg.group_join, cfg.group_noise * cfg.group_join)
        for j in range(cfg.groups_per_community):
            gid = f"g{c}_{j}"
            groups.append(gid)
            joined = [users[i] for i in np.flatnonzero(rng.random(len(users)) < join)]
            if not joined:
                joined = [esn_members[c][int(rng.integers(len(esn_members[c])))]]
            memberships.extend((u, gid) for u in joined)

    # 5. posts
    posts: List[str] = []
    post_links: List[Tuple[str, str, str]] = []
    for c in range(k):
        engage = np.where(
            user_comm == c, cfg.post_engagement, cfg.post_noise * cfg.post_engagement
        )
        for j in range(cfg.posts_per_community):
            pid = f"p{c}_{j}"
            posts.append(pid)
            author = esn_members[c][int(rng.integers(len(esn_members[c])))]
            post_links.append((author, pid, PostKind.WRITE.value))
            touched = rng.random(len(users)) < engage
            kinds = rng.random(len(users)) < 0.5
            for i in np.flatnonzero(touched):
                if users[i] == author:
                    continue
                kind = PostKind.COMMENT if kinds[i] else PostKind.LIKE
                post_links.append((users[i], pid, kind.value))

    # 6. org chart
    root = members[0][0]
    manager: Dict[str, str] = {}
    for c, group in enumerate(members):
        if c > 0:
            manager[group[0]] = root
        for i in range(1, len(group)):
            manager[group[i]] = group[int(rng.integers(i))]

    # 7. titles and workplaces
    titles: Dict[str, JobTitle] = {}
    workplaces: Dict[str, Workplace] = {}
    vocab = [_root_vocab(c, cfg.title_vocab_per_community) for c in range(k)]
    for emp in roster:
        c = community[emp]
        term = vocab[c][int(rng.integers(len(vocab[c])))]
        prefix = SENIORITY[int(rng.integers(len(SENIORITY)))]
        words = [prefix, AREAS[c % len(AREAS)], term]
        titles[emp] = JobTitle.parse(" ".join(w.capitalize() for w in words if w))
        workplaces[emp] = Workplace(
            country=_home(COUNTRIES, c % cfg.country_count, "C"),
            time_zone=_home(TIME_ZONES, c % cfg.zone_count, "Etc/Zone"),
        )

    graph = EsnGraph(
        users=tuple(users),
        groups=tuple(groups),
        posts=tuple(posts),
        follow_edges=tuple(follows),
        membership_edges=tuple(memberships),
        post_edges=tuple(post_links),
    )
    chart = OrgChart(
        employees=tuple(roster),
        manage_edges=tuple((manager[e], e) for e in roster if e in manager),
        root=root,
        titles=titles,
        workplaces=workplaces,
    )
    dataset = EnterpriseDataset(graph=graph, chart=chart)

    # 8. per-source corruption
    corruption_seeds = [int(rng.integers(2**32)) for _ in SOURCE_ORDER]
    for source, seed in zip(SOURCE_ORDER, corruption_seeds):
        dataset = corrupt_source(dataset, source, cfg.source_noise[source], seed)

    truth = Partition.from_labels(roster, [community[e] for e in roster], k)
    logger.debug(
        f"Generated enterprise: n={cfg.n}, |U|={len(users)}, sizes={sizes}, "
        f"{len(follows)} follows, {len(memberships)} memberships, {len(post_links)} post links"
    )
    return SyntheticEnterprise(dataset=dataset, truth=truth, config=cfg)


def _pick(rng: np.random.Generator, count: int, rate: float) -> np.ndarray:
    """Sorted indices of ``round(rate * count)`` items chosen without replacement."""
    chosen = int(round(rate * count))
    return np.sort(rng.choice(count, size=chosen, replace=False))


def _corrupt_follows(graph: EsnGraph, rate: float, rng) -> EsnGraph:
    """Rewire a ``rate`` share of follows to uniform random ordered pairs.

    Replacements avoid only the surviving follows, so at rate 1 the result is a
    uniform draw of as many distinct pairs as there were follows.
    """
    edges = list(graph.follow_edges)
    users = graph.users
    if len(users) < 2:
        return graph
    chosen = _pick(rng, len(edges), rate)
    present = set(edges) - {edges[i] for i in chosen}
    for i in chosen:
        while True:
            src, dst = rng.choice(len(users), size=2, replace=False)
            pair = (users[src], users[dst])
            if pair not in present:
                break
        present.add(pair)
        edges[i] = pair
    return replace(graph, follow_edges=tuple(edges))


def _corrupt_memberships(graph: EsnGraph, rate: float, rng) -> EsnGraph:
    edges = list(graph.membership_edges)
    users = graph.users
    present = set(edges)
    for i in _pick(rng, len(edges), rate):
        user, group = edges[i]
        candidates = [u for u in users if (u, group) not in present]
        if not candidates:
            continue
        new = (candidates[int(rng.integers(len(candidates)))], group)
        present.discard(edges[i])
        present.add(new)
        edges[i] = new
    return replace(graph, membership_edges=tuple(edges))


def _corrupt_post_links(graph: EsnGraph, rate: float, rng) -> EsnGraph:
    edges = list(graph.post_edges)
    users = graph.users
    linked = {(u, p) for u, p, _ in edges}
    for i in _pick(rng, len(edges), rate):
        user, post, kind = edges[i]
        candidates = [u for u in users if (u, post) not in linked]
        if not candidates:
            continue
        new_user = candidates[int(rng.integers(len(candidates)))]
        linked.discard((user, post))
        linked.add((new_user, post))
        edges[i] = (new_user, post, kind)
    return replace(graph, post_edges=tuple(edges))


def _corrupt_chart(chart: OrgChart, rate: float, rng) -> OrgChart:
    """Reattach a share of non-root employees to random managers outside their subtree."""
    movable = [e for e in chart.employees if e != chart.root]
    manager = chart.managers()
    tree = nx.DiGraph()
    tree.add_nodes_from(chart.employees)
    tree.add_edges_from(chart.manage_edges)
    for i in _pick(rng, len(movable), rate):
        emp = movable[i]
        blocked = nx.descendants(tree, emp) | {emp}
        candidates = [e for e in chart.employees if e not in blocked]
        new = candidates[int(rng.integers(len(candidates)))]
        tree.remove_edge(manager[emp], emp)
        tree.add_edge(new, emp)
        manager[emp] = new
    edges = tuple((manager[e], e) for e in chart.employees if e in manager)
    return replace(chart, manage_edges=edges)


def _corrupt_titles(chart: OrgChart, rate: float, rng) -> OrgChart:
    employees = chart.employees
    titles = dict(chart.titles)
    if len(employees) < 2:
        return chart
    for i in _pick(rng, len(employees), rate):
        other = int(rng.integers(len(employees) - 1))
        other += other >= i
        titles[employees[i]] = chart.titles[employees[other]]
    return replace(chart, titles=titles)


def _corrupt_workplaces(chart: OrgChart, rate: float, rng) -> OrgChart:
    employees = chart.employees
    countries = sorted({w.country for w in chart.workplaces.values()})
    zones = sorted({w.time_zone for w in chart.workplaces.values()})
    places = dict(chart.workplaces)
    for i in _pick(rng, len(employees), rate):
        places[employees[i]] = Workplace(
            country=countries[int(rng.integers(len(countries)))],
            time_zone=zones[int(rng.integers(len(zones)))],
        )
    return replace(chart, workplaces=places)


def corrupt_source(
    dataset: EnterpriseDataset, source: Union[str, Source], rate: float, seed: int
) -> EnterpriseDataset:
    """Perturb only the records behind one intimacy source.

    ``social`` rewires follow edges, ``group`` moves memberships, ``post``
    moves post links, ``chart`` reattaches employees to other managers,
    ``title`` copies other employees' titles and ``workplace`` draws new
    countries and time zones. A rate of 0 returns ``dataset`` itself.
    """
    try:
        source = Source(source)
    except ValueError:
        raise ConfigError(
            f"unknown source {source!r}; expected one of {', '.join(SOURCE_ORDER)}"
        )
    if not 0.0 <= rate <= 1.0:
        raise ConfigError(f"corruption rate must be in [0, 1], got {rate}")
    if rate == 0.0:
        return dataset

    rng = np.random.default_rng(seed)
    graph, chart = dataset.graph, dataset.chart
    if source is Source.SOCIAL:
        graph = _corrupt_follows(graph, rate, rng)
    elif source is Source.GROUP:
        graph = _corrupt_memberships(graph, rate, rng)
    elif source is Source.POST:
        graph = _corrupt_post_links(graph, rate, rng)
    elif source is Source.CHART:
        chart = _corrupt_chart(chart, rate, rng)
    elif source is Source.TITLE:
        chart = _corrupt_titles(chart, rate, rng)
    else:
        chart = _corrupt_workplaces(chart, rate, rng)
    logger.debug(f"Corrupted {source.value} at rate {rate}")
    return EnterpriseDataset(graph=graph, chart=chart, alignment=dataset.alignment)


def write_synthetic(
    result: SyntheticEnterprise, out_dir: Union[str, Path]
) -> Dict[str, Path]:
    """Write esn.json, chart.json and truth.json into ``out_dir``."""
    out = Path(out_dir)
    paths = {
        "esn": out / "esn.json",
        "chart": out / "chart.json",
        "truth": out / "truth.json",
    }
    save_dataset(result.dataset, paths["esn"], paths["chart"])
    save_partition(result.truth, paths["truth"])
    return paths
