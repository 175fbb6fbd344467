"""Joint symmetric NMF over the six intimacy matrices.

The default (``joint``) objective ties the three ESN matrices to one factor
``U`` (|U|×K) and the three company matrices to one factor ``V`` (|N|×K)::

    L(U, V) = Σ_i ‖A_i − UUᵀ‖²  +  Σ_j ‖B_j − VVᵀ‖²  +  β ‖PPᵀ − VVᵀ‖²,   P = TᵀU

It is minimized by projected alternating gradient descent: a U step, then a V
step, each projected onto the nonnegative orthant, each halving its step size
until the terms it touches do not increase.
"""

import logging
from dataclasses import dataclass, field, fields, replace
from enum import Enum
from types import MappingProxyType
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .enterprise import AlignmentMap
from .errors import ConfigError, NumericalError, ShapeMismatchError
from .intimacy import COMPANY_SOURCES, ESN_SOURCES, IntimacyMatrix

logger = logging.getLogger(__name__)

EPS = 1e-12

MatrixLike = Union[IntimacyMatrix, np.ndarray]


class FusionMode(str, Enum):
    JOINT = "joint"
    ESN_ONLY = "esn_only"
    CHART_ONLY = "chart_only"
    ALPHA_RELAXED = "alpha_relaxed"

    @property
    def uses_esn(self) -> bool:
        return self is not FusionMode.CHART_ONLY

    @property
    def uses_company(self) -> bool:
        return self is not FusionMode.ESN_ONLY


@dataclass(frozen=True)
class FusionConfig:
    """Solver settings.

    Attributes:
        k: Number of communities K.
        alpha: Intra-fusion weight, only read in ``alpha_relaxed`` mode.
        beta: Inter-fusion weight coupling U and V.
        eta: Initial step size of every block update.
        max_iters: Iteration cap.
        tol: Relative objective change that counts as converged.
        seed: Seed of the uniform [0, 1) initialization.
        mode: Which objective to minimize.
        max_halvings: Backtracking budget per block update.
    """

    k: int = 4
    alpha: float = 1.0
    beta: float = 1.0
    eta: float = 0.05
    max_iters: int = 300
    tol: float = 1e-4
    seed: int = 0
    mode: FusionMode = FusionMode.JOINT
    max_halvings: int = 40

    def __post_init__(self):
        try:
            object.__setattr__(self, "mode", FusionMode(self.mode))
        except ValueError:
            choices = ", ".join(m.value for m in FusionMode)
            raise ConfigError(f"mode must be one of {choices}, got {self.mode!r}")
        self.validate()

    def validate(self) -> None:
        if self.k < 2:
            raise ConfigError(f"k must be at least 2, got {self.k}")
        if self.alpha < 0:
            raise ConfigError(f"alpha must be >= 0, got {self.alpha}")
        if self.beta < 0:
            raise ConfigError(f"beta must be >= 0, got {self.beta}")
        if not self.eta > 0:
            raise ConfigError(f"eta must be > 0, got {self.eta}")
        if not self.tol > 0:
            raise ConfigError(f"tol must be > 0, got {self.tol}")
        if self.max_iters < 1:
            raise ConfigError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.max_halvings < 0:
            raise ConfigError(f"max_halvings must be >= 0, got {self.max_halvings}")

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any]) -> "FusionConfig":
        """Build a config from loosely typed ``key -> value`` pairs (config files)."""
        known = {f.name: f for f in fields(cls)}
        kwargs: Dict[str, Any] = {}
        for raw_key, value in values.items():
            key = raw_key.replace("-", "_")
            if key not in known:
                raise ConfigError(f"unknown fusion setting {raw_key!r}")
            caster = {"k": int, "max_iters": int, "seed": int, "max_halvings": int,
                      "mode": FusionMode}.get(key, float)
            try:
                kwargs[key] = caster(value)
            except (TypeError, ValueError):
                raise ConfigError(f"invalid value for {raw_key}: {value!r}")
        return cls(**kwargs)

    def with_(self, **changes: Any) -> "FusionConfig":
        return replace(self, **changes)


class _TracedRun:
    """Trace helpers shared by :class:`FactorPair` and :class:`Factorization`."""

    trace: Tuple[float, ...]
    step_sizes: Tuple[Tuple[Optional[float], Optional[float]], ...]
    tol: float

    def trace_records(self) -> List[Dict[str, Any]]:
        """The trace as ``[{iter, objective, eta_u, eta_v}, ...]``."""
        records = [{"iter": 0, "objective": self.trace[0], "eta_u": None, "eta_v": None}]
        for i, (eta_u, eta_v) in enumerate(self.step_sizes, start=1):
            records.append(
                {"iter": i, "objective": self.trace[i], "eta_u": eta_u, "eta_v": eta_v}
            )
        return records

    def converged_within(self, n: int) -> bool:
        """Whether the relative-change test already passed by iteration ``n``."""
        for i in range(1, min(n, len(self.trace) - 1) + 1):
            prev = self.trace[i - 1]
            if abs(self.trace[i] - prev) / max(prev, EPS) < self.tol:
                return True
        return False


@dataclass(frozen=True)
class FactorPair(_TracedRun):
    """Result of :func:`solve`.

    ``u`` is absent in ``chart_only`` mode and ``v`` in ``esn_only`` mode.
    ``micro`` holds the per-source factors and is empty unless the mode is
    ``alpha_relaxed``.
    ``stalled`` is set when some iteration accepted no step on any block; the
    run then stops early with ``converged`` false.
    """

    u: Optional[np.ndarray]
    v: Optional[np.ndarray]
    trace: Tuple[float, ...]
    iters: int
    converged: bool
    stalled: bool = False
    mode: FusionMode = FusionMode.JOINT
    step_sizes: Tuple[Tuple[Optional[float], Optional[float]], ...] = ()
    tol: float = 1e-4
    micro: Mapping[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        for name in ("u", "v"):
            value = getattr(self, name)
            if value is not None:
                value = np.array(value, dtype=float, copy=True)
                value.setflags(write=False)
                object.__setattr__(self, name, value)
        object.__setattr__(self, "micro", MappingProxyType(dict(self.micro)))

    @property
    def factor(self) -> np.ndarray:
        """The factor the community assignment runs on."""
        return self.u if self.mode is FusionMode.ESN_ONLY else self.v


@dataclass(frozen=True)
class Factorization(_TracedRun):
    """Result of :func:`solve_single`: one micro-community factor ``w``."""

    w: np.ndarray
    trace: Tuple[float, ...]
    iters: int
    converged: bool
    stalled: bool = False
    step_sizes: Tuple[Tuple[Optional[float], Optional[float]], ...] = ()
    tol: float = 1e-4


def _as_array(m: MatrixLike) -> np.ndarray:
    return m.values if isinstance(m, IntimacyMatrix) else np.asarray(m, dtype=float)


def _as_transition(t: Union[AlignmentMap, np.ndarray, None]) -> Optional[np.ndarray]:
    if t is None:
        return None
    if isinstance(t, AlignmentMap):
        return t.matrix()
    return np.asarray(t, dtype=float)


def _fit(mats: Sequence[np.ndarray], w: np.ndarray) -> float:
    gram = w @ w.T
    return float(sum(np.sum((a - gram) ** 2) for a in mats))


def _fit_grad(sym_sum: np.ndarray, count: int, w: np.ndarray) -> np.ndarray:
    # d/dW Σ‖A_i − WWᵀ‖² with sym_sum = Σ (A_i + A_iᵀ)
    return -2.0 * (sym_sum @ w) + 4.0 * count * (w @ (w.T @ w))


def _residual(t: np.ndarray, u: np.ndarray, v: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    p = t.T @ u
    return p @ p.T - v @ v.T, p


class _Problem:
    """Objective pieces for one solve; subclasses define the blocks."""

    blocks: Tuple[str, ...] = ()

    def total(self, state: Dict[str, np.ndarray]) -> float:
        raise NotImplementedError

    def partial(self, name: str, state: Dict[str, np.ndarray]) -> float:
        raise NotImplementedError

    def gradient(self, name: str, state: Dict[str, np.ndarray]) -> np.ndarray:
        raise NotImplementedError


class _HardConstraintProblem(_Problem):
    """One shared factor per information source, optionally coupled through T."""

    def __init__(
        self,
        esn: Sequence[np.ndarray],
        company: Sequence[np.ndarray],
        t: Optional[np.ndarray],
        beta: float,
    ):
        self.esn = list(esn)
        self.company = list(company)
        self.t = t
        self.beta = beta if (esn and company and t is not None) else 0.0
        self.esn_sum = sum(a + a.T for a in self.esn) if self.esn else None
        self.company_sum = sum(b + b.T for b in self.company) if self.company else None
        # T·Tᵀ and T stay fixed for the whole solve.
        self.ttt = t @ t.T if self.beta else None
        self.blocks = tuple(
            name for name, mats in (("u", self.esn), ("v", self.company)) if mats
        )

    def _coupling(self, state) -> float:
        if not self.beta:
            return 0.0
        e, _ = _residual(self.t, state["u"], state["v"])
        return self.beta * float(np.sum(e**2))

    def total(self, state) -> float:
        value = 0.0
        if self.esn:
            value += _fit(self.esn, state["u"])
        if self.company:
            value += _fit(self.company, state["v"])
        if self.beta:
            value += self._coupling(state)
        return value

    def partial(self, name, state) -> float:
        if name == "u":
            value = _fit(self.esn, state["u"])
        else:
            value = _fit(self.company, state["v"])
        if self.beta:
            value += self._coupling(state)
        return value

    def gradient(self, name, state) -> np.ndarray:
        if name == "u":
            grad = _fit_grad(self.esn_sum, len(self.esn), state["u"])
            if self.beta:
                u, v = state["u"], state["v"]
                p = self.t.T @ u
                # T·E·P = (T·Tᵀ)·U·(PᵀP) − (T·V)·(VᵀP)
                tep = self.ttt @ u @ (p.T @ p) - (self.t @ v) @ (v.T @ p)
                grad = grad + 4.0 * self.beta * tep
            return grad
        grad = _fit_grad(self.company_sum, len(self.company), state["v"])
        if self.beta:
            e, _ = _residual(self.t, state["u"], state["v"])
            grad = grad - 4.0 * self.beta * (e @ state["v"])
        return grad


class _RelaxedProblem(_Problem):
    """Per-source factors pulled toward a consensus factor with weight α.

    Block ``u`` is a stack ``[U_s, U_g, U_p, U]``; block ``v`` is
    ``[V_c, V_t, V_l, V]``. The last slice is the consensus factor.
    """

    blocks = ("u", "v")

    def __init__(self, esn, company, t, alpha: float, beta: float):
        self.esn = list(esn)
        self.company = list(company)
        self.t = t
        self.alpha = alpha
        self.beta = beta

    @staticmethod
    def _block_fit(mats, stack, alpha) -> float:
        consensus = stack[-1]
        value = 0.0
        for a, w in zip(mats, stack[:-1]):
            value += _fit([a], w)
        for w in stack[:-1]:
            value += alpha * float(np.sum((w - consensus) ** 2))
        return value

    def _coupling(self, state) -> float:
        if not self.beta:
            return 0.0
        e, _ = _residual(self.t, state["u"][-1], state["v"][-1])
        return self.beta * float(np.sum(e**2))

    def total(self, state) -> float:
        value = self._block_fit(self.esn, state["u"], self.alpha)
        value += self._block_fit(self.company, state["v"], self.alpha)
        return value + self._coupling(state)

    def partial(self, name, state) -> float:
        mats = self.esn if name == "u" else self.company
        return self._block_fit(mats, state[name], self.alpha) + self._coupling(state)

    def gradient(self, name, state) -> np.ndarray:
        mats = self.esn if name == "u" else self.company
        stack = state[name]
        consensus = stack[-1]
        grad = np.empty_like(stack)
        for i, (a, w) in enumerate(zip(mats, stack[:-1])):
            grad[i] = _fit_grad(a + a.T, 1, w) + 2.0 * self.alpha * (w - consensus)
        grad[-1] = -2.0 * self.alpha * np.sum(stack[:-1] - consensus, axis=0)
        if self.beta:
            u, v = state["u"][-1], state["v"][-1]
            e, p = _residual(self.t, u, v)
            if name == "u":
                grad[-1] += 4.0 * self.beta * (self.t @ (e @ p))
            else:
                grad[-1] -= 4.0 * self.beta * (e @ v)
        return grad


def _check_inputs(
    esn: Sequence[np.ndarray],
    company: Sequence[np.ndarray],
    t: Optional[np.ndarray],
    mode: FusionMode,
) -> Tuple[int, int]:
    n_users = esn[0].shape[0] if esn else (t.shape[0] if t is not None else 0)
    n_emps = company[0].shape[0] if company else (t.shape[1] if t is not None else 0)
    if mode.uses_esn and len(esn) == 0:
        raise ShapeMismatchError(f"mode {mode.value} needs the ESN matrices")
    if mode.uses_company and len(company) == 0:
        raise ShapeMismatchError(f"mode {mode.value} needs the company matrices")
    if mode is FusionMode.ALPHA_RELAXED and (len(esn) != 3 or len(company) != 3):
        raise ShapeMismatchError("alpha_relaxed mode needs all six matrices")
    for a in esn:
        if a.shape != (n_users, n_users):
            raise ShapeMismatchError(
                f"ESN matrix has shape {a.shape}, expected ({n_users}, {n_users})"
            )
    for b in company:
        if b.shape != (n_emps, n_emps):
            raise ShapeMismatchError(
                f"company matrix has shape {b.shape}, expected ({n_emps}, {n_emps})"
            )
    if esn and company and mode in (FusionMode.JOINT, FusionMode.ALPHA_RELAXED):
        if t is None:
            raise ShapeMismatchError("joint modes need the transition matrix T")
        if t.shape != (n_users, n_emps):
            raise ShapeMismatchError(
                f"T has shape {t.shape}, expected ({n_users}, {n_emps})"
            )
    return n_users, n_emps


def _check_factor(name: str, w: np.ndarray, rows: int, k: int, depth: int = 0):
    expected = (rows, k) if depth == 0 else (depth, rows, k)
    if w.shape != expected:
        raise ShapeMismatchError(f"factor {name} has shape {w.shape}, expected {expected}")


def _problem_for(a_esn, a_chart, t, cfg: FusionConfig) -> Tuple[_Problem, int, int]:
    mode = cfg.mode
    esn = [_as_array(a) for a in a_esn] if mode.uses_esn else []
    company = [_as_array(b) for b in a_chart] if mode.uses_company else []
    tm = _as_transition(t)
    n_users, n_emps = _check_inputs(esn, company, tm, mode)
    if mode is FusionMode.ALPHA_RELAXED:
        return _RelaxedProblem(esn, company, tm, cfg.alpha, cfg.beta), n_users, n_emps
    beta = cfg.beta if mode is FusionMode.JOINT else 0.0
    return _HardConstraintProblem(esn, company, tm, beta), n_users, n_emps


def _state(cfg, problem, n_users, n_emps, u, v) -> Dict[str, np.ndarray]:
    depth = 4 if isinstance(problem, _RelaxedProblem) else 0
    state = {}
    for name, value, rows in (("u", u, n_users), ("v", v, n_emps)):
        if name not in problem.blocks:
            continue
        if value is None:
            raise ShapeMismatchError(f"factor {name} is required in mode {cfg.mode.value}")
        state[name] = np.asarray(value, dtype=float)
        _check_factor(name, state[name], rows, cfg.k, depth)
    return state


def objective(
    a_esn: Sequence[MatrixLike],
    a_chart: Sequence[MatrixLike],
    t: Union[AlignmentMap, np.ndarray, None],
    u: Optional[np.ndarray],
    v: Optional[np.ndarray],
    cfg: FusionConfig,
) -> float:
    """Value of the hard-constraint objective at ``(u, v)``.

    ``esn_only`` and ``chart_only`` drop the absent half and the coupling term.
    """
    if cfg.mode is FusionMode.ALPHA_RELAXED:
        cfg = cfg.with_(mode=FusionMode.JOINT)
    problem, n_users, n_emps = _problem_for(a_esn, a_chart, t, cfg)
    return problem.total(_state(cfg, problem, n_users, n_emps, u, v))


def gradients(
    a_esn: Sequence[MatrixLike],
    a_chart: Sequence[MatrixLike],
    t: Union[AlignmentMap, np.ndarray, None],
    u: Optional[np.ndarray],
    v: Optional[np.ndarray],
    cfg: FusionConfig,
) -> Tuple[Optional[np.ndarray], Optional[np.ndarray]]:
    """Analytic ``(∂L/∂U, ∂L/∂V)``; the entry for an absent factor is ``None``."""
    if cfg.mode is FusionMode.ALPHA_RELAXED:
        cfg = cfg.with_(mode=FusionMode.JOINT)
    problem, n_users, n_emps = _problem_for(a_esn, a_chart, t, cfg)
    state = _state(cfg, problem, n_users, n_emps, u, v)
    grad_u = problem.gradient("u", state) if "u" in problem.blocks else None
    grad_v = problem.gradient("v", state) if "v" in problem.blocks else None
    return grad_u, grad_v


def _stack(micro: Sequence[np.ndarray], consensus: np.ndarray) -> np.ndarray:
    return np.stack(list(micro) + [consensus])


def objective_relaxed(
    a_esn: Sequence[MatrixLike],
    a_chart: Sequence[MatrixLike],
    t: Union[AlignmentMap, np.ndarray],
    u: np.ndarray,
    v: np.ndarray,
    micro_u: Sequence[np.ndarray],
    micro_v: Sequence[np.ndarray],
    cfg: FusionConfig,
) -> float:
    """Objective with per-source factors and α-weighted consensus penalties."""
    cfg = cfg.with_(mode=FusionMode.ALPHA_RELAXED)
    problem, n_users, n_emps = _problem_for(a_esn, a_chart, t, cfg)
    state = _state(cfg, problem, n_users, n_emps, _stack(micro_u, u), _stack(micro_v, v))
    return problem.total(state)


def gradients_relaxed(
    a_esn: Sequence[MatrixLike],
    a_chart: Sequence[MatrixLike],
    t: Union[AlignmentMap, np.ndarray],
    u: np.ndarray,
    v: np.ndarray,
    micro_u: Sequence[np.ndarray],
    micro_v: Sequence[np.ndarray],
    cfg: FusionConfig,
) -> Tuple[List[np.ndarray], np.ndarray, List[np.ndarray], np.ndarray]:
    """Returns ``(grads of U_i, grad of U, grads of V_j, grad of V)``."""
    cfg = cfg.with_(mode=FusionMode.ALPHA_RELAXED)
    problem, n_users, n_emps = _problem_for(a_esn, a_chart, t, cfg)
    state = _state(cfg, problem, n_users, n_emps, _stack(micro_u, u), _stack(micro_v, v))
    gu = problem.gradient("u", state)
    gv = problem.gradient("v", state)
    return list(gu[:-1]), gu[-1], list(gv[:-1]), gv[-1]


def _block_step(
    problem: _Problem,
    name: str,
    state: Dict[str, np.ndarray],
    cfg: FusionConfig,
    iteration: int,
) -> Optional[float]:
    """One projected step on block ``name``; returns the accepted step size.

    Returns ``None`` when no halving of the step decreased the block's terms;
    the block is then left unchanged for this iteration.
    """
    grad = problem.gradient(name, state)
    if not np.all(np.isfinite(grad)):
        raise NumericalError(f"gradient of {name} is not finite", iteration, cfg.eta)

    base = problem.partial(name, state)
    eta = cfg.eta
    saw_finite = False
    halvings = 0
    for halvings in range(cfg.max_halvings + 1):
        candidate = np.maximum(state[name] - eta * grad, 0.0)
        trial = dict(state)
        trial[name] = candidate
        value = problem.partial(name, trial)
        if np.isfinite(value):
            saw_finite = True
            if value <= base:
                state[name] = candidate
                if halvings:
                    logger.debug(f"iter {iteration}: {name} step halved {halvings}x")
                return eta
        eta /= 2.0

    if not saw_finite:
        raise NumericalError(f"objective is not finite after a {name} step", iteration, eta)
    logger.warning(
        f"iter {iteration}: backtracking exhausted for {name} after "
        f"{halvings} halvings, step skipped"
    )
    return None


def _descend(
    problem: _Problem, state: Dict[str, np.ndarray], cfg: FusionConfig
) -> Tuple[
    Tuple[float, ...], Tuple[Tuple[Optional[float], Optional[float]], ...], int, bool, bool
]:
    current = problem.total(state)
    if not np.isfinite(current):
        raise NumericalError("initial objective is not finite", 0, cfg.eta)

    trace = [current]
    steps = []
    converged = False
    stalled = False
    iteration = 0
    for iteration in range(1, cfg.max_iters + 1):
        taken = {}
        for name in problem.blocks:
            taken[name] = _block_step(problem, name, state, cfg, iteration)
        value = problem.total(state)
        if not np.isfinite(value):
            raise NumericalError("objective is not finite", iteration, cfg.eta)
        trace.append(value)
        steps.append((taken.get("u"), taken.get("v")))
        # No block moved, so every later iteration would repeat this one.
        if all(eta is None for eta in taken.values()):
            stalled = True
            break
        change = abs(value - current) / max(current, EPS)
        logger.debug(f"iter {iteration}: objective {value:.6g} (rel change {change:.3g})")
        current = value
        if change < cfg.tol:
            converged = True
            break

    if converged:
        logger.info(f"Converged after {iteration} iterations, objective {current:.6g}")
    elif stalled:
        logger.warning(
            f"Stalled at iteration {iteration}: no step size decreased the objective "
            f"within {cfg.max_halvings} halvings of eta={cfg.eta}"
        )
    else:
        logger.info(
            f"Stopped at max_iters={cfg.max_iters} without converging, "
            f"objective {current:.6g}"
        )
    return tuple(trace), tuple(steps), iteration, converged, stalled


def solve(
    a_esn: Sequence[MatrixLike],
    a_chart: Sequence[MatrixLike],
    t: Union[AlignmentMap, np.ndarray, None],
    cfg: FusionConfig,
) -> FactorPair:
    """Minimize the fusion objective for ``cfg.mode``.

    Args:
        a_esn: The social, group and post matrices (|U|×|U|). Ignored in
            ``chart_only`` mode.
        a_chart: The chart, title and workplace matrices (|N|×|N|). Ignored in
            ``esn_only`` mode.
        t: Alignment (or its |U|×|N| matrix); needed by the coupled modes.
        cfg: Solver settings.

    Returns:
        The fitted :class:`FactorPair` with its objective trace.

    Raises:
        ShapeMismatchError: Inconsistent matrix shapes.
        NumericalError: The objective or a gradient became non-finite.

    Example:
        >>> pair = solve(bundle.esn, bundle.company, dataset.alignment,
        ...              FusionConfig(k=4, seed=7))
        >>> partition = assign(pair.factor, seed=7)
    """
    problem, n_users, n_emps = _problem_for(a_esn, a_chart, t, cfg)
    rng = np.random.default_rng(cfg.seed)
    u0 = rng.random((n_users, cfg.k))
    v0 = rng.random((n_emps, cfg.k))
    logger.debug(
        f"Solving {cfg.mode.value}: |U|={n_users}, |N|={n_emps}, K={cfg.k}, "
        f"beta={cfg.beta}, eta={cfg.eta}"
    )

    state: Dict[str, np.ndarray] = {}
    if cfg.mode is FusionMode.ALPHA_RELAXED:
        state["u"] = np.stack([u0] * 4)
        state["v"] = np.stack([v0] * 4)
    else:
        if "u" in problem.blocks:
            state["u"] = u0
        if "v" in problem.blocks:
            state["v"] = v0

    trace, steps, iters, converged, stalled = _descend(problem, state, cfg)

    micro: Dict[str, np.ndarray] = {}
    if cfg.mode is FusionMode.ALPHA_RELAXED:
        for source, w in zip(ESN_SOURCES, state["u"][:-1]):
            micro[source.value] = w
        for source, w in zip(COMPANY_SOURCES, state["v"][:-1]):
            micro[source.value] = w
        u, v = state["u"][-1], state["v"][-1]
    else:
        u, v = state.get("u"), state.get("v")

    return FactorPair(
        u=u,
        v=v,
        trace=trace,
        iters=iters,
        converged=converged,
        stalled=stalled,
        mode=cfg.mode,
        step_sizes=steps,
        tol=cfg.tol,
        micro=micro,
    )


def solve_single(
    a: Union[MatrixLike, Sequence[MatrixLike]],
    cfg: FusionConfig,
    k: Optional[int] = None,
) -> Factorization:
    """Factorize one matrix (or a stack sharing one factor) as ``A ≈ WWᵀ``.

    ``k`` overrides ``cfg.k`` and may be 1. The initial ``W`` is the first
    draw of ``cfg.seed``, the same draw :func:`solve` uses for ``U``.
    """
    if isinstance(a, (IntimacyMatrix, np.ndarray)):
        mats = [_as_array(a)]
    else:
        mats = [_as_array(m) for m in a]
    if not mats:
        raise ShapeMismatchError("solve_single needs at least one matrix")
    rank = cfg.k if k is None else k
    if rank < 1:
        raise ConfigError(f"k must be at least 1, got {rank}")
    n = mats[0].shape[0]
    for m in mats:
        if m.shape != (n, n):
            raise ShapeMismatchError(f"matrix has shape {m.shape}, expected ({n}, {n})")

    problem = _HardConstraintProblem(mats, [], None, 0.0)
    rng = np.random.default_rng(cfg.seed)
    state = {"u": rng.random((n, rank))}
    trace, steps, iters, converged, stalled = _descend(problem, state, cfg)
    w = state["u"].copy()
    w.setflags(write=False)
    return Factorization(
        w=w,
        trace=trace,
        iters=iters,
        converged=converged,
        stalled=stalled,
        step_sizes=tuple((eta_u, None) for eta_u, _ in steps),
        tol=cfg.tol,
    )
