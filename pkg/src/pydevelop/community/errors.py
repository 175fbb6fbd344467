"""Exception hierarchy for pydevelop-community.

Every error is a :class:`click.ClickException` so the CLI can render it without
extra plumbing. Each subclass carries the process exit code and a short ``kind``
tag used in the single-line error format ``error: <kind>: <message>``.
"""

from typing import Any, List, Optional, Sequence

import click


class CommunityError(click.ClickException):
    """Base class for all pydevelop-community errors."""

    exit_code = 1
    kind = "error"

    def __init__(self, message: str):
        # One line only, the CLI contract depends on it.
        super().__init__(" ".join(str(message).split()))

    def format_line(self) -> str:
        return f"error: {self.kind}: {self.format_message()}"

    def show(self, file: Any = None) -> None:
        click.echo(self.format_line(), err=True)


class ConfigError(CommunityError):
    """Invalid configuration value or unreadable config file."""

    exit_code = 2
    kind = "config"


class InfeasibleConfigError(ConfigError):
    """A synthetic-enterprise configuration that cannot be realized."""

    kind = "infeasible-config"


class UnknownMethodError(CommunityError):
    """A detection method name that is not registered."""

    exit_code = 2
    kind = "unknown-method"


class DatasetParseError(CommunityError):
    """A dataset file that is not valid JSON or does not match the schema."""

    exit_code = 3
    kind = "parse"


class DatasetValidationError(CommunityError):
    """A dataset that parses but breaks a structural invariant."""

    exit_code = 3
    kind = "validation"

    def __init__(self, violations: Sequence[Any], source: Optional[str] = None):
        self.violations: List[Any] = list(violations)
        first = self.violations[0] if self.violations else None
        where = f"{source}: " if source else ""
        if first is None:
            message = f"{where}dataset is invalid"
        else:
            extra = len(self.violations) - 1
            more = f" (+{extra} more)" if extra else ""
            message = f"{where}{first}{more}"
        super().__init__(message)


class RosterMismatchError(CommunityError):
    """Two partitions (or a partition and a dataset) disagree on employees."""

    exit_code = 3
    kind = "roster-mismatch"


class ShapeMismatchError(CommunityError):
    """Matrix shapes inconsistent with |U|, |N| or K."""

    exit_code = 4
    kind = "shape"


class MetricUndefinedError(CommunityError):
    """A metric asked of a partition it is not defined for (e.g. silhouette at K=1)."""

    exit_code = 4
    kind = "undefined-metric"


class NumericalError(CommunityError):
    """Non-finite values met during optimization or an eigen-solver failure."""

    exit_code = 4
    kind = "numeric"

    def __init__(
        self,
        message: str,
        iteration: Optional[int] = None,
        eta: Optional[float] = None,
    ):
        self.iteration = iteration
        self.eta = eta
        details = []
        if iteration is not None:
            details.append(f"iteration={iteration}")
        if eta is not None:
            details.append(f"eta={eta:g}")
        if details:
            message = f"{message} ({', '.join(details)})"
        super().__init__(message)
