"""Human-readable CLI output for pydevelop-community.

Everything here writes to stderr so stdout stays reserved for JSON.
"""

from typing import Any, List, Mapping, Optional, Sequence

import click
from rich.console import Console
from rich.table import Table

from .validation import Violation

stderr_console = Console(stderr=True)


def _cell(value: Any) -> str:
    if value is None:
        return "n/a"
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)


class EnhancedDisplay:
    """Display manager for CLI output."""

    def __init__(
        self, quiet: bool = False, debug: bool = False, console: Optional[Console] = None
    ):
        self.quiet = quiet
        self.show_debug = debug
        self.console = console or stderr_console

    def show_generated(self, paths: Mapping[str, Any], summary: Mapping[str, Any]) -> None:
        """Show what ``generate`` wrote."""
        if self.quiet:
            return

        click.echo(
            f"🏭 Planted {summary['k_true']} communities over {summary['n']} employees "
            f"({summary['esn_users']} on the ESN)",
            err=True,
        )
        for name, path in paths.items():
            click.echo(f"   📄 {name:<6} → {path}", err=True)

    def show_detect(self, summary: Mapping[str, Any]) -> None:
        """Show the outcome of one ``detect`` run."""
        if self.quiet:
            return

        if summary["converged"]:
            status = "✅ converged"
        elif summary.get("stalled"):
            status = "⚠️  stalled"
        else:
            status = "⚠️  not converged"
        click.echo(
            f"🔍 {summary['method']} (mode {summary['mode']}, K={summary['k']}): "
            f"{status} after {summary['iters']} iterations",
            err=True,
        )
        if summary.get("objective") is not None:
            click.echo(f"   📉 final objective {summary['objective']:.6g}", err=True)
        click.echo(
            f"   👥 {summary['labeled']} employees labeled, coverage {summary['coverage']:.2%}",
            err=True,
        )
        sizes = ", ".join(str(s) for s in summary["sizes"])
        click.echo(f"   📊 community sizes: {sizes}", err=True)

    def show_metrics(self, results: Mapping[str, Any], title: str = "Metrics") -> None:
        """Render one metric dict as a two-column table."""
        if self.quiet:
            return

        table = Table(title=title)
        table.add_column("metric", style="cyan")
        table.add_column("value", justify="right")
        for key, value in results.items():
            table.add_row(key, _cell(value))
        self.console.print(table)

    def show_rows(
        self, rows: Sequence[Mapping[str, Any]], columns: Sequence[str], title: str
    ) -> None:
        """Render bench or sweep rows; ``columns`` picks and orders the cells."""
        if self.quiet:
            return

        table = Table(title=title)
        for i, column in enumerate(columns):
            if i == 0:
                table.add_column(column, style="cyan")
            else:
                table.add_column(column, justify="right")
        for row in rows:
            table.add_row(*(_cell(row.get(c)) for c in columns))
        self.console.print(table)

    def show_violations(self, violations: List[Violation], limit: int = 20) -> None:
        if self.quiet:
            return

        if not violations:
            self.success("Dataset is valid")
            return
        table = Table(title=f"{len(violations)} violations")
        table.add_column("code", style="red")
        table.add_column("record")
        table.add_column("message")
        for v in violations[:limit]:
            table.add_row(v.code, v.record, v.message)
        self.console.print(table)
        if len(violations) > limit:
            click.echo(f"   ... and {len(violations) - limit} more", err=True)

    def show_notes(self, notes: Sequence[str]) -> None:
        for note in notes:
            self.warning(note)

    def info(self, message: str) -> None:
        if not self.quiet:
            click.echo(f"ℹ️  {message}", err=True)

    def debug(self, message: str) -> None:
        """Show debug message if debug mode is enabled."""
        if self.show_debug:
            click.echo(f"🐛 DEBUG: {message}", err=True)

    def error(self, message: str) -> None:
        click.echo(f"❌ ERROR: {message}", err=True)

    def success(self, message: str) -> None:
        if not self.quiet:
            click.echo(f"✅ {message}", err=True)

    def warning(self, message: str) -> None:
        if not self.quiet:
            click.echo(f"⚠️  {message}", err=True)

