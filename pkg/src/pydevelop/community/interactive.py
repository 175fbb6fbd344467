"""Interactive wizard for pydevelop-community: generate, detect, evaluate."""

from pathlib import Path
from typing import Any, Dict, Optional

import questionary
from rich.panel import Panel

from .assignment import load_partition
from .commands import MODE_METHODS, DetectCommand, EvaluateCommand, GenerateCommand
from .dataset import dumps_canonical, load_dataset
from .display import EnhancedDisplay
from .errors import CommunityError
from .fusion import FusionConfig, FusionMode
from .synth import SynthConfig


def _int(answer: str) -> bool:
    return answer.strip().lstrip("-").isdigit()


def _float(answer: str) -> bool:
    try:
        float(answer)
    except ValueError:
        return False
    return True


class InteractiveCLI:
    """Menu-driven front end over the generate, detect and evaluate commands."""

    def __init__(self, display: Optional[EnhancedDisplay] = None):
        self.display = display or EnhancedDisplay()
        self.console = self.display.console
        # Paths remembered between steps so the pipeline can chain.
        self.state: Dict[str, Any] = {}

    def run(self):
        self.console.print(
            Panel.fit(
                "[bold blue]pydevelop-community[/bold blue]\n"
                "Community detection over an enterprise social network and org chart",
                border_style="blue",
            )
        )

        while True:
            choice = questionary.select(
                "What would you like to do?",
                choices=[
                    "🏭 Generate a synthetic enterprise",
                    "🔍 Detect communities",
                    "📊 Evaluate a partition",
                    "🚀 Run generate → detect → evaluate",
                    "❌ Exit",
                ],
            ).ask()

            if not choice or "Exit" in choice:
                break

            try:
                if "Run generate" in choice:
                    self.generate()
                    self.detect()
                    self.evaluate()
                elif "Generate" in choice:
                    self.generate()
                elif "Detect" in choice:
                    self.detect()
                elif "Evaluate" in choice:
                    self.evaluate()
            except CommunityError as e:
                self.display.error(e.format_message())
            except KeyboardInterrupt:
                self.display.warning("Cancelled")

    def _ask_path(self, label: str, key: str, default: str = "") -> Path:
        answer = questionary.path(label, default=str(self.state.get(key, default))).ask()
        if answer is None:
            raise KeyboardInterrupt
        return Path(answer)

    def _ask(self, label: str, default: Any, check=_int) -> str:
        answer = questionary.text(label, default=str(default), validate=check).ask()
        if answer is None:
            raise KeyboardInterrupt
        return answer

    def generate(self):
        self.console.print("\n[bold]Synthetic enterprise[/bold]\n")
        cfg = SynthConfig(
            n=int(self._ask("Employees:", 120)),
            k_true=int(self._ask("Planted communities:", 4)),
            esn_fraction=float(self._ask("Share on the ESN:", 1.0, _float)),
            seed=int(self._ask("Seed:", 0)),
        )
        out = self._ask_path("Output directory:", "out_dir", "data")
        summary = GenerateCommand(self.display).run(cfg, out)
        self.state.update(
            out_dir=out,
            esn=Path(summary["files"]["esn"]),
            chart=Path(summary["files"]["chart"]),
            truth=Path(summary["files"]["truth"]),
        )

    def detect(self):
        self.console.print("\n[bold]Community detection[/bold]\n")
        esn = self._ask_path("ESN file:", "esn", "esn.json")
        chart = self._ask_path("Chart file:", "chart", "chart.json")
        mode = questionary.select(
            "Sources to fuse:", choices=list(MODE_METHODS), default="joint"
        ).ask()
        if mode is None:
            raise KeyboardInterrupt
        cfg = FusionConfig(
            k=int(self._ask("Communities K:", 4)),
            beta=float(self._ask("Inter-fusion weight beta:", 1.0, _float)),
            seed=int(self._ask("Seed:", 0)),
            mode=FusionMode.ALPHA_RELAXED if mode == "relaxed" else FusionMode.JOINT,
        )
        out = self._ask_path("Output directory:", "out_dir", "run")

        with self.console.status("Fitting..."):
            dataset = load_dataset(esn, chart)
            summary = DetectCommand(self.display).run(dataset, cfg, MODE_METHODS[mode], out)
        self.state.update(esn=esn, chart=chart, pred=Path(summary["partition"]))

    def evaluate(self):
        self.console.print("\n[bold]Evaluation[/bold]\n")
        esn = self._ask_path("ESN file:", "esn", "esn.json")
        chart = self._ask_path("Chart file:", "chart", "chart.json")
        pred = self._ask_path("Predicted partition:", "pred", "partition.json")
        truth = None
        if questionary.confirm("Compare with a ground truth?", default="truth" in self.state).ask():
            truth = load_partition(self._ask_path("Ground truth:", "truth", "truth.json"))

        dataset = load_dataset(esn, chart)
        results = EvaluateCommand(self.display).run(dataset, load_partition(pred), truth)
        self.console.print(dumps_canonical(results))


def run_interactive(display: Optional[EnhancedDisplay] = None):
    """Entry point for interactive mode."""
    InteractiveCLI(display).run()
