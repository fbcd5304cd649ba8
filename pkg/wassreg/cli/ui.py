"""
CLI UI Components
Rich terminal output for runs, matrices, and distances
"""

from typing import Optional

import numpy as np
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

console = Console()
# diagnostics go to stderr so `wassreg ot` leaves only the distance on stdout
err_console = Console(stderr=True)

# message kind -> (style, icon)
LINE_STYLES = {
    "success": ("green", "✅"),
    "error": ("red", "❌"),
    "warning": ("yellow", "⚠️ "),
    "info": ("blue", "ℹ️ "),
}


class CliUI:
    """Rich terminal UI components"""

    @staticmethod
    def _line(kind: str, text: str):
        style, icon = LINE_STYLES[kind]
        target = console if kind == "success" else err_console
        target.print(f"[{style}]{icon} {text}[/{style}]")

    @staticmethod
    def print_header(text: str, subtitle: Optional[str] = None):
        """Command banner, with the output directory as subtitle when known"""
        console.print(Panel.fit(
            f"[bold cyan]{text}[/bold cyan]",
            subtitle=f"[dim]{subtitle}[/dim]" if subtitle else None,
            border_style="cyan"
        ))

    @classmethod
    def print_success(cls, text: str):
        cls._line("success", text)

    @classmethod
    def print_error(cls, text: str):
        cls._line("error", text)

    @classmethod
    def print_warning(cls, text: str):
        cls._line("warning", text)

    @classmethod
    def print_info(cls, text: str):
        cls._line("info", text)

    @staticmethod
    def status(text: str):
        """Spinner shown while a fit runs"""
        return console.status(f"[cyan]{text}", spinner="dots")

    @staticmethod
    def show_run_table(artifact):
        """Summary of a RunArtifact"""
        table = Table(title=f"{artifact.command} run", show_header=True, header_style="bold cyan")
        table.add_column("Field", style="cyan")
        table.add_column("Value", style="yellow")

        table.add_row("Status", artifact.status)
        if artifact.message:
            table.add_row("Message", artifact.message)
        table.add_row("Recorded iterates", str(artifact.n_records))
        if artifact.final_objective is not None:
            table.add_row("Final objective", f"{artifact.final_objective:.6e}")
        table.add_row("Parameters", ", ".join(f"{v:.6g}" for v in artifact.params))
        table.add_row("Wall clock", f"{artifact.wall_clock_seconds:.2f}s")
        table.add_row("Files", ", ".join(artifact.files))

        console.print(table)

    @staticmethod
    def show_matrix(matrix, title: str, max_size: Optional[int] = 12):
        """Print a small matrix; larger ones are summarized by shape"""
        m = np.atleast_2d(np.asarray(matrix, dtype=float))
        if max_size is not None and max(m.shape) > max_size:
            console.print(f"[cyan]{title}:[/cyan] {m.shape[0]}x{m.shape[1]} matrix")
            return

        table = Table(title=title, show_header=False)
        for _ in range(m.shape[1]):
            table.add_column(justify="right")
        for row in m:
            table.add_row(*(f"{v:.6g}" for v in row))
        console.print(table)
