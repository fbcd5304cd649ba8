"""
wassreg Command Line
Reproduce the regression experiments and run the transport and baseline tools
"""

import sys
from typing import Optional

import click
import typer

from wassreg.config import configure_logging

app = typer.Typer(
    name="wassreg",
    help="📐 Wasserstein regression for transfer operators",
    add_completion=False,
)

CONFIG_HELP = "YAML or JSON experiment config"


def _configure(verbose: bool):
    if verbose:
        configure_logging("INFO")


@app.command("simulate-ar1")
def simulate_ar1(
    config: Optional[str] = typer.Option(None, "--config", help=CONFIG_HELP),
    seed: Optional[int] = typer.Option(None, "--seed", help="Master seed"),
    out: Optional[str] = typer.Option(None, "--out", help="Output directory"),
    steps: Optional[int] = typer.Option(None, "--steps", help="Number of snapshots m"),
    noise: bool = typer.Option(True, "--noise/--no-noise", help="Include the process noise Q"),
    samples: Optional[int] = typer.Option(None, "--samples", help="Simulate trajectories instead of exact covariances"),
    verbose: bool = typer.Option(False, "--verbose", "-v"),
):
    """
    📈 Write the AR(1) Gaussian snapshot sequence

    Example: wassreg simulate-ar1 --out runs/ar1
    """
    from wassreg.cli.commands import Commands
    _configure(verbose)
    commands = Commands()
    cfg = commands.load_config(config, seed=seed, out_dir=out, steps=steps, n_samples=samples,
                               noise_scale=None if noise else 0.0)
    commands.simulate_ar1(cfg)


@app.command("fit-gaussian")
def fit_gaussian(
    snapshots: Optional[str] = typer.Argument(None, help="Snapshot file (AR(1) defaults when omitted)"),
    config: Optional[str] = typer.Option(None, "--config", help=CONFIG_HELP),
    seed: Optional[int] = typer.Option(None, "--seed", help="Master seed"),
    out: Optional[str] = typer.Option(None, "--out", help="Output directory"),
    alpha: Optional[float] = typer.Option(None, "--alpha", help="Step size"),
    max_iters: Optional[int] = typer.Option(None, "--max-iters", help="Iteration cap"),
    grad_tol: Optional[float] = typer.Option(None, "--grad-tol", help="Gradient-norm stop threshold"),
    backtracking: Optional[bool] = typer.Option(None, "--backtracking/--fixed-step", help="Armijo line search"),
    init: Optional[str] = typer.Option(None, "--init", help="identity or average"),
    verbose: bool = typer.Option(False, "--verbose", "-v"),
):
    """
    🔧 Fit S(x) = A x to Gaussian snapshots

    Example: wassreg fit-gaussian --init average --out runs/fig1
    """
    from wassreg.cli.commands import Commands
    _configure(verbose)
    commands = Commands()
    cfg = commands.load_config(config, seed=seed, out_dir=out, alpha=alpha, max_iters=max_iters,
                               grad_tol=grad_tol, backtracking=backtracking, init=init,
                               kind="custom" if snapshots else "ar1-gaussian")
    commands.fit_gaussian(cfg, snapshots)


def _csv_numbers(text: Optional[str], cast):
    if text is None:
        return None
    try:
        return [cast(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise typer.BadParameter(f"Expected comma-separated numbers, got '{text}'")


@app.command("fit-empirical")
def fit_empirical(
    snapshots: Optional[str] = typer.Argument(None, help="Snapshot file (cubic generator when omitted)"),
    config: Optional[str] = typer.Option(None, "--config", help=CONFIG_HELP),
    seed: Optional[int] = typer.Option(None, "--seed", help="Master seed"),
    out: Optional[str] = typer.Option(None, "--out", help="Output directory"),
    alpha: Optional[float] = typer.Option(None, "--alpha", help="Step size"),
    max_iters: Optional[int] = typer.Option(None, "--max-iters", help="Iteration cap"),
    grad_tol: Optional[float] = typer.Option(None, "--grad-tol", help="Gradient-norm stop threshold"),
    backtracking: Optional[bool] = typer.Option(None, "--backtracking/--fixed-step", help="Armijo line search"),
    basis: Optional[str] = typer.Option(None, "--basis", help="linear, affine or shifted-monomials-1d"),
    exponents: Optional[str] = typer.Option(None, "--exponents", help="Comma-separated exponents, e.g. 3,1,0"),
    theta_init: Optional[str] = typer.Option(None, "--theta-init", help="Comma-separated starting parameters"),
    grid_size: Optional[int] = typer.Option(None, "--grid-size", help="Points in the cubic generator"),
    sampling: Optional[str] = typer.Option(None, "--sampling", help="grid or random"),
    iterations: Optional[str] = typer.Option(None, "--iterations", help="Iterations to dump, e.g. 0,1,5,50"),
    workers: Optional[int] = typer.Option(None, "--workers", help="Threads for per-pair transport solves"),
    verbose: bool = typer.Option(False, "--verbose", "-v"),
):
    """
    🔧 Fit a basis-parametrized map to point-cloud snapshots

    Example: wassreg fit-empirical --grid-size 200 --max-iters 1000
    """
    from wassreg.cli.commands import Commands
    _configure(verbose)
    commands = Commands()
    cfg = commands.load_config(
        config, seed=seed, out_dir=out, alpha=alpha, max_iters=max_iters, grad_tol=grad_tol,
        backtracking=backtracking, workers=workers, basis=basis,
        exponents=_csv_numbers(exponents, int), theta_init=_csv_numbers(theta_init, float),
        grid_size=grid_size, sampling=sampling, iterations=_csv_numbers(iterations, int),
        kind="custom" if snapshots else "cubic-empirical",
    )
    commands.fit_empirical(cfg, snapshots)


@app.command("ot")
def ot(
    source: str = typer.Argument(..., help="First measure file"),
    target: str = typer.Argument(..., help="Second measure file"),
    out: str = typer.Option(".", "--out", help="Directory for coupling.csv"),
    mode: str = typer.Option("closed", "--mode", help="closed (Gaussian closed form) or sampled"),
    samples: int = typer.Option(2000, "--samples", help="Draws per Gaussian in sampled mode"),
    seed: int = typer.Option(0, "--seed", help="Master seed"),
    verbose: bool = typer.Option(False, "--verbose", "-v"),
):
    """
    📏 Wasserstein-2 distance between two measure files

    Example: wassreg ot a.json b.json --out runs/ot
    """
    from wassreg.cli.commands import Commands
    _configure(verbose)
    if mode not in ("closed", "sampled"):
        raise typer.BadParameter(f"Unknown mode '{mode}'. Available: closed, sampled")
    Commands(quiet=True).ot(source, target, out, mode=mode, samples=samples, seed=seed)


@app.command("ulam")
def ulam(
    config: Optional[str] = typer.Option(None, "--config", help=CONFIG_HELP),
    seed: Optional[int] = typer.Option(None, "--seed", help="Master seed"),
    out: Optional[str] = typer.Option(None, "--out", help="Output directory"),
    map_name: str = typer.Option("cubic", "--map", help="cubic or identity"),
    boxes: int = typer.Option(10, "--boxes", help="Boxes on the interval"),
    samples_per_box: int = typer.Option(1000, "--samples-per-box", help="Test points per box"),
    low: float = typer.Option(0.0, "--low"),
    high: float = typer.Option(1.0, "--high"),
    verbose: bool = typer.Option(False, "--verbose", "-v"),
):
    """
    🧱 Ulam matrix of a one-dimensional map

    Example: wassreg ulam --boxes 10 --samples-per-box 1000
    """
    from wassreg.cli.commands import Commands
    _configure(verbose)
    commands = Commands()
    cfg = commands.load_config(config, seed=seed, out_dir=out)
    commands.ulam(cfg, map_name, boxes, samples_per_box, low, high)


@app.command("edmd")
def edmd(
    trajectory: Optional[str] = typer.Option(None, "--trajectory", help="JSON file with a 'states' list"),
    config: Optional[str] = typer.Option(None, "--config", help=CONFIG_HELP),
    out: Optional[str] = typer.Option(None, "--out", help="Output directory"),
    dictionary: str = typer.Option("coordinates", "--dictionary", help="coordinates or monomials"),
    degree: int = typer.Option(3, "--degree", help="Highest monomial degree"),
    x0: float = typer.Option(0.3, "--x0", help="Start of the built-in cubic orbit"),
    length: int = typer.Option(50, "--length", help="Length of the built-in cubic orbit"),
    dmd: bool = typer.Option(False, "--dmd", help="Plain state-space DMD instead of EDMD"),
    verbose: bool = typer.Option(False, "--verbose", "-v"),
):
    """
    🧮 EDMD / DMD least-squares fit on a trajectory

    Example: wassreg edmd --dictionary monomials --degree 3
    """
    from wassreg.cli.commands import Commands
    _configure(verbose)
    commands = Commands()
    cfg = commands.load_config(config, out_dir=out)
    commands.edmd(cfg, trajectory, dictionary, degree, x0, length, dmd)


@app.command()
def version():
    """
    📦 Show version information
    """
    from wassreg import __version__
    from wassreg.cli.ui import CliUI
    CliUI.print_header(f"wassreg v{__version__}")


def main():
    """Entry point for CLI; usage errors exit with 1"""
    try:
        code = app(standalone_mode=False)
    except click.exceptions.UsageError as e:
        e.show()
        sys.exit(1)
    except click.exceptions.Abort:
        sys.exit(1)
    sys.exit(code or 0)


if __name__ == "__main__":
    main()
