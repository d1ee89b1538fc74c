"""
Tropiscope - logarithmic limit sets, coamoebas and algebraicity checks
Main entry point
"""

import sys
from pathlib import Path
from typing import Optional

import typer

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

from core.command_handler import EXIT_ERROR, CommandHandler
from core.config import RunConfig
from core.exceptions import ConfigError
from utils.helpers import setup_logging

app = typer.Typer(add_completion=False, no_args_is_help=True,
                  help="Estimate logarithmic limit sets of torus varieties and test them for algebraicity.")

CONFIG = typer.Option(None, "--config", help="JSON configuration file")
SEED = typer.Option(None, "--seed", help="Random seed")
SHELLS = typer.Option(None, "--shells", help="Number of shells")
POINTS = typer.Option(None, "--points", help="Points per shell")
OUT = typer.Option(None, "--out", help="Output directory")
WORKERS = typer.Option(None, "--workers", help="Parallel workers (never changes the output)")
EXPR = typer.Option(None, "--expr", help="Variety: equations separated by ';', or a tuple for --mode parametrized")
MODE = typer.Option(None, "--mode", help="implicit or parametrized")
K = typer.Option(None, "--k", help="Declared complex dimension")
COMPONENT = typer.Option(None, "--component", help="Component g = c of sin(pi*g)")


def build_config(config: Optional[Path], seed: Optional[int], shells: Optional[int], points: Optional[int],
                 out: Optional[Path], workers: Optional[int], expr: Optional[str], mode: Optional[str],
                 k: Optional[int], component: Optional[int]) -> RunConfig:
    """JSON configuration with command-line overrides; flags win"""
    run_config = RunConfig(str(config) if config else None)
    if seed is not None:
        run_config.seed = seed
    run_config.override("shells", "shells", shells)
    run_config.override("shells", "points", points)
    run_config.override("shells", "workers", workers)
    run_config.override("output", "out_dir", str(out) if out else None)
    if expr is not None:
        run_config.variety.expression = expr
        run_config.variety.file = None
    run_config.override("variety", "mode", mode)
    run_config.override("variety", "k", k)
    run_config.override("variety", "component", component)
    return run_config.validate()


def run(command: str, **options) -> int:
    try:
        run_config = build_config(**options)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    setup_logging(run_config.output.log_level, run_config.output.log_file)
    return CommandHandler(run_config).handle_command(command)


@app.command()
def classify(config: Optional[Path] = CONFIG, seed: Optional[int] = SEED, shells: Optional[int] = SHELLS,
             points: Optional[int] = POINTS, out: Optional[Path] = OUT, workers: Optional[int] = WORKERS,
             expr: Optional[str] = EXPR, mode: Optional[str] = MODE, k: Optional[int] = K,
             component: Optional[int] = COMPONENT):
    """Decide AlgebraicConsistent / NotAlgebraic / Inconclusive (exit 0 / 10 / 20)"""
    raise typer.Exit(run("classify", config=config, seed=seed, shells=shells, points=points, out=out,
                         workers=workers, expr=expr, mode=mode, k=k, component=component))


@app.command()
def limitset(config: Optional[Path] = CONFIG, seed: Optional[int] = SEED, shells: Optional[int] = SHELLS,
             points: Optional[int] = POINTS, out: Optional[Path] = OUT, workers: Optional[int] = WORKERS,
             expr: Optional[str] = EXPR, mode: Optional[str] = MODE, k: Optional[int] = K,
             component: Optional[int] = COMPONENT):
    """Write the estimated spherical complex, the exact one for polynomials, genericity and ends"""
    raise typer.Exit(run("limitset", config=config, seed=seed, shells=shells, points=points, out=out,
                         workers=workers, expr=expr, mode=mode, k=k, component=component))


@app.command()
def phase(config: Optional[Path] = CONFIG, seed: Optional[int] = SEED, shells: Optional[int] = SHELLS,
          points: Optional[int] = POINTS, out: Optional[Path] = OUT, workers: Optional[int] = WORKERS,
          expr: Optional[str] = EXPR, mode: Optional[str] = MODE, k: Optional[int] = K,
          component: Optional[int] = COMPONENT):
    """Phase cloud closure dimension and rational geodesic circles"""
    raise typer.Exit(run("phase", config=config, seed=seed, shells=shells, points=points, out=out,
                         workers=workers, expr=expr, mode=mode, k=k, component=component))


@app.command()
def render(config: Optional[Path] = CONFIG, seed: Optional[int] = SEED, shells: Optional[int] = SHELLS,
           points: Optional[int] = POINTS, out: Optional[Path] = OUT, workers: Optional[int] = WORKERS,
           expr: Optional[str] = EXPR, mode: Optional[str] = MODE, k: Optional[int] = K,
           component: Optional[int] = COMPONENT):
    """Amoeba and rho-disk figures, complement convexity and area growth"""
    raise typer.Exit(run("render", config=config, seed=seed, shells=shells, points=points, out=out,
                         workers=workers, expr=expr, mode=mode, k=k, component=component))


@app.command()
def certify(config: Optional[Path] = CONFIG, seed: Optional[int] = SEED, shells: Optional[int] = SHELLS,
            points: Optional[int] = POINTS, out: Optional[Path] = OUT, workers: Optional[int] = WORKERS,
            expr: Optional[str] = EXPR, mode: Optional[str] = MODE, k: Optional[int] = K,
            component: Optional[int] = COMPONENT):
    """Newton bound certificate from the vertex slopes"""
    raise typer.Exit(run("certify", config=config, seed=seed, shells=shells, points=points, out=out,
                         workers=workers, expr=expr, mode=mode, k=k, component=component))


def main():
    app()


if __name__ == "__main__":
    main()
