"""Command-line interface for wedgebound"""
import functools
import sys
from pathlib import Path

import click
from rich.console import Console
from rich.panel import Panel
from rich.progress import Progress, SpinnerColumn, TextColumn
from rich.table import Table

from . import __version__
from .analysis.verification import VerificationRunner
from .core.config import Config, RunConfig
from .core.errors import ConfigError
from .reports.report_generator import ReportGenerator
from .utils.logger import setup_logger


console = Console()
logger = setup_logger()


def run_options(command):
    """Options shared by the verification commands"""
    @click.option('--config', '-c', 'config_path', type=click.Path(exists=True, dir_okay=False, path_type=Path),
                  help='Run file with section-prefixed keys')
    @click.option('--out', '-o', 'output_dir', type=click.Path(file_okay=False, path_type=Path),
                  help='Output directory (overrides output.dir)')
    @click.option('--n', '-n', 'n', type=int, help='Number of sectors N (overrides model.n)')
    @click.option('--refine', type=click.IntRange(min=0), help='Quadrature refinement level (overrides quad.level)')
    @click.option('--zero-eta', is_flag=True, help='Debug: switch the bound-state operator off')
    @click.option('--perturb-s', type=float, help='Debug: add a constant to every S-matrix component')
    @click.option('--workers', default=1, show_default=True, type=click.IntRange(min=1),
                  help='Threads for independent matrix elements')
    @functools.wraps(command)
    def wrapper(config_path, output_dir, n, refine, zero_eta, perturb_s, workers, **kwargs):
        config = _load_config(config_path, n=n, quad_level=refine, zero_eta=True if zero_eta else None,
                              perturb_s=perturb_s, output_dir=output_dir)
        return command(config, workers, **kwargs)
    return wrapper


def _load_config(config_path, **overrides) -> RunConfig:
    try:
        config = RunConfig.from_file(config_path) if config_path else RunConfig()
        return config.with_overrides(**overrides)
    except ConfigError as e:
        raise click.BadParameter(str(e), param_hint="'--config'")


def _banner(title: str, config: RunConfig):
    console.print(Panel.fit(f"[bold blue]wedgebound[/bold blue] - {title}", border_style="blue"))
    console.print(f"\n[cyan]N:[/cyan] {config.n}   [cyan]m1:[/cyan] {config.mass}   "
                  f"[cyan]quadrature level:[/cyan] {config.quad_level}")
    if config.zero_eta:
        console.print("[yellow]![/yellow] eta forced to zero")
    if config.perturb_s:
        console.print(f"[yellow]![/yellow] S-matrix perturbed by {config.perturb_s}")


def _mark(passed: bool) -> str:
    return "[green]✓[/green]" if passed else "[red]✗[/red]"


def _finish(paths, passed: bool):
    console.print()
    for path in paths:
        console.print(f"  → {path}")
    if passed:
        console.print("\n[bold green]All checks passed[/bold green]")
        sys.exit(0)
    console.print("\n[bold red]Checks failed[/bold red]")
    sys.exit(1)


@click.group()
@click.version_option(version=__version__)
def cli():
    """
    wedgebound - Z(N)-Ising S-matrix bootstrap and weak wedge-locality checks

    Builds the S-matrix of the Z(N) model, its fusion table and bound-state
    couplings, and verifies that the bound-state operator cancels the
    residue defect of the wedge-local field commutator.
    """
    pass


@cli.command()
@run_options
def axioms(config: RunConfig, workers: int):
    """
    Unitarity, crossing, bootstrap and symmetry checks

    Examples:
        wedgebound axioms
        wedgebound axioms --n 4 --out reports/n4
    """
    _banner("S-matrix axioms", config)
    try:
        suite = VerificationRunner(config, workers).run_axioms()

        table = Table(title=f"Axiom checks (N={suite.N})")
        table.add_column("Check", style="cyan")
        table.add_column("Target", style="green")
        table.add_column("Max error", justify="right")
        table.add_column("", justify="center")
        for report in suite.reports:
            table.add_row(report.check, report.target, f"{report.max_error:.2e}", _mark(report.passed))
        console.print(table)

        paths = ReportGenerator(config.output_dir).axioms_report(suite, config.as_dict())
    except Exception as e:
        console.print(f"[red]Error:[/red] {str(e)}")
        logger.exception("Axiom suite failed")
        sys.exit(1)
    _finish(paths, suite.passed)


@cli.command()
@run_options
def fusion(config: RunConfig, workers: int):
    """
    Fusion table with angles, residues and calibrated eta

    Examples:
        wedgebound fusion --n 3
        wedgebound fusion --n 2
    """
    _banner("fusion table", config)
    try:
        with Progress(SpinnerColumn(), TextColumn("[progress.description]{task.description}"),
                      console=console, transient=True) as progress:
            progress.add_task("[cyan]Calibrating eta...", total=None)
            suite = VerificationRunner(config, workers).run_fusion()

        table = Table(title=f"Fusion processes (N={suite.N})")
        table.add_column("Process", style="cyan")
        table.add_column("theta_ab", justify="right")
        table.add_column("theta_ba", justify="right")
        table.add_column("Residue", justify="right")
        table.add_column("|eta|^2 / 2pi|Res|", justify="right")
        for row, eta in zip(suite.rows(), suite.eta_summary()):
            table.add_row(eta['process'], f"{row['theta_ab']:.10f}", f"{row['theta_ba']:.10f}",
                          row['residue'], f"{eta['ratio']:.6f}")
        console.print(table)
        for check in suite.pole_checks:
            console.print(f"{_mark(check.passed)} s-channel pole {check.target}: {check.max_error:.2e}")
        if suite.error:
            console.print(f"[red]✗[/red] {suite.error}")

        paths = ReportGenerator(config.output_dir).fusion_report(suite, config.as_dict())
    except Exception as e:
        console.print(f"[red]Error:[/red] {str(e)}")
        logger.exception("Fusion suite failed")
        sys.exit(1)
    _finish(paths, suite.passed)


@cli.command()
@run_options
def weak_commutator(config: RunConfig, workers: int):
    """
    Weak wedge-locality of phi + chi on one-particle matrix elements

    Runs the configured requests (the default scenario unless
    scenario=custom) and the negative controls.

    Examples:
        wedgebound weak-commutator
        wedgebound weak-commutator --zero-eta
        wedgebound weak-commutator --config run.env --refine 2
    """
    _banner("weak commutator", config)
    try:
        with Progress(SpinnerColumn(), TextColumn("[progress.description]{task.description}"),
                      console=console, transient=True) as progress:
            progress.add_task("[cyan]Computing matrix elements...", total=None)
            suite = VerificationRunner(config, workers).run_weak_commutator()

        table = Table(title=f"Commutator matrix elements (N={suite.N})")
        table.add_column("Kind", style="cyan")
        table.add_column("Label", style="green")
        table.add_column("|phi|", justify="right")
        table.add_column("|total|", justify="right")
        table.add_column("Scale", justify="right")
        table.add_column("", justify="center")
        for row in suite.summary_rows():
            table.add_row(row['kind'], row['label'],
                          f"{abs(complex(row['phi_re'], row['phi_im'])):.3e}",
                          f"{abs(complex(row['total_re'], row['total_im'])):.3e}",
                          f"{row['scale']:.3e}", _mark(row['passed']))
        console.print(table)
        if suite.error:
            console.print(f"[red]✗[/red] {suite.error}")

        paths = ReportGenerator(config.output_dir).weak_commutator_report(suite, config.as_dict())
    except Exception as e:
        console.print(f"[red]Error:[/red] {str(e)}")
        logger.exception("Weak commutator suite failed")
        sys.exit(1)
    _finish(paths, suite.passed)


@cli.command()
@click.option('--config', '-c', 'config_path', type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help='Run file with section-prefixed keys')
def config_check(config_path):
    """Show the resolved run configuration and environment settings"""
    console.print(Panel.fit("[bold blue]Configuration Check[/bold blue]", border_style="blue"))
    config = _load_config(config_path)

    table = Table(title="Run configuration")
    table.add_column("Key", style="cyan")
    table.add_column("Value", style="green")
    for key, value in config.as_dict().items():
        table.add_row(key, value)
    console.print(table)

    console.print(f"\n[cyan]Log level:[/cyan] {Config.LOG_LEVEL}   [cyan]Debug:[/cyan] {Config.DEBUG}")
    console.print(f"[cyan]Templates:[/cyan] {Config.TEMPLATE_DIR}")
    output_dir = Path(config.output_dir)
    console.print(f"[cyan]Output directory:[/cyan] {output_dir}")
    console.print("[green]✓[/green] Directory exists" if output_dir.exists()
                  else "[yellow]![/yellow] Directory will be created")


def main():
    """Entry point for the CLI"""
    cli()


if __name__ == '__main__':
    main()
