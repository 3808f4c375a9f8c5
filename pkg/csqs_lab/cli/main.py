"""Main CLI application for csqs-lab."""

import functools
import logging
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import typer
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.table import Table

from ..core.audit import AuditLattice, run_audit
from ..core.config import ConfigManager, get_config_manager, set_config_manager
from ..core.config_sources import FileConfigSource
from ..core.csqs_model import normalize
from ..core.exceptions import CsqsLabError
from ..core.figures import reproduce as reproduce_figures
from ..core.loss_channel import LossParams, lossy_density, lossy_field, lossy_wigner_closed
from ..core.measures import evaluate_measures
from ..core.phase_space import (
    field_argmax,
    field_minimum,
    negativity_volume,
    wigner_field,
    wigner_oracle,
)
from ..core.results import write_envelope, write_field, write_reports, write_table
from ..core.sweep import SweepSpec, run_sweep
from ..core.workers import resolve_workers
from .run_config import RunConfig, build_run_config

app = typer.Typer(
    name="csqs-lab",
    help="csqs-lab - Wigner functions, nonclassicality measures and photon loss of coherent superposed states",
    no_args_is_help=True,
)

console = Console()

# Global state set by the callback
_config_path: Optional[Path] = None
_workers: Optional[int] = None


def setup_logging(level: str = "WARNING") -> None:
    """Setup logging configuration."""
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), rich_tracebacks=True)],
        force=True,
    )


def get_manager() -> ConfigManager:
    """Get or load configuration."""
    return get_config_manager(_config_path)


def handle_errors(fn: Callable) -> Callable:
    """Map library errors onto the exit-code contract (2 usage, 3 numerical, 4 comparison)."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except CsqsLabError as e:
            console.print(f"[red]✗ {type(e).__name__}:[/red] {e.message}")
            logging.getLogger(__name__).debug(f"details: {e.details}")
            raise typer.Exit(e.exit_code)

    return wrapper


def _run_config(subcommand: str, flags: Dict[str, Any]) -> RunConfig:
    return build_run_config(subcommand, flags, get_manager().file_data())


def _flag(value: bool) -> Optional[bool]:
    """Unset boolean flags fall through to the config file."""
    return True if value else None


def _default_output(config: RunConfig, stem: str) -> Path:
    return config.output or Path(f"{stem}.{config.format}")


# --- commands -----------------------------------------------------------------

ALPHA = typer.Option(None, "--alpha", help="Re(α)")
ALPHA_IM = typer.Option(None, "--alpha-im", help="Im(α)")
T_OPT = typer.Option(None, "--t", help="Weight t (r = +√(1−t²))")
R_OPT = typer.Option(None, "--r", help="Weight r (t = +√(1−r²) unless --t-negative)")
T_NEGATIVE = typer.Option(False, "--t-negative", help="Use t = −√(1−r²)")
HALF_WIDTH = typer.Option(None, "--half-width", help="Grid half-width")
POINTS = typer.Option(None, "--points", help="Grid points per axis (odd)")
OUTPUT = typer.Option(None, "--output", "-o", help="Output file")
FORMAT = typer.Option(None, "--format", "-f", help="csv or json")
CUTOFF = typer.Option(None, "--cutoff", help="Fock cutoff for the oracles (default: fitted)")


@app.command("wigner")
@handle_errors
def cmd_wigner(
    alpha: Optional[float] = ALPHA,
    alpha_im: Optional[float] = ALPHA_IM,
    t: Optional[float] = T_OPT,
    r: Optional[float] = R_OPT,
    t_negative: bool = T_NEGATIVE,
    half_width: Optional[float] = HALF_WIDTH,
    points: Optional[int] = POINTS,
    output: Optional[Path] = OUTPUT,
    fmt: Optional[str] = FORMAT,
) -> None:
    """Sample the Wigner function on a grid and write it out."""
    config = _run_config(
        "wigner",
        dict(alpha=alpha, alpha_im=alpha_im, t=t, r=r, t_negative=_flag(t_negative),
             half_width=half_width, points=points, output=output, format=fmt),
    )
    state = normalize(config.state_params())
    field = wigner_field(state, config.grid(), resolve_workers(_workers))
    path = write_field(field, _default_output(config, "wigner"), config.format, config.describe())

    minimum, where = field_minimum(field)
    console.print(f"[green]✓[/green] Field written to [bold]{path}[/bold]")
    console.print(f"total_integral    {field.total_integral:.12f}")
    console.print(f"min value         {minimum:.12g} at γ = {where:.6g}")
    console.print(f"negativity_volume {negativity_volume(field):.12g}")


@app.command("measures")
@handle_errors
def cmd_measures(
    alpha: Optional[float] = ALPHA,
    alpha_im: Optional[float] = ALPHA_IM,
    t: Optional[float] = T_OPT,
    r: Optional[float] = R_OPT,
    t_negative: bool = T_NEGATIVE,
    oracle: bool = typer.Option(False, "--oracle", help="Also evaluate the oracles"),
    cutoff: Optional[int] = CUTOFF,
    half_width: Optional[float] = HALF_WIDTH,
    points: Optional[int] = POINTS,
    output: Optional[Path] = OUTPUT,
    fmt: Optional[str] = FORMAT,
) -> None:
    """Evaluate LE, N(ρ), WLN and δ at one state."""
    config = _run_config(
        "measures",
        dict(alpha=alpha, alpha_im=alpha_im, t=t, r=r, t_negative=_flag(t_negative),
             oracle=_flag(oracle), cutoff=cutoff, half_width=half_width, points=points,
             output=output, format=fmt),
    )
    state = normalize(config.state_params())
    reports = evaluate_measures(
        state, config.oracle, config.grid(), resolve_workers(_workers), cutoff=config.cutoff
    )

    table = Table(title=f"Measures at α={config.alpha_complex}, t={state.t:.6g}, r={state.r:.6g}")
    for column in ("Measure", "Variant", "Closed", "Oracle", "Delta", "Notes"):
        table.add_column(column)

    def cell(value: Optional[float]) -> str:
        return "-" if value is None else f"{value:.12g}"

    for report in reports:
        table.add_row(
            report.name,
            report.variant,
            cell(report.closed_value),
            cell(report.oracle_value),
            cell(report.delta),
            report.method_notes,
        )
    console.print(table)

    if config.output is not None:
        path = write_reports(reports, config.output, config.format, config.describe())
        console.print(f"[green]✓[/green] Reports written to [bold]{path}[/bold]")


@app.command("sweep")
@handle_errors
def cmd_sweep(
    alpha_start: Optional[float] = typer.Option(None, "--alpha-start"),
    alpha_stop: Optional[float] = typer.Option(None, "--alpha-stop"),
    alpha_step: Optional[float] = typer.Option(None, "--alpha-step"),
    r_values: Optional[List[float]] = typer.Option(None, "--r", help="Repeat for several r"),
    t_negative: bool = T_NEGATIVE,
    points: Optional[int] = POINTS,
    output: Optional[Path] = OUTPUT,
    fmt: Optional[str] = FORMAT,
) -> None:
    """Tabulate every measure over real α for each r (α-major rows)."""
    config = _run_config(
        "sweep",
        dict(alpha_start=alpha_start, alpha_stop=alpha_stop, alpha_step=alpha_step,
             r_values=r_values or None, t_negative=_flag(t_negative), points=points,
             output=output, format=fmt),
    )
    spec = SweepSpec(
        config.alpha_start,
        config.alpha_stop,
        config.alpha_step,
        tuple(config.r_values),
        config.t_negative,
        config.points,
    )
    table = run_sweep(spec, resolve_workers(_workers))
    path = write_table(
        table.rows, table.columns, _default_output(config, "sweep"), config.format,
        {"sweep": spec.as_dict()},
    )
    console.print(f"[green]✓[/green] {len(table.rows)} rows written to [bold]{path}[/bold]")


@app.command("loss")
@handle_errors
def cmd_loss(
    alpha: Optional[float] = ALPHA,
    alpha_im: Optional[float] = ALPHA_IM,
    t: Optional[float] = T_OPT,
    r: Optional[float] = R_OPT,
    t_negative: bool = T_NEGATIVE,
    kappa_t: Optional[float] = typer.Option(None, "--kappa-t", help="Rescaled time κt"),
    oracle: bool = typer.Option(False, "--oracle", help="Check the field against the Kraus oracle"),
    cutoff: Optional[int] = CUTOFF,
    half_width: Optional[float] = HALF_WIDTH,
    points: Optional[int] = POINTS,
    output: Optional[Path] = OUTPUT,
    fmt: Optional[str] = FORMAT,
) -> None:
    """Wigner function after photon loss."""
    config = _run_config(
        "loss",
        dict(alpha=alpha, alpha_im=alpha_im, t=t, r=r, t_negative=_flag(t_negative),
             kappa_t=kappa_t, oracle=_flag(oracle), cutoff=cutoff,
             half_width=half_width, points=points, output=output, format=fmt),
    )
    state = normalize(config.state_params())
    loss = LossParams.from_kappa_t(config.kappa_t)
    field = lossy_field(state, loss, config.grid(), resolve_workers(_workers))
    meta = config.describe()

    oracle_delta = None
    if config.oracle:
        # Extremes and center of the sampled field.
        rho = lossy_density(state, loss, config.cutoff)
        points_checked = [field_minimum(field)[1], field_argmax(field)[1], field.grid.center]
        oracle_delta = max(
            abs(lossy_wigner_closed(state, loss, zeta) - wigner_oracle(rho, zeta))
            for zeta in points_checked
        )
        meta["oracle_max_delta"] = oracle_delta

    path = write_field(field, _default_output(config, "loss"), config.format, meta)

    console.print(f"[green]✓[/green] Field written to [bold]{path}[/bold]")
    console.print(f"T                 {loss.T:.12g}")
    console.print(f"total_integral    {field.total_integral:.12f}")
    console.print(f"negativity_volume {negativity_volume(field):.12g}")
    if oracle_delta is not None:
        console.print(f"oracle max delta  {oracle_delta:.3e}")


@app.command("compare")
@handle_errors
def cmd_compare(
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="JSON report"),
    lattice: Optional[Path] = typer.Option(
        None, "--lattice", help="Lattice file (json/yaml/toml) overriding the configured points"
    ),
    max_moment_order: Optional[int] = typer.Option(None, "--max-moment-order"),
) -> None:
    """Audit every closed form against its oracle; exit 4 on any failure."""
    lattice_data = None
    if lattice is not None:
        raw = FileConfigSource(lattice).load()
        lattice_data = raw.get("lattice", raw)
    config = _run_config(
        "compare", dict(output=output, lattice=lattice_data, max_moment_order=max_moment_order)
    )
    report = run_audit(AuditLattice.from_config(config.audit_lattice()))

    table = Table(title="Closed form vs. oracle")
    for column in ("Check", "Kind", "Count", "Max delta", "Tolerance", "Status"):
        table.add_column(column)
    for check in report.checks:
        status = "[green]ok[/green]"
        if check.failed:
            status = "[yellow]differs[/yellow]" if check.informational else "[red]FAIL[/red]"
        table.add_row(
            check.name,
            "info" if check.informational else "primary",
            str(check.count),
            "-" if check.max_delta is None else f"{check.max_delta:.3e}",
            "-" if check.tolerance is None else f"{check.tolerance:.0e}",
            status,
        )
    console.print(table)

    path = write_envelope(
        config.output or Path("compare.json"),
        {"lattice": report.lattice, "tolerances": report.tolerances},
        report.model_dump(exclude={"lattice", "tolerances"}),
    )
    console.print(f"[green]✓[/green] Report written to [bold]{path}[/bold]")
    report.raise_for_failures()


@app.command("reproduce")
@handle_errors
def cmd_reproduce(
    figure: str = typer.Argument(..., help="fig2 … fig7, or all"),
    out_dir: Path = typer.Option(Path("figures"), "--out-dir", "-d"),
    points: Optional[int] = POINTS,
    alpha_step: Optional[float] = typer.Option(None, "--alpha-step"),
    fmt: Optional[str] = FORMAT,
) -> None:
    """Write the data behind every panel of a figure."""
    config = _run_config(
        "reproduce",
        dict(figure=figure, points=points, alpha_step=alpha_step, format=fmt),
    )
    manifest = reproduce_figures(
        config.figure,
        out_dir,
        config.format,
        resolve_workers(_workers),
        config.points,
        config.alpha_step,
    )

    table = Table(title=f"Reproduced {figure}")
    for column in ("Panel", "File", "Parameters", "Min W", "Negativity"):
        table.add_column(column)
    for entry in manifest:
        table.add_row(
            f"{entry.figure}{entry.panel}",
            str(entry.path),
            entry.description,
            "-" if entry.min_value is None else f"{entry.min_value:.6g}",
            "-" if entry.negativity_volume is None else f"{entry.negativity_volume:.6g}",
        )
    console.print(table)


@app.callback(invoke_without_command=True)
def main(
    ctx: typer.Context,
    config: Optional[Path] = typer.Option(None, "--config", "-c", help="Config file (json/yaml/toml)"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Info-level logging"),
    debug: bool = typer.Option(False, "--debug", help="Debug-level logging"),
    workers: Optional[int] = typer.Option(None, "--workers", "-w", help="Worker threads"),
    version: bool = typer.Option(False, "--version", help="Show version and exit"),
) -> None:
    """csqs-lab - coherent superposed state toolkit."""
    global _config_path, _workers

    if version:
        from .. import __version__

        console.print(f"csqs-lab {__version__}")
        raise typer.Exit()

    _config_path = config
    _workers = workers
    try:
        set_config_manager(ConfigManager(config))
    except CsqsLabError as e:
        console.print(f"[red]✗ {type(e).__name__}:[/red] {e.message}")
        raise typer.Exit(e.exit_code)

    level = get_manager().get_config().logging.level
    if verbose:
        level = "INFO"
    if debug:
        level = "DEBUG"
    setup_logging(level)

    if ctx.invoked_subcommand is None:
        console.print(Panel("Use --help for usage information.", expand=False))
        raise typer.Exit()


if __name__ == "__main__":
    app()
