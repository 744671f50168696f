from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, NoReturn, Optional, TypeVar

import numpy as np
import typer
from rich.console import Console
from rich.table import Table

from . import __version__
from .bessel_ensemble import BesselWeightParams, bessel_ensemble
from .config import (
    DEFAULT_OUT_DIR,
    OUT_DIR_ENVVAR,
    OutputFormat,
    RunConfig,
    build_run_config,
    parse_weight,
)
from .errors import DomainError, EnsembleError, ValidationFailure
from .export import (
    CurveExporter,
    SampleExporter,
    build_header,
    render_summary_json,
    render_validation_json,
)
from .gaussian_ensemble import (
    GaussianEnsemble,
    jpd_eigen,
    jpd_eigen_real_twin,
    marginal_p1,
    p1_asymptotic,
)
from .models import DensityCurve, ExperimentResult, SymmetryClass, ValidationSummary, WeightKind
from .numerics import ks_critical_value
from .pipeline import run_experiment
from .validation import run_validation
from .writer import FileWriter

app = typer.Typer(
    add_completion=False,
    help="Eigenvalue statistics of 2x2 eta-ensembles: analytic curves, seeded samples and invariant checks.",
)

EXIT_USAGE = 1
TWIN_TOLERANCE = 1e-12
# p1_asymptotic is reported only where the expansion is meaningful
ASYMPTOTE_MIN_ABS_X = 3.0

T = TypeVar("T")


@dataclass(slots=True)
class CliState:
    verbose: bool = False
    quiet: bool = False


@app.callback()
def main_options(
    ctx: typer.Context,
    verbose: bool = typer.Option(False, "--verbose/--no-verbose", help="Show log output while computing."),
    quiet: bool = typer.Option(False, "--quiet", "-q", help="Do not print summary tables."),
) -> None:
    ctx.obj = CliState(verbose=verbose, quiet=quiet)
    if verbose:
        logging.basicConfig(
            level=logging.INFO,
            format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        )


def _weight_option() -> typer.models.OptionInfo:
    return typer.Option("gaussian", "--weight", "-w", help="Weight function: gaussian or bessel.")


def _eta_option(default: float = 0.5) -> typer.models.OptionInfo:
    return typer.Option(default, "--eta", help="Running parameter eta.")


def _alpha_option() -> typer.models.OptionInfo:
    return typer.Option(1.0, "--alpha", help="Scale alpha of the Generalized Bessel weight.")


def _symmetry_option() -> typer.models.OptionInfo:
    return typer.Option(
        SymmetryClass.UNITARY.value,
        "--symmetry",
        help="unitary2x2 or real_symmetric2x2 (the latter reads --eta as eta-hat).",
    )


def _format_option() -> typer.models.OptionInfo:
    return typer.Option(OutputFormat.CSV.value, "--format", "-f", help="Output format: csv or json.")


def _out_option() -> typer.models.OptionInfo:
    return typer.Option(None, "--out", "-o", help="Output file (default: derived from the parameters).")


def _out_dir_option() -> typer.models.OptionInfo:
    return typer.Option(
        DEFAULT_OUT_DIR,
        "--out-dir",
        envvar=OUT_DIR_ENVVAR,
        help="Directory for derived output file names.",
    )


@app.command()
def density(
    ctx: typer.Context,
    weight: str = _weight_option(),
    eta: float = _eta_option(),
    alpha: float = _alpha_option(),
    symmetry: str = _symmetry_option(),
    grid: str = typer.Option("-4:4:401", "--grid", help="Grid lo:hi:n for lambda."),
    method: str = typer.Option("direct", "--method", help="Bessel density method: direct or reduced."),
    fmt: str = _format_option(),
    out: Optional[Path] = _out_option(),
    out_dir: Path = _out_dir_option(),
) -> None:
    """Evaluate the spectral density rho(lambda) on a grid."""
    cfg = _configure(
        command="density",
        weight=weight,
        eta=eta,
        alpha=alpha,
        symmetry=symmetry,
        grid=grid,
        output_format=fmt,
        out=out,
        base_dir=out_dir,
        density_method=method,
    )
    curve = _guarded(cfg.paths.all(), lambda: density_curve(cfg))
    _write_curve(ctx, cfg, curve)


@app.command()
def spacing(
    ctx: typer.Context,
    weight: str = _weight_option(),
    eta: float = _eta_option(),
    alpha: float = _alpha_option(),
    symmetry: str = _symmetry_option(),
    grid: str = typer.Option("0:6:301", "--grid", help="Grid lo:hi:n for the spacing s."),
    fmt: str = _format_option(),
    out: Optional[Path] = _out_option(),
    out_dir: Path = _out_dir_option(),
) -> None:
    """Evaluate the nearest-neighbour spacing density P(s) on a grid."""
    cfg = _configure(
        command="spacing",
        weight=weight,
        eta=eta,
        alpha=alpha,
        symmetry=symmetry,
        grid=grid,
        output_format=fmt,
        out=out,
        base_dir=out_dir,
    )
    curve = _guarded(cfg.paths.all(), lambda: spacing_curve(cfg))
    _write_curve(ctx, cfg, curve)


@app.command()
def marginal(
    ctx: typer.Context,
    eta: float = _eta_option(),
    grid: str = typer.Option("-6:6:240", "--grid", help="Grid lo:hi:n for the diagonal entry x."),
    fmt: str = _format_option(),
    out: Optional[Path] = _out_option(),
    out_dir: Path = _out_dir_option(),
) -> None:
    """Evaluate the diagonal-entry marginal p1(x) of the Gaussian weight and its asymptote."""
    cfg = _configure(
        command="marginal",
        weight=WeightKind.GAUSSIAN.value,
        eta=eta,
        grid=grid,
        output_format=fmt,
        out=out,
        base_dir=out_dir,
    )
    curve = _guarded(cfg.paths.all(), lambda: marginal_curve(cfg))
    _write_curve(ctx, cfg, curve)


@app.command()
def sample(
    ctx: typer.Context,
    weight: str = _weight_option(),
    eta: float = _eta_option(),
    alpha: float = _alpha_option(),
    symmetry: str = _symmetry_option(),
    n: int = typer.Option(75000, "--n", help="Number of matrices to draw."),
    seed: int = typer.Option(0, "--seed", help="Seed; identical seeds give identical sample files."),
    bins: int = typer.Option(60, "--bins", help="Histogram bins for the summary."),
    half_width: float = typer.Option(5.0, "--half-width", help="Eigenvalue histogram range is [-w, w]."),
    workers: int = typer.Option(1, "--workers", help="Worker processes; does not change the samples."),
    sampler: Optional[str] = typer.Option(None, "--sampler", help="chain or eigen (default depends on the model)."),
    fmt: str = _format_option(),
    out: Optional[Path] = _out_option(),
    out_dir: Path = _out_dir_option(),
) -> None:
    """Draw seeded random matrices and compare their histograms with the analytic curves."""
    cfg = _configure(
        command="sample",
        weight=weight,
        eta=eta,
        alpha=alpha,
        symmetry=symmetry,
        output_format=fmt,
        out=out,
        base_dir=out_dir,
        seed=seed,
        n_samples=n,
        n_bins=bins,
        workers=workers,
        sampling_method=sampler,
    )
    if not half_width > 0:
        _fail_usage(f"half-width must be positive, got {half_width}")
    state: CliState = ctx.obj or CliState()
    result = _guarded(
        cfg.paths.all(),
        lambda: run_experiment(
            cfg.params,
            n_samples=cfg.n_samples or 0,
            seed=seed,
            n_bins=cfg.n_bins,
            value_range=(-half_width, half_width),
            workers=cfg.workers,
            method=cfg.sampling_method,
            progress=not state.quiet,
        ),
    )
    header = build_header(cfg.command_line(), cfg.params, seed)
    exporter = SampleExporter(header=header)
    content = exporter.render(result.samples) if cfg.output_format is OutputFormat.CSV else exporter.render_json(result.samples)
    outputs = {
        cfg.paths.data_path: content,
        cfg.paths.summary_path: render_summary_json(result, header),
    }
    _guarded(cfg.paths.all(), lambda: _write_all(FileWriter(), outputs))
    if not state.quiet:
        print_sample_summary(Console(), result, cfg)


@app.command("twin-check")
def twin_check(
    ctx: typer.Context,
    eta: float = _eta_option(0.75),
    grid: str = typer.Option("-4:4:161", "--grid", help="Grid lo:hi:n used for both eigenvalues."),
    fmt: str = _format_option(),
    out: Optional[Path] = _out_option(),
    out_dir: Path = _out_dir_option(),
) -> None:
    """Compare the unitary eta jpd with its real-symmetric twin eta-hat = 2 eta - 1."""
    cfg = _configure(
        command="twin-check",
        weight=WeightKind.GAUSSIAN.value,
        eta=eta,
        grid=grid,
        output_format=fmt,
        out=out,
        base_dir=out_dir,
    )
    curve = _guarded(cfg.paths.all(), lambda: twin_curve(cfg))
    _write_curve(ctx, cfg, curve)
    if not curve.meta["passed"]:
        _fail(ValidationFailure([f"twin.jpd_eigen[eta={eta}]"]))


@app.command()
def validate(
    ctx: typer.Context,
    weight: str = _weight_option(),
    out: Optional[Path] = _out_option(),
    out_dir: Path = _out_dir_option(),
) -> None:
    """Run the invariant battery and write a JSON report; exit 4 on any failure."""
    try:
        kind = parse_weight(weight)
    except ValueError as exc:
        _fail_usage(str(exc))
    target = out or out_dir / f"validate-{kind.value}.json"
    summary = _guarded([target], lambda: run_validation(kind))
    header = {"command": f"eta-ensembles validate --weight {kind.value}", "version": __version__}
    _guarded([target], lambda: FileWriter().write(target, render_validation_json(summary, header)))
    state: CliState = ctx.obj or CliState()
    if not state.quiet:
        print_validation_summary(Console(), summary, target)
    if not summary.passed:
        _fail(ValidationFailure(summary.failures))


def density_curve(cfg: RunConfig) -> DensityCurve:
    grid = cfg.grid.points()
    params = cfg.params
    if params.weight is WeightKind.GAUSSIAN:
        values = np.asarray(GaussianEnsemble(params).density(grid))
        return DensityCurve(grid, values, "lambda", "rho", meta={"method": "closed_form"})
    ensemble = bessel_ensemble(BesselWeightParams.from_ensemble(params))
    values = np.asarray(ensemble.spectral_density(grid, cfg.density_method))
    return DensityCurve(
        grid,
        values,
        "lambda",
        "rho",
        meta={"method": cfg.density_method.value, "zeta": params.zeta, "z_gap": ensemble.z_gap},
        extra_columns={"phi": np.asarray(ensemble.phi(grid))},
    )


def spacing_curve(cfg: RunConfig) -> DensityCurve:
    grid = cfg.grid.points()
    params = cfg.params
    if params.weight is WeightKind.GAUSSIAN:
        ensemble = GaussianEnsemble(params)
        return DensityCurve(
            grid,
            np.asarray(ensemble.gap(grid)),
            "s",
            "P",
            meta={"k_eta": ensemble.constants.k_eta},
            extra_columns={"cdf": ensemble.spacing_cdf()(grid)},
        )
    ensemble = bessel_ensemble(BesselWeightParams.from_ensemble(params))
    values = np.array([ensemble.gap(float(s)) for s in grid])
    return DensityCurve(grid, values, "s", "P", meta={"zeta": params.zeta, "z_gap": ensemble.z_gap})


def marginal_curve(cfg: RunConfig) -> DensityCurve:
    grid = cfg.grid.points()
    eta = cfg.params.eta
    if cfg.params.symmetry is not SymmetryClass.UNITARY:
        raise DomainError("entry marginals are available for the unitary class only")
    values = np.asarray(marginal_p1(grid, eta))
    far = np.abs(grid) >= ASYMPTOTE_MIN_ABS_X
    asymptote = np.full_like(grid, np.nan)
    if np.any(far):
        asymptote[far] = np.asarray(p1_asymptotic(grid[far], eta))
    return DensityCurve(grid, values, "x", "p1", extra_columns={"p1_asymptotic": asymptote})


def twin_curve(cfg: RunConfig) -> DensityCurve:
    eta = cfg.params.eta
    eta_hat = cfg.params.twin_eta
    grid = cfg.grid.points()
    l1, l2 = np.meshgrid(grid, grid, indexing="ij")
    diff = np.abs(np.asarray(jpd_eigen(l1, l2, eta)) - np.asarray(jpd_eigen_real_twin(l1, l2, eta_hat)))
    per_row = diff.max(axis=1)
    max_diff = float(per_row.max())
    return DensityCurve(
        grid,
        per_row,
        "lambda1",
        "max_abs_diff",
        meta={"eta_hat": eta_hat, "max_diff": max_diff, "passed": max_diff < TWIN_TOLERANCE},
    )


def _configure(**kwargs) -> RunConfig:
    try:
        return build_run_config(**kwargs)
    except EnsembleError as exc:
        _fail(exc)
    except ValueError as exc:
        _fail_usage(str(exc))


def _guarded(paths: Iterable[Path], action: Callable[[], T]) -> T:
    """Run ``action``; on a library or I/O error remove partial outputs and exit with an error code."""
    try:
        return action()
    except EnsembleError as exc:
        FileWriter().remove(paths)
        _fail(exc)
    except OSError as exc:
        FileWriter().remove(paths)
        typer.secho(f"Error: could not write output: {exc}", fg=typer.colors.RED, err=True)
        raise typer.Exit(code=EnsembleError.exit_code)
    except KeyboardInterrupt:
        FileWriter().remove(paths)
        typer.secho("Aborted.", fg=typer.colors.RED, err=True)
        raise typer.Exit(code=130)


def _write_all(writer: FileWriter, contents: dict[Path, str]) -> None:
    for target, content in contents.items():
        writer.write(target, content)


def _write_curve(ctx: typer.Context, cfg: RunConfig, curve: DensityCurve) -> None:
    header = build_header(cfg.command_line(), cfg.params)
    exporter = CurveExporter(header=header)
    content = exporter.render(curve) if cfg.output_format is OutputFormat.CSV else exporter.render_json(curve)
    FileWriter().write(cfg.paths.data_path, content)
    state: CliState = ctx.obj or CliState()
    if not state.quiet:
        print_curve_summary(Console(), curve, cfg)


def _fail(exc: EnsembleError) -> NoReturn:
    typer.secho(f"error: {exc}", fg=typer.colors.RED, err=True)
    raise typer.Exit(code=exc.exit_code)


def _fail_usage(message: str) -> NoReturn:
    typer.secho(f"usage error: {message}", fg=typer.colors.RED, err=True)
    raise typer.Exit(code=EXIT_USAGE)


def print_curve_summary(console: Console, curve: DensityCurve, cfg: RunConfig) -> None:
    table = Table(title=f"{cfg.command} ({cfg.params.weight.value}, eta={cfg.params.eta:g})")
    table.add_column("Quantity")
    table.add_column("Value", justify="right")
    table.add_row("rows", str(curve.abscissa.size))
    finite = curve.values[np.isfinite(curve.values)]
    if finite.size:
        table.add_row(f"max {curve.value_name}", f"{finite.max():.6g}")
    for key, value in curve.meta.items():
        table.add_row(key, f"{value:.6g}" if isinstance(value, float) else str(value))
    console.print(table)
    console.print(f"[green]Written:[/] {cfg.paths.data_path}")


def print_sample_summary(console: Console, result: ExperimentResult, cfg: RunConfig) -> None:
    table = Table(title=f"sample ({cfg.params.weight.value}, eta={cfg.params.eta:g}, method={result.method})")
    table.add_column("Quantity")
    table.add_column("Value", justify="right")
    critical = ks_critical_value(2 * result.n_samples)
    table.add_row("samples", str(result.n_samples))
    table.add_row("KS density", f"{result.gof_density.ks_distance:.4g}")
    table.add_row("KS density (99% critical)", f"{critical:.4g}")
    table.add_row("KS spacing", f"{result.gof_spacing.ks_distance:.4g}")
    table.add_row("KS spacing (99% critical)", f"{ks_critical_value(result.n_samples):.4g}")
    table.add_row("seconds", f"{result.elapsed_seconds:.1f}")
    console.print(table)
    console.print(f"[green]Samples:[/] {cfg.paths.data_path}")
    console.print(f"[green]Summary:[/] {cfg.paths.summary_path}")


def print_validation_summary(console: Console, summary: ValidationSummary, target: Path) -> None:
    table = Table(title=f"validate ({summary.weight.value})")
    table.add_column("Check")
    table.add_column("Error", justify="right")
    table.add_column("Tolerance", justify="right")
    table.add_column("Status")
    for check in summary.checks:
        status = "[green]ok[/]" if check.passed else "[red]FAIL[/]"
        table.add_row(check.name, f"{check.value:.3g}", f"{check.tolerance:.3g}", status)
    console.print(table)
    for key, value in summary.method_discrepancies.items():
        console.print(f"reduced vs direct density ({key}): {value:.3g}")
    console.print(f"[green]Report:[/] {target}")


def _usage_error_type() -> type[Exception]:
    # typer re-exports BadParameter from the click it runs on; its base is that click's UsageError
    return next(cls for cls in typer.BadParameter.__mro__ if cls.__name__ == "UsageError")


def main() -> None:
    try:
        code = app(standalone_mode=False)
    except _usage_error_type() as exc:
        exc.show()
        raise SystemExit(EXIT_USAGE) from exc
    except typer.Abort as exc:
        typer.secho("Aborted.", fg=typer.colors.RED, err=True)
        raise SystemExit(130) from exc
    raise SystemExit(code or 0)


__all__ = ["app", "main", "density_curve", "spacing_curve", "marginal_curve", "twin_curve"]
