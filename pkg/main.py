import functools
import logging
import sys
from pathlib import Path
from typing import Optional

import click

from config.simulation_config import SimulationConfig
from src.sleeve_actuator import __version__
from src.sleeve_actuator.datasets_io import (
    ensure_writable,
    format_report_text,
    serialize_geometry_config,
    write_report,
    write_table,
    write_trace,
)
from src.sleeve_actuator.dynamics import Disturbance, PressureLag
from src.sleeve_actuator.errors import ActuatorError, ValidationError
from src.sleeve_actuator.report_generator import ReportGenerator
from src.sleeve_actuator.toolkit import KINEMATIC_MODES, SWEEP_HOLDS, SWEEP_METRICS, SWEEP_PARAMS, ActuatorToolkit
from src.sleeve_actuator.units import UnitConverter

logger = logging.getLogger("sleeve_actuator")

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_VALIDATION = 2

config_option = click.option(
    "--config", "config_path", required=True, type=click.Path(dir_okay=False, path_type=Path),
    help="Actuator config (JSON, boundary units).",
)
force_option = click.option("--force", is_flag=True, help="Overwrite existing output files.")
report_option = click.option(
    "--report", "report_path", type=click.Path(dir_okay=False, path_type=Path),
    help="Also write the report as text plus a JSON document.",
)


def reports_errors(command):
    """Maps toolkit errors to exit codes: 2 for bad input, 1 for numerical failures"""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except ActuatorError as e:
            click.echo(ReportGenerator.parse_error(e), err=True)
            sys.exit(EXIT_VALIDATION if isinstance(e, ValidationError) else EXIT_NUMERICAL)

    return wrapper


def _emit(report, report_path: Optional[Path], force: bool):
    click.echo(format_report_text(report), nl=False)
    if report_path is not None:
        write_report(report, report_path, force=force)


def _toolkit(ctx: click.Context) -> ActuatorToolkit:
    return ctx.obj["toolkit"]


@click.group()
@click.option("-v", "--verbose", count=True, help="Repeat for more detail (-v info, -vv debug).")
@click.option("--lenient", is_flag=True, help="Drop unknown config keys with a warning instead of failing.")
@click.option("--jobs", default=4, show_default=True, type=click.IntRange(min=1), help="Concurrent sweep points.")
@click.version_option(__version__, prog_name="sleeve-actuator")
@click.pass_context
def cli(ctx: click.Context, verbose: int, lenient: bool, jobs: int):
    """Model, calibrate and simulate folded-bellows soft sleeve actuators."""
    level = logging.WARNING if verbose == 0 else logging.INFO if verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s", force=True)
    SimulationConfig.validate()
    ctx.ensure_object(dict)
    ctx.obj["toolkit"] = ActuatorToolkit(max_concurrent=jobs, strict=not lenient)


@cli.command()
@config_option
@click.option("--mode", type=click.Choice(KINEMATIC_MODES), default="extension", show_default=True)
@click.option("--delta", "delta_mm", type=float, help="Outer-side extension per fold for bending (mm).")
@report_option
@force_option
@click.pass_context
@reports_errors
def kinematics(ctx, config_path, mode, delta_mm, report_path, force):
    """Stroke of the fold geometry: extension, contraction or bending."""
    toolkit = _toolkit(ctx)
    setup = toolkit.load(config_path)
    _emit(toolkit.kinematics(setup, mode, delta_mm), report_path, force)


@cli.command("fit-material")
@click.argument("data", type=click.Path(dir_okay=False, path_type=Path))
@click.option("--family", type=click.Choice(["neo_hookean", "mr2", "mr5", "yeoh3"]), default="mr5", show_default=True)
@report_option
@force_option
@click.pass_context
@reports_errors
def fit_material(ctx, data, family, report_path, force):
    """Fit hyperelastic coefficients to a strain,stress_mpa CSV."""
    _, report = _toolkit(ctx).fit_material(data, family)
    _emit(report, report_path, force)


@cli.command("fit-stiffness")
@click.argument("data", type=click.Path(dir_okay=False, path_type=Path))
@click.option("--pressure-kpa", type=float, help="Pressure group to fit when the file holds several.")
@click.option("--bin-width", type=float, default=SimulationConfig.STIFFNESS_BIN_WIDTH_MM, show_default=True)
@report_option
@force_option
@click.pass_context
@reports_errors
def fit_stiffness(ctx, data, pressure_kpa, bin_width, report_path, force):
    """Fit the axial stiffness cubic to a displacement_mm,force_n CSV."""
    _emit(_toolkit(ctx).fit_stiffness(data, pressure_kpa, bin_width), report_path, force)


@cli.command()
@config_option
@click.option("--pressure-kpa", required=True, type=float)
@click.option("--sweep-y", is_flag=True, help="Write the force-displacement curve to --output.")
@click.option("--y-step", type=float, default=0.5, show_default=True, help="Curve spacing (mm).")
@click.option("--update-areas", is_flag=True, help="Recompute projected areas from the extension.")
@click.option("--output", type=click.Path(dir_okay=False, path_type=Path), help="Curve CSV path.")
@report_option
@force_option
@click.pass_context
@reports_errors
def statics(ctx, config_path, pressure_kpa, sweep_y, y_step, update_areas, output, report_path, force):
    """Blocked force and free stroke at one pressure."""
    if sweep_y and output is None:
        raise ValidationError("--sweep-y needs --output", field="output")
    if output is not None:
        ensure_writable(output, force)
    toolkit = _toolkit(ctx)
    setup = toolkit.load(config_path)
    report, rows = toolkit.statics(setup, pressure_kpa, y_step if sweep_y else None, update_areas)
    if sweep_y:
        write_table(rows, output, ["y_mm", "net_force_n", "fk_n", "extrapolated"], force=force)
    _emit(report, report_path, force)


@cli.command()
@config_option
@click.option("--trajectory", type=click.Choice(["step", "ramp", "sinusoid", "staircase"]), default="step", show_default=True)
@click.option("--duration", type=float, default=5.0, show_default=True, help="Run length (s).")
@click.option("--amplitude", type=float, default=0.0, help="Step height or sinusoid amplitude (mm).")
@click.option("--slope", type=float, default=0.0, help="Ramp slope (mm/s).")
@click.option("--ramp-duration", type=float, help="Ramp length before holding (s).")
@click.option("--offset", type=float, default=0.0, help="Sinusoid offset (mm).")
@click.option("--frequency", type=float, default=0.0, help="Sinusoid frequency (Hz).")
@click.option("--levels", type=str, help="Staircase levels, e.g. 10,20,30,40 (mm).")
@click.option("--dwell", type=float, default=0.0, help="Staircase dwell per level (s).")
@click.option("--dt", type=float, help="Plant step (s); defaults to the controller sample time.")
@click.option("--disturbance-n", type=float, help="Load step opposing extension (N).")
@click.option("--disturbance-at", type=float, default=0.0, show_default=True, help="Load step time (s).")
@click.option("--output", required=True, type=click.Path(dir_okay=False, path_type=Path), help="Trace CSV path.")
@report_option
@force_option
@click.pass_context
@reports_errors
def simulate(
    ctx, config_path, trajectory, duration, amplitude, slope, ramp_duration, offset, frequency, levels, dwell,
    dt, disturbance_n, disturbance_at, output, report_path, force,
):
    """Closed-loop PID tracking of a step, ramp, sinusoid or staircase."""
    ensure_writable(output, force)
    toolkit = _toolkit(ctx)
    setup = toolkit.load(config_path)
    path = toolkit.build_trajectory(
        trajectory,
        duration,
        amplitude=amplitude,
        slope=slope,
        offset=offset,
        frequency=frequency,
        levels=UnitConverter.parse_list(levels) if levels else (),
        dwell=dwell,
        ramp_duration=ramp_duration,
    )
    disturbance = Disturbance(disturbance_n, disturbance_at) if disturbance_n is not None else None
    trace, report = toolkit.simulate(setup, path, dt=dt, disturbance=disturbance)
    write_trace(trace, output, force=force)
    _emit(report, report_path, force)


@cli.command()
@config_option
@click.option("--fmin", type=float, required=True, help="First frequency (Hz).")
@click.option("--fmax", type=float, required=True, help="Last frequency (Hz).")
@click.option("--df", type=float, required=True, help="Frequency step (Hz).")
@click.option("--pressure-kpa", type=float, default=100.0, show_default=True, help="Square-wave high level.")
@click.option("--dt", type=float, default=SimulationConfig.DEFAULT_DT, show_default=True)
@click.option("--fill-tau", type=float, help="Valve fill time constant (s); overrides the config.")
@click.option("--vent-tau", type=float, help="Valve vent time constant (s); overrides the config.")
@click.option("--output", required=True, type=click.Path(dir_okay=False, path_type=Path), help="Response CSV path.")
@report_option
@force_option
@click.pass_context
@reports_errors
def freq(ctx, config_path, fmin, fmax, df, pressure_kpa, dt, fill_tau, vent_tau, output, report_path, force):
    """Square-wave frequency response and -3 dB bandwidth."""
    if (fill_tau is None) != (vent_tau is None):
        raise ValidationError("--fill-tau and --vent-tau must be given together", field="fill_tau")
    ensure_writable(output, force)
    toolkit = _toolkit(ctx)
    setup = toolkit.load(config_path)
    lag = PressureLag(fill_tau, vent_tau) if fill_tau is not None else None
    rows, report = toolkit.frequency(setup, fmin, fmax, df, pressure_kpa, dt, lag)
    write_table(rows, output, ["frequency_hz", "amplitude_mm", "amplitude_db"], force=force)
    _emit(report, report_path, force)


@cli.command()
@config_option
@click.option("--param", type=click.Choice(SWEEP_PARAMS), required=True)
@click.option("--range", "range_text", required=True, help="START:STOP:STEP (inclusive) or a single value.")
@click.option("--metric", type=click.Choice(SWEEP_METRICS), default="extension", show_default=True)
@click.option("--pressure-kpa", type=float, default=100.0, show_default=True, help="Pressure for force metrics.")
@click.option(
    "--hold", type=click.Choice(SWEEP_HOLDS), default="fold_width", show_default=True,
    help="Fold dimension kept fixed during a fold angle sweep.",
)
@click.option("--output", required=True, type=click.Path(dir_okay=False, path_type=Path), help="Sweep CSV path.")
@force_option
@click.pass_context
@reports_errors
def sweep(ctx, config_path, param, range_text, metric, pressure_kpa, hold, output, force):
    """One metric across a fold angle, fold width or fold count range."""
    ensure_writable(output, force)
    toolkit = _toolkit(ctx)
    setup = toolkit.load(config_path)
    rows = toolkit.sweep(setup, param, UnitConverter.parse_range(range_text), metric, pressure_kpa, hold)
    write_table(rows, output, [param, metric], force=force)
    click.echo(f"{len(rows)} sweep point(s) written to {output}")


@cli.command()
@click.argument("name", required=False)
@click.option("--output", type=click.Path(dir_okay=False, path_type=Path), help="Write the config here instead of stdout.")
@force_option
@reports_errors
def catalog(name, output, force):
    """List tabulated actuator models, or print one as a config."""
    from config.actuator_catalog import ActuatorCatalog

    if name is None:
        for model in ActuatorCatalog.names():
            click.echo(f"{model}\t{ActuatorCatalog.family_of(model)}")
        return
    text = serialize_geometry_config(ActuatorToolkit.catalog_config(name))
    if output is None:
        click.echo(text, nl=False)
        return
    ensure_writable(output, force)
    output.write_text(text, encoding="utf-8")


@cli.command("time-response")
@config_option
@click.option("--pressure-kpa", type=float, required=True)
@click.option("--hold", type=float, default=5.0, show_default=True, help="Pressurised interval (s).")
@click.option("--vent", type=float, default=5.0, show_default=True, help="Observed interval after venting (s).")
@click.option("--dt", type=float, default=SimulationConfig.DEFAULT_DT, show_default=True)
@report_option
@force_option
@click.pass_context
@reports_errors
def time_response(ctx, config_path, pressure_kpa, hold, vent, dt, report_path, force):
    """Open-loop rise time while pressurised and decay time after venting."""
    toolkit = _toolkit(ctx)
    setup = toolkit.load(config_path)
    _emit(toolkit.time_response(setup, pressure_kpa, hold, vent, dt), report_path, force)


def main():
    """Main entry point"""
    cli(obj={})


if __name__ == "__main__":
    main()
