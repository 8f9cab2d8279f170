import logging
import math
from pathlib import Path

import click
from tabulate import tabulate

from resalloc import __version__
from resalloc.comms import Regime
from resalloc.engine import (
    metrics, passed, run, verify_config, verify_trajectory, write_events_csv,
    write_netcdf, write_summary, write_trajectory_csv
)
from resalloc.scenario import (
    SWEEP_PARAMETERS, load_design, load_scenario, sweep, write_sweep_csv
)
from resalloc.util.exceptions import ConfigError, SimulationAbort

logger = logging.getLogger(__name__)

#: Process exit statuses
EXIT_PARSE_ERROR = 2
EXIT_INVALID_CERTIFICATE = 3
EXIT_PROPERTY_FAILURE = 4
EXIT_ABORT = 5

#: Sweep table columns echoed to the terminal
_SWEEP_DISPLAY = ("value", "status", "terminal_consensus_err",
                  "terminal_dist_to_lstar", "trigger_total", "error")


def _fail(message, status):
    click.echo(f"error: {message}", err=True)
    raise SystemExit(status)


def _load(scenario):
    try:
        return load_scenario(scenario)
    except ConfigError as e:
        _fail(e, EXIT_PARSE_ERROR)


def _parse_values(ctx, param, value):
    try:
        values = [float(x) for x in value.split(",") if x.strip()]
    except ValueError:
        raise click.BadParameter(f"expected a comma-separated list of "
                                 f"numbers, got '{value}'")
    if not values:
        raise click.BadParameter("no values given")
    if not all(map(math.isfinite, values)):
        raise click.BadParameter(f"values must be finite, got '{value}'")
    return values


@click.group()
@click.version_option(version=__version__, prog_name="resalloc")
@click.option("-v", "--verbose", count=True,
              help="Increase log verbosity (repeatable).")
def cli(verbose):
    """Distributed resource allocation simulator.

    Every command reads a YAML scenario file located at SCENARIO.
    """
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbose, logging.DEBUG)
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


@cli.command()
@click.argument("scenario", type=click.Path(exists=True, dir_okay=False))
def design(scenario):
    """Print the gain bounds and per-node certificate margins of SCENARIO.

    Exits with status 3 if the configured gains are not admissible.
    """
    try:
        report = load_design(scenario)
    except ConfigError as e:
        _fail(e, EXIT_PARSE_ERROR)

    certificate = report.certificate
    click.echo(tabulate(report.bound_rows(), headers=["bound", "value"],
                        floatfmt=".6g", missingval="n/a"))
    click.echo()
    click.echo(tabulate(
        report.node_rows(),
        headers=["node", "l", "din_sup", "ifp_index", "consensus_beta",
                 "margin"],
        floatfmt=".6g",
    ))
    click.echo()
    for note in report.notes:
        click.echo(f"note: {note}")
    click.echo(f"alpha={certificate.alpha:g} beta={certificate.beta:g} "
               f"ts={certificate.ts:g}")

    if not report.valid:
        click.echo(f"certificate: INVALID (violating nodes: "
                   f"{certificate.violating_nodes()})")
        raise SystemExit(EXIT_INVALID_CERTIFICATE)
    click.echo("certificate: valid")


@cli.command("run")
@click.argument("scenario", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--out", default=".", show_default=True,
              type=click.Path(file_okay=False),
              help="Output directory.")
@click.option("--progress", is_flag=True, help="Display a progress bar.")
@click.option("--netcdf", is_flag=True,
              help="Also write the trajectory as netCDF.")
def run_(scenario, out, progress, netcdf):
    """Simulate SCENARIO and write its output files to OUT.

    Writes trajectory.csv, events.csv (event regime only) and summary.txt.
    Exits with status 5 if the simulation aborts; the partial trajectory and
    the summary are written nonetheless.
    """
    cfg = _load(scenario).config
    out = Path(out)

    aborted = False
    try:
        traj = run(cfg, progress=progress)
    except SimulationAbort as e:
        logger.error("%s", e)
        traj, aborted = e.trajectory, True

    write_trajectory_csv(traj, out / "trajectory.csv")
    if cfg.regime is Regime.EVENT:
        write_events_csv(traj, out / "events.csv")
    if netcdf:
        write_netcdf(traj, out / "trajectory.nc")
    summary = metrics(traj)
    write_summary(summary, out / "summary.txt")

    click.echo(f"status={summary['status']} "
               f"terminal_dist_to_lstar={summary['terminal_dist_to_lstar']:.6g} "
               f"trigger_total={summary['trigger_total']}")
    click.echo(f"outputs written to {out}")

    if aborted:
        click.echo(f"error: {summary['abort_reason']}", err=True)
        raise SystemExit(EXIT_ABORT)


@cli.command()
@click.argument("scenario", type=click.Path(exists=True, dir_okay=False))
@click.option("--progress", is_flag=True, help="Display a progress bar.")
def verify(scenario, progress):
    """Simulate SCENARIO and print a pass/fail property report.

    Configuration checks run first; if one fails, no simulation is run.
    Exits with status 4 if a property check fails, 5 if the simulation
    aborts.
    """
    loaded = _load(scenario)
    checks = verify_config(loaded.config)

    aborted = False
    if passed(checks):
        try:
            traj = run(loaded.config, progress=progress)
        except SimulationAbort as e:
            logger.error("%s", e)
            traj, aborted = e.trajectory, True
        checks += verify_trajectory(traj, loaded.thresholds)

    click.echo(tabulate(
        [check.as_row() for check in checks],
        headers=["check", "status", "value", "threshold", "note"],
        floatfmt=".3g",
    ))

    if aborted:
        raise SystemExit(EXIT_ABORT)
    if not passed(checks):
        click.echo("verify: FAILED")
        raise SystemExit(EXIT_PROPERTY_FAILURE)
    click.echo("verify: passed")


@cli.command("sweep")
@click.argument("scenario", type=click.Path(exists=True, dir_okay=False))
@click.option("--param", required=True,
              type=click.Choice(sorted(SWEEP_PARAMETERS)),
              help="Swept parameter.")
@click.option("--values", required=True, callback=_parse_values,
              help="Comma-separated parameter values.")
@click.option("--workers", default=1, show_default=True,
              type=click.IntRange(min=1),
              help="Number of concurrent simulations.")
@click.option("-o", "--out", default=".", show_default=True,
              type=click.Path(file_okay=False),
              help="Output directory.")
def sweep_(scenario, param, values, workers, out):
    """Run SCENARIO once per value of a parameter and write sweep.csv to OUT.

    Failed runs are recorded in the table; the sweep goes on.
    """
    loaded = _load(scenario)
    df = sweep(loaded, param, values, workers=workers)
    path = Path(out) / "sweep.csv"
    write_sweep_csv(df, path)

    click.echo(tabulate(df.loc[:, list(_SWEEP_DISPLAY)], headers="keys",
                        showindex=False, floatfmt=".4g"))
    click.echo(f"sweep table written to {path}")


if __name__ == "__main__":
    cli()
