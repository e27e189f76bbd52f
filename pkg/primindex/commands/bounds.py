# primindex/commands/bounds.py

import io
import logging

import click

from primindex.commands import EXIT_FAILED, EXIT_OK, handle_errors
from primindex.services.export import to_json, write_csv
from primindex.services.index import sandwich_table
from primindex.services.numtheory import (
    lcm_rows,
    lemma1_check,
    lemma2_bounds_check,
    psi_rows,
    rosser_schoenfeld_check,
)

logger = logging.getLogger(__name__)


@click.command("bounds")
@click.option("--m-max", type=click.IntRange(min=2), default=100_000, show_default=True)
@click.option("--n-max", type=click.IntRange(min=2), default=10_000, show_default=True)
@click.option("--i-max", type=click.IntRange(min=2), default=30, show_default=True)
@click.option("--envelope", type=float, default=3.0, show_default=True)
@click.option("--csv", "csv_table", type=click.Choice(["psi", "lcm", "sandwich"]), default=None,
              help="Emit one table as CSV instead of the JSON report.")
@handle_errors
def bounds_cmd(m_max, n_max, i_max, envelope, csv_table):
    """psi envelopes, d(n) bounds and the d(n_i) versus log(n_i) table."""
    stream = io.StringIO()
    if csv_table == "psi":
        write_csv(("m", "psi", "psi_over_m"), psi_rows(m_max), stream)
        click.echo(stream.getvalue(), nl=False)
        raise click.exceptions.Exit(EXIT_OK)
    if csv_table == "lcm":
        write_csv(("i", "n_i", "d_n_i"), lcm_rows(i_max), stream)
        click.echo(stream.getvalue(), nl=False)
        raise click.exceptions.Exit(EXIT_OK)
    if csv_table == "sandwich":
        table = sandwich_table(i_max, envelope)
        rows = ((r.i, r.n_i, r.d, f"{r.log_n_i:.6f}", f"{r.gap:.6f}", int(r.flagged)) for r in table.rows)
        write_csv(("i", "n_i", "d_n_i", "log_n_i", "gap", "flagged"), rows, stream)
        click.echo(stream.getvalue(), nl=False)
        raise click.exceptions.Exit(EXIT_OK)

    report = {
        "rosser_schoenfeld": rosser_schoenfeld_check(m_max).model_dump(mode="json"),
        "nondivisor_range": lemma1_check(n_max).model_dump(mode="json"),
        "nondivisor_bounds": lemma2_bounds_check(n_max, i_max).model_dump(mode="json"),
        "sandwich": sandwich_table(i_max, envelope).model_dump(mode="json"),
    }
    click.echo(to_json(report))
    checks = ("rosser_schoenfeld", "nondivisor_range", "nondivisor_bounds")
    if not all(report[name]["passed"] for name in checks):
        raise click.exceptions.Exit(EXIT_FAILED)
    raise click.exceptions.Exit(EXIT_OK)
