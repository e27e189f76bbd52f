# primindex/commands/index.py

import logging
from pathlib import Path
from typing import Optional

import click

from primindex.commands import (
    EXIT_DISCREPANCY,
    EXIT_FAILED,
    EXIT_OK,
    RunConfig,
    handle_errors,
    parse_word_option,
)
from primindex.services.export import certificate_path, certificate_summary, to_json, write_json
from primindex.services.index import d_prim, d_simp, index_pair

logger = logging.getLogger(__name__)

_KINDS = {"prim": "primitivity", "simp": "simplicity", "both": "both"}


@click.command("index")
@click.option("--kind", type=click.Choice(sorted(_KINDS)), default="prim", show_default=True)
@click.option("--word", "word_text", required=True, help='Word such as "a^3 b^3" or "x1 X2^2".')
@click.option("--rank", type=click.IntRange(min=1), default=None, help="Rank of the free group (default: from the word).")
@click.option("--cap", type=click.IntRange(min=1), default=None, help="Largest index searched (default: cyclic word length).")
@click.option("--max-degree", type=click.IntRange(min=1), default=None, help="Feasibility guard on the degree.")
@click.option("--workers", type=click.IntRange(min=1), default=None)
@click.option("--format", "output_format", type=click.Choice(["text", "json"]), default="text", show_default=True)
@click.option("--output", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Certificate path (default: the configured output directory).")
@click.option("--no-save", is_flag=True, help="Do not write the certificate file.")
@handle_errors
def index_cmd(kind, word_text, rank, cap, max_degree, workers, output_format, output: Optional[Path], no_save):
    """Compute the primitivity or simplicity index of a word, with certificate."""
    config = RunConfig(
        command=f"index:{kind}", word=word_text, rank=rank, cap=cap, max_degree=max_degree,
        output_format=output_format, workers=workers, output=output,
    )
    logger.debug("run config: %s", config.model_dump_json())
    w = parse_word_option(word_text, rank)
    options = {"workers": workers, "max_degree": max_degree}

    if kind == "both":
        pair = index_pair(w, rank, cap, **options)
        certs = [pair.primitivity, pair.simplicity]
        if output_format == "json":
            click.echo(to_json(pair))
        else:
            click.echo(f"primitivity {pair.primitivity.index}")
            click.echo(f"simplicity {pair.simplicity.index}")
        if not pair.consistent:
            raise click.exceptions.Exit(EXIT_FAILED)
    else:
        search = d_prim if kind == "prim" else d_simp
        cert = search(w, rank, cap, **options)
        certs = [cert]
        if output_format == "json":
            click.echo(to_json(cert))
        else:
            click.echo(str(cert.index))
            click.echo(certificate_summary(cert), err=True)

    if not no_save:
        for cert in certs:
            path = output if (output and len(certs) == 1) else certificate_path(cert)
            write_json(cert, path)

    if not all(c.reverified for c in certs):
        click.echo("re-verification with the reversed order failed", err=True)
        raise click.exceptions.Exit(EXIT_FAILED)
    if any(c.discrepancy for c in certs):
        for c in certs:
            if c.discrepancy:
                click.echo(
                    f"discrepancy: {c.kind} index of {c.word} computed {c.discrepancy.computed},"
                    f" claimed {c.discrepancy.claimed}",
                    err=True,
                )
        raise click.exceptions.Exit(EXIT_DISCREPANCY)
    raise click.exceptions.Exit(EXIT_OK)
