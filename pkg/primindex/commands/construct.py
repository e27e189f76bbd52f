# primindex/commands/construct.py

import json
import logging

import click

from primindex.commands import EXIT_FAILED, EXIT_OK, EXIT_USAGE, handle_errors
from primindex.errors import GraphError
from primindex.services.constructions import (
    double_cycle_cover,
    glued_cycles_certificate,
    kernel_phi_cover,
    lemma_one_basis,
    power_basis_construction,
)
from primindex.services.export import to_json
from primindex.services.stallings import CoverPermutations, cover_to_graph, graph_to_dot, graph_to_json

logger = logging.getLogger(__name__)


@click.command("construct")
@click.argument("artifact", type=click.Choice(["lemma1", "kernel", "glued", "power"]))
@click.option("--d", type=click.IntRange(min=2), default=3, show_default=True)
@click.option("--n", type=int, default=None, help="glued: exponent of a.")
@click.option("--t", type=int, default=None, help="glued: exponent of b.")
@click.option("--dp", type=int, default=None, help="glued: length of the b-cycle.")
@click.option("--perms", default=None, help='power: cover permutations as JSON, e.g. "[[1,0],[1,0]]".')
@click.option("--format", "output_format", type=click.Choice(["json", "dot"]), default="json", show_default=True)
@handle_errors
def construct_cmd(artifact, d, n, t, dp, perms, output_format):
    """Print one explicit construction: its graph as DOT or its full record as JSON."""
    valid = True
    if artifact == "lemma1":
        basis = lemma_one_basis(d)
        graph, payload, valid = basis.graph, basis.to_json(), basis.valid
    elif artifact == "kernel":
        graph = kernel_phi_cover(d)
        payload = {"d": d, "graph": graph_to_json(graph), "double_cycle": graph_to_json(double_cycle_cover(d))}
    elif artifact == "glued":
        if n is None or t is None or dp is None:
            click.echo("error: glued needs --n, --t, --d and --dp", err=True)
            raise click.exceptions.Exit(EXIT_USAGE)
        cert = glued_cycles_certificate(n, t, d, dp)
        graph, payload, valid = cert.cover, cert.to_json(), cert.valid
    else:
        if perms is None:
            graph = kernel_phi_cover(d)
        else:
            try:
                data = json.loads(perms)
                graph = cover_to_graph(CoverPermutations(len(data[0]), tuple(tuple(p) for p in data)))
            except (ValueError, IndexError, TypeError, GraphError) as exc:
                click.echo(f"error: bad --perms: {exc}", err=True)
                raise click.exceptions.Exit(EXIT_USAGE)
        result = power_basis_construction(graph)
        payload, valid = result.to_json(), result.valid

    if output_format == "dot":
        click.echo(graph_to_dot(graph, name=artifact))
    else:
        click.echo(to_json(payload))
    raise click.exceptions.Exit(EXIT_OK if valid else EXIT_FAILED)
