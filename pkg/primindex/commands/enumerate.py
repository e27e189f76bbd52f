# primindex/commands/enumerate.py

import logging
import sys

import click
from tqdm import tqdm

from primindex.commands import EXIT_INFEASIBLE, EXIT_OK, handle_errors, parse_word_option
from primindex.config import get_settings
from primindex.services.export import json_line
from primindex.services.stallings import contains, cover_to_graph, enumerate_covers, hall_count

logger = logging.getLogger(__name__)


@click.command("enumerate")
@click.option("--rank", type=click.IntRange(min=1), default=2, show_default=True)
@click.option("--degree", type=click.IntRange(min=1), required=True)
@click.option("--contains", "contains_text", default=None, help="Only subgroups containing this word.")
@click.option("--max-degree", type=click.IntRange(min=1), default=None)
@click.option("--count-only", is_flag=True, help="Print only the count.")
@handle_errors
def enumerate_cmd(rank, degree, contains_text, max_degree, count_only):
    """Stream the index-DEGREE subgroups of F_RANK as JSON lines of permutations."""
    settings = get_settings()
    max_degree = max_degree or settings.max_degree
    if degree > max_degree:
        logger.warning("[GUARD] enumeration of degree %d refused (max %d)", degree, max_degree)
        click.echo(f"infeasible: degree {degree} exceeds max_degree {max_degree}", err=True)
        raise click.exceptions.Exit(EXIT_INFEASIBLE)
    w = parse_word_option(contains_text, rank) if contains_text else None

    count = 0
    covers = tqdm(
        enumerate_covers(rank, degree), total=hall_count(rank, degree), desc=f"degree {degree}",
        file=sys.stderr, disable=not settings.progress, leave=False,
    )
    for cover in covers:
        if w is not None and not contains(cover_to_graph(cover), w):
            continue
        count += 1
        if not count_only:
            click.echo(json_line(cover.to_json()))
    click.echo(str(count) if count_only else json_line({"count": count}))
    raise click.exceptions.Exit(EXIT_OK)
