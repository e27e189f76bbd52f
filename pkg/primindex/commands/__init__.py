# primindex/commands/__init__.py
"""
Shared plumbing for the click commands: exit codes, RunConfig, range parsing and the
mapping from domain errors to exit codes.
"""

from __future__ import annotations

import functools
import logging
import re
from pathlib import Path
from typing import Callable, Literal, Optional, Tuple

import click
from pydantic import BaseModel, Field

from primindex.errors import (
    HypothesisViolation,
    InfeasibleSearch,
    PrimIndexError,
    SearchCapExhausted,
    WordError,
)
from primindex.services.words import Word, parse_word

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CAP_EXHAUSTED = 2
EXIT_INFEASIBLE = 3
EXIT_DISCREPANCY = 4
EXIT_USAGE = 64


class RunConfig(BaseModel):
    command: str
    word: Optional[str] = None
    rank: Optional[int] = Field(default=None, ge=1)
    cap: Optional[int] = Field(default=None, ge=1)
    max_degree: Optional[int] = Field(default=None, ge=1)
    output_format: Literal["json", "dot", "csv", "text"] = "text"
    workers: Optional[int] = Field(default=None, ge=1)
    output: Optional[Path] = None


def parse_word_option(text: str, rank: Optional[int]) -> Word:
    try:
        return parse_word(text, rank)
    except WordError as exc:
        click.echo(f"error: {exc}", err=True)
        raise click.exceptions.Exit(EXIT_USAGE)


_RANGE = re.compile(r"^\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*$")


def parse_range(text: str, name: str = "range") -> Tuple[int, ...]:
    """`5`, `2..8` (inclusive) or `2,3,7`."""
    try:
        m = _RANGE.match(text)
        if m:
            lo, hi = int(m.group(1)), int(m.group(2))
            if lo > hi:
                raise ValueError(f"empty range {text!r}")
            return tuple(range(lo, hi + 1))
        values = tuple(int(part) for part in text.split(",") if part.strip())
        if not values:
            raise ValueError(f"empty {name}")
        return values
    except ValueError as exc:
        click.echo(f"error: invalid {name} {text!r}: {exc}", err=True)
        raise click.exceptions.Exit(EXIT_USAGE)


def handle_errors(func: Callable) -> Callable:
    """Map domain errors raised inside a command to its exit code."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except SearchCapExhausted as exc:
            click.echo(f"search cap exhausted: {exc}", err=True)
            for record in exc.log:
                click.echo(f"  exhausted degree {record.get('degree')}: {record}", err=True)
            raise click.exceptions.Exit(EXIT_CAP_EXHAUSTED)
        except InfeasibleSearch as exc:
            click.echo(f"infeasible: {exc}", err=True)
            raise click.exceptions.Exit(EXIT_INFEASIBLE)
        except (WordError, HypothesisViolation) as exc:
            click.echo(f"error: {exc}", err=True)
            raise click.exceptions.Exit(EXIT_USAGE)
        except PrimIndexError as exc:
            logger.error("unexpected failure: %s", exc)
            click.echo(f"error: {exc}", err=True)
            raise click.exceptions.Exit(EXIT_FAILED)

    return wrapper
