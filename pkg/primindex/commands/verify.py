# primindex/commands/verify.py

import itertools
import logging
from typing import List, Optional

import click
from pydantic import BaseModel

from primindex.commands import (
    EXIT_DISCREPANCY,
    EXIT_FAILED,
    EXIT_OK,
    EXIT_USAGE,
    handle_errors,
    parse_range,
)
from primindex.errors import HypothesisViolation
from primindex.services.constructions import double_cycle_cover, kernel_phi_cover, lemma_one_basis, power_basis_construction
from primindex.services.export import to_json
from primindex.services.index import (
    sandwich_table,
    verify_lower_bound_thm2,
    verify_non_simple_power_product,
    verify_prop4,
    verify_thm4,
    verify_upper_bound_thm1,
)
from primindex.services.numtheory import lemma1_check, lemma2_bounds_check, rosser_schoenfeld_check, smallest_nondivisor
from primindex.services.stallings import cover_to_graph, enumerate_covers, isomorphic

logger = logging.getLogger(__name__)

SELECTORS = ("thm1", "thm2", "thm4", "prop4", "lemma1", "power", "bounds", "nonsimple")


class CheckRow(BaseModel):
    selector: str
    label: str
    passed: bool
    detail: str = ""
    discrepancy: bool = False
    report: Optional[dict] = None


def _rows_thm1(ns) -> List[CheckRow]:
    rows = []
    for n in ns:
        r = verify_upper_bound_thm1(n)
        rows.append(CheckRow(
            selector="thm1", label=f"n={n}", passed=r.passed,
            detail=f"d={r.d} rewritten={r.rewritten} gap={r.log_gap:.3f}", report=r.model_dump(mode="json"),
        ))
    return rows


def _rows_thm2(indices, max_degree) -> List[CheckRow]:
    rows = []
    for i in indices:
        r = verify_lower_bound_thm2(i, max_degree=max_degree)
        disagreements = sum(1 for s in r.subgroups if not s.agree)
        rows.append(CheckRow(
            selector="thm2", label=f"i={i}", passed=r.passed,
            detail=f"n_i={r.n_i} d={r.d} subgroups={len(r.subgroups)} disagreements={disagreements}",
            report=r.model_dump(mode="json"),
        ))
    return rows


def _rows_thm4(ns) -> List[CheckRow]:
    rows = []
    for n in ns:
        r = verify_thm4(n)
        rows.append(CheckRow(
            selector="thm4", label=f"n={n}", passed=r.passed,
            detail=f"witness={r.rewritten} ({r.evidence.path})", report=r.model_dump(mode="json"),
        ))
    return rows


def _rows_prop4(ns, ts, ds, dps) -> List[CheckRow]:
    rows = []
    for n, t in itertools.product(ns, ts):
        d_values = ds or (smallest_nondivisor(n),)
        dp_values = dps or (smallest_nondivisor(t),)
        for d, dp in itertools.product(d_values, dp_values):
            label = f"n={n} t={t} d={d} d'={dp}"
            try:
                r = verify_prop4(n, t, d, dp)
            except HypothesisViolation as exc:
                rows.append(CheckRow(selector="prop4", label=label, passed=False, detail=f"rejected: {exc}"))
                continue
            detail = f"bound={r.bound}"
            if r.log_bound is not None:
                detail += f" log-bound={r.log_bound:.3f} within={r.within_log_bound}"
            rows.append(CheckRow(
                selector="prop4", label=label, passed=r.passed, detail=detail,
                discrepancy=r.discrepancy is not None, report=r.model_dump(mode="json"),
            ))
    return rows


def _rows_lemma1(ds) -> List[CheckRow]:
    rows = []
    for d in ds:
        basis = lemma_one_basis(d)
        same = isomorphic(double_cycle_cover(d), kernel_phi_cover(d))
        failed = [name for name, ok in basis.checks.items() if not ok]
        rows.append(CheckRow(
            selector="lemma1", label=f"d={d}", passed=basis.valid and same,
            detail="ok" if not failed and same else f"failed: {failed} kernel_isomorphic={same}",
        ))
    return rows


def _rows_power(degrees) -> List[CheckRow]:
    rows = []
    for degree in degrees:
        total = bad = 0
        for cover in enumerate_covers(2, degree):
            total += 1
            if not power_basis_construction(cover_to_graph(cover)).valid:
                bad += 1
                logger.error("power basis failed on %s", cover.perms)
        rows.append(CheckRow(selector="power", label=f"degree={degree}", passed=bad == 0,
                             detail=f"{total} subgroups, {bad} failures"))
    return rows


def _rows_bounds(m_max, n_max, i_max) -> List[CheckRow]:
    rs = rosser_schoenfeld_check(m_max)
    l1 = lemma1_check(n_max)
    l2 = lemma2_bounds_check(n_max, i_max)
    table = sandwich_table(i_max)
    return [
        CheckRow(selector="bounds", label=f"psi m<={m_max}", passed=rs.passed,
                 detail=f"argmax={rs.argmax_ratio} max_ratio={rs.max_ratio:.6f}", report=rs.model_dump(mode="json")),
        CheckRow(selector="bounds", label=f"1<d(n)<n n<={n_max}", passed=l1.passed,
                 detail=f"{len(l1.violations)} violations"),
        CheckRow(selector="bounds", label=f"d(n_i)>=i+1 i<={i_max}", passed=l2.passed,
                 detail=f"C_hat={l2.empirical_c:.4f} at n={l2.empirical_c_at}, n0={l2.empirical_n0}",
                 report=l2.model_dump(mode="json")),
        CheckRow(selector="bounds", label=f"sandwich i<={i_max}", passed=True,
                 detail=f"rows outside +/-{table.envelope}: {table.flagged}", report=table.model_dump(mode="json")),
    ]


def _rows_nonsimple(exponents) -> List[CheckRow]:
    r = verify_non_simple_power_product(exponents)
    return [CheckRow(selector="nonsimple", label=r.word, passed=r.passed,
                     detail=f"{r.edges} edges, cycle={r.is_cycle}, cut_vertex={r.has_cut_vertex}")]


@click.command("verify")
@click.argument("selector", type=click.Choice(SELECTORS))
@click.option("--n", "n_text", default=None, help="n values: 5, 2..8 or 2,3,7.")
@click.option("--t", "t_text", default=None, help="t values (prop4).")
@click.option("--d", "d_text", default=None, help="d values (lemma1, prop4).")
@click.option("--dp", "dp_text", default=None, help="d' values (prop4).")
@click.option("--i", "i_text", default=None, help="i values (thm2).")
@click.option("--degree", "degree_text", default=None, help="degrees (power).")
@click.option("--exponents", default="2,2", show_default=True, help="exponents (nonsimple).")
@click.option("--m-max", type=click.IntRange(min=2), default=100_000, show_default=True)
@click.option("--n-max", type=click.IntRange(min=2), default=10_000, show_default=True)
@click.option("--i-max", type=click.IntRange(min=2), default=30, show_default=True)
@click.option("--max-degree", type=click.IntRange(min=1), default=None)
@click.option("--format", "output_format", type=click.Choice(["text", "json"]), default="text", show_default=True)
@handle_errors
def verify_cmd(selector, n_text, t_text, d_text, dp_text, i_text, degree_text, exponents,
               m_max, n_max, i_max, max_degree, output_format):
    """Run one family of verifications over a parameter range and print a pass/fail table."""
    if selector == "thm1":
        rows = _rows_thm1(parse_range(n_text or "2..200", "n"))
    elif selector == "thm2":
        rows = _rows_thm2(parse_range(i_text or "3..4", "i"), max_degree)
    elif selector == "thm4":
        rows = _rows_thm4(parse_range(n_text or "2..8", "n"))
    elif selector == "prop4":
        if not n_text or not t_text:
            click.echo("error: prop4 needs --n and --t", err=True)
            raise click.exceptions.Exit(EXIT_USAGE)
        rows = _rows_prop4(
            parse_range(n_text, "n"), parse_range(t_text, "t"),
            parse_range(d_text, "d") if d_text else (), parse_range(dp_text, "d'") if dp_text else (),
        )
    elif selector == "lemma1":
        rows = _rows_lemma1(parse_range(d_text or "2..20", "d"))
    elif selector == "power":
        rows = _rows_power(parse_range(degree_text or "1..4", "degree"))
    elif selector == "bounds":
        rows = _rows_bounds(m_max, n_max, i_max)
    else:
        rows = _rows_nonsimple(parse_range(exponents, "exponents"))

    if output_format == "json":
        click.echo(to_json(rows))
    else:
        for row in rows:
            status = "PASS" if row.passed else "FAIL"
            flag = " DISCREPANCY" if row.discrepancy else ""
            click.echo(f"{status} {row.selector} {row.label}: {row.detail}{flag}")
        passed = sum(1 for r in rows if r.passed)
        click.echo(f"{passed}/{len(rows)} passed")

    if not all(r.passed for r in rows):
        raise click.exceptions.Exit(EXIT_FAILED)
    if any(r.discrepancy for r in rows):
        raise click.exceptions.Exit(EXIT_DISCREPANCY)
    raise click.exceptions.Exit(EXIT_OK)
