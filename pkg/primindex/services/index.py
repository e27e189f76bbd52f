# primindex/services/index.py
"""
Primitivity / simplicity index search and the verifiers built on it.

The search is degree-stratified: every subgroup of index 1, 2, ... containing w is
examined in enumeration order; a degree is fully exhausted before the next one starts,
and the first success inside a degree (in enumeration order) is the certificate.
"""

from __future__ import annotations

import logging
import math
import sys
import time
from dataclasses import dataclass
from functools import lru_cache
from multiprocessing import Pool
from typing import Iterable, Iterator, List, Literal, Optional, Sequence, Tuple

import networkx as nx
from pydantic import BaseModel, Field, computed_field
from tqdm import tqdm

from primindex.config import get_settings
from primindex.errors import HypothesisViolation, InfeasibleSearch, SearchCapExhausted, WordError
from primindex.services.constructions import (
    check_glued_hypotheses,
    glued_cycles_certificate,
    lemma_one_basis,
    power_basis_construction,
)
from primindex.services.numtheory import lcm_upto, smallest_nondivisor
from primindex.services.stallings import (
    CoverPermutations,
    contains,
    cover_to_graph,
    dual_basis,
    enumerate_covers,
    extend_spanning_tree,
    hall_count,
    rewrite_in_basis,
    smallest_powers,
    spanning_tree,
)
from primindex.services.whitehead import (
    Verdict,
    has_cut_vertex,
    primitivity_verdict,
    simplicity_verdict,
    trace_records,
    whitehead_graph,
)
from primindex.services.words import (
    Word,
    apply_letter_map,
    canonical_cyclic_form,
    cyclic_reduce,
    format_word,
    letter_token,
    parse_word,
    power_word,
)

logger = logging.getLogger(__name__)

Kind = Literal["primitivity", "simplicity"]

CERTIFICATE_SCHEMA_VERSION = "1.0"


# -------------------- Records --------------------
class Evidence(BaseModel):
    holds: bool
    path: str
    word: str
    rank: int
    generator: Optional[str] = None
    trace: List[dict] = Field(default_factory=list)
    order: str = "canonical"


class DegreeExhaustion(BaseModel):
    degree: int
    covers_examined: int
    containing: int
    all_rejected: bool


class CoverRecord(BaseModel):
    degree: int
    perms: List[List[int]]


class DiscrepancyRecord(BaseModel):
    word: str
    kind: Kind
    claimed: int
    computed: int
    source: str
    certificates: List[dict] = Field(default_factory=list)


class IndexCertificate(BaseModel):
    schema_version: str = CERTIFICATE_SCHEMA_VERSION
    word: str
    rank: int
    kind: Kind
    index: int
    cover: CoverRecord
    tree_edges: List[int]
    basis: List[str]
    rewritten: str
    evidence: Evidence
    lower_bound_log: List[DegreeExhaustion]
    covers_examined_at_index: int
    reverified: bool
    discrepancy: Optional[DiscrepancyRecord] = None


class IndexPair(BaseModel):
    primitivity: IndexCertificate
    simplicity: IndexCertificate

    @computed_field
    @property
    def consistent(self) -> bool:
        return self.simplicity.index <= self.primitivity.index


@dataclass(frozen=True)
class Claim:
    kind: Kind
    word: str
    rank: int
    value: int
    source: str


# Values stated in the literature, cross-checked by every search that hits them.
CLAIMED_VALUES: Tuple[Claim, ...] = (
    Claim("primitivity", "a^3 b^3", 2, 3, "stated as directly computable exact value of d_prim(a^3 b^3; F_2)"),
)


def _claim_key(kind: str, w: Word, rank: int) -> tuple:
    return kind, canonical_cyclic_form(w.letters, with_inverse=True), rank


@lru_cache(maxsize=1)
def _claims() -> dict:
    return {_claim_key(c.kind, parse_word(c.word, c.rank), c.rank): c for c in CLAIMED_VALUES}


def _evidence(verdict: Verdict, order: str = "canonical") -> Evidence:
    return Evidence(
        holds=verdict.holds,
        path=verdict.path,
        word=format_word(Word(verdict.word, verdict.rank)),
        rank=verdict.rank,
        generator=letter_token(verdict.generator, verdict.rank) if verdict.generator else None,
        trace=trace_records(verdict.trace),
        order=order,
    )


def _verdict(kind: Kind, w: Word, order: str = "canonical", limit: Optional[int] = None) -> Verdict:
    if kind == "primitivity":
        return primitivity_verdict(w, order=order)
    return simplicity_verdict(w, order=order, limit=limit)


# -------------------- Per-cover work --------------------
@dataclass(frozen=True)
class CoverOutcome:
    perms: Tuple[Tuple[int, ...], ...]
    contains: bool
    rewritten: Tuple[int, ...] = ()
    rewritten_rank: int = 0
    verdict: Optional[Verdict] = None

    @property
    def success(self) -> bool:
        return self.verdict is not None and self.verdict.holds


def _examine_cover(task: tuple) -> CoverOutcome:
    letters, rank, perms, kind, limit = task
    g = cover_to_graph(CoverPermutations(len(perms[0]), perms))
    w = Word(letters, rank)
    if not contains(g, w):
        return CoverOutcome(perms, False)
    rewritten = rewrite_in_basis(g, spanning_tree(g), w)
    verdict = _verdict(kind, rewritten, limit=limit)
    logger.debug("cover %s: rewritten %s -> %s (%s)", perms, rewritten, verdict.holds, verdict.path)
    return CoverOutcome(perms, True, rewritten.letters, rewritten.rank, verdict)


def _outcomes(tasks: Iterable[tuple], workers: int) -> Iterator[CoverOutcome]:
    if workers <= 1:
        for task in tasks:
            yield _examine_cover(task)
        return
    with Pool(workers) as pool:
        yield from pool.imap(_examine_cover, tasks, chunksize=8)


# -------------------- Search --------------------
def _check_word(w: Word, rank: Optional[int]) -> Tuple[Word, int]:
    if w.is_trivial:
        raise WordError("the index of the trivial element is undefined")
    rank = rank or w.rank
    if any(abs(x) > rank for x in w.letters):
        raise WordError(f"{w} does not live in rank {rank}")
    if rank != w.rank:
        w = Word(w.letters, rank)
    return w, rank


def index_search(
    w: Word,
    kind: Kind,
    rank: Optional[int] = None,
    cap: Optional[int] = None,
    workers: Optional[int] = None,
    max_degree: Optional[int] = None,
    progress: Optional[bool] = None,
) -> IndexCertificate:
    """Degree-by-degree exhaustive search. The default cap is the cyclic length of w."""
    settings = get_settings()
    w, rank = _check_word(w, rank)
    cap = len(cyclic_reduce(w)[0]) if cap is None else cap
    if cap < 1:
        raise WordError(f"search cap must be >= 1, got {cap}")
    workers = workers or settings.workers
    max_degree = max_degree or settings.max_degree
    show = settings.progress if progress is None else progress

    log: List[DegreeExhaustion] = []
    for degree in range(1, cap + 1):
        if degree > max_degree:
            logger.warning("[GUARD] %s search for %s refused at degree %d (max %d)", kind, w, degree, max_degree)
            raise InfeasibleSearch(
                f"{kind} search for {w} needs degree {degree} > max_degree {max_degree}"
            )
        started = time.perf_counter()
        tasks = (
            (w.letters, rank, c.perms, kind, settings.level_set_limit)
            for c in enumerate_covers(rank, degree)
        )
        bar = tqdm(
            total=hall_count(rank, degree),
            desc=f"{kind[:4]} degree {degree}",
            file=sys.stderr,
            disable=not show,
            leave=False,
        )
        examined = containing = 0
        winner: Optional[CoverOutcome] = None
        outcomes = _outcomes(tasks, workers)
        try:
            for outcome in outcomes:
                examined += 1
                bar.update(1)
                if outcome.contains:
                    containing += 1
                    if outcome.success:
                        winner = outcome
                        break
        finally:
            outcomes.close()
            bar.close()
        elapsed = time.perf_counter() - started
        if winner is not None:
            cert = _certificate(w, rank, kind, degree, winner, log, examined)
            logger.info(
                "[CERT] %s index of %s is %d (%s, %d covers at the last degree)",
                kind, w, degree, cert.evidence.path, examined,
            )
            return _attach_discrepancy(cert, w)
        log.append(
            DegreeExhaustion(
                degree=degree, covers_examined=examined, containing=containing, all_rejected=True
            )
        )
        logger.info(
            "[EXHAUST] %s %s degree %d: %d covers, %d containing, all rejected (%.3fs)",
            kind, w, degree, examined, containing, elapsed,
        )
    raise SearchCapExhausted(f"{kind} search for {w} exhausted cap {cap}", log=[r.model_dump() for r in log])


def _certificate(
    w: Word, rank: int, kind: Kind, degree: int, winner: CoverOutcome, log: List[DegreeExhaustion], examined: int
) -> IndexCertificate:
    g = cover_to_graph(CoverPermutations(degree, winner.perms))
    tree = spanning_tree(g)
    basis = dual_basis(g, tree)
    rewritten = Word(winner.rewritten, winner.rewritten_rank)
    second = _verdict(kind, rewritten, order="reversed")
    return IndexCertificate(
        word=format_word(w),
        rank=rank,
        kind=kind,
        index=degree,
        cover=CoverRecord(degree=degree, perms=[list(p) for p in winner.perms]),
        tree_edges=sorted(tree.edges),
        basis=[format_word(b) for b in basis],
        rewritten=format_word(rewritten),
        evidence=_evidence(winner.verdict),
        lower_bound_log=list(log),
        covers_examined_at_index=examined,
        reverified=second.holds == winner.verdict.holds,
    )


def _supporting_certificates(w: Word) -> List[dict]:
    """Glued-cycles certificate for a^n b^t at d = d(n), d' = d(t) when its hypotheses hold."""
    letters = w.letters
    if w.rank != 2 or not letters or letters[0] != 1 or letters[-1] != 2:
        return []
    n = letters.count(1)
    t = len(letters) - n
    if letters != (1,) * n + (2,) * t:
        return []
    d, d_prime = smallest_nondivisor(n), smallest_nondivisor(t)
    try:
        check_glued_hypotheses(n, t, d, d_prime)
    except HypothesisViolation:
        return []
    return [glued_cycles_certificate(n, t, d, d_prime).to_json()]


def _attach_discrepancy(cert: IndexCertificate, w: Word) -> IndexCertificate:
    claim = _claims().get(_claim_key(cert.kind, w, cert.rank))
    if claim is None or claim.value == cert.index:
        return cert
    summary = cert.model_dump(exclude={"discrepancy"})
    record = DiscrepancyRecord(
        word=cert.word,
        kind=cert.kind,
        claimed=claim.value,
        computed=cert.index,
        source=claim.source,
        certificates=[summary] + _supporting_certificates(w),
    )
    logger.warning(
        "[DISCREPANCY] %s index of %s: claimed %d, computed %d", cert.kind, cert.word, claim.value, cert.index
    )
    return cert.model_copy(update={"discrepancy": record})


def d_prim(w: Word, rank: Optional[int] = None, cap: Optional[int] = None, **options) -> IndexCertificate:
    """Least index of a subgroup containing w as a primitive element, with certificate."""
    return index_search(w, "primitivity", rank, cap, **options)


def d_simp(w: Word, rank: Optional[int] = None, cap: Optional[int] = None, **options) -> IndexCertificate:
    """Least index of a subgroup containing w as a simple element, with certificate."""
    return index_search(w, "simplicity", rank, cap, **options)


def index_pair(w: Word, rank: Optional[int] = None, cap: Optional[int] = None, **options) -> IndexPair:
    pair = IndexPair(
        primitivity=d_prim(w, rank, cap, **options),
        simplicity=d_simp(w, rank, cap, **options),
    )
    if not pair.consistent:
        logger.error(
            "simplicity index %d exceeds primitivity index %d for %s",
            pair.simplicity.index, pair.primitivity.index, w,
        )
    return pair


def reverify_certificate(cert: IndexCertificate) -> bool:
    """Rebuild everything a certificate claims from its own data and re-decide with the reversed order."""
    w = parse_word(cert.word, cert.rank)
    cover = CoverPermutations(cert.cover.degree, tuple(tuple(p) for p in cert.cover.perms))
    g = cover_to_graph(cover)
    if not contains(g, w):
        return False
    tree = extend_spanning_tree(g, cert.tree_edges)
    basis = dual_basis(g, tree)
    if [format_word(b) for b in basis] != cert.basis:
        return False
    rewritten = parse_word(cert.rewritten, len(basis))
    if apply_letter_map(rewritten, {i + 1: b for i, b in enumerate(basis)}) != w:
        return False
    if not _verdict(cert.kind, rewritten, order="reversed").holds:
        return False
    degrees = [r.degree for r in cert.lower_bound_log]
    return degrees == list(range(1, cert.index)) and all(r.all_rejected for r in cert.lower_bound_log)


# -------------------- Verifiers --------------------
class UpperBoundReport(BaseModel):
    n: int
    d: int
    k: int
    r: int
    rewritten: str
    expected: str
    evidence: Evidence
    basis_valid: bool
    log_gap: float

    @computed_field
    @property
    def passed(self) -> bool:
        return self.basis_valid and self.rewritten == self.expected and self.evidence.holds


def verify_upper_bound_thm1(n: int) -> UpperBoundReport:
    """
    a^n b^n = (a^d)^k a^r b^r (b^d)^k = y_0^k y_r y_d^k in the double-cycle cover of degree
    d = d(n); y_r occurs once, so d_prim(a^n b^n) <= d(n).
    """
    if n < 1:
        raise HypothesisViolation(f"n must be >= 1, got {n}")
    w = power_word(n, n)
    if n == 1:
        verdict = primitivity_verdict(w)
        text = format_word(w)
        return UpperBoundReport(
            n=1, d=1, k=0, r=0, rewritten=text, expected=text, evidence=_evidence(verdict),
            basis_valid=True, log_gap=1.0,
        )
    d = smallest_nondivisor(n)
    k, r = divmod(n, d)
    basis = _lemma_one(d)
    rewritten = basis.rewrite(w)
    expected = Word((1,) * k + (r + 1,) + (d + 1,) * k, d + 1)
    verdict = primitivity_verdict(rewritten)
    return UpperBoundReport(
        n=n,
        d=d,
        k=k,
        r=r,
        rewritten=format_word(rewritten),
        expected=format_word(expected),
        evidence=_evidence(verdict),
        basis_valid=basis.valid,
        log_gap=d - math.log(n),
    )


@lru_cache(maxsize=64)
def _lemma_one(d: int):
    return lemma_one_basis(d)


class SubgroupRejection(BaseModel):
    degree: int
    perms: List[List[int]]
    k: int
    l: int
    p: int
    q: int
    theory_rejects: bool
    brute_rejects: bool
    brute_path: str

    @computed_field
    @property
    def agree(self) -> bool:
        return self.theory_rejects == self.brute_rejects


class LowerBoundReport(BaseModel):
    i: int
    n_i: int
    d: int
    exhausted: List[DegreeExhaustion]
    subgroups: List[SubgroupRejection]

    @computed_field
    @property
    def passed(self) -> bool:
        return all(s.theory_rejects and s.brute_rejects for s in self.subgroups)


def _theory_rejects(g, w: Word, n: int) -> Tuple[bool, int, int, int, int]:
    k, l = smallest_powers(g)
    if n % k or n % l:
        return False, k, l, 0, 0
    p, q = n // k, n // l
    if p < 2 or q < 2:
        return False, k, l, p, q
    pb = power_basis_construction(g)
    rewritten = pb.rewrite(w)
    rank = len(pb.basis)
    expected = Word((pb.a_position + 1,) * p + (pb.b_position + 1,) * q, rank)
    return pb.valid and rewritten == expected, k, l, p, q


def verify_lower_bound_thm2(i: int, max_degree: Optional[int] = None, progress: Optional[bool] = None) -> LowerBoundReport:
    """
    Every subgroup of index m < d(n_i) containing w = a^{n_i} b^{n_i} is rejected twice:
    by the a^k / b^l basis (w = y_1^p y_2^q with p, q >= 2) and by Whitehead's algorithm
    on the rewrite through a breadth-first tree.
    """
    if i < 3:
        raise HypothesisViolation(f"i must be >= 3, got {i}")
    settings = get_settings()
    max_degree = max_degree or settings.max_degree
    show = settings.progress if progress is None else progress
    n = lcm_upto(i)
    d = smallest_nondivisor(n)
    if d - 1 > max_degree:
        logger.warning("[GUARD] lower bound for i=%d needs degrees up to %d (max %d)", i, d - 1, max_degree)
        raise InfeasibleSearch(f"i={i} needs every subgroup of index < {d}; max_degree is {max_degree}")
    w = power_word(n, n)
    exhausted, rows = [], []
    for degree in range(1, d):
        started = time.perf_counter()
        examined = containing = 0
        covers = enumerate_covers(2, degree)
        for cover in tqdm(covers, total=hall_count(2, degree), desc=f"lower degree {degree}",
                          file=sys.stderr, disable=not show, leave=False):
            examined += 1
            g = cover_to_graph(cover)
            if not contains(g, w):
                continue
            containing += 1
            theory, k, l, p, q = _theory_rejects(g, w, n)
            brute = primitivity_verdict(rewrite_in_basis(g, spanning_tree(g), w))
            row = SubgroupRejection(
                degree=degree, perms=[list(x) for x in cover.perms], k=k, l=l, p=p, q=q,
                theory_rejects=theory, brute_rejects=not brute.holds, brute_path=brute.path,
            )
            if not row.agree:
                logger.error("theory and Whitehead disagree on cover %s for %s", cover.perms, w)
            rows.append(row)
        elapsed = time.perf_counter() - started
        all_rejected = all(r.brute_rejects for r in rows if r.degree == degree)
        exhausted.append(
            DegreeExhaustion(
                degree=degree, covers_examined=examined, containing=containing,
                all_rejected=all_rejected,
            )
        )
        logger.info("[EXHAUST] lower bound i=%d degree %d: %d covers, %d containing (%.3fs)",
                    i, degree, examined, containing, elapsed)
    return LowerBoundReport(i=i, n_i=n, d=d, exhausted=exhausted, subgroups=rows)


class NonSimpleReport(BaseModel):
    word: str
    rank: int
    edges: int
    is_cycle: bool
    has_cut_vertex: bool

    @computed_field
    @property
    def passed(self) -> bool:
        return self.is_cycle and not self.has_cut_vertex


def verify_non_simple_power_product(exponents: Sequence[int]) -> NonSimpleReport:
    """a_1^k_1 ... a_N^k_N with every k_i >= 2 has a 2N-cycle Whitehead graph, hence is not simple."""
    if len(exponents) < 2 or any(k < 2 for k in exponents):
        raise HypothesisViolation("need at least two exponents, each >= 2")
    rank = len(exponents)
    letters = tuple(g for g, k in enumerate(exponents, start=1) for _ in range(k))
    w = Word(letters, rank)
    graph = whitehead_graph(cyclic_reduce(w)[0])
    nxg = graph.to_networkx()
    is_cycle = (
        len(graph.edges) == 2 * rank
        and nx.is_connected(nxg)
        and all(deg == 2 for _, deg in nxg.degree())
    )
    return NonSimpleReport(
        word=format_word(w), rank=rank, edges=len(graph.edges), is_cycle=is_cycle,
        has_cut_vertex=has_cut_vertex(graph),
    )


class SimplicityTwoReport(BaseModel):
    n: int
    not_simple_in_f2: NonSimpleReport
    rewritten: str
    expected: str
    evidence: Evidence
    index: int

    @computed_field
    @property
    def passed(self) -> bool:
        return (
            self.not_simple_in_f2.passed
            and self.rewritten == self.expected
            and self.evidence.holds
            and self.index == 2
        )


def verify_thm4(n: int) -> SimplicityTwoReport:
    """
    a^n b^n is not simple in F_2, and in <a^2, ab, b^2> it is y_0^k y_1 y_2^k (n odd,
    primitive) or y_0^k y_2^k (n even, omits y_1); so d_simp(a^n b^n) = 2.
    """
    if n < 2:
        raise HypothesisViolation(f"n must be >= 2, got {n}")
    base = verify_non_simple_power_product((n, n))
    basis = _lemma_one(2)
    rewritten = basis.rewrite(power_word(n, n))
    k, r = divmod(n, 2)
    if r:
        expected = Word((1,) * k + (2,) + (3,) * k, 3)
        verdict = primitivity_verdict(rewritten)
    else:
        expected = Word((1,) * k + (3,) * k, 3)
        verdict = simplicity_verdict(rewritten)
    return SimplicityTwoReport(
        n=n,
        not_simple_in_f2=base,
        rewritten=format_word(rewritten),
        expected=format_word(expected),
        evidence=_evidence(verdict),
        index=2 if base.passed and verdict.holds else 0,
    )


class GluedCyclesReport(BaseModel):
    n: int
    t: int
    d: int
    d_prime: int
    bound: int
    certificate_valid: bool
    certificate: dict
    log_bound: Optional[float] = None
    within_log_bound: Optional[bool] = None
    discrepancy: Optional[DiscrepancyRecord] = None

    @computed_field
    @property
    def passed(self) -> bool:
        return self.certificate_valid


def verify_prop4(n: int, t: int, d: int, d_prime: int) -> GluedCyclesReport:
    """d_simp(a^n b^t) <= d_prim(a^n b^t) <= d + d' - 2, certified by the glued two-cycle cover."""
    cert = glued_cycles_certificate(n, t, d, d_prime)
    payload = cert.to_json()
    report = GluedCyclesReport(
        n=n, t=t, d=d, d_prime=d_prime, bound=cert.degree,
        certificate_valid=cert.valid, certificate=payload,
    )
    if n >= 3 and t >= 3 and d == smallest_nondivisor(n) and d_prime == smallest_nondivisor(t):
        log_bound = math.log(n) + math.log(t) + 2 * math.log(2)
        report.log_bound = log_bound
        report.within_log_bound = cert.degree <= log_bound
    claim = _claims().get(_claim_key("primitivity", power_word(n, t), 2))
    if claim is not None and cert.valid and cert.degree < claim.value:
        report.discrepancy = DiscrepancyRecord(
            word=format_word(power_word(n, t)),
            kind="primitivity",
            claimed=claim.value,
            computed=cert.degree,
            source=claim.source,
            certificates=[payload],
        )
        logger.warning(
            "[DISCREPANCY] glued cycles bound %d for %s beats the claimed primitivity index %d",
            cert.degree, report.discrepancy.word, claim.value,
        )
    return report


def verify_cor1(n: int, t: int) -> GluedCyclesReport:
    """The glued-cycles bound at d = d(n), d' = d(t) against log n + log t + 2 log 2."""
    if n < 3 or t < 3:
        raise HypothesisViolation(f"need n, t >= 3, got n={n}, t={t}")
    return verify_prop4(n, t, smallest_nondivisor(n), smallest_nondivisor(t))


class SandwichRow(BaseModel):
    i: int
    n_i: int
    d: int
    log_n_i: float
    gap: float
    flagged: bool


class SandwichTable(BaseModel):
    envelope: float
    rows: List[SandwichRow]

    @computed_field
    @property
    def flagged(self) -> List[int]:
        return [r.i for r in self.rows if r.flagged]


def sandwich_table(i_max: int, envelope: float = 3.0) -> SandwichTable:
    """
    (i, n_i, d(n_i), log n_i, d(n_i) - log n_i) for 1 <= i <= i_max. For i >= 3 the
    primitivity index of a^{n_i} b^{n_i} equals d(n_i); rows outside the envelope are flagged.
    """
    rows = []
    for i in range(1, i_max + 1):
        n = lcm_upto(i)
        d = smallest_nondivisor(n)
        log_n = math.log(n) if n > 1 else 0.0
        gap = d - log_n
        rows.append(SandwichRow(i=i, n_i=n, d=d, log_n_i=log_n, gap=gap, flagged=abs(gap) > envelope))
    table = SandwichTable(envelope=envelope, rows=rows)
    if table.flagged:
        logger.info("sandwich rows outside +/-%.1f: %s", envelope, table.flagged)
    return table
