# primindex/services/numtheory.py
"""
Arithmetic layer: the smallest non-divisor d(n), the second Chebyshev function psi,
the lcm sequence n_i = lcm(1..i), and finite-range checks of the classical psi envelopes.

Floats only ever appear in psi; every divisibility statement is checked on exact ints.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, List, Optional, Tuple

from pydantic import BaseModel, computed_field
from sympy import factorint
from sympy import sieve

from primindex.errors import HypothesisViolation

logger = logging.getLogger(__name__)

R_CONSTANT = 515 / (math.sqrt(546) - math.sqrt(322)) ** 2
PSI_RATIO_BOUND = 1.03883
PSI_RATIO_ARGMAX = 113
EXACT_LCM_LIMIT = 10_000
LCM_TOLERANCE = 1e-9


def smallest_nondivisor(n: int) -> int:
    """d(n): the least d >= 2 with d not dividing n."""
    if n < 1:
        raise HypothesisViolation(f"d(n) needs n >= 1, got {n}")
    d = 2
    while n % d == 0:
        d += 1
    return d


def epsilon(m: int) -> float:
    log_m = math.log(m)
    return math.sqrt(log_m) * math.exp(-math.sqrt(log_m / R_CONSTANT))


def _primes_upto(m: int) -> List[int]:
    return list(sieve.primerange(2, m + 1)) if m >= 2 else []


def chebyshev_psi(m: int) -> float:
    """psi(m) = sum of log p over prime powers p^k <= m."""
    if m < 1:
        raise HypothesisViolation(f"psi(m) needs m >= 1, got {m}")
    terms = []
    for p in _primes_upto(m):
        power = p
        while power <= m:
            terms.append(math.log(p))
            power *= p
    return math.fsum(terms)


def lcm_upto(i: int) -> int:
    """n_i = lcm(1, ..., i) as the product of p^floor(log_p i)."""
    if i < 1:
        raise HypothesisViolation(f"lcm_upto needs i >= 1, got {i}")
    result = 1
    for p in _primes_upto(i):
        power = p
        while power * p <= i:
            power *= p
        result *= power
    return result


def lcm_sequence(i_max: int) -> Iterator[Tuple[int, int]]:
    """(i, n_i) for i = 1..i_max, built incrementally with exact lcm."""
    n = 1
    for i in range(1, i_max + 1):
        n = math.lcm(n, i)
        yield i, n


@dataclass(frozen=True)
class ChebyshevTable:
    m_max: int
    psi: Tuple[float, ...]
    lcm_checked_upto: int
    max_lcm_deviation: float

    def ratio(self, m: int) -> float:
        return self.psi[m] / m


@lru_cache(maxsize=4)
def chebyshev_table(m_max: int) -> ChebyshevTable:
    """
    psi(0..m_max) by a running compensated sum over prime-power increments; the exact
    log(lcm(1..m)) column is compared up to min(m_max, EXACT_LCM_LIMIT).
    """
    if m_max < 1:
        raise HypothesisViolation(f"m_max must be >= 1, got {m_max}")
    increments = [0.0] * (m_max + 1)
    for p in _primes_upto(m_max):
        log_p = math.log(p)
        power = p
        while power <= m_max:
            increments[power] = log_p
            power *= p

    psi = [0.0] * (m_max + 1)
    total, compensation = 0.0, 0.0
    for m in range(1, m_max + 1):
        y = increments[m] - compensation
        t = total + y
        compensation = (t - total) - y
        total = t
        psi[m] = total

    checked = min(m_max, EXACT_LCM_LIMIT)
    deviation = 0.0
    for m, n in lcm_sequence(checked):
        deviation = max(deviation, abs(psi[m] - math.log(n)))
    if deviation >= LCM_TOLERANCE:
        logger.warning("psi deviates from exact log lcm by %.3e (m <= %d)", deviation, checked)
    return ChebyshevTable(m_max, tuple(psi), checked, deviation)


# -------------------- Reports --------------------
class RosserSchoenfeldReport(BaseModel):
    m_max: int
    lower_violations: List[int]
    upper_violations: List[int]
    ratio_bound_violations: List[int]
    argmax_ratio: int
    max_ratio: float
    lcm_checked_upto: int
    max_lcm_deviation: float

    @computed_field
    @property
    def passed(self) -> bool:
        argmax_ok = self.m_max < PSI_RATIO_ARGMAX or self.argmax_ratio == PSI_RATIO_ARGMAX
        return (
            not self.lower_violations
            and not self.upper_violations
            and not self.ratio_bound_violations
            and argmax_ok
            and self.max_lcm_deviation < LCM_TOLERANCE
        )


def rosser_schoenfeld_check(m_max: int) -> RosserSchoenfeldReport:
    if m_max < 2:
        raise HypothesisViolation(f"m_max must be >= 2, got {m_max}")
    table = chebyshev_table(m_max)
    lower, upper, ratio_bad = [], [], []
    best_m, best_ratio = 1, 0.0
    for m in range(1, m_max + 1):
        value = table.psi[m]
        eps = epsilon(m)
        if m >= 2 and not (1 - eps) * m < value:
            lower.append(m)
        if not value < (1 + eps) * m:
            upper.append(m)
        if not value < PSI_RATIO_BOUND * m:
            ratio_bad.append(m)
        if value / m > best_ratio:
            best_m, best_ratio = m, value / m
    report = RosserSchoenfeldReport(
        m_max=m_max,
        lower_violations=lower,
        upper_violations=upper,
        ratio_bound_violations=ratio_bad,
        argmax_ratio=best_m,
        max_ratio=best_ratio,
        lcm_checked_upto=table.lcm_checked_upto,
        max_lcm_deviation=table.max_lcm_deviation,
    )
    logger.info("psi envelopes up to %d: passed=%s argmax=%d", m_max, report.passed, best_m)
    return report


class LcmRow(BaseModel):
    i: int
    n_i: int
    d: int
    log_n_i: float


class Lemma1Report(BaseModel):
    n_max: int
    violations: List[int]

    @computed_field
    @property
    def passed(self) -> bool:
        return not self.violations


def lemma1_check(n_max: int) -> Lemma1Report:
    """1 < d(n) < n for every 3 <= n <= n_max."""
    violations = [n for n in range(3, n_max + 1) if not 1 < smallest_nondivisor(n) < n]
    return Lemma1Report(n_max=n_max, violations=violations)


class Lemma2Report(BaseModel):
    n_max: int
    i_max: int
    empirical_c: float
    empirical_c_at: int
    empirical_n0: int
    not_prime_power: List[int]
    nondivisor_gaps: List[int]
    lcm_rows: List[LcmRow]

    @computed_field
    @property
    def passed(self) -> bool:
        return not self.not_prime_power and not self.nondivisor_gaps


@lru_cache(maxsize=None)
def _is_prime_power(d: int) -> bool:
    return len(factorint(d)) == 1


def lemma2_bounds_check(n_max: int, i_max: int) -> Lemma2Report:
    """
    Scan d(n) for 2 <= n <= n_max: the empirical constant max(d(n) - log n), the least n0
    after which d(n) <= log n + log 2 + 1 holds on the scanned range, and the prime-power
    property of d(n). Then d(n_i) >= i + 1 exactly for 2 <= i <= i_max.
    """
    if n_max < 2 or i_max < 2:
        raise HypothesisViolation("n_max and i_max must both be >= 2")
    slack = math.log(2) + 1
    best_c, best_at = -math.inf, 2
    last_bad: Optional[int] = None
    not_pp = []
    for n in range(2, n_max + 1):
        d = smallest_nondivisor(n)
        gap = d - math.log(n)
        if gap > best_c:
            best_c, best_at = gap, n
        if gap > slack:
            last_bad = n
        if not _is_prime_power(d):
            not_pp.append(n)

    rows, gaps = [], []
    for i, n_i in lcm_sequence(i_max):
        if i < 2:
            continue
        d = smallest_nondivisor(n_i)
        if d < i + 1:
            gaps.append(i)
        rows.append(LcmRow(i=i, n_i=n_i, d=d, log_n_i=math.log(n_i)))

    report = Lemma2Report(
        n_max=n_max,
        i_max=i_max,
        empirical_c=best_c,
        empirical_c_at=best_at,
        empirical_n0=max(3, (last_bad or 0) + 1),
        not_prime_power=not_pp,
        nondivisor_gaps=gaps,
        lcm_rows=rows,
    )
    logger.info(
        "d(n) scan to %d: C_hat=%.4f at n=%d, n0=%d; lcm rows to i=%d passed=%s",
        n_max, best_c, best_at, report.empirical_n0, i_max, report.passed,
    )
    return report


def psi_rows(m_max: int) -> Iterator[Tuple[int, float, float]]:
    table = chebyshev_table(m_max)
    for m in range(1, m_max + 1):
        yield m, table.psi[m], table.ratio(m)


def lcm_rows(i_max: int) -> Iterator[Tuple[int, int, int]]:
    for i, n_i in lcm_sequence(i_max):
        yield i, n_i, smallest_nondivisor(n_i)
