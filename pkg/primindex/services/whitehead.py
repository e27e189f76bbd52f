# primindex/services/whitehead.py
"""
Whitehead graphs, Whitehead automorphisms, length minimization and the
primitivity / simplicity decision procedures.

Conventions:
  - Whitehead graph of a cyclic word w: for every cyclic two-letter subword xy of w
    the undirected edge {x^-1, y}; vertex set is the 2N letters.
  - Type II automorphism (S, x) with x in S, x^-1 not in S: x fixed, and every other
    generator y maps to  (x^-1 if y^-1 in S) . y . (x if y in S).
  - Canonical enumeration order: multiplier by letter order a < A < b < B ..., then the
    bitmask over the remaining letters (same order) ascending.
"""

from __future__ import annotations

import itertools
import logging
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Dict, FrozenSet, Iterable, List, Literal, Optional, Sequence, Tuple, Union

import networkx as nx

from primindex.config import get_settings
from primindex.errors import InfeasibleSearch, RankMismatch, WordError
from primindex.services.words import (
    CyclicWord,
    Letters,
    Word,
    alphabet,
    canonical_cyclic_form,
    cyclic_core,
    generators_used,
    invert_letters,
    letter_key,
    letter_token,
    occurrences,
    reduce_letters,
)

logger = logging.getLogger(__name__)

Order = Literal["canonical", "reversed"]


# -------------------- Whitehead graph --------------------
@dataclass(frozen=True)
class WhiteheadGraph:
    rank: int
    edges: FrozenSet[FrozenSet[int]]

    def __post_init__(self):
        for e in self.edges:
            if len(e) != 2:
                raise WordError(f"Whitehead graph edges must join two distinct letters: {set(e)}")
            for v in e:
                if v == 0 or abs(v) > self.rank:
                    raise WordError(f"vertex {v} is not a letter of rank {self.rank}")

    @property
    def vertices(self) -> Letters:
        return alphabet(self.rank)

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(tuple(e) for e in self.edges)
        return g


def whitehead_graph(w: Union[CyclicWord, Sequence[int]], rank: Optional[int] = None) -> WhiteheadGraph:
    if isinstance(w, CyclicWord):
        letters, rank = w.letters, w.rank
    else:
        letters = tuple(w)
        if rank is None:
            raise WordError("rank is required for a raw letter sequence")
    if not letters:
        raise WordError("the Whitehead graph of the trivial word is undefined")
    wc = letters + (letters[0],)
    edges = {frozenset((-x, y)) for x, y in zip(wc, wc[1:])}
    return WhiteheadGraph(rank, frozenset(edges))


def has_cut_vertex(g: WhiteheadGraph) -> bool:
    """
    True iff removing some vertex disconnects the graph, or the graph has an edge and is
    already disconnected (then any end-vertex of an edge counts as a cut vertex).
    """
    if not g.edges:
        return False
    ng = g.to_networkx()
    if not nx.is_connected(ng):
        return True
    return next(nx.articulation_points(ng), None) is not None


def whitehead_graph_dot(g: WhiteheadGraph) -> str:
    ng = nx.Graph()
    for v in g.vertices:
        ng.add_node(letter_token(v, g.rank))
    for e in sorted(g.edges, key=lambda e: sorted(letter_key(v) for v in e)):
        u, v = sorted(e, key=letter_key)
        ng.add_edge(letter_token(u, g.rank), letter_token(v, g.rank))
    return nx.nx_pydot.to_pydot(ng).to_string()


# -------------------- Automorphisms --------------------
@dataclass(frozen=True)
class WhiteheadAutomorphism:
    kind: Literal["I", "II"]
    rank: int
    multiplier: int = 0
    subset: FrozenSet[int] = frozenset()
    permutation: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind == "II":
            x = self.multiplier
            if x == 0 or abs(x) > self.rank:
                raise WordError(f"multiplier {x} out of range for rank {self.rank}")
            if x not in self.subset or -x in self.subset:
                raise WordError("Type II subset must contain the multiplier and not its inverse")
        elif self.kind == "I":
            if sorted(abs(v) for v in self.permutation) != list(range(1, self.rank + 1)):
                raise WordError(f"not a signed permutation of rank {self.rank}: {self.permutation}")
        else:
            raise WordError(f"unknown automorphism kind {self.kind!r}")

    @cached_property
    def table(self) -> Dict[int, Letters]:
        images: Dict[int, Letters] = {}
        for g in range(1, self.rank + 1):
            if self.kind == "I":
                img: Letters = (self.permutation[g - 1],)
            elif g == abs(self.multiplier):
                img = (g,)
            else:
                x = self.multiplier
                img = ((-x,) if -g in self.subset else ()) + (g,) + ((x,) if g in self.subset else ())
            images[g] = img
            images[-g] = invert_letters(img)
        return images

    @property
    def is_trivial(self) -> bool:
        if self.kind == "I":
            return self.permutation == tuple(range(1, self.rank + 1))
        return self.subset == frozenset((self.multiplier,))

    @property
    def is_inner(self) -> bool:
        """Conjugation by the multiplier: acts trivially on cyclic words."""
        return self.kind == "II" and len(self.subset) == 2 * self.rank - 1

    def __call__(self, letters: Sequence[int]) -> Letters:
        table = self.table
        out: list = []
        for x in letters:
            for y in table[x]:
                if out and out[-1] == -y:
                    out.pop()
                else:
                    out.append(y)
        return tuple(out)

    def apply(self, w: Word) -> Word:
        if w.rank != self.rank:
            raise RankMismatch(f"automorphism of rank {self.rank} applied to a rank {w.rank} word")
        return Word(self(w.letters), self.rank)

    def inverse(self) -> "WhiteheadAutomorphism":
        if self.kind == "II":
            x = self.multiplier
            return WhiteheadAutomorphism("II", self.rank, -x, (self.subset - {x}) | {-x})
        inv = [0] * self.rank
        for g, img in enumerate(self.permutation, start=1):
            inv[abs(img) - 1] = g if img > 0 else -g
        return WhiteheadAutomorphism("I", self.rank, permutation=tuple(inv))

    def record(self) -> dict:
        if self.kind == "II":
            return {
                "kind": "II",
                "multiplier": letter_token(self.multiplier, self.rank),
                "subset": [letter_token(v, self.rank) for v in sorted(self.subset, key=letter_key)],
            }
        return {"kind": "I", "permutation": [letter_token(v, self.rank) for v in self.permutation]}


def trace_records(trace: Iterable[WhiteheadAutomorphism]) -> List[dict]:
    return [phi.record() for phi in trace]


@lru_cache(maxsize=None)
def type_two_automorphisms(rank: int, order: Order = "canonical") -> Tuple[WhiteheadAutomorphism, ...]:
    """All 2r * 2^(2r-2) Type II automorphisms, trivial ones included."""
    autos = []
    for x in alphabet(rank):
        others = [v for v in alphabet(rank) if abs(v) != abs(x)]
        for mask in range(1 << len(others)):
            chosen = {v for j, v in enumerate(others) if mask >> j & 1}
            autos.append(WhiteheadAutomorphism("II", rank, x, frozenset(chosen | {x})))
    if order == "reversed":
        autos.reverse()
    return tuple(autos)


def type_one_group(rank: int) -> List[WhiteheadAutomorphism]:
    """Every signed permutation of the generators (order 2^r r!)."""
    gens = range(1, rank + 1)
    out = []
    for perm in itertools.permutations(gens):
        for signs in itertools.product((1, -1), repeat=rank):
            out.append(WhiteheadAutomorphism("I", rank, permutation=tuple(s * p for s, p in zip(signs, perm))))
    return out


def whitehead_generators(rank: int) -> List[WhiteheadAutomorphism]:
    """
    All Type II automorphisms followed by a generating set of the Type I group:
    adjacent transpositions a_i <-> a_{i+1} and the inversion a_1 -> a_1^-1.
    """
    if rank < 2:
        raise WordError(f"Whitehead generators need rank >= 2, got {rank}")
    identity = list(range(1, rank + 1))
    type_one = []
    for i in range(rank - 1):
        perm = identity.copy()
        perm[i], perm[i + 1] = perm[i + 1], perm[i]
        type_one.append(WhiteheadAutomorphism("I", rank, permutation=tuple(perm)))
    type_one.append(WhiteheadAutomorphism("I", rank, permutation=tuple([-1] + identity[1:])))
    return list(type_two_automorphisms(rank)) + type_one


# -------------------- Minimization --------------------
def _minimize_letters(core: Letters, rank: int, order: Order) -> Tuple[Letters, Tuple[WhiteheadAutomorphism, ...]]:
    autos = type_two_automorphisms(rank, order)
    trace = []
    improved = True
    while improved and len(core) > 1:
        improved = False
        for phi in autos:
            image = cyclic_core(phi(core))
            if len(image) < len(core):
                core = image
                trace.append(phi)
                improved = True
                break
    return core, tuple(trace)


def whitehead_minimize(w: CyclicWord, order: Order = "canonical") -> Tuple[CyclicWord, List[WhiteheadAutomorphism]]:
    """
    Greedy descent: apply the first strictly shortening Type II automorphism (in the
    given enumeration order) until none shortens. By Whitehead's theorem the result has
    minimal cyclic length in the Aut(F_r)-orbit.
    """
    if not w.letters:
        raise WordError("cannot minimize the trivial word")
    core, trace = _minimize_letters(w.letters, w.rank, order)
    return CyclicWord(Word(core, w.rank)), list(trace)


# -------------------- Decision procedures --------------------
@dataclass(frozen=True)
class Verdict:
    holds: bool
    path: str
    word: Letters
    rank: int
    trace: Tuple[WhiteheadAutomorphism, ...] = field(default=(), repr=False)
    generator: int = 0


def _core_for(w: Union[Word, CyclicWord, Sequence[int]], rank: Optional[int]) -> Tuple[Letters, int]:
    if isinstance(w, (Word, CyclicWord)):
        if rank is None:
            rank = w.rank
        elif w.rank > rank and any(abs(x) > rank for x in w.letters):
            raise RankMismatch(f"word of rank {w.rank} uses generators beyond rank {rank}")
        letters = w.letters
    else:
        letters = tuple(w)
        if rank is None:
            raise WordError("rank is required for a raw letter sequence")
    if any(x == 0 or abs(x) > rank for x in letters):
        raise WordError(f"letters out of range for rank {rank}")
    core = cyclic_core(reduce_letters(letters))
    if not core:
        raise WordError("the trivial word is neither primitive nor simple")
    return core, rank


def _single_occurrence(core: Letters) -> int:
    for g in sorted(generators_used(core)):
        if occurrences(core, g) == 1:
            return g
    return 0


def _omitted(core: Letters, rank: int) -> int:
    missing = set(range(1, rank + 1)) - generators_used(core)
    return min(missing) if missing else 0


@lru_cache(maxsize=65536)
def _primitivity(core: Letters, rank: int, order: Order) -> Verdict:
    g = _single_occurrence(core)
    if g:
        return Verdict(True, "single_occurrence", core, rank, generator=g)
    if not has_cut_vertex(whitehead_graph(core, rank)):
        return Verdict(False, "no_cut_vertex", core, rank)
    minimized, trace = _minimize_letters(core, rank, order)
    if len(minimized) == 1:
        return Verdict(True, "minimized_to_letter", core, rank, trace, generator=abs(minimized[0]))
    return Verdict(False, "minimized_not_letter", core, rank, trace)


def primitivity_verdict(w, rank: Optional[int] = None, order: Order = "canonical") -> Verdict:
    core, rank = _core_for(w, rank)
    verdict = _primitivity(canonical_cyclic_form(core, with_inverse=True), rank, order)
    logger.debug("primitivity rank=%d len=%d -> %s (%s)", rank, len(core), verdict.holds, verdict.path)
    return verdict


def is_primitive(w, rank: Optional[int] = None) -> bool:
    """True iff w belongs to some free basis of F_rank."""
    return primitivity_verdict(w, rank).holds


def _level_set_search(start: Letters, rank: int, order: Order, limit: int) -> Optional[Letters]:
    """Breadth-first search of the minimal-length orbit for a word omitting a generator."""
    autos = [phi for phi in type_two_automorphisms(rank, order) if not phi.is_trivial and not phi.is_inner]
    length = len(start)
    seen = {canonical_cyclic_form(start, with_inverse=True)}
    queue = deque([start])
    while queue:
        current = queue.popleft()
        for phi in autos:
            image = cyclic_core(phi(current))
            if len(image) != length:
                continue
            key = canonical_cyclic_form(image, with_inverse=True)
            if key in seen:
                continue
            if _omitted(image, rank):
                return key
            seen.add(key)
            if len(seen) > limit:
                raise InfeasibleSearch(
                    f"simplicity level set exceeds {limit} words (rank {rank}, length {length})"
                )
            queue.append(image)
    logger.debug("level set exhausted: %d words of length %d in rank %d", len(seen), length, rank)
    return None


@lru_cache(maxsize=65536)
def _simplicity(core: Letters, rank: int, order: Order, limit: int) -> Verdict:
    g = _omitted(core, rank)
    if g:
        return Verdict(True, "omitted_generator", core, rank, generator=g)
    g = _single_occurrence(core)
    if g:
        return Verdict(True, "single_occurrence", core, rank, generator=g)
    if not has_cut_vertex(whitehead_graph(core, rank)):
        return Verdict(False, "no_cut_vertex", core, rank)
    minimized, trace = _minimize_letters(core, rank, order)
    if len(minimized) == 1:
        return Verdict(True, "minimized_to_letter", core, rank, trace, generator=abs(minimized[0]))
    g = _omitted(minimized, rank)
    if g:
        return Verdict(True, "omitted_generator", minimized, rank, trace, generator=g)
    if not has_cut_vertex(whitehead_graph(minimized, rank)):
        return Verdict(False, "no_cut_vertex", minimized, rank, trace)
    found = _level_set_search(minimized, rank, order, limit)
    if found is not None:
        return Verdict(True, "level_set_omission", found, rank, trace, generator=_omitted(found, rank))
    return Verdict(False, "level_set_exhausted", minimized, rank, trace)


def simplicity_verdict(w, rank: Optional[int] = None, order: Order = "canonical", limit: Optional[int] = None) -> Verdict:
    core, rank = _core_for(w, rank)
    if rank < 2:
        raise WordError("simplicity needs rank >= 2")
    limit = limit or get_settings().level_set_limit
    verdict = _simplicity(canonical_cyclic_form(core, with_inverse=True), rank, order, limit)
    logger.debug("simplicity rank=%d len=%d -> %s (%s)", rank, len(core), verdict.holds, verdict.path)
    return verdict


def is_simple(w, rank: Optional[int] = None) -> bool:
    """True iff w lies in a proper free factor of F_rank."""
    return simplicity_verdict(w, rank).holds
