# primindex/services/stallings.py
"""
Stallings A-graphs for subgroups of F_N.

An AGraph stores its positive edges only: (origin, terminus, label) with label in 1..N.
The reversed edge (terminus, origin, -label) is implicit, so the involution e -> e-bar is
fixed-point free by construction. Parallel edges are allowed (unfolded graphs); edges are
identified by their position in `edges`.

Finite-index subgroups are basepointed covers of the rose, enumerated as coset tables in
standard form: vertices are numbered in first-visit order under the scan
(vertex ascending, letter a < A < b < B ...), which is exactly the canonical BFS labelling.
"""

from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Dict, FrozenSet, Iterable, Iterator, List, Literal, Optional, Sequence, Tuple

import networkx as nx
from sympy.combinatorics import Permutation, PermutationGroup

from primindex.errors import GraphError, NotInSubgroup, WordError
from primindex.services.words import (
    Letters,
    Word,
    alphabet,
    invert_letters,
    letter_key,
    letter_token,
    reduce_letters,
)

logger = logging.getLogger(__name__)

Edge = Tuple[int, int, int]

EDGE_COLORS = ("red", "blue", "darkgreen", "orange", "purple", "brown", "magenta", "cyan")


@dataclass(frozen=True)
class AGraph:
    rank: int
    num_vertices: int
    edges: Tuple[Edge, ...]
    basepoint: int = 0

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        if self.rank < 1:
            raise GraphError(f"rank must be >= 1, got {self.rank}")
        if self.num_vertices < 1:
            raise GraphError("an A-graph needs at least one vertex")
        if not 0 <= self.basepoint < self.num_vertices:
            raise GraphError(f"basepoint {self.basepoint} out of range")
        for o, t, label in self.edges:
            if not (0 <= o < self.num_vertices and 0 <= t < self.num_vertices):
                raise GraphError(f"edge ({o}, {t}) leaves the vertex set")
            if not 1 <= label <= self.rank:
                raise GraphError(f"edge label {label} out of range for rank {self.rank}")

    @cached_property
    def incidence(self) -> Tuple[Tuple[Tuple[int, int, int], ...], ...]:
        """Per vertex: (letter read, edge index, far endpoint), sorted by letter order then index."""
        rows: List[list] = [[] for _ in range(self.num_vertices)]
        for idx, (o, t, label) in enumerate(self.edges):
            rows[o].append((label, idx, t))
            rows[t].append((-label, idx, o))
        return tuple(tuple(sorted(r, key=lambda item: (letter_key(item[0]), item[1]))) for r in rows)

    @cached_property
    def out(self) -> Tuple[Dict[int, Tuple[Tuple[int, int], ...]], ...]:
        """Per vertex: letter -> ((edge index, far endpoint), ...)."""
        table = []
        for row in self.incidence:
            d: Dict[int, list] = {}
            for letter, idx, far in row:
                d.setdefault(letter, []).append((idx, far))
            table.append({k: tuple(v) for k, v in d.items()})
        return tuple(table)

    @property
    def positive_edge_count(self) -> int:
        return len(self.edges)


# -------------------- Structure checks --------------------
def is_folded(g: AGraph) -> bool:
    return all(len(targets) == 1 for row in g.out for targets in row.values())


def is_connected(g: AGraph) -> bool:
    return len(_reachable(g)) == g.num_vertices


def is_cover(g: AGraph) -> bool:
    """Folded, connected and 2N-regular."""
    if not is_folded(g) or not is_connected(g):
        return False
    letters = set(alphabet(g.rank))
    return all(set(row) == letters for row in g.out)


def _reachable(g: AGraph) -> List[int]:
    seen = {g.basepoint}
    order = [g.basepoint]
    queue = deque(order)
    while queue:
        v = queue.popleft()
        for _, _, far in g.incidence[v]:
            if far not in seen:
                seen.add(far)
                order.append(far)
                queue.append(far)
    return order


def canonical_form(g: AGraph) -> AGraph:
    """Relabel vertices in BFS first-visit order from the basepoint (label order a < A < b ...)."""
    order = _reachable(g)
    if len(order) != g.num_vertices:
        raise GraphError("graph is not connected")
    relabel = {v: i for i, v in enumerate(order)}
    edges = sorted((relabel[o], relabel[t], label) for o, t, label in g.edges)
    return AGraph(g.rank, g.num_vertices, tuple(edges), 0)


def isomorphic(g: AGraph, h: AGraph) -> bool:
    """Basepoint-preserving label isomorphism; exact for folded graphs."""
    if g.rank != h.rank or g.num_vertices != h.num_vertices or len(g.edges) != len(h.edges):
        return False
    return canonical_form(g) == canonical_form(h)


# -------------------- Folding --------------------
def fold(g: AGraph) -> AGraph:
    """
    Stallings folding with union-find and an explicit worklist of vertex pairs to merge.
    The result is folded, connected (for connected input) and in canonical form.
    """
    n = g.num_vertices
    parent = list(range(n))
    adj: List[Dict[int, int]] = [dict() for _ in range(n)]
    pending: deque = deque()

    def find(v: int) -> int:
        root = v
        while parent[root] != root:
            root = parent[root]
        while parent[v] != root:
            parent[v], v = root, parent[v]
        return root

    def attach(v: int, letter: int, u: int) -> None:
        v = find(v)
        current = adj[v].get(letter)
        if current is None:
            adj[v][letter] = u
        elif find(current) != find(u):
            pending.append((current, u))

    for o, t, label in g.edges:
        attach(o, label, t)
        attach(t, -label, o)

    merges = 0
    while pending:
        u, v = pending.popleft()
        u, v = find(u), find(v)
        if u == v:
            continue
        root, child = (u, v) if u < v else (v, u)
        parent[child] = root
        moved, adj[child] = adj[child], {}
        for letter, target in moved.items():
            attach(root, letter, target)
        merges += 1

    roots = sorted({find(v) for v in range(n)})
    index = {r: i for i, r in enumerate(roots)}
    edges = []
    for r in roots:
        for letter, target in adj[r].items():
            if letter > 0:
                edges.append((index[r], index[find(target)], letter))
    folded = AGraph(g.rank, len(roots), tuple(sorted(edges)), index[find(g.basepoint)])
    logger.debug("fold: %d -> %d vertices in %d merges", n, len(roots), merges)
    return canonical_form(folded)


def subgroup_graph(generators: Sequence[Word], rank: int) -> AGraph:
    """Wedge of subdivided circles at the basepoint, one per generator, folded."""
    if not generators:
        raise GraphError("subgroup_graph needs at least one generator")
    edges: List[Edge] = []
    count = 1
    for w in generators:
        if w.rank > rank and any(abs(x) > rank for x in w.letters):
            raise WordError(f"generator {w} does not live in rank {rank}")
        letters = w.letters
        if not letters:
            continue
        path = [0] + list(range(count, count + len(letters) - 1)) + [0]
        count += len(letters) - 1
        for x, (u, v) in zip(letters, zip(path, path[1:])):
            edges.append((u, v, x) if x > 0 else (v, u, -x))
    return fold(AGraph(rank, count, tuple(edges), 0))


# -------------------- Tracing --------------------
def trace(g: AGraph, w: Word | Sequence[int], start: Optional[int] = None) -> Optional[int]:
    """End vertex of the path reading w from `start` (basepoint by default); None if it dies."""
    v = g.basepoint if start is None else start
    letters = w.letters if isinstance(w, Word) else tuple(w)
    for x in letters:
        step = g.out[v].get(x)
        if not step:
            return None
        v = step[0][1]
    return v


def contains(g: AGraph, w: Word) -> bool:
    """True iff w labels a loop at the basepoint of the folded graph g."""
    return trace(g, w) == g.basepoint


# -------------------- Covers --------------------
@dataclass(frozen=True)
class CoverPermutations:
    """One permutation of range(degree) per positive letter; perms[0] is sigma_a."""

    degree: int
    perms: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "perms", tuple(tuple(p) for p in self.perms))
        if self.degree < 1:
            raise GraphError(f"degree must be >= 1, got {self.degree}")
        if not self.perms:
            raise GraphError("a cover needs at least one permutation")
        for p in self.perms:
            if sorted(p) != list(range(self.degree)):
                raise GraphError(f"not a permutation of range({self.degree}): {p}")
        if not self.group.is_transitive():
            raise GraphError("permutations do not act transitively")

    @property
    def rank(self) -> int:
        return len(self.perms)

    @cached_property
    def group(self) -> PermutationGroup:
        return PermutationGroup([Permutation(list(p)) for p in self.perms])

    def cycle_length(self, generator: int, point: int = 0) -> int:
        """Length of the cycle of sigma_generator through `point`."""
        return len(PermutationGroup([Permutation(list(self.perms[generator - 1]))]).orbit(point))

    def to_json(self) -> dict:
        return {"degree": self.degree, "perms": [list(p) for p in self.perms]}

    @classmethod
    def from_json(cls, data: dict) -> "CoverPermutations":
        return cls(int(data["degree"]), tuple(tuple(p) for p in data["perms"]))


def induced_permutation(c: CoverPermutations, w: Word | Sequence[int]) -> Tuple[int, ...]:
    """sigma_w: vertex v goes to the end of the path reading w from v."""
    letters = w.letters if isinstance(w, Word) else tuple(w)
    inverses = []
    for p in c.perms:
        inv = [0] * c.degree
        for v, u in enumerate(p):
            inv[u] = v
        inverses.append(inv)
    image = []
    for v in range(c.degree):
        for x in letters:
            v = c.perms[x - 1][v] if x > 0 else inverses[-x - 1][v]
        image.append(v)
    return tuple(image)


def cover_to_graph(c: CoverPermutations) -> AGraph:
    edges = [(v, p[v], g) for g, p in enumerate(c.perms, start=1) for v in range(c.degree)]
    return AGraph(c.rank, c.degree, tuple(edges), 0)


def cover_permutations(g: AGraph) -> CoverPermutations:
    if not is_cover(g):
        raise GraphError("graph is not a cover of the rose")
    if g.basepoint != 0:
        g = canonical_form(g)
    perms = tuple(tuple(g.out[v][label][0][1] for v in range(g.num_vertices)) for label in range(1, g.rank + 1))
    return CoverPermutations(g.num_vertices, perms)


def enumerate_covers(rank: int, degree: int) -> Iterator[CoverPermutations]:
    """
    Stream one coset table in standard form per subgroup of index `degree` in F_rank.

    Backtracking fill: the first undefined slot in scan order gets each admissible target
    (an existing vertex whose inverse slot is free, then the next new vertex). A scan that
    reaches an unused vertex means the table closed early and the branch is dropped.
    """
    if degree < 1:
        raise GraphError(f"degree must be >= 1, got {degree}")
    if rank < 1:
        raise GraphError(f"rank must be >= 1, got {rank}")
    width = 2 * rank
    letters = alphabet(rank)
    inverse_slot = [letter_key(-x) for x in letters]
    table = [[-1] * width for _ in range(degree)]

    def first_free() -> Optional[Tuple[int, int]]:
        for v in range(degree):
            for k in range(width):
                if table[v][k] < 0:
                    return (v, k)
        return None

    def search(used: int) -> Iterator[CoverPermutations]:
        slot = first_free()
        if slot is None:
            if used == degree:
                perms = tuple(
                    tuple(table[v][2 * (g - 1)] for v in range(degree)) for g in range(1, rank + 1)
                )
                yield CoverPermutations(degree, perms)
            return
        v, k = slot
        if v >= used:
            return
        ik = inverse_slot[k]
        for u in range(used):
            if table[u][ik] >= 0:
                continue
            table[v][k], table[u][ik] = u, v
            yield from search(used)
            table[v][k], table[u][ik] = -1, -1
        if used < degree:
            u = used
            table[v][k], table[u][ik] = u, v
            yield from search(used + 1)
            table[v][k], table[u][ik] = -1, -1

    yield from search(1)


@lru_cache(maxsize=None)
def hall_count(rank: int, degree: int) -> int:
    """Number of index-`degree` subgroups of F_rank (Marshall Hall's recursion)."""
    if degree < 1:
        raise GraphError(f"degree must be >= 1, got {degree}")
    total = degree * math.factorial(degree) ** (rank - 1)
    for k in range(1, degree):
        total -= math.factorial(degree - k) ** (rank - 1) * hall_count(rank, k)
    return total


# -------------------- Spanning trees --------------------
@dataclass(frozen=True)
class TreePolicy:
    kind: Literal["bfs", "prefer_label"] = "bfs"
    label: int = 0

    @classmethod
    def prefer_label(cls, label: int) -> "TreePolicy":
        if label < 1:
            raise GraphError("PreferLabel takes a positive generator index")
        return cls("prefer_label", label)


BFS = TreePolicy()


@dataclass(frozen=True)
class SpanningTree:
    """Tree edges (indices into the graph's edge list) and the tree word [x0, v]_T per vertex."""

    edges: FrozenSet[int]
    prefix: Tuple[Letters, ...]

    def path_word(self, u: int, v: int) -> Letters:
        """Label of the tree path [u, v]_T."""
        return reduce_letters(invert_letters(self.prefix[u]) + self.prefix[v])


def _tree_from_edges(g: AGraph, chosen: FrozenSet[int]) -> SpanningTree:
    prefix: List[Optional[Letters]] = [None] * g.num_vertices
    prefix[g.basepoint] = ()
    queue = deque([g.basepoint])
    while queue:
        v = queue.popleft()
        for letter, idx, far in g.incidence[v]:
            if idx in chosen and prefix[far] is None:
                prefix[far] = prefix[v] + (letter,)
                queue.append(far)
    if any(p is None for p in prefix) or len(chosen) != g.num_vertices - 1:
        raise GraphError("edge set is not a spanning tree")
    return SpanningTree(frozenset(chosen), tuple(prefix))


def extend_spanning_tree(g: AGraph, seed: Iterable[int] = ()) -> SpanningTree:
    """Complete an acyclic edge set to a spanning tree, breadth-first from the basepoint."""
    seed = frozenset(seed)
    forest = nx.Graph()
    forest.add_nodes_from(range(g.num_vertices))
    for idx in sorted(seed):
        o, t, _ = g.edges[idx]
        if nx.has_path(forest, o, t):
            raise GraphError(f"seed edges contain a cycle (edge {idx})")
        forest.add_edge(o, t)
    component = {}
    for part in nx.connected_components(forest):
        frozen = frozenset(part)
        for v in part:
            component[v] = frozen

    chosen = set(seed)
    reached = set(component[g.basepoint])
    queue = deque(sorted(reached))
    while queue:
        v = queue.popleft()
        for _, idx, far in g.incidence[v]:
            if far in reached:
                continue
            chosen.add(idx)
            fresh = component[far]
            reached |= fresh
            queue.extend(sorted(fresh))
    if len(reached) != g.num_vertices:
        raise GraphError("graph is not connected")
    return _tree_from_edges(g, frozenset(chosen))


def spanning_tree(g: AGraph, policy: TreePolicy = BFS) -> SpanningTree:
    seed: List[int] = []
    if policy.kind == "prefer_label":
        v, visited = g.basepoint, {g.basepoint}
        while True:
            step = [(idx, far) for idx, far in g.out[v].get(policy.label, ()) if far not in visited]
            if not step:
                break
            idx, far = step[0]
            seed.append(idx)
            visited.add(far)
            v = far
    return extend_spanning_tree(g, seed)


def non_tree_edges(g: AGraph, t: SpanningTree) -> List[int]:
    """Positive edges outside the tree, ordered by (label, origin, index)."""
    rest = [i for i in range(len(g.edges)) if i not in t.edges]
    return sorted(rest, key=lambda i: (g.edges[i][2], g.edges[i][0], i))


def dual_basis(g: AGraph, t: SpanningTree) -> List[Word]:
    """beta_e = [x0, o(e)]_T e [t(e), x0]_T for each positive non-tree edge e."""
    basis = []
    for idx in non_tree_edges(g, t):
        o, term, label = g.edges[idx]
        basis.append(Word(reduce_letters(t.prefix[o] + (label,) + invert_letters(t.prefix[term])), g.rank))
    return basis


def rewrite_in_basis(g: AGraph, t: SpanningTree, w: Word) -> Word:
    """Express the loop of w at the basepoint in the dual basis letters 1..|basis|."""
    order = non_tree_edges(g, t)
    if not order:
        raise GraphError("the subgroup is trivial and has no basis letters")
    position = {idx: j for j, idx in enumerate(order, start=1)}
    v = g.basepoint
    emitted: list = []
    for x in w.letters:
        step = g.out[v].get(x)
        if not step:
            raise NotInSubgroup(f"{w} leaves the graph at vertex {v}")
        idx, v = step[0]
        j = position.get(idx)
        if j is not None:
            emitted.append(j if x > 0 else -j)
    if v != g.basepoint:
        raise NotInSubgroup(f"{w} does not return to the basepoint")
    return Word(reduce_letters(emitted), len(order))


# -------------------- Completion and powers --------------------
def hall_completion(g: AGraph) -> AGraph:
    """
    Complete each label's partial permutation on the same vertex set: unmatched sources
    are paired with unmatched targets in ascending vertex order.
    """
    if not is_folded(g):
        raise GraphError("hall_completion needs a folded graph")
    edges = list(g.edges)
    for label in range(1, g.rank + 1):
        sources = [v for v in range(g.num_vertices) if label not in g.out[v]]
        targets = [v for v in range(g.num_vertices) if -label not in g.out[v]]
        edges.extend((s, t, label) for s, t in zip(sources, targets))
    completed = AGraph(g.rank, g.num_vertices, tuple(edges), g.basepoint)
    if not is_cover(completed):
        raise GraphError("completion did not produce a cover (input disconnected?)")
    return completed


def smallest_powers(g: AGraph) -> Tuple[int, int]:
    """(k, l): the least positive k, l with a^k and b^l in the subgroup of the cover g."""
    if g.rank != 2:
        raise GraphError(f"smallest_powers is defined for rank 2, got {g.rank}")
    c = cover_permutations(g)
    return c.cycle_length(1), c.cycle_length(2)


# -------------------- Serialization --------------------
def graph_to_json(g: AGraph) -> dict:
    return {
        "rank": g.rank,
        "vertices": g.num_vertices,
        "basepoint": g.basepoint,
        "edges": [[o, t, letter_token(label, g.rank)] for o, t, label in g.edges],
    }


def graph_from_json(data: dict) -> AGraph:
    rank = int(data["rank"])
    tokens = {letter_token(g, rank): g for g in range(1, rank + 1)}
    try:
        edges = tuple((int(o), int(t), tokens[label]) for o, t, label in data["edges"])
    except KeyError as exc:
        raise GraphError(f"unknown edge label {exc.args[0]!r}") from exc
    return AGraph(rank, int(data["vertices"]), edges, int(data.get("basepoint", 0)))


def graph_to_dot(g: AGraph, name: str = "agraph") -> str:
    ng = nx.MultiDiGraph(name=name)
    for v in range(g.num_vertices):
        attrs = {"shape": "doublecircle"} if v == g.basepoint else {"shape": "circle"}
        ng.add_node(str(v), **attrs)
    for o, t, label in g.edges:
        ng.add_edge(
            str(o),
            str(t),
            label=letter_token(label, g.rank),
            color=EDGE_COLORS[(label - 1) % len(EDGE_COLORS)],
        )
    return nx.nx_pydot.to_pydot(ng).to_string()
