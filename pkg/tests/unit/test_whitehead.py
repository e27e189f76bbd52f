import itertools
from collections import deque

import pytest
from hypothesis import assume, given, settings, strategies as st

from primindex.errors import WordError
from primindex.services.whitehead import (
    WhiteheadAutomorphism,
    WhiteheadGraph,
    has_cut_vertex,
    is_primitive,
    is_simple,
    primitivity_verdict,
    simplicity_verdict,
    type_one_group,
    type_two_automorphisms,
    whitehead_generators,
    whitehead_graph,
    whitehead_graph_dot,
    whitehead_minimize,
)
from primindex.services.words import CyclicWord, Word, canonical_cyclic_form, cyclic_core, free_reduce

letters2 = st.lists(st.sampled_from([1, -1, 2, -2]), min_size=1, max_size=10)


def _edges(graph):
    return {frozenset(e) for e in graph.edges}


def test_whitehead_graph_of_a2b2_is_a_four_cycle(w):
    g = whitehead_graph(CyclicWord(w("a^2 b^2")))
    assert _edges(g) == {frozenset(p) for p in ((-1, 1), (-1, 2), (-2, 2), (-2, 1))}
    assert not has_cut_vertex(g)


def test_disconnected_graph_with_edges_has_cut_vertex(w):
    assert has_cut_vertex(whitehead_graph(CyclicWord(w("a b"))))
    assert has_cut_vertex(whitehead_graph(CyclicWord(w("x1 x2", 3))))


def test_edgeless_graph_has_no_cut_vertex():
    assert not has_cut_vertex(WhiteheadGraph(2, frozenset()))


def test_trivial_word_has_no_whitehead_graph():
    with pytest.raises(WordError):
        whitehead_graph((), 2)


def test_whitehead_graph_dot_names_letters(w):
    dot = whitehead_graph_dot(whitehead_graph(CyclicWord(w("a^2 b^2"))))
    assert "graph" in dot
    assert "A" in dot and "b" in dot


def test_type_two_counts():
    assert len(type_two_automorphisms(2)) == 16
    assert len(type_two_automorphisms(3)) == 96
    assert len(type_one_group(2)) == 8
    assert len(type_one_group(3)) == 48
    assert len(set(type_one_group(2))) == 8
    assert len(whitehead_generators(2)) == 18
    with pytest.raises(WordError):
        whitehead_generators(1)


def test_type_two_action_and_flags(w):
    phi = WhiteheadAutomorphism("II", 2, 1, frozenset({1, 2}))
    assert phi.apply(w("b")).letters == (2, 1)
    assert phi.apply(w("a")).letters == (1,)
    assert not phi.is_trivial
    assert not phi.is_inner
    assert WhiteheadAutomorphism("II", 2, 1, frozenset({1})).is_trivial
    assert WhiteheadAutomorphism("II", 2, 1, frozenset({1, 2, -2})).is_inner


def test_invalid_type_two_subset():
    with pytest.raises(WordError):
        WhiteheadAutomorphism("II", 2, 1, frozenset({1, -1}))
    with pytest.raises(WordError):
        WhiteheadAutomorphism("I", 2, permutation=(1, 1))


@settings(max_examples=100, derandomize=True)
@given(letters2)
def test_inverse_automorphisms_undo(xs):
    word = free_reduce(xs, 2)
    for phi in type_two_automorphisms(2):
        assert phi.inverse()(phi(word.letters)) == word.letters


def test_minimize_shortens_ab_to_a_letter(w):
    minimized, trace = whitehead_minimize(CyclicWord(w("a b")))
    assert len(minimized) == 1
    assert len(trace) == 1


def test_primitivity_paths(w):
    assert primitivity_verdict(w("a b^2")).path == "single_occurrence"
    assert primitivity_verdict(w("a^2 b^2")).path == "no_cut_vertex"
    assert primitivity_verdict(w("a^2")).path == "minimized_not_letter"
    assert primitivity_verdict(w("a b A B")).path == "no_cut_vertex"


def test_primitivity_ignores_conjugation(w):
    assert is_primitive(w("b a b^2 B"))
    assert not is_primitive(w("b a^2 b^2 B"))


def test_trivial_word_is_rejected(w):
    with pytest.raises(WordError):
        primitivity_verdict(w("a A"))


def test_simplicity_paths(w):
    assert simplicity_verdict(w("a^2")).path == "omitted_generator"
    assert simplicity_verdict(w("a^2 b^2")).path == "no_cut_vertex"
    assert is_simple(w("x1 x2 X1 X2", 3))
    assert not is_simple(w("a b A B"))


def test_simplicity_finds_hidden_free_factor(w):
    # x1^2 x2^2 after x1 -> x1 x3
    assert is_simple(w("x1 x3 x1 x3 x2^2", 3))


def test_simplicity_needs_rank_two():
    with pytest.raises(WordError):
        simplicity_verdict(Word((1, 1), 1))


@pytest.mark.parametrize("seed", range(12))
def test_nielsen_orbit_words_are_primitive(nielsen_primitive, seed):
    rank = 2 + seed % 2
    assert is_primitive(nielsen_primitive(rank, 6, seed))


@settings(max_examples=150, derandomize=True)
@given(letters2)
def test_verdicts_agree_across_orders_and_primitive_implies_simple(xs):
    core = cyclic_core(free_reduce(xs, 2).letters)
    assume(core)
    w = Word(core, 2)
    canonical = primitivity_verdict(w)
    assert canonical.holds == primitivity_verdict(w, order="reversed").holds
    if canonical.holds:
        assert is_simple(w)


@settings(max_examples=100, derandomize=True)
@given(letters2)
def test_primitivity_survives_adding_generators(xs):
    core = cyclic_core(free_reduce(xs, 2).letters)
    assume(core)
    assert is_primitive(Word(core, 2)) == is_primitive(Word(core, 3))


def _cyclic_classes(rank, max_len):
    letters = [x for g in range(1, rank + 1) for x in (g, -g)]
    classes = set()
    for n in range(1, max_len + 1):
        for seq in itertools.product(letters, repeat=n):
            if any(x == -y for x, y in zip(seq, seq[1:])):
                continue
            if n > 1 and seq[0] == -seq[-1]:
                continue
            classes.add(canonical_cyclic_form(seq))
    return classes


def _primitive_orbit(rank, max_len):
    """Conjugacy classes of length <= max_len in the Aut(F) orbit of a, by breadth-first search."""
    autos = list(type_two_automorphisms(rank)) + type_one_group(rank)
    start = canonical_cyclic_form((1,))
    seen = {start}
    queue = deque([start])
    while queue:
        current = queue.popleft()
        for phi in autos:
            image = canonical_cyclic_form(phi(current))
            if len(image) <= max_len and image not in seen:
                seen.add(image)
                queue.append(image)
    return seen


def test_primitivity_matches_the_orbit_of_a_up_to_length_eight():
    classes = _cyclic_classes(2, 8)
    orbit = _primitive_orbit(2, 8)
    assert orbit <= classes
    decided = {c for c in classes if is_primitive(Word(c, 2))}
    assert decided == orbit
    assert (1, 2) in orbit
    assert canonical_cyclic_form((1, 1, 2, 2)) not in orbit
    assert len(classes - orbit) > len(orbit)


automorphisms2 = st.sampled_from(whitehead_generators(2) + type_one_group(2))


@settings(max_examples=150, derandomize=True)
@given(letters2, automorphisms2)
def test_verdicts_are_invariant_under_automorphisms(xs, phi):
    core = cyclic_core(free_reduce(xs, 2).letters)
    assume(core)
    image = Word(phi(core), 2)
    w = Word(core, 2)
    assert is_primitive(image) == is_primitive(w)
    assert is_simple(image) == is_simple(w)
