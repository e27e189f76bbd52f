import random

import pytest
from hypothesis import given, settings, strategies as st

from primindex.errors import RankMismatch, WordError
from primindex.services.words import (
    CyclicWord,
    Word,
    alphabet,
    apply_letter_map,
    canonical_cyclic_form,
    concat,
    cyclic_reduce,
    format_word,
    free_reduce,
    inverse_word,
    parse_word,
    power_word,
    random_word,
)

letters2 = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=30)


def test_alphabet_follows_a_A_b_B_order():
    assert alphabet(2) == (1, -1, 2, -2)
    assert alphabet(3)[-2:] == (3, -3)


def test_parse_letters_and_exponents():
    w = parse_word("a^3 b^3")
    assert w.letters == (1, 1, 1, 2, 2, 2)
    assert w.rank == 2


def test_parse_indexed_generators_sets_rank():
    w = parse_word("x1 X3^2")
    assert w.rank == 3
    assert w.letters == (1, -3, -3)
    assert format_word(w) == "x1 X3^2"


def test_parse_reduces_and_accepts_identity():
    assert parse_word("a A").is_trivial
    assert parse_word("1").is_trivial
    assert parse_word("a b^-1 b").letters == (1,)


def test_parse_rejects_bad_input():
    with pytest.raises(WordError):
        parse_word("a $")
    with pytest.raises(WordError):
        parse_word("x3", rank=2)


def test_format_compresses_runs():
    assert format_word(parse_word("a a a B B")) == "a^3 B^2"
    assert str(Word.identity(2)) == "1"
    assert str(power_word(2, 3)) == "a^2 b^3"


def test_word_must_be_reduced_and_in_range():
    with pytest.raises(WordError):
        Word((1, -1), 2)
    with pytest.raises(WordError):
        Word((3,), 2)
    with pytest.raises(WordError):
        free_reduce((0,), 2)


def test_concat_rejects_rank_mismatch():
    with pytest.raises(RankMismatch):
        concat(Word((1,), 2), Word((1,), 3))


def test_cyclic_reduce_returns_conjugator():
    rep, conj = cyclic_reduce(parse_word("b a^2 B"))
    assert rep.letters == (1, 1)
    assert conj.letters == (2,)


def test_cyclic_word_equality_is_up_to_rotation():
    u = CyclicWord(Word((1, 2, 2), 2))
    v = CyclicWord(Word((2, 1, 2), 2))
    assert u == v
    assert hash(u) == hash(v)
    with pytest.raises(WordError):
        CyclicWord(Word((1, 2, -1), 2))


def test_canonical_form_identifies_inverse():
    assert canonical_cyclic_form((2, 1)) == (1, 2)
    assert canonical_cyclic_form((-1, -2), with_inverse=True) == canonical_cyclic_form((2, 1), with_inverse=True)


def test_apply_letter_map():
    images = {1: parse_word("a b"), 2: parse_word("b")}
    assert apply_letter_map(parse_word("a B"), images).letters == (1,)
    with pytest.raises(RankMismatch):
        apply_letter_map(parse_word("a b"), {1: parse_word("a")})


def test_power_word_validates():
    with pytest.raises(WordError):
        power_word(0, 3)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_random_word_is_reduced_with_exact_length(seed):
    w = random_word(3, 25, random.Random(seed), cyclic=True)
    assert len(w) == 25
    assert w.letters[0] != -w.letters[-1]


@settings(max_examples=200, derandomize=True)
@given(letters2, letters2)
def test_group_laws(xs, ys):
    u, v = free_reduce(xs, 2), free_reduce(ys, 2)
    assert (u * v).inverse() == v.inverse() * u.inverse()
    assert (u * u.inverse()).is_trivial
    assert parse_word(format_word(u), 2) == u


@settings(max_examples=200, derandomize=True)
@given(letters2)
def test_cyclic_reduce_conjugates_back(xs):
    w = free_reduce(xs, 2)
    rep, conj = cyclic_reduce(w)
    assert conj * rep.representative * conj.inverse() == w


@settings(max_examples=200, derandomize=True)
@given(letters2)
def test_free_reduction_is_idempotent(xs):
    once = free_reduce(xs, 2)
    assert free_reduce(once.letters, 2) == once
    assert inverse_word(inverse_word(once)) == once
    assert (once * inverse_word(once)).is_trivial


@pytest.mark.parametrize(
    "letters,rank",
    [((1,), 3), ((2, -1), 3), ((3, 1, 1), 3), ((1, 2), 2), ((4, -2), 4)],
)
def test_formatted_words_parse_back_to_the_same_rank(letters, rank):
    word = Word(letters, rank)
    assert parse_word(format_word(word)) == word
    assert parse_word(format_word(word), rank) == word


def test_indexed_tokens_imply_rank_three():
    assert parse_word("x1").rank == 3
    assert parse_word("x1 x2", 2).rank == 2
    assert parse_word("a").rank == 2
    # higher unused generators are not recoverable from text alone
    assert parse_word(format_word(Word((1,), 5)), 5) == Word((1,), 5)
