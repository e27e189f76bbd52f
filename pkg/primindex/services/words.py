# primindex/services/words.py
"""
Words in a free group F_N of finite rank.

A letter is a signed integer: +i is the generator a_i, -i its inverse (Tietze form).
Words are immutable flat tuples of letters, always freely reduced. The raw-tuple helpers
(`reduce_letters`, `cyclic_core`, `invert_letters`) are what the search loops call; the
`Word` / `CyclicWord` value types wrap them with validation for everything else.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Tuple

from primindex.errors import RankMismatch, WordError

Letters = Tuple[int, ...]


def letter_key(letter: int) -> int:
    """Position of a letter in the order a < A < b < B < ..."""
    return 2 * (abs(letter) - 1) + (1 if letter < 0 else 0)


def letter_from_key(key: int) -> int:
    gen = key // 2 + 1
    return -gen if key % 2 else gen


def alphabet(rank: int) -> Letters:
    return tuple(letter_from_key(k) for k in range(2 * rank))


# -------------------- Raw tuple helpers --------------------
def reduce_letters(seq: Iterable[int]) -> Letters:
    out: list = []
    for x in seq:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def invert_letters(seq: Sequence[int]) -> Letters:
    return tuple(-x for x in reversed(seq))


def cyclic_split(seq: Sequence[int]) -> Tuple[Letters, Letters]:
    """Split a freely reduced sequence into (conjugator, cyclically reduced core)."""
    n = len(seq)
    i = 0
    while n - 2 * i >= 2 and seq[i] == -seq[n - 1 - i]:
        i += 1
    return tuple(seq[:i]), tuple(seq[i:n - i])


def cyclic_core(seq: Sequence[int]) -> Letters:
    return cyclic_split(seq)[1]


def least_rotation(seq: Sequence[int]) -> Letters:
    if not seq:
        return ()
    seq = tuple(seq)
    return min((seq[i:] + seq[:i] for i in range(len(seq))), key=lambda r: [letter_key(x) for x in r])


def canonical_cyclic_form(seq: Sequence[int], with_inverse: bool = False) -> Letters:
    """Lexicographically least rotation; with_inverse also identifies w with w^-1."""
    core = cyclic_core(reduce_letters(seq))
    best = least_rotation(core)
    if with_inverse:
        other = least_rotation(invert_letters(core))
        if [letter_key(x) for x in other] < [letter_key(x) for x in best]:
            best = other
    return best


def generators_used(seq: Iterable[int]) -> frozenset:
    return frozenset(abs(x) for x in seq)


def occurrences(seq: Iterable[int], generator: int) -> int:
    return sum(1 for x in seq if abs(x) == generator)


# -------------------- Value types --------------------
@dataclass(frozen=True)
class Word:
    letters: Letters
    rank: int

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(self.letters))
        _check_range(self.letters, self.rank)
        for left, right in zip(self.letters, self.letters[1:]):
            if left == -right:
                raise WordError(f"word is not freely reduced: {self.letters}")

    @classmethod
    def identity(cls, rank: int) -> "Word":
        return cls((), rank)

    @classmethod
    def generator(cls, index: int, rank: int) -> "Word":
        return cls((index,), rank)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __str__(self) -> str:
        return format_word(self)

    def __mul__(self, other: "Word") -> "Word":
        return concat(self, other)

    def __pow__(self, exponent: int) -> "Word":
        base = self if exponent >= 0 else self.inverse()
        return Word(reduce_letters(base.letters * abs(exponent)), self.rank)

    @property
    def is_trivial(self) -> bool:
        return not self.letters

    def inverse(self) -> "Word":
        return Word(invert_letters(self.letters), self.rank)


@dataclass(frozen=True, eq=False)
class CyclicWord:
    """A cyclically reduced word; equality is up to rotation."""

    representative: Word
    canonical: Letters = field(init=False, repr=False)

    def __post_init__(self):
        seq = self.representative.letters
        if len(seq) >= 2 and seq[0] == -seq[-1]:
            raise WordError(f"word is not cyclically reduced: {seq}")
        object.__setattr__(self, "canonical", least_rotation(seq))

    @property
    def rank(self) -> int:
        return self.representative.rank

    @property
    def letters(self) -> Letters:
        return self.representative.letters

    def __len__(self) -> int:
        return len(self.representative)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CyclicWord):
            return NotImplemented
        return self.rank == other.rank and self.canonical == other.canonical

    def __hash__(self) -> int:
        return hash((self.rank, self.canonical))

    def __str__(self) -> str:
        return format_word(self.representative)


def _check_range(seq: Sequence[int], rank: int) -> None:
    if rank < 1:
        raise WordError(f"rank must be >= 1, got {rank}")
    for x in seq:
        if x == 0 or abs(x) > rank:
            raise WordError(f"generator index {x} out of range for rank {rank}")


# -------------------- Operations --------------------
def free_reduce(raw: Iterable[int], rank: int) -> Word:
    raw = tuple(raw)
    _check_range(raw, rank)
    return Word(reduce_letters(raw), rank)


def concat(u: Word, v: Word) -> Word:
    if u.rank != v.rank:
        raise RankMismatch(f"cannot concatenate words of rank {u.rank} and {v.rank}")
    return Word(reduce_letters(u.letters + v.letters), u.rank)


def inverse_word(w: Word) -> Word:
    return w.inverse()


def cyclic_reduce(w: Word) -> Tuple[CyclicWord, Word]:
    """
    Return (representative, conjugator) with w = conjugator . representative . conjugator^-1.
    The empty word maps to the empty cyclic word with an empty conjugator.
    """
    conjugator, core = cyclic_split(w.letters)
    return CyclicWord(Word(core, w.rank)), Word(conjugator, w.rank)


def power_word(n: int, t: int, rank: int = 2) -> Word:
    """a^n b^t."""
    if n < 1 or t < 1:
        raise WordError(f"exponents must be >= 1, got n={n}, t={t}")
    if rank < 2:
        raise WordError("a^n b^t needs rank >= 2")
    return Word((1,) * n + (2,) * t, rank)


def apply_letter_map(w: Word, images: Mapping[int, Word]) -> Word:
    """
    Homomorphic image of w. `images` is keyed by positive generator index 1..rank(w);
    inverses are mapped to inverse images. The result has the common rank of the images.
    """
    if not images:
        raise RankMismatch("empty letter map")
    missing = [g for g in range(1, w.rank + 1) if g not in images]
    if missing:
        raise RankMismatch(f"letter map has no image for generators {missing}")
    target_ranks = {img.rank for img in images.values()}
    if len(target_ranks) != 1:
        raise RankMismatch(f"images live in different ranks: {sorted(target_ranks)}")
    (target_rank,) = target_ranks
    table = {}
    for g, img in images.items():
        table[g] = img.letters
        table[-g] = invert_letters(img.letters)
    out: list = []
    for x in w.letters:
        for y in table[x]:
            if out and out[-1] == -y:
                out.pop()
            else:
                out.append(y)
    return Word(tuple(out), target_rank)


def random_word(rank: int, length: int, rng: Optional[random.Random] = None, cyclic: bool = False) -> Word:
    """Uniform-ish random freely reduced word of exactly `length` letters."""
    rng = rng or random.Random()
    letters = alphabet(rank)
    while True:
        out: list = []
        while len(out) < length:
            x = rng.choice(letters)
            if out and out[-1] == -x:
                continue
            out.append(x)
        if not cyclic or length < 2 or out[0] != -out[-1]:
            return Word(tuple(out), rank)


# -------------------- Text format --------------------
_TOKEN = re.compile(r"\s*(?:([xX])(\d+)|([a-zA-Z]))(?:\^(-?\d+))?\s*")


def parse_word(text: str, rank: Optional[int] = None) -> Word:
    """
    Parse `a`, `A`, `b`, `B` ... (capital = inverse) or `x1`, `X1`, ... tokens with optional
    `^n` exponents. "1" or an empty string is the identity. The result is freely reduced.

    Without an explicit rank the rank is the largest index seen, at least 2; indexed tokens
    only appear in formatted words of rank >= 3, so they raise the floor to 3.
    """
    if not isinstance(text, str):
        raise WordError("word text must be a string")
    stripped = text.strip()
    raw: list = []
    indexed = False
    if stripped not in ("", "1"):
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise WordError(f"cannot parse word {text!r} at position {pos}")
            pos = m.end()
            if m.group(1):
                indexed = True
                index = int(m.group(2))
                if index < 1:
                    raise WordError(f"generator index must be >= 1 in {text!r}")
                letter = index if m.group(1) == "x" else -index
            else:
                ch = m.group(3)
                letter = ord(ch.lower()) - ord("a") + 1
                if ch.isupper():
                    letter = -letter
            exponent = int(m.group(4)) if m.group(4) is not None else 1
            if exponent < 0:
                letter, exponent = -letter, -exponent
            raw.extend([letter] * exponent)
    top = max((abs(x) for x in raw), default=0)
    if rank is None:
        rank = max(3 if indexed else 2, top)
    elif top > rank:
        raise WordError(f"generator index {top} out of range for rank {rank}")
    return free_reduce(raw, rank)


def letter_token(letter: int, rank: int) -> str:
    if rank <= 2:
        ch = chr(ord("a") + abs(letter) - 1)
        return ch.upper() if letter < 0 else ch
    return f"{'X' if letter < 0 else 'x'}{abs(letter)}"


def format_word(w: Word) -> str:
    if not w.letters:
        return "1"
    parts = []
    run_letter, run = w.letters[0], 0
    for x in w.letters + (0,):
        if x == run_letter:
            run += 1
            continue
        tok = letter_token(run_letter, w.rank)
        parts.append(tok if run == 1 else f"{tok}^{run}")
        run_letter, run = x, 1
    return " ".join(parts)
