import math
import random

import pytest
from click.testing import CliRunner

from primindex.config import get_settings
from primindex.services.words import Word, parse_word


@pytest.fixture(autouse=True)
def quiet_settings(monkeypatch, tmp_path):
    """No progress bars, certificates under tmp_path, fresh settings for every test."""
    monkeypatch.setenv("PRIMINDEX_PROGRESS", "false")
    monkeypatch.setenv("PRIMINDEX_OUTPUT_DIR", str(tmp_path / "certificates"))
    monkeypatch.delenv("PRIMINDEX_WORKERS", raising=False)
    monkeypatch.delenv("PRIMINDEX_MAX_DEGREE", raising=False)
    monkeypatch.delenv("PRIMINDEX_LEVEL_SET_LIMIT", raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def runner():
    """click test runner with stderr kept apart from stdout."""
    try:
        return CliRunner(mix_stderr=False)
    except TypeError:
        return CliRunner()


@pytest.fixture
def w():
    """Shorthand parser: w("a^2 B") in F_2."""
    return lambda text, rank=2: parse_word(text, rank)


def hall_oracle(rank: int, degree: int) -> int:
    """Independent evaluation of Hall's recursion, written bottom-up."""
    a = [0]
    for n in range(1, degree + 1):
        total = n * math.factorial(n) ** (rank - 1)
        total -= sum(math.factorial(n - k) ** (rank - 1) * a[k] for k in range(1, n))
        a.append(total)
    return a[degree]


def nielsen_orbit_primitive(rank: int, steps: int, seed: int) -> Word:
    """
    A primitive word built by random elementary Nielsen transformations of the standard
    basis, then read off as the first basis element.
    """
    rng = random.Random(seed)
    basis = [Word.generator(g, rank) for g in range(1, rank + 1)]
    for _ in range(steps):
        i, j = rng.sample(range(rank), 2)
        other = basis[j] if rng.random() < 0.5 else basis[j].inverse()
        basis[i] = basis[i] * other if rng.random() < 0.5 else other * basis[i]
    return basis[0]


@pytest.fixture
def hall():
    return hall_oracle


@pytest.fixture
def nielsen_primitive():
    return nielsen_orbit_primitive
