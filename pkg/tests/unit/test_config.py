import logging

import pytest

from primindex.config import get_settings
from primindex.logger import setup_logging


def test_defaults(tmp_path):
    settings = get_settings()
    assert settings.workers == 1
    assert settings.max_degree == 7
    assert settings.level_set_limit == 200_000
    assert not settings.parallel
    assert not settings.progress
    assert settings.output_dir == tmp_path / "certificates"


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("PRIMINDEX_WORKERS", "4")
    monkeypatch.setenv("PRIMINDEX_MAX_DEGREE", "9")
    get_settings.cache_clear()
    settings = get_settings()
    assert settings.parallel
    assert settings.max_degree == 9


@pytest.mark.parametrize("raw", ["many", "0"])
def test_invalid_integers_are_rejected(monkeypatch, raw):
    monkeypatch.setenv("PRIMINDEX_WORKERS", raw)
    get_settings.cache_clear()
    with pytest.raises(ValueError, match="PRIMINDEX_WORKERS"):
        get_settings()


def test_setup_logging_level():
    setup_logging("debug")
    assert logging.getLogger().level == logging.DEBUG
    setup_logging("WARNING")
    assert logging.getLogger().level == logging.WARNING
