import os
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from dotenv import load_dotenv


BASE_DIR = Path(__file__).resolve().parent.parent
ENV_PATH = BASE_DIR / "primindex.env"

# Load the env file once in a central place so settings do not depend on import order.
load_dotenv(dotenv_path=ENV_PATH)


def _int_env(name: str, default: int, minimum: int = 1) -> int:
    raw = (os.getenv(name) or "").strip()
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return value


@dataclass(frozen=True)
class Settings:
    workers: int
    max_degree: int
    level_set_limit: int
    output_dir: Path
    progress: bool

    @property
    def parallel(self) -> bool:
        return self.workers > 1


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings(
        workers=_int_env("PRIMINDEX_WORKERS", 1),
        max_degree=_int_env("PRIMINDEX_MAX_DEGREE", 7),
        level_set_limit=_int_env("PRIMINDEX_LEVEL_SET_LIMIT", 200_000),
        output_dir=Path((os.getenv("PRIMINDEX_OUTPUT_DIR") or "certificates").strip()),
        progress=(os.getenv("PRIMINDEX_PROGRESS", "true").lower() in {"1", "true", "yes"}),
    )
