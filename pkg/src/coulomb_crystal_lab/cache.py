"""On-disk cache for ground-state results.

Finding ground states of long chains is expensive, so converged results are
stored as JSON keyed by (exponent, N, gradient tolerance, code version).  The
version tag invalidates entries across algorithmic changes, and differing
tolerances can never collide because the tolerance is part of the file name.
Corrupted entries are treated as misses and overwritten on the next store.
"""

import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import serialize
from .version import __version__

logger = logging.getLogger(__name__)

#: Environment variable that overrides the default cache directory.
CACHE_DIR_ENV = "COULOMB_CRYSTAL_LAB_CACHE"


def default_cache_dir() -> Path:
    """Cache directory from the environment, else the platform cache dir."""
    env = os.environ.get(CACHE_DIR_ENV)
    if env:
        return Path(env)
    if sys.platform == "win32":
        base = Path(os.environ.get("LOCALAPPDATA", Path.home() / "AppData" / "Local"))
    elif sys.platform == "darwin":
        base = Path.home() / "Library" / "Caches"
    else:
        base = Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache"))
    return base / "coulomb-crystal-lab"


@dataclass(frozen=True)
class CacheKey:
    exponent: int
    n_ions: int
    gradient_tolerance: float
    version: str

    @classmethod
    def for_ground_state(cls, exponent: int, n_ions: int, gradient_tolerance: float) -> "CacheKey":
        return cls(exponent, n_ions, float(gradient_tolerance), __version__)

    @property
    def filename(self) -> str:
        tol = serialize.format_float(self.gradient_tolerance)
        return f"gs-p{self.exponent}-n{self.n_ions}-tol{tol}-v{self.version}.json"


class ResultCache:
    """Directory-backed result store with atomic writes."""

    def __init__(self, directory=None):
        self.directory = Path(directory) if directory is not None else default_cache_dir()

    def path_for(self, key: CacheKey) -> Path:
        return self.directory / key.filename

    def lookup(self, key: CacheKey) -> Optional[dict]:
        """Stored payload for the key, or None on a miss.

        Unreadable or structurally invalid entries are logged and reported as
        misses; they get overwritten by the next store.
        """
        path = self.path_for(key)
        try:
            text = path.read_text(encoding="utf-8")
        except FileNotFoundError:
            return None
        except OSError as exc:
            logger.warning("cache entry %s unreadable (%s); treating as a miss", path, exc)
            return None
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            logger.warning("cache entry %s corrupted (%s); treating as a miss", path, exc)
            return None
        if not isinstance(payload, dict) or payload.get("schema_version") != serialize.SCHEMA_VERSION:
            logger.warning("cache entry %s has an unexpected schema; treating as a miss", path)
            return None
        return payload

    def store(self, key: CacheKey, payload: dict) -> Path:
        """Atomically write the payload; I/O errors propagate to the caller."""
        return serialize.atomic_write_text(self.path_for(key), serialize.canonical_json(payload))
