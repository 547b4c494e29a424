"""On-disk cache of graded-piece bases, keyed by the instance content hash."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

from . import __version__
from .algebra import CacheError, IndexedAlgebra

CACHE_FORMAT = "ncsym-cache"
CACHE_VERSION = 1


def cache_dir(explicit=None) -> Path:
    """``explicit`` > ``$NCSYM_CACHE`` > ``$XDG_CACHE_HOME/ncsym`` > ``~/.cache/ncsym``."""
    if explicit:
        return Path(explicit)
    env = os.environ.get("NCSYM_CACHE")
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or Path.home() / ".cache"
    return Path(base) / "ncsym"


def cache_path(content_hash: str, directory=None) -> Path:
    return cache_dir(directory) / f"{content_hash}.json"


def _checksum(pieces: dict) -> str:
    blob = json.dumps(pieces, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def load(S: IndexedAlgebra, content_hash: str, directory=None) -> str:
    """Restore cached pieces into ``S``.  Returns ``"hit"``, ``"miss"`` or
    ``"corrupt"``; a corrupt entry is removed and ``S`` is left untouched.

    Two guards: a checksum over the stored bases, and the re-verification
    of ``S_ii = D_i`` plus one rebuilt piece (which also catches a file
    whose checksum was recomputed over wrong data)."""
    path = cache_path(content_hash, directory)
    if not path.exists():
        return "miss"
    before = dict(S._pieces)
    try:
        data = json.loads(path.read_text())
        if data.get("format") != CACHE_FORMAT or data.get("version") != CACHE_VERSION:
            raise CacheError("version header mismatch")
        if data.get("hash") != content_hash:
            raise CacheError("hash mismatch")
        if data.get("checksum") != _checksum(data["pieces"]):
            raise CacheError("checksum mismatch")
        S.import_state(data["pieces"])
        if not S.recheck_after_load():
            raise CacheError("re-verification failed")
    except (OSError, ValueError, KeyError, TypeError, CacheError):
        S._pieces = before
        path.unlink(missing_ok=True)
        return "corrupt"
    return "hit"


def save(S: IndexedAlgebra, content_hash: str, directory=None) -> Path:
    path = cache_path(content_hash, directory)
    path.parent.mkdir(parents=True, exist_ok=True)
    pieces = S.export_state()
    data = {"format": CACHE_FORMAT, "version": CACHE_VERSION, "library": __version__,
            "hash": content_hash, "checksum": _checksum(pieces), "pieces": pieces}
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    with os.fdopen(fd, "w") as fh:
        json.dump(data, fh, sort_keys=True)
    os.replace(tmp, path)
    return path


def purge(directory=None) -> int:
    d = cache_dir(directory)
    if not d.exists():
        return 0
    count = 0
    for p in d.glob("*.json"):
        p.unlink()
        count += 1
    return count
