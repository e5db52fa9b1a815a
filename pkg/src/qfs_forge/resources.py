"""Vendored word lists and their pinned checksums.

The directory can be swapped with the ``QFS_FORGE_RESOURCES`` environment
variable; a list whose checksum differs from the pinned one is still loaded,
but a warning is logged because results are then no longer comparable.
"""

import hashlib
import logging
import os
from functools import lru_cache
from pathlib import Path

logger = logging.getLogger(__name__)

ENV_VAR = "QFS_FORGE_RESOURCES"
VENDORED_DIR = Path(__file__).parent / "data"

STOPWORDS_FILE = "smart_stopwords.txt"
ABBREVIATIONS_FILE = "abbreviations.txt"
PORTER_VECTORS_FILE = "porter_vectors.tsv"

# SMART common-word list as shipped in the ROUGE-1.5.5 data directory
STOPWORDS_SHA256 = "d8f6cc2db1084fc04b6269c3c6d20bfacbbb0832d2df3fefe76a9ddac350e766"


def resource_dir() -> Path:
    override = os.environ.get(ENV_VAR)
    return Path(override) if override else VENDORED_DIR


def resource_path(name: str) -> Path:
    path = resource_dir() / name
    if not path.exists():
        raise FileNotFoundError(f"resource file not found: {path}")
    return path


def sha256_of(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _read_lines(path: Path) -> list[str]:
    # the SMART list predates UTF-8; latin-1 decodes any byte sequence
    raw = path.read_bytes()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError:
        text = raw.decode("latin-1")
    out = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(line)
    return out


@lru_cache(maxsize=None)
def _stopwords(directory: str) -> frozenset:
    path = Path(directory) / STOPWORDS_FILE
    if not path.exists():
        raise FileNotFoundError(f"resource file not found: {path}")
    digest = sha256_of(path)
    if digest != STOPWORDS_SHA256:
        logger.warning("stopword list %s does not match the pinned checksum", path)
    words = set()
    for w in _read_lines(path):
        w = w.lower()
        words.add(w)
        # entries such as "e.g." must match tokens, which never end in a period
        words.add(w.rstrip("."))
    words.discard("")
    return frozenset(words)


def stopwords() -> frozenset:
    return _stopwords(str(resource_dir()))


@lru_cache(maxsize=None)
def _abbreviations(directory: str) -> frozenset:
    path = Path(directory) / ABBREVIATIONS_FILE
    if not path.exists():
        raise FileNotFoundError(f"resource file not found: {path}")
    return frozenset(w.lower().rstrip(".") for w in _read_lines(path))


def abbreviations() -> frozenset:
    return _abbreviations(str(resource_dir()))


def porter_vectors() -> list[tuple[str, str]]:
    """(word, expected stem) pairs used to pin the stemmer's behaviour."""
    pairs = []
    for line in _read_lines(resource_path(PORTER_VECTORS_FILE)):
        word, stem = line.split("\t")
        pairs.append((word, stem))
    return pairs
