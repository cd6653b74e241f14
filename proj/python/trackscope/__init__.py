"""Third-party tracking census toolkit."""

from __future__ import annotations

import json
import os
from pathlib import Path

from ._trackscope import (
    Lexicon,
    OwnershipDb,
    Ruleset,
    TrackscopeError,
    categorize_tld,
    classify_party,
    detect_sensitive,
    extension_class,
    normalize_page_uri,
    normalize_text,
    sample_indices,
    strip_arguments,
)
from . import _trackscope

__all__ = [
    "Lexicon",
    "OwnershipDb",
    "Ruleset",
    "TrackscopeError",
    "categorize_tld",
    "classify_party",
    "data_dir",
    "default_lexicon",
    "default_ownership_db",
    "default_ruleset",
    "describe_config",
    "detect_sensitive",
    "extension_class",
    "normalize_page_uri",
    "normalize_text",
    "run_pipeline",
    "sample_indices",
    "strip_arguments",
    "summarize_hars",
    "write_fixture_corpus",
]


def data_dir() -> Path:
    """Directory holding the bundled ruleset, ownership db and lexicon."""
    override = os.environ.get("TRACKSCOPE_DATA_DIR")
    if override:
        return Path(override)
    return Path(__file__).resolve().parent / "data"


def default_ruleset() -> Ruleset:
    return Ruleset.load(str(data_dir() / "public_suffix_list.dat"))


def default_ownership_db() -> OwnershipDb:
    return OwnershipDb.load(str(data_dir() / "owners.txt"))


def default_lexicon() -> Lexicon:
    return Lexicon.load(str(data_dir() / "lexicon.txt"))


def _settings(settings: dict | None) -> dict[str, str]:
    return {key: str(value) for key, value in (settings or {}).items()}


def summarize_hars(har_paths, ruleset=None, ownership_db=None, top_n: int = 100) -> dict:
    """Census summary of HAR files, as the parsed summary document."""
    document = _trackscope.summarize_hars(
        [str(p) for p in har_paths],
        ruleset or default_ruleset(),
        ownership_db or default_ownership_db(),
        top_n,
    )
    return json.loads(document)


def write_fixture_corpus(directory, pages_per_file: int = 100) -> dict:
    return _trackscope.write_fixture_corpus(str(directory), pages_per_file)


def describe_config(settings: dict | None = None) -> str:
    return _trackscope.describe_config(str(data_dir()), _settings(settings))


def run_pipeline(stages, settings: dict | None = None) -> dict:
    """Runs pipeline stages ("pagelist", "scan", "analyze", "report", "leakage")."""
    return _trackscope.run_pipeline(list(stages), str(data_dir()), _settings(settings))
