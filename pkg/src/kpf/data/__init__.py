"""Bundled synthetic data."""

from importlib.resources import files
from pathlib import Path


def mini_corpus_path() -> Path:
    """Path of the bundled 50-document synthetic mini corpus."""
    return Path(str(files(__package__) / "mini.jsonl"))
