"""Keyphrase-generation pipeline toolkit.

Deterministic machinery for keyphrase benchmarks: corpus IO, present/absent
splitting, shuffle augmentation, TF-IDF score fusion, F1@5/F1@M evaluation,
and a subprocess adapter protocol for plugging in neural generators.
"""

__version__ = "0.1.0"
