"""Reference neural adapter for the keyphrase pipeline's wire protocol."""

__version__ = "0.1.0"
