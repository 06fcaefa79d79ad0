"""Synthetic bank-check dataset generation and detection evaluation."""

__version__ = "0.1.0"
