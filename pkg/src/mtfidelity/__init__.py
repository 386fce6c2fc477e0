"""Evaluate Chinese-to-English machine translations against expert references."""

__version__ = "0.1.0"
