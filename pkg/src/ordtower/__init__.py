"""Exact verification workbench for ordinary parts of modular-curve towers."""

__version__ = "0.1.0"
