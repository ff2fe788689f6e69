"""Weisfeiler-Leman expressivity tooling for SAT formulas and their graph encodings."""

__version__ = "0.1.0"
