# src/notionport/__init__.py
"""Notional portfolios, alpha-normalized prices and linear returns."""

__version__ = "0.1.0"
