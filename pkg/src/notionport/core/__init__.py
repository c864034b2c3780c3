# src/notionport/core/__init__.py
"""Pure numerical core: calendars, price series, portfolios, returns, solver, statistics."""
