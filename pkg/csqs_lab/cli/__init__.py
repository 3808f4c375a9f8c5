"""CLI commands for csqs-lab."""

from .main import app

__all__ = ["app"]
