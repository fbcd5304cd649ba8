"""
CLI Module
Typer app and command handlers
"""

from .main import app, main

__all__ = ["app", "main"]
