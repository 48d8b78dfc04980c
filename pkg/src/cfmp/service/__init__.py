"""HTTP service wrapping the core computations."""

from .app import app, create_app

__all__ = ["app", "create_app"]
