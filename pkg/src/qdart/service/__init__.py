"""HTTP service exposing ranking sessions, image assets and evolved grids."""

from .app import create_app

__all__ = ["create_app"]
