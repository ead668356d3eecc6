"""HTTP service exposing the computation pipeline.

The CLI talks to this app in-process by default; `python3 -m
kthodge.service` serves it over the network.
"""

from .app import app, create_app

__all__ = ["app", "create_app"]
