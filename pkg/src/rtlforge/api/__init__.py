"""HTTP service layer."""

from rtlforge.api.app import app, create_app

__all__ = ["app", "create_app"]
