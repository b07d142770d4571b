"""HTTP facade over the simulator: pydantic models and the FastAPI app."""

from .app import app, create_app

__all__ = ["app", "create_app"]
