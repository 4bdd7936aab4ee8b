"""Governable orchestration engine for an AI-assisted doctoral supervision copilot."""

from .deployment import Deployment

__version__ = "0.1.0"

__all__ = ["Deployment", "__version__"]
