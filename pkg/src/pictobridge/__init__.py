"""Pictogram communication board gateway for a simulated robot."""

__version__ = "0.1.0"
