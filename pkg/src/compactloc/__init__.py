"""Compact localities and p-local compact groups at desk scale."""

__version__ = "0.1.0"
