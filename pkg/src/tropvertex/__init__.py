"""Scattering diagrams, the tropical vertex group and tropical disk counts."""

__version__ = "0.1.0"
