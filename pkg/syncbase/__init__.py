"""A type-safe Python workbench for learned and expert synchronization estimators."""

__version__ = "0.1.0"
