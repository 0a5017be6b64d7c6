"""Utility functions for syncbase."""
