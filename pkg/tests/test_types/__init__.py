"""Tests for syncbase."""
