"""Deterministic DSP primitives and channel impairments."""
