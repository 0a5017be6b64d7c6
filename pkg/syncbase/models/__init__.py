"""Domain models for syncbase."""
