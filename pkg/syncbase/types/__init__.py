"""Types for syncbase."""
