"""Reference data files for syncbase."""
