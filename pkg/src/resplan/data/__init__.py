"""Packaged fixtures: curated accident subset, reference tables, defaults."""
