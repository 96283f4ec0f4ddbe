"""Seeded generators, the preservation checker and the named suites."""
