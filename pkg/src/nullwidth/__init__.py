"""Exact combinatorial nullhomotopies for maps to the 2-sphere."""
