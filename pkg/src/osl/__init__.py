"""Observer-situation lattice belief engine."""
