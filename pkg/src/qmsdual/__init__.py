"""Generators of quantum Markov semigroups: duals, privileged representations, detailed balance."""
__version__ = "0.1.0"
