"""Automata-based verification and learning of probabilistic bisimulations."""

__version__ = "0.1.0"
