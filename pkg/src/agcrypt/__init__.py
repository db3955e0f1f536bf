"""Automaton-group cryptography toolkit.

Invertible Mealy transducers acting on rooted trees, exact word-problem
decision, relator rewriting, and the conjugacy-based key-exchange
protocols built on top of them.
"""

__version__ = "0.1.0"
