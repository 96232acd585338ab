"""Exact inference and proof explanation for logic programs with annotated

disjunctions: parsing, grounding, a choice-expression algebra, a resolution
engine whose proofs carry choice expressions, exact probability computation,
a program transform onto bodiless choice clauses, and human-readable
explanation rendering.
"""

__version__ = "0.1.0"
