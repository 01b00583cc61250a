"""Interval-valued logic programs over labeled networks: fixpoint models,
queries, and group-membership inference."""

__version__ = "0.1.0"
