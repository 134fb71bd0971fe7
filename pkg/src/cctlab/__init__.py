"""Exact computations for subdivided diagrams of algebras and cohomology comparison."""

__version__ = "0.1.0"
