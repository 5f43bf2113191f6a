"""Exact Hochschild and cyclic homology of finite-dimensional commutative Q-algebras."""

__version__ = "0.1.0"
