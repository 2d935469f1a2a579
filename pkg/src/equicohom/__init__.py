"""Exact Bredon–Illman cohomology of finite G-simplicial sets with equivariant local coefficients."""

__version__ = "0.1.0"
