"""Fractional Orlicz-Sobolev numerics: Young functions, nonlocal modulars,
the fractional g-Laplacian with Dirichlet/Neumann/regional/Robin structure,
constrained eigen-minimization and a three-solution explorer."""

__version__ = "0.1.0"
