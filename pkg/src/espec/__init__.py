"""Entanglement spectrum of the SSH-Hubbard ring: free-fermion and exact
diagonalization engines, degeneracy analysis and phase sweeps."""

__version__ = "0.1.0"
