"""
wedgebound - Z(N)-Ising S-matrix, bound-state operator and weak
wedge-locality verification on a truncated Fock space.
"""

__version__ = "1.0.0"
__author__ = "wedgebound developers"
