"""Test functions, quadrature rules and the truncated Fock space"""
