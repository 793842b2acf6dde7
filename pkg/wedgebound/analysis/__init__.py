"""Weak-locality computation and verification suites"""
