"""Quantum differential equations toolkit."""
