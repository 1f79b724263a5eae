"""Simulation and compilation tools for counterfactual universal quantum computation."""
__version__ = "0.1.0"
