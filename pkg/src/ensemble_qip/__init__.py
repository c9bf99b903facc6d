"""Simulation of ensemble-qubit photonic gates, Rydberg blockade and protocols."""

__version__ = "0.1.0"
