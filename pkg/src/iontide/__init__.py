"""Simulation and error budgets for trapped-ion motion under fast potential switching."""

__version__ = "0.1.0"
