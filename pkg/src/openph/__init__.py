"""openph: quantum and classical mechanics experiments with analytic oracles."""

__version__ = "0.1.0"
