"""Exact verification and search engine for curved Rota-Baxter systems."""

__version__ = "0.1.0"
