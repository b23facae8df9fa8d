"""Restricted alpha-partitions: exact counts, saddle points and the CLT of the length."""
from .core import AlphaParams, PrecisionExhaustedError, g_of_k, g_values, max_length

__version__ = "0.1.0"

__all__ = ["AlphaParams", "PrecisionExhaustedError", "__version__", "g_of_k", "g_values", "max_length"]
