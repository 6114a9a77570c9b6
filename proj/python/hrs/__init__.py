"""Hybrid-representation load forecasting with scheduling-aware training."""

try:
    from ._hrs import *  # noqa: F401,F403
except ImportError:  # development tree: extension lives next to the package
    from _hrs import *  # noqa: F401,F403
