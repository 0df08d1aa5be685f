"""Exact completions of finite categories with weak finite limits."""

__version__ = "0.1.0"
