"""Coefficient rings, truncated series, text formats and linear algebra mod N."""
