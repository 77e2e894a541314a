"""Provides the three-level algebra and the error model."""
