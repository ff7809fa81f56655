"""Inference on spike strengths in spiked random-matrix models."""

__version__ = "0.1.0"
