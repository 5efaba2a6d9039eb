"""Exact affine root systems of isoparametric submanifolds, with checks of the
homogeneous structure on symmetric-space models."""

__version__ = "0.1.0"
