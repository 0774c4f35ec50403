"""Exact and numerical verification of sharp CR and classical Sobolev inequalities on spheres."""

__version__ = "0.1.0"
