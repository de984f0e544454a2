"""Viscous contact / rarefaction composite waves for 1D compressible Navier-Stokes."""

__version__ = "0.1.0"
