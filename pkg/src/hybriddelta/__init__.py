"""Spectra and scattering of delta interactions supported on a point plus a
circle (2D) or a point plus a sphere (3D), and on slightly deformed circles
and spheres."""

__version__ = "0.1.0"
