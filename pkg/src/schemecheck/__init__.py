"""Verification engine for finite rings, localizations, spectra, structure sheaves and schemes."""

__version__ = "0.1.0"
