"""Floquet/monodromy spectra of the Bloch-Torrey operator on perforated planar domains."""
__version__ = "0.1.0"
