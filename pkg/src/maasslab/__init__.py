"""MaassLab - verification laboratory for the fourth moment of Hecke-Maass forms."""

__version__ = "0.1.0"
