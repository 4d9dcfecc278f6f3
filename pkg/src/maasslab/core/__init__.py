"""Numerical core: special functions, kernels, trace formulas and experiments."""
