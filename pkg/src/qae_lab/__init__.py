"""Dense density-matrix simulation of standard, noise-assisted, adiabatic and projected quantum autoencoders."""

__version__ = "0.1.0"
