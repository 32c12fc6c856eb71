"""Symbolic-numeric exterior calculus for confoliations and Lutz-type constructions."""
__version__ = "0.1.0"
