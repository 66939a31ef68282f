"""Finite inverse semigroups, Boolean inverse semigroups and their type monoids."""

__version__ = "0.1.0"
