"""File: __init__.py.

pindex - Maslov-type P-index toolkit for symmetric closed characteristics.

This package computes P-indices, iteration formulas, splitting numbers and
Floquet data of symplectic paths, and locates P-symmetric closed orbits on
convex hypersurfaces through the dual action functional.
"""

# Import version
from ._version import __version__ as __version__

# Define package metadata
__author__ = "Ben H Moore"
__email__ = "ben@benhmoore.com"
