"""
Semiclassical Gaussian wave packet dynamics in the reduced (Heller) and
Hagedorn parametrizations, with structure-preserving integrators and
conservation checks.
"""

from .constants import VERSION

__version__ = VERSION
