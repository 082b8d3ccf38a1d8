"""Magnetic geodesic flows on two-step nilpotent Lie groups."""
from .algebra import MetricTwoStepAlgebra, heisenberg, ht_algebra
from .geodesics import HeisGeodesic, heis_eval, integrate_numeric
from .magnetic import MagneticSystem, make_system
from .spectrum import FreeHomotopyClass, PeriodicFamily, length_set

__version__ = "0.1.0"
