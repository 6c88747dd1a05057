"""Numerical comparison geometry on rotationally symmetric manifolds.

Warped-product model spaces, integral radial curvature, volume and tube
bounds, isoperimetric and spectral estimates, and heat kernels, with
verifiers that evaluate both sides of each inequality.
"""
from .errors import RadcurvError, ConfigError, NumericError
from .funcspec import RadialFunction, make_radial, parse, radial_from_text
from .manifold import RotSymManifold
from .model import ModelSpace, solve_warp, space_form

__all__ = ["RadcurvError", "ConfigError", "NumericError", "RadialFunction", "make_radial", "parse",
           "radial_from_text", "RotSymManifold", "ModelSpace", "solve_warp", "space_form"]
__version__ = "0.1.0"
