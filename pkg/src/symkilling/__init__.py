"""Numerical verification of symmetric Killing 2-tensors on space forms and their metric cones."""
from . import young, multilinear, geometry, killing, cone, sasaki, gallot, invariants
from .geometry import FlatSpace, RoundSphere, ScaledSphere, TensorField

__version__ = "0.1.0"

__all__ = ["young", "multilinear", "geometry", "killing", "cone", "sasaki", "gallot", "invariants",
           "FlatSpace", "RoundSphere", "ScaledSphere", "TensorField"]
