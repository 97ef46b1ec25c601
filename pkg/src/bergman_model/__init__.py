"""Symbolic kernel calculus for the model operator of Bergman kernel asymptotics."""

from .scalar import ExactScalar
from .tensor import Poly, delta, tensor, var

__all__ = ["ExactScalar", "Poly", "delta", "tensor", "var"]
