"""Exact computations for hermitian forms over imaginary quadratic fields.

Representation densities at inert primes, their central derivatives, hermitian
lattice genera and the finite-place pieces of Eisenstein series Fourier
coefficients, all in exact rational arithmetic.
"""

from .quadfield import FieldContext, KElement, make_field
from .hermitian import HermitianMatrix

__all__ = ["FieldContext", "KElement", "HermitianMatrix", "make_field"]
__version__ = "0.1.0"
