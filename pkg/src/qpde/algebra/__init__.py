"""Exact scalar and coefficient arithmetic."""

from fractions import Fraction as BigRational

from .cyclo import Cyclo, cyclo_inverse, cyclo_reduce, cyclotomic_polynomial, euler_phi
from .laurent import LaurentPoly
from .ratcoeff import RatCoeff, exact_divide, poly_gcd, rat_delta_z, rat_normalize

__all__ = [
    "BigRational",
    "Cyclo",
    "LaurentPoly",
    "RatCoeff",
    "cyclo_inverse",
    "cyclo_reduce",
    "cyclotomic_polynomial",
    "euler_phi",
    "exact_divide",
    "poly_gcd",
    "rat_delta_z",
    "rat_normalize",
]
