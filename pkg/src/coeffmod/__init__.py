"""coeffmod: exact computation of coefficient-module chains.

Computes, for a finitely generated submodule M of a free module over a
localized polynomial ring, the chain of largest submodules between M and its
relative integral closure whose relative length polynomials drop in degree,
the analogous chain between I(M)*M and M for the Fitting ideal I(M), and the
supporting closures, reductions and certified polynomial fits.
"""

__version__ = "0.1.0"

from .chains import (
    coefficient_chain,
    coefficient_module,
    graded_chain,
    graded_coefficient_module,
    maximality_probe,
)
from .graded import ModulePresentation
from .linalg import QQ, PrimeField, field_from_name
from .modops import (
    analytic_spread,
    fitting_ideal,
    is_reduction,
    minimal_reduction,
    monomial_integral_closure,
    ratliff_rush,
    relative_closure,
    saturate,
)
from .poly import Monomial, PolyElement, RingDescriptor, parse_poly

__all__ = [
    "QQ",
    "PrimeField",
    "field_from_name",
    "Monomial",
    "PolyElement",
    "RingDescriptor",
    "parse_poly",
    "ModulePresentation",
    "analytic_spread",
    "coefficient_chain",
    "coefficient_module",
    "fitting_ideal",
    "graded_chain",
    "graded_coefficient_module",
    "is_reduction",
    "maximality_probe",
    "minimal_reduction",
    "monomial_integral_closure",
    "ratliff_rush",
    "relative_closure",
    "saturate",
    "__version__",
]
