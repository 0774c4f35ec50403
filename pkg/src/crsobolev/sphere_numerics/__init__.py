"""Quadrature, automorphisms, numerical expansions and Sobolev quotients on spheres."""
from .grids import QuadratureGrid, UnsupportedGridError, build_grid, certify_grid, load_grid, save_grid
from .maps import (
    AutomorphismParams,
    BalanceError,
    apply_automorphism,
    balance,
    pushed_moments,
    boost,
    cayley,
    dilation,
)
from .expansion import numeric_expand, parseval_energy, synthesize
from .sobolev import (
    ExtremalFunction,
    extremal_eval,
    sharp_constant_classical,
    sharp_constant_cr,
    sobolev_quotient_classical,
    sobolev_quotient_cr,
)
from .checks import verify_dilation_derivative, verify_intertwining

__all__ = [
    "QuadratureGrid", "UnsupportedGridError", "build_grid", "certify_grid", "load_grid", "save_grid",
    "AutomorphismParams", "BalanceError", "apply_automorphism", "balance", "pushed_moments", "boost", "cayley", "dilation",
    "numeric_expand", "parseval_energy", "synthesize",
    "ExtremalFunction", "extremal_eval", "sharp_constant_classical", "sharp_constant_cr",
    "sobolev_quotient_classical", "sobolev_quotient_cr",
    "verify_dilation_derivative", "verify_intertwining",
]
