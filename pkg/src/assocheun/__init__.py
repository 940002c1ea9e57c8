"""Heun and associated-Heun functions, their closed elliptic forms, and the
Stieltjes transform of the associated Stieltjes-Carlitz measure."""

from .closed_forms import FAMILIES, eval_family, get_family, limit_c0
from .config import RunConfig
from .elliptic import complete_K, jacobi, theta_of_w
from .heun_core import (AssocParams, HeunParams, Hn, assoc_coeffs, assoc_eval, heun,
                        heun_coeffs, heun_eval)
from .stieltjes import SCRates, cf_markov, stieltjes_S

__all__ = [
    "FAMILIES", "eval_family", "get_family", "limit_c0", "RunConfig", "complete_K", "jacobi",
    "theta_of_w", "AssocParams", "HeunParams", "Hn", "assoc_coeffs", "assoc_eval", "heun",
    "heun_coeffs", "heun_eval", "SCRates", "cf_markov", "stieltjes_S",
]
__version__ = "0.1.0"
