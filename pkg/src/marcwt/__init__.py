"""Secrecy rate regions of the multiple-access relay wiretap channel."""
from .core_it import ConditionalPmf, JointPmf, compose, cond_mutual_info, entropy, marginalize
from .gauss_it import GaussianScenario, assemble_covariance, gaussian_cond_mi
from .geometry import RatePentagon, RateRegion, area, contains, hull_union, pentagon_vertices, support
from .regions_dm import DmFactorization
from .regions_gauss import (
    baseline_region,
    cf_region,
    df_pentagon,
    df_region,
    evaluate,
    nf_region,
    outer_pentagon,
    outer_region,
)

__version__ = "0.1.0"

__all__ = [
    "ConditionalPmf",
    "DmFactorization",
    "GaussianScenario",
    "JointPmf",
    "RatePentagon",
    "RateRegion",
    "area",
    "assemble_covariance",
    "baseline_region",
    "cf_region",
    "compose",
    "cond_mutual_info",
    "contains",
    "df_pentagon",
    "df_region",
    "entropy",
    "evaluate",
    "gaussian_cond_mi",
    "hull_union",
    "marginalize",
    "nf_region",
    "outer_pentagon",
    "outer_region",
    "pentagon_vertices",
    "support",
]
