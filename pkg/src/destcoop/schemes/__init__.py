"""Achievable sum rates: the generic 28-row rate region with LD and Gaussian schemes."""

from .gauss import (
    GaussAchievable,
    GaussUserRates,
    Regime1GaussAllocation,
    Regime3GaussResult,
    gauss_achievable_sum,
    hk_noncoop_sum,
    printed_regime3_constraints,
    regime1_gauss_rates,
    regime3_gauss_sum,
)
from .ld import (
    LdAchievable,
    Regime1RateAllocation,
    Regime3Result,
    UserRates,
    extended_channel,
    ld_achievable_sum,
    ld_no_coop_sum,
    regime1_case,
    regime1_closed_form,
    regime1_ld_rates,
    regime3_ld_sum,
)
from .theorem3 import (
    GaussRegime3Instantiation,
    LdRegime3Instantiation,
    theorem3_constraints,
    theorem3_max_sum,
    theorem3_terms,
)

__all__ = [
    "GaussAchievable", "GaussUserRates", "Regime1GaussAllocation", "Regime3GaussResult",
    "gauss_achievable_sum", "hk_noncoop_sum", "printed_regime3_constraints",
    "regime1_gauss_rates", "regime3_gauss_sum",
    "LdAchievable", "Regime1RateAllocation", "Regime3Result", "UserRates",
    "extended_channel", "ld_achievable_sum", "ld_no_coop_sum", "regime1_case",
    "regime1_closed_form", "regime1_ld_rates", "regime3_ld_sum",
    "GaussRegime3Instantiation", "LdRegime3Instantiation",
    "theorem3_constraints", "theorem3_max_sum", "theorem3_terms",
]
