"""Bounds, achievable schemes and a bit-exact simulator for the two-user
interference channel with in-band destination cooperation."""

from .bounds import BoundSet, gaussian_bound_set, gaussian_primed_bound_set, ld_bound_set
from .channel import (
    GaussChannel,
    LdChannel,
    channel_from_json,
    channel_to_json,
    derive_levels,
    load_channel,
    normalize_gaussian,
)
from .schemes import gauss_achievable_sum, ld_achievable_sum

__version__ = "0.1.0"

__all__ = [
    "BoundSet", "gaussian_bound_set", "gaussian_primed_bound_set", "ld_bound_set",
    "GaussChannel", "LdChannel", "channel_from_json", "channel_to_json",
    "derive_levels", "load_channel", "normalize_gaussian",
    "gauss_achievable_sum", "ld_achievable_sum",
]
