"""Closed-form sum-capacity upper bounds.

``ld_bound_set`` is exact for the linear deterministic model (its minimum is
the sum capacity).  ``gaussian_bound_set`` gives the five Gaussian upper
bounds, and ``gaussian_primed_bound_set`` the level-domain surrogates used to
argue the constant gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .channel import GaussChannel, LdChannel, derive_levels

__all__ = ["PAIRINGS", "BoundSet", "ld_bound_set", "gaussian_bound_set", "gaussian_primed_bound_set"]

Number = Union[int, float]


@dataclass(frozen=True)
class BoundSet:
    u1: Number
    u2: Number
    u3: Number
    u4: Number
    u5: Number

    @property
    def values(self) -> tuple[Number, ...]:
        return (self.u1, self.u2, self.u3, self.u4, self.u5)

    @property
    def min_bound(self) -> Number:
        return min(self.values)

    @property
    def argmin(self) -> int:
        """1-based index of the smallest bound (first on ties)."""
        vals = self.values
        return vals.index(min(vals)) + 1

    def to_json(self) -> dict:
        return {"u": list(self.values), "min": self.min_bound}


def ld_bound_set(ch: LdChannel) -> BoundSet:
    n13, n23, n14, n24, nc = ch.levels()
    u1 = max(n13 - n14 + nc, n23, nc) + max(n24 - n23 + nc, n14, nc)
    u2 = max(n24, n23) + (max(n13, n23, nc) - n23)
    u3 = max(n13, n14) + (max(n24, n14, nc) - n14)
    u4 = max(n13, nc) + max(n24, nc)
    if n13 - n23 != n14 - n24:
        u5 = max(n13 + n24, n14 + n23)
    else:
        u5 = max(n13, n24, n14, n23)
    return BoundSet(u1, u2, u3, u4, u5)


def _log2p(x: float) -> float:
    return math.log2(1.0 + x)


def _u1_half(direct: float, cross: float, other_cross: float, gc: float) -> float:
    # One of the two terms of the first Gaussian bound; ``cross`` is the
    # link whose magnitude selects the branch.
    if cross > max(1.0, gc):
        r = direct / cross
        return _log2p((other_cross + gc + r * gc) ** 2 + r * r)
    return _log2p((other_cross + gc + direct) ** 2)


def gaussian_bound_set(ch: GaussChannel) -> BoundSet:
    g13, g23, g14, g24, gc = ch.gains()
    u1 = _u1_half(g13, g14, g23, gc) + _u1_half(g24, g23, g14, gc)
    u2 = _log2p((g13 + g23 + gc) ** 2) + _log2p(g24 ** 2 / max(1.0, g23 ** 2))
    u3 = _log2p((g24 + g14 + gc) ** 2) + _log2p(g13 ** 2 / max(1.0, g14 ** 2))
    u4 = _log2p((g13 + gc) ** 2) + _log2p((g24 + gc) ** 2)
    u5 = _log2p(2.0 * (g13 ** 2 + g24 ** 2 + g14 ** 2 + g23 ** 2)
                + 4.0 * _cross_term(g13, g24, g14, g23, ch.theta))
    return BoundSet(u1, u2, u3, u4, u5)


def _cross_term(g13, g24, g14, g23, theta) -> float:
    a = g13 * g24
    b = g14 * g23
    # a^2 + b^2 - 2ab cos(theta) >= (a - b)^2 >= 0; clamp rounding below zero.
    return max(0.0, a * a + b * b - 2.0 * a * b * math.cos(theta))


PAIRINGS = ("printed", "canonical")


def gaussian_primed_bound_set(ch: GaussChannel, pairing: str = "printed") -> BoundSet:
    """Level-domain surrogates u'1..u'4 and the coefficient-one u'5.

    With ``pairing="printed"``, u'2 and u'3 pair the links as
    ``max(n13, n23) + max(n24, n23, nC) - n23`` (and its mirror).
    ``pairing="canonical"`` uses the pairing of :func:`ld_bound_set`
    instead, which is the one that tracks u2 and u3 within a constant.
    """
    if pairing not in PAIRINGS:
        raise ValueError(f"pairing must be one of {PAIRINGS}, got {pairing!r}")
    lv = derive_levels(ch)
    n13, n23, n14, n24, nc = lv["13"], lv["23"], lv["14"], lv["24"], lv["C"]
    u1 = max(n13 - n14 + nc, n23, nc) + max(n24 - n23 + nc, n14, nc)
    if pairing == "printed":
        u2 = max(n13, n23) + (max(n24, n23, nc) - n23)
        u3 = max(n24, n14) + (max(n13, n14, nc) - n14)
    else:
        u2 = max(n24, n23) + (max(n13, n23, nc) - n23)
        u3 = max(n13, n14) + (max(n24, n14, nc) - n14)
    u4 = max(n13, nc) + max(n24, nc)
    g13, g23, g14, g24, _ = ch.gains()
    u5 = _log2p(g13 ** 2 + g24 ** 2 + g14 ** 2 + g23 ** 2
                + _cross_term(g13, g24, g14, g23, ch.theta))
    return BoundSet(u1, u2, u3, u4, u5)
