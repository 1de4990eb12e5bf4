"""Achievable sum rates for the linear deterministic model."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from ..bounds import ld_bound_set
from ..channel import LdChannel
from .theorem3 import LdRegime3Instantiation, theorem3_max_sum

__all__ = [
    "UserRates",
    "Regime1RateAllocation",
    "regime1_case",
    "regime1_ld_rates",
    "regime1_closed_form",
    "Regime3Result",
    "regime3_ld_sum",
    "ld_no_coop_sum",
    "LdAchievable",
    "ld_achievable_sum",
    "extended_channel",
]


def _pos(x: int) -> int:
    return x if x > 0 else 0


@dataclass(frozen=True)
class UserRates:
    r_U: int = 0
    r_S: int = 0
    r_Zup: int = 0
    r_Zdn: int = 0

    @property
    def total(self) -> int:
        return self.r_U + self.r_S + self.r_Zup + self.r_Zdn


@dataclass(frozen=True)
class Regime1RateAllocation:
    """Rates of the block-Markov nulling scheme for one channel.

    ``case`` is ``"a"`` (both users null), ``"b1"`` (user 1 nulls, user 2
    sends public plus low private), ``"b2"`` (mirror of ``"b1"``) or
    ``"no-coop"``.  Filter exponents follow the convention that
    ``A1 = S**a1``, ``A2 = S**a2``, ``A3 = -S**(-a3)``, ``A4 = -S**(-a4)``;
    ``None`` marks a filter that is not used (the zero matrix).
    """

    channel: LdChannel
    case: str
    user1: UserRates
    user2: UserRates
    a1: Optional[int] = None
    a2: Optional[int] = None
    a3: Optional[int] = None
    a4: Optional[int] = None
    sum: int = 0

    def rates_json(self) -> dict:
        out = {}
        for k, u in ((1, self.user1), (2, self.user2)):
            out.update({f"r_U{k}": u.r_U, f"r_S{k}": u.r_S,
                        f"r_Zup{k}": u.r_Zup, f"r_Zdn{k}": u.r_Zdn})
        return out


def regime1_case(ch: LdChannel) -> str:
    if ch.nC > ch.n_min:
        raise ValueError("not regime (i)")
    cross = ch.n14 + ch.n23
    c1 = cross < ch.n13 + ch.nC
    c2 = cross < ch.n24 + ch.nC
    if c1 and c2:
        return "a"
    if c1:
        return "b1"
    if c2:
        return "b2"
    return "no-coop"


def _nulling_user(n13: int, n14: int, n23: int, nc: int) -> UserRates:
    # Rates of a user running the nulling scheme (case (a) and the
    # cooperating user of case (b)).
    d = n13 - n14
    return UserRates(
        r_U=_pos(min(n14 - nc, nc)),
        r_S=_pos(nc - _pos(n23 - d)),
        r_Zup=_pos(d - n23),
        r_Zdn=_pos(n23 - nc),
    )


def _case_b_public(ch: LdChannel) -> tuple[int, int]:
    """Integer (r_U1, r_U2) maximizing r_U1 + r_U2 under the case-(b) limits."""
    n13, n23, n14, n24, nc = ch.levels()
    hi1 = _pos(min(n14 - nc, n14 - _pos(n24 - n23)))
    hi2 = _pos(min(nc, n23, n24))
    joint = _pos(max(n24, n14) - _pos(n24 - n23))
    r1 = min(hi1, joint)
    r2 = min(hi2, joint - r1)
    return r1, r2


def regime1_ld_rates(ch: LdChannel) -> Regime1RateAllocation:
    case = regime1_case(ch)
    n13, n23, n14, n24, nc, n = ch.n13, ch.n23, ch.n14, ch.n24, ch.nC, ch.n
    if case == "no-coop":
        s = ld_no_coop_sum(ch)
        return Regime1RateAllocation(ch, case, UserRates(), UserRates(), sum=s)
    if case == "b2":
        m = regime1_ld_rates(ch.mirrored())
        return Regime1RateAllocation(ch, "b2", m.user2, m.user1, a1=m.a2, a2=m.a1,
                                     a3=m.a4, a4=m.a3, sum=m.sum)
    u1 = _nulling_user(n13, n14, n23, nc)
    a1 = n13 + nc - n14 - n23
    a3 = n - n23
    if case == "a":
        u2 = _nulling_user(n24, n23, n14, nc)
        alloc = Regime1RateAllocation(ch, "a", u1, u2, a1=a1, a2=n24 + nc - n14 - n23,
                                      a3=a3, a4=n - n14, sum=u1.total + u2.total)
        return alloc
    r1, r2 = _case_b_public(ch)
    u1 = UserRates(r_U=r1, r_S=u1.r_S, r_Zup=u1.r_Zup, r_Zdn=u1.r_Zdn)
    u2 = UserRates(r_U=r2, r_Zdn=_pos(n24 - n23))
    return Regime1RateAllocation(ch, "b1", u1, u2, a1=a1, a3=a3,
                                 sum=u1.total + u2.total)


def regime1_closed_form(ch: LdChannel) -> int:
    """Closed-form sum of :func:`regime1_ld_rates` for cases (a) and (b)."""
    case = regime1_case(ch)
    n13, n23, n14, n24, nc = ch.levels()
    if case == "a":
        return min(n13 - n14 + nc, n13 - nc) + min(n24 - n23 + nc, n24 - nc)
    if case == "b1":
        return min(n13 + _pos(n24 - n23), n13 - n14 + max(n14, n24), n13 + nc)
    if case == "b2":
        return regime1_closed_form(ch.mirrored())
    return ld_no_coop_sum(ch)


def ld_no_coop_sum(ch: LdChannel) -> int:
    """Sum capacity with the cooperation link removed."""
    return ld_bound_set(ch.with_nc(0)).min_bound


@dataclass(frozen=True)
class Regime3Result:
    sum: Fraction
    closed_form: int


def regime3_ld_sum(ch: LdChannel) -> Regime3Result:
    if ch.nC <= min(ch.n13, ch.n24):
        raise ValueError("not regime (iii)")
    val = theorem3_max_sum(LdRegime3Instantiation(ch))
    b = ld_bound_set(ch)
    return Regime3Result(val, min(b.u2, b.u3, b.u4, b.u5))


@dataclass(frozen=True)
class LdAchievable:
    sum: object  # int, or Fraction when only an extension attains the best value
    scheme: str
    rates: dict = field(default_factory=dict)
    candidates: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"sum": self.sum, "scheme": self.scheme, "rates": self.rates}


def extended_channel(ch: LdChannel, m: int) -> LdChannel:
    """The m-use symbol extension, which is the channel with all levels
    multiplied by m (levels of the m copies interleave)."""
    if m < 1:
        raise ValueError("extension factor must be positive")
    return LdChannel(*(m * x for x in ch.levels()), p=ch.p)


def ld_achievable_sum(ch: LdChannel, extensions: tuple[int, ...] = (1, 2)) -> LdAchievable:
    """Best sum rate over the nulling scheme at every usable link level, the
    forwarding scheme when the link dominates, and no cooperation.

    The nulling scheme is also run on symbol extensions (factor m in
    ``extensions``); there the link level can be a multiple of ``1/m``, which
    matters when the best level sits halfway between integers.
    """
    best_val = ld_no_coop_sum(ch)
    best = LdAchievable(best_val, "hk", {}, {})
    cands = {"hk": best_val}
    for m in extensions:
        big = extended_channel(ch, m)
        for nc in range(0, min(big.nC, big.n_min) + 1):
            alloc = regime1_ld_rates(big.with_nc(nc))
            if alloc.case == "no-coop":
                continue
            label = "regime1a" if alloc.case == "a" else "regime1b"
            val = Fraction(alloc.sum, m)
            tag = f"{label}@nC={nc}" if m == 1 else f"{label}@x{m},nC={nc}"
            cands[tag] = val
            if val > best.sum:
                rates = alloc.rates_json()
                rates["nC_used"] = nc
                rates["extension"] = m
                best = LdAchievable(val, label, rates, {})
    if ch.nC > min(ch.n13, ch.n24):
        r3 = regime3_ld_sum(ch)
        val = r3.sum
        if val.denominator != 1:
            raise ArithmeticError(f"non-integer LD optimum {val}")
        cands["regime3"] = int(val)
        if val > best.sum:
            best = LdAchievable(int(val), "regime3", {}, {})
    total = best.sum
    if isinstance(total, Fraction) and total.denominator == 1:
        total = int(total)
    return LdAchievable(total, best.scheme, best.rates, cands)
