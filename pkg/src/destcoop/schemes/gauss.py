"""Achievable sum rates for the Gaussian model."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

from ..channel import GaussChannel, derive_levels
from ..info_calc import DegenerateConditioningError
from ..polytope import ConstraintSystem, EmptyPolytopeError, max_linear
from .theorem3 import (
    RATE_VARS,
    SUM_OBJECTIVE,
    _SWAP,
    GaussRegime3Instantiation,
    gauss_regime3_params,
    theorem3_max_sum,
)

__all__ = [
    "K_REGIME1",
    "GaussUserRates",
    "Regime1GaussAllocation",
    "regime1_gauss_rates",
    "Regime3GaussResult",
    "regime3_gauss_sum",
    "printed_regime3_constraints",
    "hk_noncoop_sum",
    "GaussAchievable",
    "gauss_achievable_sum",
    "GRID_STEP_BITS",
]

K_REGIME1 = 9.0
GRID_STEP_BITS = 0.5  # spacing of the link-level grid, in bits of |gC|^2
LOG36 = math.log2(36.0)


def _log2p(x: float) -> float:
    return math.log2(1.0 + max(x, 0.0))


def _pos(x: float) -> float:
    return x if x > 0 else 0.0


# -- no cooperation -----------------------------------------------------------


def hk_noncoop_sum(ch: GaussChannel) -> float:
    """Han-Kobayashi sum rate ignoring the link between the destinations.

    Each source puts power ``1/max(1, |g_cross|^2)`` on a private layer, so
    it arrives at the other destination at or below the noise level, and the
    rest on a common layer.  Receivers decode their own two layers and the
    other user's common layer non-uniquely; every subset of those layers that
    contains an own layer gives one multiple-access constraint.
    """
    g13, g23, g14, g24, _ = ch.gains()
    pp1 = 1.0 / max(1.0, g14 ** 2)
    pp2 = 1.0 / max(1.0, g23 ** 2)
    pc1, pc2 = 1.0 - pp1, 1.0 - pp2
    names = ("c1", "p1", "c2", "p2")
    rows = []
    # receiver 3: own layers c1, p1; other common c2; other private is noise
    for own_gain, oth_gain, own, oth, pc_own, pp_own, pc_oth, pp_oth in (
        (g13, g23, ("c1", "p1"), "c2", pc1, pp1, pc2, pp2),
        (g24, g14, ("c2", "p2"), "c1", pc2, pp2, pc1, pp1),
    ):
        noise = 1.0 + oth_gain ** 2 * pp_oth
        power = {own[0]: own_gain ** 2 * pc_own, own[1]: own_gain ** 2 * pp_own,
                 oth: oth_gain ** 2 * pc_oth}
        layers = (own[0], own[1], oth)
        for r in range(1, 4):
            for sub in itertools.combinations(layers, r):
                if not set(sub) & set(own):
                    continue
                rhs = _log2p(sum(power[x] for x in sub) / noise)
                rows.append(({x: 1 for x in sub}, rhs))
    sys = ConstraintSystem.build(names, rows, nonneg=names)
    val = max_linear(sys, {n: 1 for n in names})
    return float(val)


# -- regime (i) ---------------------------------------------------------------


@dataclass(frozen=True)
class GaussUserRates:
    r_U: float = 0.0
    r_S: float = 0.0
    r_Zup: float = 0.0
    r_Zdn: float = 0.0

    @property
    def total(self) -> float:
        return self.r_U + self.r_S + self.r_Zup + self.r_Zdn


@dataclass(frozen=True)
class Regime1GaussAllocation:
    """Outcome of the nulling scheme for one Gaussian channel.

    ``case`` is ``"a"``, ``"b1"``, ``"b2"`` or ``"hk"`` (fallback).  ``gc_used``
    is the reduced link gain the scheme actually runs at.  ``log_forms`` and
    ``int_forms`` pair every rate constraint's exact SINR expression with its
    simplified level-domain lower bound.
    """

    channel: GaussChannel
    case: str
    gc_used: float
    user1: GaussUserRates
    user2: GaussUserRates
    A1: Optional[float] = None
    A2: Optional[float] = None
    A3: Optional[complex] = None
    A4: Optional[complex] = None
    sum: float = 0.0
    log_forms: dict = field(default_factory=dict)
    int_forms: dict = field(default_factory=dict)

    def rates_json(self) -> dict:
        out = {"gC_used": self.gc_used}
        for k, u in ((1, self.user1), (2, self.user2)):
            out.update({f"r_U{k}": u.r_U, f"r_S{k}": u.r_S,
                        f"r_Zup{k}": u.r_Zup, f"r_Zdn{k}": u.r_Zdn})
        return out


def _case_a_user(a13, a14, a23, c, K=K_REGIME1):
    """SINR forms of one user's five case-(a) constraints."""
    return {
        "U_dest_own": _log2p((a13 / K) / (2 * a13 * c / (K * a14) + a13 / (K * a14)
                                          + 2 * a23 / (K * c) + 2 * a23 / K + 2 / K + 2)),
        "U_dest_other": _log2p((a14 / K) / (a14 / (K * c) + 2 / K + 2 / K + 2)),
        "S": _log2p((a13 * c / (K * a14)) / (2 * a23 / K + a13 / (K * a14)
                                             + 2 * a23 / (K * c) + 2 * a23 / K + 2 / K + 2)),
        "Zup": _log2p((a13 / (K * a14)) / (2 * a23 / K + 2 * a23 / (K * c)
                                           + 2 * a23 / K + 2 / K + 2)),
        "Zdn": _log2p((a23 / (K * c)) / (2 / K + 2)),
    }


def _case_a_user_int(n13, n14, n23, nc):
    return {
        "U_dest_own": (n14 - nc) - 4,
        "U_dest_other": nc - 4,
        "S": nc - _pos(n23 - (n13 - n14)) - 4,
        "Zup": _pos(n13 - n14 - n23) - 4,
        "Zdn": _pos(n23 - nc) - 5,
    }


def _case_b_forms(a13, a23, a14, a24, c, K=K_REGIME1):
    d4 = a24 / (K * a23) + 1 / K + 1.5 / K + 1.5
    return {
        "U1_d3": _log2p((a13 / K) / (2 * a13 * c / (K * a14) + a13 / (K * a14)
                                     + a23 / (K * c) + a23 + 1)),
        "S1_d3": _log2p((a13 * c / (K * a14)) / (2 * a23 / K + a13 / (K * a14)
                                                 + a23 / (K * c) + a23 + 1)),
        "Zup1_d3": _log2p((a13 / (K * a14)) / (2 * a23 / K + a23 / (K * c) + a23 + 1)),
        "U2_d3": _log2p((a23 / K) / (a23 / (K * c) + 1 + 1)),
        "Zdn1_d3": _log2p((a23 / (K * c)) / (1 + 1)),
        "U2_d4": _log2p((a24 / K) / d4),
        "U1_d4": _log2p((a14 / K) / d4),
        "U12_d4": _log2p((a24 / K + a14 / K) / d4),
        "Zdn2_d4": _log2p((a24 / (K * a23)) / (1 / K + 1.5 / K + 1.5)),
    }


def _case_b_int(n13, n23, n14, n24, nc):
    return {
        "U1_d3": (n14 - nc) - 4,
        "U2_d3": nc - 4,
        "S1_d3": nc - _pos(n23 - (n13 - n14)) - 4,
        "Zup1_d3": _pos(n13 - n14 - n23) - 4,
        "Zdn1_d3": _pos(n23 - nc) - 5,
        "U2_d4": min(n23, n24) - 5,
        "U1_d4": (n14 - _pos(n24 - n23)) - 5,
        "U12_d4": max(n24, n14) - _pos(n24 - n23) - 5,
        "Zdn2_d4": _pos(n24 - n23) - 4,
    }


def _regime1_at(ch: GaussChannel, gc: float) -> Optional[Regime1GaussAllocation]:
    """Nulling scheme with the link gain reduced to ``gc``; None if the
    scheme's standing assumptions fail at this gain."""
    g13, g23, g14, g24, _ = ch.gains()
    if gc < 1.0 or 2 * gc > min(g14, g23) or gc > min(g13, g24):
        return None
    a13, a23, a14, a24, c = g13 ** 2, g23 ** 2, g14 ** 2, g24 ** 2, gc ** 2
    A1 = g14 * g23 / (g13 * gc)
    A2 = g14 * g23 / (g24 * gc)
    lv = derive_levels(ch.with_gc(gc))
    n13, n23, n14, n24, nc = lv["13"], lv["23"], lv["14"], lv["24"], lv["C"]
    cg = ch.complex_gains()
    A3 = -cg["14"] / (gc * g13 * A1)
    A4 = -cg["23"] / (gc * g24 * A2)
    if A1 < 0.5 and A2 < 0.5:
        f1 = _case_a_user(a13, a14, a23, c)
        f2 = _case_a_user(a24, a23, a14, c)
        i1 = _case_a_user_int(n13, n14, n23, nc)
        i2 = _case_a_user_int(n24, n23, n14, nc)

        def rates(f):
            return GaussUserRates(min(f["U_dest_own"], f["U_dest_other"]), f["S"],
                                  f["Zup"], f["Zdn"])

        u1, u2 = rates(f1), rates(f2)
        logs = {f"{k}_1": v for k, v in f1.items()} | {f"{k}_2": v for k, v in f2.items()}
        ints = {f"{k}_1": v for k, v in i1.items()} | {f"{k}_2": v for k, v in i2.items()}
        return Regime1GaussAllocation(ch, "a", gc, u1, u2, A1, A2, A3, A4,
                                      u1.total + u2.total, logs, ints)
    if A1 < 0.5:
        f = _case_b_forms(a13, a23, a14, a24, c)
        i = _case_b_int(n13, n23, n14, n24, nc)
        ru1 = min(f["U1_d3"], f["U1_d4"])
        ru2 = min(f["U2_d3"], f["U2_d4"])
        pub = min(ru1 + ru2, f["U12_d4"])
        # split the public sum; user 1 first
        r1 = min(ru1, pub)
        r2 = pub - r1
        u1 = GaussUserRates(r1, f["S1_d3"], f["Zup1_d3"], f["Zdn1_d3"])
        u2 = GaussUserRates(r2, 0.0, 0.0, f["Zdn2_d4"])
        return Regime1GaussAllocation(ch, "b1", gc, u1, u2, A1, None, A3, None,
                                      u1.total + u2.total, f, i)
    if A2 < 0.5:
        m = _regime1_at(ch.mirrored(), gc)
        if m is None:
            return None
        # destination 4 relays here, so only A2 and A4 are in use
        return Regime1GaussAllocation(ch, "b2", gc, m.user2, m.user1, None, m.A1,
                                      None, A4, m.sum, m.log_forms, m.int_forms)
    return None


def _grid(top: float) -> list[float]:
    out = []
    k = 0
    while True:
        g = top * 2.0 ** (-k * GRID_STEP_BITS / 2.0)
        if g < 1.0:
            break
        out.append(g)
        k += 1
    return out


def regime1_gauss_rates(ch: GaussChannel) -> Regime1GaussAllocation:
    """Nulling scheme for a weak link, maximized over reduced link gains.

    The link gain is first reduced to ``min(gC, g14/2, g23/2)`` and then
    swept downward on a 0.5-bit grid; a smaller link gain is always usable
    because the destinations can simply scale down what they send.  Falls
    back to :func:`hk_noncoop_sum` (case ``"hk"``) when no grid point has a
    usable case; otherwise the nulling allocation is returned even if the
    fallback would be larger, so callers can compare the two.
    """
    g13, g23, g14, g24, gc = ch.gains()
    gt = min(gc, g14 / 2.0, g23 / 2.0)
    if gt > min(g13, g24):
        raise ValueError("not regime (i)")
    best: Optional[Regime1GaussAllocation] = None
    for g in _grid(gt):
        alloc = _regime1_at(ch, g)
        if alloc is not None and (best is None or alloc.sum > best.sum):
            best = alloc
    if best is None:
        return Regime1GaussAllocation(ch, "hk", 0.0, GaussUserRates(), GaussUserRates(),
                                      sum=hk_noncoop_sum(ch))
    return best


# -- regime (iii) ---------------------------------------------------------------


def printed_regime3_constraints(ch: GaussChannel) -> ConstraintSystem:
    """Level-domain sufficient conditions for the forwarding scheme.

    Rows without the forwarded-rate term bound a mutual information from
    below, so a negative constant there is replaced by 0 (mutual information
    is non-negative).
    """
    rows = _printed_rows(ch, mirror=False) + _printed_rows(ch.mirrored(), mirror=True)
    return ConstraintSystem.build(RATE_VARS, rows, nonneg=RATE_VARS)


def _printed_rows(ch: GaussChannel, mirror: bool):
    lv = derive_levels(ch)
    n13, n23, n14, n24, nc = lv["13"], lv["23"], lv["14"], lv["24"], lv["C"]
    g13, g23, g14, g24, gc = ch.gains()
    prm = gauss_regime3_params(ch)
    al1, al2 = prm.alpha1, prm.alpha2
    d1 = _pos(n13 - n14)
    d2 = _pos(n24 - n23)
    cos = math.cos(ch.theta)
    cross = (abs(g13 * g24) ** 2 + abs(g14 * g23) ** 2
             - 2 * abs(g13 * g24 * g14 * g23) * cos) / (al1 * al2) ** 2
    base = (g13 / al1) ** 2 + (g24 / al2) ** 2 + (g14 / al2) ** 2 + (g23 / al1) ** 2
    log_pub = _log2p(base + max(cross, 0.0)) - LOG36
    log_all = _log2p(base + (gc / al1) ** 2 + (gc * g14 / (al1 * al2)) ** 2
                     + (gc * g24 / (al1 * al2)) ** 2 + max(cross, 0.0)) - LOG36
    R = "r4"
    plain = [
        ({"r_X1": 1}, d1 - 2),
        ({"r_U1": 1}, max(n13 - d1, n14 - d2) - LOG36),
        ({"r_U2": 1}, max(n23 - d1, n24 - d2) - LOG36),
        ({R: 1}, _pos(nc - d1) - 1),
        ({"r_U1": 1, "r_U2": 1}, log_pub),
        ({"r_U1": 1, R: 1}, max(max(n13, nc) - d1, _pos(n14 - d2) + _pos(nc - d1)) - LOG36),
        ({"r_U2": 1, R: 1}, max(max(n23, nc) - d1, (n24 - d2) + _pos(nc - d1)) - LOG36),
        ({"r_U2": 1, R: 1, "r_U1": 1}, log_all),
    ]
    # Relayed rows read ``lhs <= const + r4``; when ``lhs`` already holds r4
    # the two cancel, otherwise r4 moves to the left with coefficient -1.
    relayed = [
        ({"r_U1": 1, R: -1}, n13 - d1 - 3),
        ({"r_U2": 1, R: -1}, _pos(n23 - d1) - 3),
        ({"r_U1": 1, "r_U2": 1, R: -1}, max(n13, n23) - d1 - 3),
        ({"r_U1": 1}, n13 - d1 - 3),
        ({"r_U2": 1}, _pos(n23 - d1) - 3),
        ({"r_U2": 1, "r_U1": 1}, max(n13, n23, nc) - d1 - 3),
    ]
    rows = [(coeffs, max(rhs, 0.0)) for coeffs, rhs in plain] + relayed
    if mirror:
        rows = [({_SWAP[k]: v for k, v in c.items()}, r) for c, r in rows]
    return rows


@dataclass(frozen=True)
class Regime3GaussResult:
    """``exact_error`` is set when the log-det path ran out of float range
    (gains far beyond 2^40); that path then contributes the trivial 0."""

    sum: float
    exact: float
    printed: float
    exact_error: Optional[str] = None


def regime3_gauss_sum(ch: GaussChannel) -> Regime3GaussResult:
    lv = derive_levels(ch)
    if lv["C"] <= min(lv["13"], lv["24"]):
        raise ValueError("not regime (iii)")
    err = None
    try:
        exact = float(theorem3_max_sum(GaussRegime3Instantiation(ch)))
    except (DegenerateConditioningError, ValueError) as exc:
        exact, err = 0.0, str(exc)
    try:
        val = max_linear(printed_regime3_constraints(ch), SUM_OBJECTIVE)
        printed = float(val) if val is not None else math.inf
    except EmptyPolytopeError:
        printed = 0.0
    return Regime3GaussResult(max(exact, printed), exact, printed, err)


# -- composition --------------------------------------------------------------


@dataclass(frozen=True)
class GaussAchievable:
    sum: float
    scheme: str
    rates: dict = field(default_factory=dict)
    candidates: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"sum": self.sum, "scheme": self.scheme, "rates": self.rates}


def gauss_achievable_sum(ch: GaussChannel) -> GaussAchievable:
    cands = {}
    hk = hk_noncoop_sum(ch)
    cands["hk"] = hk
    best = GaussAchievable(hk, "hk")
    g13, g23, g14, g24, gc = ch.gains()
    gt = min(gc, g14 / 2.0, g23 / 2.0, g13, g24)
    if gt >= 1.0:
        alloc = regime1_gauss_rates(ch.with_gc(gt))
        if alloc.case != "hk":
            label = "regime1a" if alloc.case == "a" else "regime1b"
            cands[label] = alloc.sum
            if alloc.sum > best.sum:
                best = GaussAchievable(alloc.sum, label, alloc.rates_json())
    lv = derive_levels(ch)
    if lv["C"] > min(lv["13"], lv["24"]):
        r3 = regime3_gauss_sum(ch)
        cands["regime3"] = r3.sum
        cands["regime3_exact"] = r3.exact
        cands["regime3_printed"] = r3.printed
        if r3.sum > best.sum:
            best = GaussAchievable(r3.sum, "regime3",
                                   {"exact": r3.exact, "printed": r3.printed})
    return GaussAchievable(best.sum, best.scheme, best.rates, cands)
