"""Rate constraints of the quantize-bin-forward scheme with public/private
superposition, and the two instantiations used in the cooperation-dominated
regime (``nC > min(n13, n24)``).

The constraint list is generated from a small table for destination 3; the
table for destination 4 comes from the user-swap map.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Protocol

import numpy as np

from ..channel import GaussChannel, LdChannel
from ..gf_linalg import shift_matrix
from ..info_calc import GaussRvSystem, LinearRvSystem, gauss_cond_mutual_info, ld_mutual_info
from ..polytope import ConstraintSystem, EmptyPolytopeError, max_linear, to_fraction

__all__ = [
    "RATE_VARS",
    "SUM_OBJECTIVE",
    "Instantiation",
    "LdRegime3Instantiation",
    "GaussRegime3Instantiation",
    "theorem3_terms",
    "theorem3_constraints",
    "theorem3_max_sum",
]

RATE_VARS = ("r_U1", "r_U2", "r_X1", "r_X2", "r3", "r4")
SUM_OBJECTIVE = {"r_U1": 1, "r_X1": 1, "r_U2": 1, "r_X2": 1}

_SWAP = {
    "U1": "U2", "U2": "U1", "X1": "X2", "X2": "X1", "Z1": "Z2", "Z2": "Z1",
    "X3": "X4", "X4": "X3", "Y3": "Y4", "Y4": "Y3", "V3": "V4", "V4": "V3",
    "r_U1": "r_U2", "r_U2": "r_U1", "r_X1": "r_X2", "r_X2": "r_X1",
    "r3": "r4", "r4": "r3",
}

# Destination-3 rows: (rates on the left, A, B, C, uses forwarded bits).
# A row with ``relayed`` reads  lhs <= I(A;B|C) + r4 - I(Y4;V4|X3,X4,U1,U2,Y3).
_DEST3 = (
    (("r_X1",), ("X1",), ("Y3",), ("X4", "U1", "U2"), False),
    (("r_U2",), ("U2",), ("Y3", "V4"), ("X3", "X4", "U1"), False),
    (("r_U2",), ("U2",), ("Y3",), ("X3", "X4", "U1"), True),
    (("r_U1",), ("U1",), ("Y3", "V4"), ("X3", "X4", "U2"), False),
    (("r_U1",), ("U1",), ("Y3",), ("X3", "X4", "U2"), True),
    # Conditioning on U1, U2 only, exactly as the scheme states it.
    (("r4",), ("X4",), ("Y3",), ("U1", "U2"), False),
    (("r_U1", "r_U2"), ("U2", "U1"), ("Y3", "V4"), ("X3", "X4"), False),
    (("r_U1", "r_U2"), ("U2", "U1"), ("Y3",), ("X3", "X4"), True),
    (("r4", "r_U1"), ("X4", "U1"), ("Y3", "V4"), ("X3", "U2"), False),
    (("r4", "r_U1"), ("X4", "U1"), ("Y3",), ("X3", "U2"), True),
    (("r_U2", "r4"), ("U2", "X4"), ("Y3", "V4"), ("X3", "U1"), False),
    (("r_U2", "r4"), ("U2", "X4"), ("Y3",), ("X3", "U1"), True),
    (("r_U2", "r4", "r_U1"), ("U2", "X4", "U1"), ("Y3", "V4"), ("X3",), False),
    (("r_U2", "r4", "r_U1"), ("U2", "X4", "U1"), ("Y3",), ("X3",), True),
)
_DELTA3 = (("Y4",), ("V4",), ("X3", "X4", "U1", "U2", "Y3"))


def _swap(names):
    return tuple(_SWAP[n] for n in names)


class Instantiation(Protocol):
    def mutual_info(self, a, b, c) -> float: ...


@dataclass(frozen=True)
class Term:
    """One generated inequality before numeric evaluation."""

    dest: int
    lhs: tuple[str, ...]
    a: tuple[str, ...]
    b: tuple[str, ...]
    c: tuple[str, ...]
    relayed: bool


def theorem3_terms() -> list[Term]:
    out = []
    for lhs, a, b, c, relayed in _DEST3:
        out.append(Term(3, lhs, a, b, c, relayed))
    for lhs, a, b, c, relayed in _DEST3:
        out.append(Term(4, _swap(lhs), _swap(a), _swap(b), _swap(c), relayed))
    return out


def theorem3_constraints(inst: Instantiation) -> ConstraintSystem:
    """All 28 rate inequalities with every mutual information evaluated."""
    delta = {
        3: to_fraction(inst.mutual_info(*_DELTA3)),
        4: to_fraction(inst.mutual_info(*(_swap(x) for x in _DELTA3))),
    }
    rows = []
    for t in theorem3_terms():
        mi = to_fraction(inst.mutual_info(t.a, t.b, t.c))
        coeffs = {v: 1 for v in t.lhs}
        rhs = mi
        if t.relayed:
            other = "r4" if t.dest == 3 else "r3"
            coeffs[other] = coeffs.get(other, 0) - 1
            rhs = mi - delta[t.dest]
        rows.append((coeffs, rhs))
    return ConstraintSystem.build(RATE_VARS, rows, nonneg=RATE_VARS)


def theorem3_max_sum(inst: Instantiation) -> Fraction:
    """Largest sum rate the constraints allow; 0 if they admit no rates."""
    try:
        val = max_linear(theorem3_constraints(inst), SUM_OBJECTIVE)
    except EmptyPolytopeError:
        return Fraction(0)
    if val is None:
        raise ArithmeticError("sum rate unbounded; an instantiation constant is infinite")
    return val


# -- linear deterministic instantiation ---------------------------------------


class LdRegime3Instantiation:
    """Uniform public parts, private parts below the cross-link level, and
    destinations that forward their observation truncated at the level where
    their own private signal arrives."""

    def __init__(self, ch: LdChannel):
        self.channel = ch
        n, p = ch.n, ch.p
        self.n = n
        dz1 = n - ch.n14
        dz2 = n - ch.n23
        seeds = [("U1", n), ("U2", n), ("Z1", dz1), ("Z2", dz2), ("X3", n), ("X4", n)]
        width = sum(k for _, k in seeds)
        sel = {}
        off = 0
        for name, k in seeds:
            m = np.zeros((k, width), dtype=np.int64)
            m[np.arange(k), off + np.arange(k)] = 1
            sel[name] = m
            off += k

        def embed_low(name, k):
            # Place a k-dimensional seed on the bottom k levels of F^n.
            m = np.zeros((n, width), dtype=np.int64)
            if k:
                m[n - k:, :] = sel[name]
            return m

        u1, u2, x3, x4 = sel["U1"], sel["U2"], sel["X3"], sel["X4"]
        x1 = (u1 + embed_low("Z1", dz1)) % p
        x2 = (u2 + embed_low("Z2", dz2)) % p
        g = ch.gain
        y3 = (g("13") @ x1 + g("23") @ x2 + g("C") @ x4) % p
        y4 = (g("24") @ x2 + g("14") @ x1 + g("C") @ x3) % p
        v3 = shift_matrix(n, max(ch.n13 - ch.n14, 0), p) @ y3 % p
        v4 = shift_matrix(n, max(ch.n24 - ch.n23, 0), p) @ y4 % p
        variables = {"U1": u1, "U2": u2, "X1": x1, "X2": x2, "X3": x3, "X4": x4,
                     "Y3": y3, "Y4": y4, "V3": v3, "V4": v4}
        self.system = LinearRvSystem(seeds, variables, p)

    def mutual_info(self, a, b, c=()) -> int:
        # Integer-valued for p = 2; rank differences times log2 p in general.
        s = self.system
        r = (s.joint_rank(tuple(a) + tuple(c)) + s.joint_rank(tuple(b) + tuple(c))
             - s.joint_rank(tuple(a) + tuple(b) + tuple(c)) - s.joint_rank(tuple(c)))
        if self.channel.p == 2:
            return r
        return ld_mutual_info(s, a, b, c)


# -- Gaussian instantiation -----------------------------------------------------


@dataclass(frozen=True)
class GaussRegime3Params:
    var_u: float
    var_z1: float
    var_z2: float
    var_q3: float
    var_q4: float
    alpha1: float
    alpha2: float


def gauss_regime3_params(ch: GaussChannel) -> GaussRegime3Params:
    """Powers and quantizer noise levels of the Gaussian instantiation.

    Each source splits unit power evenly: public part 1/2, private part
    1/2 scaled down to the noise level at the unintended destination.
    """
    a13, a14, a23, a24 = ch.g13 ** 2, ch.g14 ** 2, ch.g23 ** 2, ch.g24 ** 2
    half = 0.5
    q3 = max(1.0, max(1.0, a13) / max(1.0, a14))
    q4 = max(1.0, max(1.0, a24) / max(1.0, a23))
    return GaussRegime3Params(
        var_u=half,
        var_z1=half / max(1.0, a14),
        var_z2=half / max(1.0, a23),
        var_q3=q3,
        var_q4=q4,
        alpha1=float(np.sqrt(q3)),
        alpha2=float(np.sqrt(q4)),
    )


class GaussRegime3Instantiation:
    def __init__(self, ch: GaussChannel):
        self.channel = ch
        self.params = prm = gauss_regime3_params(ch)
        names = ["U1", "U2", "Z1", "Z2", "X3", "X4", "N3", "N4", "Q3", "Q4"]
        seeds = [("U1", prm.var_u), ("U2", prm.var_u), ("Z1", prm.var_z1),
                 ("Z2", prm.var_z2), ("X3", 1.0), ("X4", 1.0), ("N3", 1.0),
                 ("N4", 1.0), ("Q3", prm.var_q3), ("Q4", prm.var_q4)]
        idx = {n: i for i, n in enumerate(names)}

        def vec(**coeffs):
            v = np.zeros(len(names), dtype=complex)
            for k, c in coeffs.items():
                v[idx[k]] += c
            return v

        g = ch.complex_gains()
        x1 = vec(U1=1, Z1=1)
        x2 = vec(U2=1, Z2=1)
        x3, x4 = vec(X3=1), vec(X4=1)
        y3 = g["13"] * x1 + g["23"] * x2 + g["C"] * x4 + vec(N3=1)
        y4 = g["24"] * x2 + g["14"] * x1 + g["C"] * x3 + vec(N4=1)
        variables = {"U1": vec(U1=1), "U2": vec(U2=1), "X1": x1, "X2": x2,
                     "X3": x3, "X4": x4, "Y3": y3, "Y4": y4,
                     "V3": y3 + vec(Q3=1), "V4": y4 + vec(Q4=1)}
        self.system = GaussRvSystem(seeds, variables)

    def source_powers(self) -> tuple[float, float]:
        return self.system.variance("X1"), self.system.variance("X2")

    def mutual_info(self, a, b, c=()) -> float:
        return gauss_cond_mutual_info(self.system, a, b, c)
