"""Exact rational inequality systems and Fourier-Motzkin elimination.

A :class:`ConstraintSystem` is a set of rows ``a . x <= b`` with rational
``a`` and ``b`` plus a set of variables that are implicitly non-negative.
Real-valued constants (Gaussian mutual informations) enter through
``Fraction(float)``, which is an exact binary decomposition, so elimination
never adds rounding error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Optional, Sequence, Union

__all__ = [
    "ConstraintSystem",
    "EmptyPolytopeError",
    "to_fraction",
    "fm_eliminate",
    "max_linear",
]

Num = Union[int, float, Fraction]


class EmptyPolytopeError(ValueError):
    def __init__(self, msg: str = "empty polytope"):
        super().__init__(msg)


def to_fraction(x: Num) -> Fraction:
    """Exact rational value of an int, Fraction or finite float."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"non-finite constant {x}")
    return Fraction(x)


Row = tuple[tuple[int, ...], Fraction]


def _normalize(coeffs: Sequence[Fraction], rhs: Fraction) -> Optional[Row]:
    """Scale to a primitive integer coefficient vector (positive factor).

    Returns ``None`` for a tautology ``0 <= b`` with ``b >= 0``.
    """
    den = 1
    for c in coeffs:
        if c:
            den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in coeffs]
    g = 0
    for c in ints:
        g = math.gcd(g, c)
    if g == 0:
        if rhs >= 0:
            return None
        return (tuple(ints), Fraction(-1))
    return (tuple(c // g for c in ints), rhs * den / g)


@dataclass(frozen=True)
class ConstraintSystem:
    """Rows ``coeffs . x <= rhs`` over ordered ``variables``.

    ``nonneg`` names the variables with an implicit ``x >= 0``.
    """

    variables: tuple[str, ...]
    constraints: tuple[tuple[tuple[Fraction, ...], Fraction], ...] = ()
    nonneg: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate variable names")
        rows = []
        for coeffs, rhs in self.constraints:
            coeffs = tuple(to_fraction(c) for c in coeffs)
            if len(coeffs) != len(self.variables):
                raise ValueError("constraint length does not match variables")
            rows.append((coeffs, to_fraction(rhs)))
        object.__setattr__(self, "constraints", tuple(rows))
        nn = frozenset(self.nonneg)
        unknown = nn - set(self.variables)
        if unknown:
            raise ValueError(f"unknown variables in nonneg: {sorted(unknown)}")
        object.__setattr__(self, "nonneg", nn)

    @classmethod
    def build(cls, variables: Sequence[str],
              rows: Iterable[tuple[Mapping[str, Num], Num]],
              nonneg: Iterable[str] = ()) -> "ConstraintSystem":
        """Construct from ``({name: coeff}, rhs)`` pairs."""
        variables = tuple(variables)
        idx = {v: i for i, v in enumerate(variables)}
        out = []
        for coeffs, rhs in rows:
            vec = [Fraction(0)] * len(variables)
            for name, c in coeffs.items():
                if name not in idx:
                    raise KeyError(f"unknown variable {name!r}")
                vec[idx[name]] += to_fraction(c)
            out.append((tuple(vec), to_fraction(rhs)))
        return cls(variables, tuple(out), frozenset(nonneg))

    def with_rows(self, rows: Iterable[tuple[Mapping[str, Num], Num]]) -> "ConstraintSystem":
        extra = ConstraintSystem.build(self.variables, rows)
        return ConstraintSystem(self.variables, self.constraints + extra.constraints, self.nonneg)

    def explicit_rows(self) -> list[tuple[tuple[Fraction, ...], Fraction]]:
        """All rows including the implicit non-negativity ones."""
        rows = list(self.constraints)
        for i, v in enumerate(self.variables):
            if v in self.nonneg:
                vec = [Fraction(0)] * len(self.variables)
                vec[i] = Fraction(-1)
                rows.append((tuple(vec), Fraction(0)))
        return rows

    def is_feasible_point(self, point: Mapping[str, Num]) -> bool:
        x = [to_fraction(point[v]) for v in self.variables]
        for coeffs, rhs in self.explicit_rows():
            if sum(c * xi for c, xi in zip(coeffs, x)) > rhs:
                return False
        return True


def _dedupe(rows: Iterable[Row]) -> dict[tuple[int, ...], Fraction]:
    out: dict[tuple[int, ...], Fraction] = {}
    for coeffs, rhs in rows:
        prev = out.get(coeffs)
        if prev is None or rhs < prev:
            out[coeffs] = rhs
    return out


def _eliminate_rows(rows: dict[tuple[int, ...], Fraction], j: int) -> dict[tuple[int, ...], Fraction]:
    pos, neg, keep = [], [], []
    for coeffs, rhs in rows.items():
        c = coeffs[j]
        if c > 0:
            pos.append((coeffs, rhs))
        elif c < 0:
            neg.append((coeffs, rhs))
        else:
            keep.append((coeffs, rhs))
    out = dict(keep)
    for pc, pr in pos:
        a = pc[j]
        for nc, nr in neg:
            b = -nc[j]
            vec = [b * x + a * y for x, y in zip(pc, nc)]
            rhs = b * pr + a * nr
            g = 0
            for c in vec:
                g = math.gcd(g, c)
            if g == 0:
                if rhs < 0:
                    raise EmptyPolytopeError()
                continue
            key = tuple(c // g for c in vec)
            rhs = rhs / g
            prev = out.get(key)
            if prev is None or rhs < prev:
                out[key] = rhs
    return out


def _int_rows(sys: ConstraintSystem, materialize: Iterable[str]) -> dict[tuple[int, ...], Fraction]:
    rows = list(sys.constraints)
    for v in materialize:
        i = sys.variables.index(v)
        vec = [Fraction(0)] * len(sys.variables)
        vec[i] = Fraction(-1)
        rows.append((tuple(vec), Fraction(0)))
    norm = []
    for coeffs, rhs in rows:
        r = _normalize(coeffs, rhs)
        if r is None:
            continue
        if not any(r[0]):
            raise EmptyPolytopeError()
        norm.append(r)
    return _dedupe(norm)


def fm_eliminate(sys: ConstraintSystem, var: str) -> ConstraintSystem:
    """Project out ``var``; the result describes the projection of the input."""
    if var not in sys.variables:
        raise KeyError(f"unknown variable {var!r}")
    j = sys.variables.index(var)
    materialize = [var] if var in sys.nonneg else []
    try:
        rows = _eliminate_rows(_int_rows(sys, materialize), j)
    except EmptyPolytopeError:
        # Keep infeasibility visible as the row 0 <= -1.
        zero = (Fraction(0),) * (len(sys.variables) - 1)
        return ConstraintSystem(
            tuple(v for v in sys.variables if v != var), ((zero, Fraction(-1)),),
            sys.nonneg - {var})
    new_vars = tuple(v for v in sys.variables if v != var)
    out = []
    for coeffs, rhs in rows.items():
        out.append((tuple(Fraction(c) for k, c in enumerate(coeffs) if k != j), rhs))
    out.sort(key=lambda r: (r[0], r[1]))
    return ConstraintSystem(new_vars, tuple(out), sys.nonneg - {var})


def _pick(rows: dict[tuple[int, ...], Fraction], cols: Iterable[int]) -> int:
    best, best_cost = None, None
    for j in cols:
        npos = nneg = 0
        for coeffs in rows:
            c = coeffs[j]
            if c > 0:
                npos += 1
            elif c < 0:
                nneg += 1
        cost = npos * nneg
        if best_cost is None or cost < best_cost:
            best, best_cost = j, cost
    return best


def max_linear(sys: ConstraintSystem, objective: Union[Mapping[str, Num], Sequence[Num]],
               order: Optional[Sequence[str]] = None) -> Optional[Fraction]:
    """Exact maximum of ``objective . x`` over the system.

    Returns ``None`` when the objective is unbounded above and raises
    :class:`EmptyPolytopeError` when the system is infeasible.  ``order``
    optionally fixes the elimination order (all variables must appear).
    """
    nv = len(sys.variables)
    if isinstance(objective, Mapping):
        obj = [Fraction(0)] * nv
        for name, c in objective.items():
            obj[sys.variables.index(name)] += to_fraction(c)
    else:
        obj = [to_fraction(c) for c in objective]
        if len(obj) != nv:
            raise ValueError("objective length does not match variables")
    rows = _int_rows(sys, [v for v in sys.variables if v in sys.nonneg])
    # Extra last column t with t - obj . x <= 0.
    rows = {coeffs + (0,): rhs for coeffs, rhs in rows.items()}
    r = _normalize([-c for c in obj] + [Fraction(1)], Fraction(0))
    if r is not None:
        prev = rows.get(r[0])
        if prev is None or r[1] < prev:
            rows[r[0]] = r[1]
    remaining = list(range(nv))
    if order is not None:
        if sorted(order) != sorted(sys.variables):
            raise ValueError("order must list every variable exactly once")
        seq = [sys.variables.index(v) for v in order]
    else:
        seq = None
    while remaining:
        j = seq.pop(0) if seq is not None else _pick(rows, remaining)
        rows = _eliminate_rows(rows, j)
        remaining.remove(j)
    best = None
    for coeffs, rhs in rows.items():
        a = coeffs[nv]
        if a > 0:
            val = rhs / a
            if best is None or val < best:
                best = val
    return best
