"""Independent reference implementations used by the tests.

These are deliberately naive: exhaustive seed enumeration for entropies,
vertex enumeration for linear programs.  They share no code with the
package beyond plain numpy.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np


def _all_seeds(width: int) -> np.ndarray:
    idx = np.arange(2 ** width, dtype=np.int64)
    return (idx[:, None] >> np.arange(width)) & 1


def enum_entropy_gf2(mats: list[np.ndarray]) -> float:
    """Entropy (bits) of the joint output of ``mats`` applied to a uniform
    GF(2) seed, by listing every seed value."""
    if not mats:
        return 0.0
    stacked = np.vstack(mats) % 2
    out = _all_seeds(stacked.shape[1]) @ stacked.T % 2
    _, counts = np.unique(out, axis=0, return_counts=True)
    prob = counts / counts.sum()
    return float(-(prob * np.log2(prob)).sum())


def enum_mutual_info_gf2(variables: dict, a, b, c=()) -> float:
    def h(names):
        return enum_entropy_gf2([variables[n] for n in names])
    a, b, c = list(a), list(b), list(c)
    return h(a + c) + h(b + c) - h(a + b + c) - h(c)


def enum_in_span_gf2(known: np.ndarray, target: np.ndarray) -> bool:
    """Target is a function of known iff equal known outputs never give
    different target outputs."""
    width = known.shape[1]
    seen = {}
    for bits in itertools.product((0, 1), repeat=width):
        b = np.array(bits, dtype=np.int64)
        k = (known.dot(b) % 2).tobytes()
        t = (target.dot(b) % 2).tobytes()
        if seen.setdefault(k, t) != t:
            return False
    return True


def _solve_frac(a: list[list[Fraction]], b: list[Fraction]):
    """Unique solution of a square system over Q, or None if singular."""
    n = len(a)
    m = [row[:] + [rhs] for row, rhs in zip(a, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col] / m[col][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [m[i][n] / m[i][i] for i in range(n)]


def vertex_lp_max(rows, objective, box=None):
    """Maximum of ``objective . x`` over ``{x : a . x <= b}`` by trying every
    vertex.  ``rows`` must include any sign constraints.  With ``box`` the
    region is intersected with ``|x_i| <= box``.

    Returns ``None`` for an empty region (only meaningful when bounded).
    """
    nv = len(objective)
    rows = [([Fraction(c) for c in a], Fraction(b)) for a, b in rows]
    if box is not None:
        for i in range(nv):
            e = [Fraction(0)] * nv
            e[i] = Fraction(1)
            rows.append((e, Fraction(box)))
            rows.append(([-x for x in e], Fraction(box)))
    best = None
    for combo in itertools.combinations(range(len(rows)), nv):
        x = _solve_frac([rows[i][0] for i in combo], [rows[i][1] for i in combo])
        if x is None:
            continue
        if all(sum(c * xi for c, xi in zip(a, x)) <= b for a, b in rows):
            val = sum(Fraction(c) * xi for c, xi in zip(objective, x))
            if best is None or val > best:
                best = val
    return best


def lp_max(rows, objective, box=10 ** 6):
    """``("empty", None)``, ``("unbounded", None)`` or ``("max", value)``.

    Unboundedness is detected by growing the box: a bounded optimum does not
    move when the box doubles.
    """
    v1 = vertex_lp_max(rows, objective, box)
    if v1 is None:
        return "empty", None
    v2 = vertex_lp_max(rows, objective, 2 * box)
    if v2 != v1:
        return "unbounded", None
    return "max", v1


def random_lp(rng, max_vars: int = 4, max_rows: int = 10):
    """Random small system: ``(variables, rows, nonneg, objective)`` with
    integer data.  Sign constraints are part of ``nonneg``, not ``rows``."""
    nv = int(rng.integers(1, max_vars + 1))
    names = [f"x{i}" for i in range(nv)]
    nonneg = [v for v in names if rng.random() < 0.7]
    nrows = int(rng.integers(1, max_rows - len(nonneg) + 1))
    rows = []
    for _ in range(nrows):
        a = [int(c) for c in rng.integers(-3, 4, size=nv)]
        b = int(rng.integers(-2, 9))
        rows.append((a, b))
    obj = [int(c) for c in rng.integers(-2, 4, size=nv)]
    return names, rows, nonneg, obj


def oracle_rows(names, rows, nonneg):
    out = [(list(a), b) for a, b in rows]
    for v in nonneg:
        e = [0] * len(names)
        e[names.index(v)] = -1
        out.append((e, 0))
    return out
