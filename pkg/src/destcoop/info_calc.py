"""Entropy and mutual information for linear-over-seed random variables.

Two families are supported:

* :class:`LinearRvSystem` - every variable is a linear map of independent
  uniform vectors over GF(p); entropy is rank times ``log2 p``.
* :class:`GaussRvSystem` - every variable is a complex linear combination of
  independent circularly-symmetric Gaussians; mutual information comes from
  log-determinants of covariance matrices.
"""

from __future__ import annotations

import math
from typing import Iterable, Mapping, Sequence

import numpy as np

from .gf_linalg import _rank_gf2, is_prime, pack_rows, rank

__all__ = [
    "LinearRvSystem",
    "GaussRvSystem",
    "DegenerateConditioningError",
    "ld_cond_entropy",
    "ld_mutual_info",
    "gauss_cond_mutual_info",
]

MI_TOL = 1e-9
PIVOT_TOL = 1e-13  # relative, on the square-root scale


class DegenerateConditioningError(ValueError):
    """A conditioning set has a singular covariance matrix."""


def _names(vs) -> tuple[str, ...]:
    if isinstance(vs, str):
        return (vs,)
    return tuple(vs)


class LinearRvSystem:
    """Variables that are linear functions of independent uniform seeds.

    ``seeds`` lists ``(name, length)`` pairs; ``variables`` maps a name to a
    matrix with one column per seed coordinate.  Entropies are memoized per
    variable set, so a system should not be mutated after construction.
    """

    def __init__(self, seeds: Sequence[tuple[str, int]],
                 variables: Mapping[str, np.ndarray], p: int = 2):
        if not is_prime(p):
            raise ValueError(f"p must be prime, got {p}")
        self.p = p
        self.seeds = tuple((str(n), int(k)) for n, k in seeds)
        self.width = sum(k for _, k in self.seeds)
        self._offsets = {}
        off = 0
        for name, k in self.seeds:
            self._offsets[name] = (off, k)
            off += k
        self.variables: dict[str, np.ndarray] = {}
        for name, m in variables.items():
            m = np.atleast_2d(np.asarray(m, dtype=np.int64)) % p
            if m.shape[1] != self.width:
                raise ValueError(
                    f"variable {name!r} has {m.shape[1]} columns, seed length is {self.width}")
            self.variables[name] = m
        self._packed = {k: pack_rows(v) for k, v in self.variables.items()} if p == 2 else {}
        self._cache: dict[frozenset, int] = {}

    def seed_block(self, name: str) -> tuple[int, int]:
        """(offset, length) of a seed inside the concatenated seed vector."""
        return self._offsets[name]

    def selector(self, name: str) -> np.ndarray:
        """Identity map onto one seed, as a full-width matrix."""
        off, k = self._offsets[name]
        m = np.zeros((k, self.width), dtype=np.int64)
        m[np.arange(k), off + np.arange(k)] = 1
        return m

    def _check(self, names: Iterable[str]) -> None:
        for n in names:
            if n not in self.variables:
                raise KeyError(f"unknown variable {n!r}")

    def joint_rank(self, names: Iterable[str]) -> int:
        key = frozenset(names)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        self._check(key)
        if not key:
            r = 0
        elif self.p == 2:
            rows = [r for n in sorted(key) for r in self._packed[n]]
            r = _rank_gf2(rows)
        else:
            r = rank(np.vstack([self.variables[n] for n in sorted(key)]), self.p)
        self._cache[key] = r
        return r

    def entropy(self, names: Iterable[str]) -> float:
        return self.joint_rank(names) * math.log2(self.p)


def ld_cond_entropy(sys: LinearRvSystem, targets, given=()) -> float:
    t, g = _names(targets), _names(given)
    sys._check(t)
    sys._check(g)
    return (sys.joint_rank(t + g) - sys.joint_rank(g)) * math.log2(sys.p)


def ld_mutual_info(sys: LinearRvSystem, a, b, c=()) -> float:
    a, b, c = _names(a), _names(b), _names(c)
    for part in (a, b, c):
        sys._check(part)
    r = (sys.joint_rank(a + c) + sys.joint_rank(b + c)
         - sys.joint_rank(a + b + c) - sys.joint_rank(c))
    return r * math.log2(sys.p)


class GaussRvSystem:
    """Variables that are complex linear combinations of independent Gaussians.

    ``seeds`` lists ``(name, variance)``; ``variables`` maps a name to a
    coefficient vector (or matrix, one row per scalar component) over the
    seeds in order.
    """

    def __init__(self, seeds: Sequence[tuple[str, float]],
                 variables: Mapping[str, np.ndarray]):
        self.seeds = tuple((str(n), float(v)) for n, v in seeds)
        for name, v in self.seeds:
            if not v >= 0.0:
                raise ValueError(f"seed {name!r} has negative variance {v}")
        self.var = np.array([v for _, v in self.seeds], dtype=float)
        self.variables: dict[str, np.ndarray] = {}
        for name, m in variables.items():
            m = np.atleast_2d(np.asarray(m, dtype=complex))
            if m.shape[1] != len(self.seeds):
                raise ValueError(
                    f"variable {name!r} has {m.shape[1]} coefficients, "
                    f"there are {len(self.seeds)} seeds")
            self.variables[name] = m
        self._cache: dict[frozenset, float] = {}

    def _check(self, names: Iterable[str]) -> None:
        for n in names:
            if n not in self.variables:
                raise KeyError(f"unknown variable {n!r}")

    def covariance(self, names: Sequence[str]) -> np.ndarray:
        self._check(names)
        a = np.vstack([self.variables[n] for n in names])
        return (a * self.var) @ a.conj().T

    def variance(self, name: str) -> float:
        return float(np.real(np.trace(self.covariance([name]))))

    def logdet(self, names: Iterable[str]) -> float:
        """log2 det of the joint covariance; ``-inf`` if singular."""
        key = frozenset(names)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if not key:
            val = 0.0
        else:
            self._check(key)
            a = np.vstack([self.variables[n] for n in sorted(key)])
            val = _weighted_logdet2(a * np.sqrt(self.var))
        self._cache[key] = val
        return val


def _weighted_logdet2(w: np.ndarray) -> float:
    # det(W W^H) from a QR of W^H: squaring happens after factorization, so
    # the conditioning is that of W rather than of the covariance.  Rows go
    # in by increasing norm; pivot k then depends only on rows 1..k and its
    # rounding error scales with row k, which is what the test compares to.
    rows, cols = w.shape
    if rows > cols:
        return -math.inf
    norms = np.linalg.norm(w, axis=1)
    order = np.argsort(norms, kind="stable")
    r = np.linalg.qr(w[order].conj().T, mode="r")
    d = np.abs(np.diag(r))
    if np.any(d <= PIVOT_TOL * np.maximum(1.0, norms[order])):
        return -math.inf
    return float(2.0 * np.sum(np.log2(d)))


def gauss_cond_mutual_info(sys: GaussRvSystem, a, b, c=()) -> float:
    a, b, c = _names(a), _names(b), _names(c)
    for part in (a, b, c):
        sys._check(part)
    ld_c = sys.logdet(c)
    if ld_c == -math.inf:
        raise DegenerateConditioningError(f"degenerate conditioning on {sorted(set(c))}")
    ld_ac = sys.logdet(a + c)
    ld_bc = sys.logdet(b + c)
    ld_abc = sys.logdet(a + b + c)
    if ld_ac == -math.inf or ld_bc == -math.inf:
        raise DegenerateConditioningError(
            "degenerate conditioning: a variable is determined by the conditioning set")
    if ld_abc == -math.inf:
        return math.inf
    val = ld_ac + ld_bc - ld_abc - ld_c
    if val < 0.0:
        if val < -1e-6:
            raise ArithmeticError(f"negative mutual information {val}")
        val = 0.0
    elif val < MI_TOL:
        val = 0.0
    return val
