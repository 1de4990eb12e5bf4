"""Exact linear algebra over a prime field GF(p).

Matrices are numpy integer arrays with entries in ``[0, p)``.  For ``p == 2``
the elimination routines pack each row into a Python ``int`` and use XOR,
which is much faster than numpy on the small, wide matrices produced by the
rank-based entropy computations and by the simulator's decodability checks.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

import numpy as np

__all__ = [
    "shift_matrix",
    "gf_reduce",
    "gf_matmul",
    "rank",
    "solve_determined",
    "RowBasis",
    "pack_rows",
    "unpack_row",
    "is_prime",
]


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


def _check_field(p: int) -> None:
    if not is_prime(p):
        raise ValueError(f"field size must be prime, got {p}")


def shift_matrix(n: int, k: int = 1, p: int = 2) -> np.ndarray:
    """Return ``S**k`` for the ``n x n`` down-shift ``S`` over GF(p).

    ``S`` moves entry ``i`` of a column vector to position ``i + 1`` and drops
    the last entry.  Negative ``k`` gives the transpose (an up-shift), and
    ``|k| >= n`` gives the zero matrix.
    """
    _check_field(p)
    if n < 0:
        raise ValueError("dimension must be non-negative")
    m = np.zeros((n, n), dtype=np.int64)
    if abs(k) >= n:
        return m
    if k >= 0:
        idx = np.arange(n - k)
        m[idx + k, idx] = 1
    else:
        idx = np.arange(n + k)
        m[idx, idx - k] = 1
    return m


def gf_reduce(m: np.ndarray, p: int = 2) -> np.ndarray:
    return np.mod(np.asarray(m, dtype=np.int64), p)


def gf_matmul(a: np.ndarray, b: np.ndarray, p: int = 2) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.shape[-1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    return np.mod(a @ b, p)


# -- bit packing for GF(2) ---------------------------------------------------
#
# Column j of a width-L matrix maps to bit (L - 1 - j), so the highest set
# bit of a packed row is its leftmost nonzero column.


def pack_rows(m: np.ndarray) -> list[int]:
    m = np.asarray(m)
    if m.ndim != 2:
        raise ValueError("expected a 2-D array")
    width = m.shape[1]
    if width == 0:
        return [0] * m.shape[0]
    bits = (np.mod(m, 2) != 0).astype(np.uint8)
    packed = np.packbits(bits, axis=1, bitorder="big")
    pad = (-width) % 8
    out = []
    for row in packed:
        out.append(int.from_bytes(row.tobytes(), "big") >> pad)
    return out


def unpack_row(value: int, width: int) -> np.ndarray:
    out = np.zeros(width, dtype=np.int64)
    j = width - 1
    while value:
        if value & 1:
            out[j] = 1
        value >>= 1
        j -= 1
    return out


def _rank_gf2(rows: Iterable[int]) -> int:
    basis: dict[int, int] = {}
    for r in rows:
        while r:
            h = r.bit_length() - 1
            b = basis.get(h)
            if b is None:
                basis[h] = r
                break
            r ^= b
    return len(basis)


def _rank_gfp(m: np.ndarray, p: int) -> int:
    a = np.mod(m.astype(np.int64), p)
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        a[r] = (a[r] * inv) % p
        below = np.nonzero(a[r + 1 :, c])[0] + r + 1
        if below.size:
            a[below] = (a[below] - np.outer(a[below, c], a[r])) % p
        r += 1
    return r


def rank(m: np.ndarray, p: int = 2) -> int:
    """Rank of ``m`` over GF(p)."""
    _check_field(p)
    m = np.asarray(m)
    if m.ndim != 2:
        raise ValueError("expected a 2-D array")
    if m.size == 0:
        return 0
    if p == 2:
        return _rank_gf2(pack_rows(m))
    return _rank_gfp(m, p)


class RowBasis:
    """Incrementally grown row space over GF(p) with combination tracking.

    Every added row gets an index.  :meth:`express` writes a vector as a
    combination of the added rows, or returns ``None`` if it is outside their
    span.  Pivots are chosen at the leftmost nonzero column; among rows with
    the same leading column the earliest added one is kept.
    """

    def __init__(self, width: int, p: int = 2):
        _check_field(p)
        self.width = width
        self.p = p
        self.count = 0
        # pivot column -> (reduced row, combination over added rows)
        self._gf2: dict[int, tuple[int, int]] = {}
        self._gfp: dict[int, tuple[np.ndarray, dict[int, int]]] = {}

    @property
    def rank(self) -> int:
        return len(self._gf2) if self.p == 2 else len(self._gfp)

    def add(self, row: np.ndarray) -> int:
        """Add a row; returns its index."""
        idx = self.count
        self.count += 1
        if self.p == 2:
            r = pack_rows(np.asarray(row).reshape(1, -1))[0]
            self._add_gf2(r, 1 << idx)
        else:
            v = np.mod(np.asarray(row, dtype=np.int64).ravel(), self.p)
            self._add_gfp(v, {idx: 1})
        return idx

    def add_packed(self, r: int) -> int:
        if self.p != 2:
            raise ValueError("packed rows are only valid for p = 2")
        idx = self.count
        self.count += 1
        self._add_gf2(r, 1 << idx)
        return idx

    def _add_gf2(self, r: int, combo: int) -> None:
        while r:
            h = r.bit_length() - 1
            hit = self._gf2.get(h)
            if hit is None:
                self._gf2[h] = (r, combo)
                return
            r ^= hit[0]
            combo ^= hit[1]

    def _add_gfp(self, v: np.ndarray, combo: dict[int, int]) -> None:
        p = self.p
        while True:
            nz = np.nonzero(v)[0]
            if nz.size == 0:
                return
            c = int(nz[0])
            hit = self._gfp.get(c)
            if hit is None:
                inv = pow(int(v[c]), p - 2, p)
                v = (v * inv) % p
                combo = {k: (x * inv) % p for k, x in combo.items()}
                self._gfp[c] = (v, combo)
                return
            f = int(v[c])
            v = (v - f * hit[0]) % p
            combo = _combo_axpy(combo, hit[1], -f, p)

    def express_packed(self, r: int) -> Optional[int]:
        combo = 0
        while r:
            h = r.bit_length() - 1
            hit = self._gf2.get(h)
            if hit is None:
                return None
            r ^= hit[0]
            combo ^= hit[1]
        return combo

    def express(self, row: np.ndarray) -> Optional[np.ndarray]:
        """Coefficients (length ``count``) with ``coeffs @ rows == row``."""
        if self.p == 2:
            r = pack_rows(np.asarray(row).reshape(1, -1))[0]
            combo = self.express_packed(r)
            if combo is None:
                return None
            out = np.zeros(self.count, dtype=np.int64)
            i = 0
            while combo:
                if combo & 1:
                    out[i] = 1
                combo >>= 1
                i += 1
            return out
        p = self.p
        v = np.mod(np.asarray(row, dtype=np.int64).ravel(), p)
        combo: dict[int, int] = {}
        while True:
            nz = np.nonzero(v)[0]
            if nz.size == 0:
                break
            c = int(nz[0])
            hit = self._gfp.get(c)
            if hit is None:
                return None
            f = int(v[c])
            v = (v - f * hit[0]) % p
            combo = _combo_axpy(combo, hit[1], f, p)
        out = np.zeros(self.count, dtype=np.int64)
        for k, x in combo.items():
            out[k] = x
        return out


def _combo_axpy(a: dict[int, int], b: dict[int, int], f: int, p: int) -> dict[int, int]:
    out = dict(a)
    for k, x in b.items():
        y = (out.get(k, 0) + f * x) % p
        if y:
            out[k] = y
        else:
            out.pop(k, None)
    return out


def solve_determined(
    known: np.ndarray, target: np.ndarray, p: int = 2
) -> Optional[np.ndarray]:
    """Find ``R`` with ``R @ known == target`` over GF(p).

    Returns ``None`` when some row of ``target`` is not in the row space of
    ``known`` (the target is not determined by the known rows).
    """
    _check_field(p)
    known = np.atleast_2d(np.asarray(known, dtype=np.int64))
    target = np.atleast_2d(np.asarray(target, dtype=np.int64))
    if known.shape[1] != target.shape[1]:
        raise ValueError(
            f"dimension mismatch: known has {known.shape[1]} columns, "
            f"target has {target.shape[1]}"
        )
    basis = RowBasis(known.shape[1], p)
    if p == 2:
        for r in pack_rows(known):
            basis.add_packed(r)
    else:
        for row in known:
            basis.add(row)
    out = np.zeros((target.shape[0], known.shape[0]), dtype=np.int64)
    for i, row in enumerate(target):
        coeffs = basis.express(row)
        if coeffs is None:
            return None
        out[i] = coeffs
    return out


def stack(blocks: Sequence[np.ndarray], width: int) -> np.ndarray:
    if not blocks:
        return np.zeros((0, width), dtype=np.int64)
    return np.vstack(blocks).astype(np.int64)
