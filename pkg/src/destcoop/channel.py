"""Channel parameter types for the two-user interference channel whose
destinations can talk to each other over an in-band full-duplex link.

Nodes 1 and 2 are sources; nodes 3 and 4 are the destinations of sources 1
and 2.  Gains: 13 and 24 are direct links, 14 and 23 are cross links and C is
the (reciprocal) link between the two destinations.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Union

import numpy as np

from .gf_linalg import gf_matmul, is_prime, shift_matrix

__all__ = [
    "LdChannel",
    "GaussChannel",
    "derive_levels",
    "normalize_gaussian",
    "channel_from_json",
    "channel_to_json",
    "load_channel",
    "LINKS",
]

LINKS = ("13", "23", "14", "24", "C")

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class LdChannel:
    """Linear deterministic channel: levels are non-negative integers."""

    n13: int
    n23: int
    n14: int
    n24: int
    nC: int
    p: int = 2

    def __post_init__(self):
        for name in ("n13", "n23", "n14", "n24", "nC", "p"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                raise TypeError(f"{name} must be an integer, got {v!r}")
            object.__setattr__(self, name, int(v))
            if v < 0:
                raise ValueError(f"{name} must be non-negative, got {v}")
        if not is_prime(self.p):
            raise ValueError(f"p must be prime, got {self.p}")

    @property
    def n(self) -> int:
        return max(self.n13, self.n23, self.n14, self.n24, self.nC)

    @property
    def n_min(self) -> int:
        return min(self.n13, self.n23, self.n14, self.n24)

    def levels(self) -> tuple[int, int, int, int, int]:
        return (self.n13, self.n23, self.n14, self.n24, self.nC)

    def with_nc(self, nc: int) -> "LdChannel":
        return replace(self, nC=nc)

    def mirrored(self) -> "LdChannel":
        """Swap the roles of the two users."""
        return replace(self, n13=self.n24, n24=self.n13, n14=self.n23, n23=self.n14)

    def regime(self) -> str:
        """'i', 'ii' or 'iii' according to where nC sits."""
        if self.nC <= self.n_min:
            return "i"
        if self.nC <= min(self.n13, self.n24):
            return "ii"
        return "iii"

    def gain(self, link: str) -> np.ndarray:
        """Channel matrix ``S**(n - n_link)`` for one link."""
        level = {"13": self.n13, "23": self.n23, "14": self.n14, "24": self.n24, "C": self.nC}[link]
        return shift_matrix(self.n, self.n - level, self.p)

    def outputs(self, x1, x2, x3, x4) -> tuple[np.ndarray, np.ndarray]:
        """Received vectors (or symbolic matrices) at destinations 3 and 4."""
        p = self.p
        y3 = (gf_matmul(self.gain("13"), x1, p) + gf_matmul(self.gain("23"), x2, p)
              + gf_matmul(self.gain("C"), x4, p)) % p
        y4 = (gf_matmul(self.gain("24"), x2, p) + gf_matmul(self.gain("14"), x1, p)
              + gf_matmul(self.gain("C"), x3, p)) % p
        return y3, y4


@dataclass(frozen=True)
class GaussChannel:
    """Complex Gaussian channel in normalized form.

    Gains are magnitudes; ``theta`` in ``[0, 2*pi)`` is the only phase that
    matters, ``arg(g14) + arg(g23) - arg(g13) - arg(g24)``.  Noise and power
    constraints are unit.
    """

    g13: float
    g23: float
    g14: float
    g24: float
    gC: float
    theta: float = 0.0

    def __post_init__(self):
        for name in ("g13", "g23", "g14", "g24", "gC", "theta"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, float, np.floating, np.integer)):
                raise TypeError(f"{name} must be a real number, got {v!r}")
            v = float(v)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")
            object.__setattr__(self, name, v)
        for name in ("g13", "g23", "g14", "g24", "gC"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be a non-negative magnitude")
        object.__setattr__(self, "theta", _wrap_angle(self.theta))

    def gains(self) -> tuple[float, float, float, float, float]:
        return (self.g13, self.g23, self.g14, self.g24, self.gC)

    def with_gc(self, gc: float) -> "GaussChannel":
        return replace(self, gC=gc)

    def mirrored(self) -> "GaussChannel":
        return replace(self, g13=self.g24, g24=self.g13, g14=self.g23, g23=self.g14)

    def complex_gains(self) -> dict[str, complex]:
        """Complex gains realizing this channel: the phase sits on 14 and 23."""
        half = cmath.exp(0.5j * self.theta)
        return {
            "13": complex(self.g13),
            "23": self.g23 * half,
            "14": self.g14 * half,
            "24": complex(self.g24),
            "C": complex(self.gC),
        }


def _wrap_angle(theta: float) -> float:
    t = math.fmod(theta, TWO_PI)
    if t < 0:
        t += TWO_PI
    if t >= TWO_PI:
        t = 0.0
    return t


def normalize_gaussian(g13: complex, g23: complex, g14: complex, g24: complex,
                       gC: complex) -> GaussChannel:
    """Reduce five complex gains to magnitudes plus one effective phase.

    Rotating each node's signal by a fixed phase does not change any rate,
    so only ``arg(g14) + arg(g23) - arg(g13) - arg(g24)`` survives.
    """
    gs = [complex(g) for g in (g13, g23, g14, g24, gC)]
    for g in gs:
        if not (math.isfinite(g.real) and math.isfinite(g.imag)):
            raise ValueError("gains must be finite")
    a13, a23, a14, a24, _ = (cmath.phase(g) for g in gs)
    theta = a14 + a23 - a13 - a24
    return GaussChannel(abs(gs[0]), abs(gs[1]), abs(gs[2]), abs(gs[3]), abs(gs[4]), theta)


def derive_levels(ch: GaussChannel) -> dict[str, float]:
    """Real-valued levels ``[log2 |g|^2]_+`` of each link."""
    out = {}
    for link, g in zip(LINKS, ch.gains()):
        if g <= 0.0:
            out[link] = 0.0
        else:
            out[link] = max(0.0, 2.0 * math.log2(g))
    return out


# -- JSON ----------------------------------------------------------------------

ChannelT = Union[LdChannel, GaussChannel]


def channel_from_json(obj) -> ChannelT:
    """Parse ``{"ld": {...}}`` or ``{"gauss": {...}}`` (dict or JSON text)."""
    if isinstance(obj, (str, bytes)):
        obj = json.loads(obj)
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ValueError('channel JSON must be an object with a single "ld" or "gauss" key')
    (kind, body), = obj.items()
    if not isinstance(body, dict):
        raise ValueError("channel parameters must be an object")
    if kind == "ld":
        allowed = {"n13", "n23", "n14", "n24", "nC", "p"}
        required = allowed - {"p"}
        cls = LdChannel
    elif kind == "gauss":
        allowed = {"g13", "g23", "g14", "g24", "gC", "theta"}
        required = allowed - {"theta"}
        cls = GaussChannel
    else:
        raise ValueError(f"unknown channel kind {kind!r}")
    missing = required - body.keys()
    extra = body.keys() - allowed
    if missing:
        raise ValueError(f"missing channel parameters: {sorted(missing)}")
    if extra:
        raise ValueError(f"unknown channel parameters: {sorted(extra)}")
    return cls(**body)


def channel_to_json(ch: ChannelT) -> dict:
    if isinstance(ch, LdChannel):
        return {"ld": asdict(ch)}
    if isinstance(ch, GaussChannel):
        return {"gauss": asdict(ch)}
    raise TypeError(f"not a channel: {ch!r}")


def load_channel(text_or_path: str) -> ChannelT:
    """Accept inline JSON or a path to a JSON file."""
    s = text_or_path.strip()
    if s.startswith("{"):
        return channel_from_json(s)
    return channel_from_json(Path(text_or_path).read_text())
