"""Bit-exact time-stepped simulation of the linear deterministic network.

Every signal is tracked twice: numerically, as a vector in GF(p)^n, and
symbolically, as an ``n x L`` matrix mapping the concatenated message
symbols (the "seed", length ``L``) to that vector.  The symbolic copy is
what makes the checks exact:

* a destination's transmission must be a linear function of what it has
  already received, so its symbolic matrix is written as a combination of
  past observation rows (failure is a causality violation) and the same
  combination is applied to the numeric observations;
* a decode step succeeds when each target symbol's unit vector lies in the
  row space of the observations available at that time, and the recovered
  value is read off the numeric observations with the same coefficients.

One block is one channel use; LD codebooks are uncoded level placements.
"""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .channel import LdChannel
from .gf_linalg import RowBasis, pack_rows, shift_matrix
from .schemes.ld import ld_no_coop_sum, regime1_ld_rates

__all__ = [
    "Symbol",
    "DecodeStep",
    "NodeProgram",
    "Scheme",
    "SimReport",
    "CausalityError",
    "run_ld_network",
    "build_example1_scheme",
    "build_example2_scheme",
    "build_regime1_scheme",
    "random_messages",
    "trace_csv",
]

NODE_NAMES = ("X1", "X2", "X3", "X4", "Y3", "Y4")


class CausalityError(RuntimeError):
    """A destination program asked to send something it cannot know yet."""


@dataclass(frozen=True)
class Symbol:
    """One message symbol: a seed column owned by ``user``."""

    user: int
    kind: str
    t: int
    index: int


@dataclass(frozen=True)
class DecodeStep:
    """Recover ``targets`` (seed columns) from observations up to ``time``."""

    time: int
    targets: tuple[int, ...]
    label: str = ""


Transmit = Callable[[int, Sequence[np.ndarray]], np.ndarray]


@dataclass
class NodeProgram:
    """Transmit rule and decode schedule of one node.

    ``transmit(t, history)`` returns the symbolic ``n x L`` matrix sent at
    time ``t``; ``history`` is the node's symbolic observations at times
    ``1..t-1`` (empty for sources).  Destination outputs are realized from
    past observations by the runner, so a rule that peeks at the seed fails
    the causality check instead of silently cheating.
    """

    node: int
    transmit: Transmit
    schedule: tuple[DecodeStep, ...] = ()


@dataclass
class Scheme:
    name: str
    channel: LdChannel
    horizon: int
    symbols: tuple[Symbol, ...]
    programs: tuple[NodeProgram, NodeProgram, NodeProgram, NodeProgram]
    nominal_rates: tuple[int, int]

    @property
    def width(self) -> int:
        return len(self.symbols)

    def columns(self, user: Optional[int] = None, kind: Optional[str] = None) -> list[int]:
        return [s.index for s in self.symbols
                if (user is None or s.user == user) and (kind is None or s.kind == kind)]


@dataclass
class SimReport:
    """Outcome of one run.

    ``achieved_rates`` are per-use steady-state rates (symbols of one
    interior block that were recovered); ``symbol_counts`` are the exact
    totals over the horizon, which are smaller by the boundary symbols.
    With ``record_trace`` the trace holds numeric vectors per node and the
    symbolic received matrices under ``"Y3_sym"`` / ``"Y4_sym"``.
    """

    scheme: str
    T: int
    J: int
    success: bool
    achieved_rates: tuple[int, int]
    symbol_counts: tuple[int, int]
    decoded: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    trace: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "scheme": self.scheme,
            "T": self.T,
            "J": self.J,
            "success": self.success,
            "achieved_rates": list(self.achieved_rates),
            "symbol_counts": list(self.symbol_counts),
            "failures": list(self.failures),
        }


# -- runner --------------------------------------------------------------------


def random_messages(scheme: Scheme, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.integers(0, scheme.channel.p, size=scheme.width, dtype=np.int64)


class _Observer:
    """Observation history of one destination: symbolic rows + numeric values."""

    def __init__(self, width: int, p: int):
        self.p = p
        self.basis = RowBasis(width, p)
        self.values: list[int] = []
        self.sym: list[np.ndarray] = []

    def observe(self, sym: np.ndarray, val: np.ndarray) -> None:
        self.sym.append(sym)
        if self.p == 2:
            for r in pack_rows(sym):
                self.basis.add_packed(r)
        else:
            for row in sym:
                self.basis.add(row)
        self.values.extend(int(v) for v in val)

    def realize(self, target: np.ndarray) -> Optional[np.ndarray]:
        """Numeric value of symbolic rows, if determined by the history."""
        out = np.zeros(target.shape[0], dtype=np.int64)
        vals = np.asarray(self.values, dtype=np.int64)
        for i, row in enumerate(target):
            if not row.any():
                continue
            c = self.basis.express(row)
            if c is None:
                return None
            out[i] = int(c @ vals[: c.size]) % self.p
        return out


def run_ld_network(scheme: Scheme, messages: np.ndarray,
                   record_trace: bool = False) -> SimReport:
    ch, T, p = scheme.channel, scheme.horizon, scheme.channel.p
    L = scheme.width
    messages = np.asarray(messages, dtype=np.int64) % p
    if messages.shape != (L,):
        raise ValueError(f"expected {L} message symbols, got shape {messages.shape}")
    owner = np.array([s.user for s in scheme.symbols], dtype=np.int64)
    g = {k: ch.gain(k) for k in ("13", "23", "14", "24", "C")}
    obs = {3: _Observer(L, p), 4: _Observer(L, p)}
    steps = {d: sorted(scheme.programs[d - 1].schedule, key=lambda s: s.time) for d in (3, 4)}
    decoded = {3: {}, 4: {}}
    failures = []
    trace = {name: [] for name in NODE_NAMES} if record_trace else {}

    def run_steps(d: int, upto: int) -> None:
        while steps[d] and steps[d][0].time <= upto:
            step = steps[d].pop(0)
            eye = np.zeros((len(step.targets), L), dtype=np.int64)
            eye[np.arange(len(step.targets)), list(step.targets)] = 1
            vals = obs[d].realize(eye) if step.targets else np.zeros(0, dtype=np.int64)
            if vals is None:
                failures.append({"node": d, "time": step.time, "step": step.label})
                continue
            for c, v in zip(step.targets, vals):
                decoded[d][c] = int(v)

    for t in range(1, T + 1):
        xs_sym, xs_val = [], []
        for k in (1, 2):
            m = np.asarray(scheme.programs[k - 1].transmit(t, ()), dtype=np.int64) % p
            stray = np.nonzero(m.any(axis=0) & (owner != k))[0]
            if stray.size:
                raise CausalityError(f"source {k} uses symbols it does not own: {stray[:5]}")
            xs_sym.append(m)
            xs_val.append(m @ messages % p)
        for d in (3, 4):
            m = np.asarray(scheme.programs[d - 1].transmit(t, tuple(obs[d].sym)),
                           dtype=np.int64) % p
            v = obs[d].realize(m)
            if v is None:
                raise CausalityError(f"destination {d} transmit at t={t} is not causal")
            xs_sym.append(m)
            xs_val.append(v)
        x1, x2, x3, x4 = xs_sym
        v1, v2, v3, v4 = xs_val
        y3s = (g["13"] @ x1 + g["23"] @ x2 + g["C"] @ x4) % p
        y4s = (g["24"] @ x2 + g["14"] @ x1 + g["C"] @ x3) % p
        y3v = (g["13"] @ v1 + g["23"] @ v2 + g["C"] @ v4) % p
        y4v = (g["24"] @ v2 + g["14"] @ v1 + g["C"] @ v3) % p
        # The numeric run must agree with the symbolic bookkeeping.
        assert np.array_equal(y3v, y3s @ messages % p)
        assert np.array_equal(y4v, y4s @ messages % p)
        obs[3].observe(y3s, y3v)
        obs[4].observe(y4s, y4v)
        if record_trace:
            for name, v in zip(NODE_NAMES, (v1, v2, v3, v4, y3v, y4v)):
                trace[name].append(v.copy())
            trace.setdefault("Y3_sym", []).append(y3s)
            trace.setdefault("Y4_sym", []).append(y4s)
        for d in (3, 4):
            run_steps(d, t)
    for d in (3, 4):
        run_steps(d, T)

    wrong = []
    for d in (3, 4):
        for c, v in decoded[d].items():
            if v != messages[c]:
                wrong.append({"node": d, "column": c})
    own_ok = {}
    for k, d in ((1, 3), (2, 4)):
        cols = scheme.columns(user=k)
        own_ok[k] = all(c in decoded[d] and decoded[d][c] == messages[c] for c in cols)
    success = not failures and not wrong and own_ok[1] and own_ok[2]
    counts = tuple(len(scheme.columns(user=k)) if own_ok[k] else 0 for k in (1, 2))
    rates = _steady_rates(scheme, decoded, messages)
    return SimReport(scheme.name, T, T, success, rates, counts,
                     {d: dict(sorted(v.items())) for d, v in decoded.items()},
                     failures + [{"wrong": w} for w in wrong], trace)


def _steady_rates(scheme: Scheme, decoded: dict, messages: np.ndarray) -> tuple[int, int]:
    # Largest per-block symbol count over blocks whose symbols were all
    # recovered by the intended destination.
    out = []
    for k, d in ((1, 3), (2, 4)):
        per_t: dict[int, list[int]] = {}
        for s in scheme.symbols:
            if s.user == k:
                per_t.setdefault(s.t, []).append(s.index)
        best = 0
        for cols in per_t.values():
            if all(decoded[d].get(c) == messages[c] for c in cols):
                best = max(best, len(cols))
        out.append(best)
    return (out[0], out[1])


def trace_csv(report: SimReport) -> str:
    """Columnar CSV ``t,node,level,value`` (levels numbered from the top)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "node", "level", "value"])
    for name in NODE_NAMES:
        for t, vec in enumerate(report.trace.get(name, []), start=1):
            for lvl, v in enumerate(vec, start=1):
                w.writerow([t, name, lvl, int(v)])
    return buf.getvalue()


# -- symbol layout ---------------------------------------------------------------


class _Layout:
    """Allocates seed columns and builds codeword matrices."""

    def __init__(self, n: int, T: int, p: int):
        self.n, self.T, self.p = n, T, p
        self.symbols: list[Symbol] = []
        self._bands: dict[tuple[int, str, int], list[tuple[int, int]]] = {}

    def add_band(self, user: int, kind: str, t: int, levels: Sequence[int]) -> None:
        """Fresh symbols of ``user`` on 1-based ``levels`` at block ``t``."""
        for lvl in levels:
            if not 1 <= lvl <= self.n:
                raise ValueError(f"level {lvl} outside 1..{self.n}")
            idx = len(self.symbols)
            self.symbols.append(Symbol(user, kind, t, idx))
            self._bands.setdefault((user, kind, t), []).append((lvl, idx))

    def add_coded(self, user: int, kind: str, t: int, vectors: np.ndarray) -> None:
        """Fresh symbols spread over levels by the columns of ``vectors``."""
        for j in range(vectors.shape[1]):
            idx = len(self.symbols)
            self.symbols.append(Symbol(user, kind, t, idx))
            self._bands.setdefault((user, kind, t), []).append((vectors[:, j].copy(), idx))

    def cols(self, user: int, kind: str, t: int) -> tuple[int, ...]:
        return tuple(i for _, i in self._bands.get((user, kind, t), ()))

    def codeword(self, user: int, kind: str, t: int) -> np.ndarray:
        m = np.zeros((self.n, len(self.symbols)), dtype=np.int64)
        for where, idx in self._bands.get((user, kind, t), ()):
            if isinstance(where, np.ndarray):
                m[:, idx] = where
            else:
                m[where - 1, idx] = 1
        return m

    def zero(self) -> np.ndarray:
        return np.zeros((self.n, len(self.symbols)), dtype=np.int64)


def _silent(layout: _Layout) -> Transmit:
    return lambda t, hist: layout.zero()


# -- generic regime-(i) construction -------------------------------------------------


@dataclass(frozen=True)
class _UserPlan:
    """Level bands of one user in its own transmit coordinates (1-based starts)."""

    nulling: bool
    bands: dict  # kind -> (start, count) or an n x r precoding matrix
    shift: int = 0  # exponent of the anti-causal filter S**shift
    s_skip: int = 0  # leading blocks with zeroed cooperative-private symbols


def _view(ch: LdChannel, user: int) -> tuple[int, int, int, int]:
    """(own direct, own cross, other cross, other direct) levels."""
    if user == 1:
        return ch.n13, ch.n14, ch.n23, ch.n24
    return ch.n24, ch.n23, ch.n14, ch.n13


def _nulling_plan(ch: LdChannel, user: int, rates, u_offset: int = 0) -> _UserPlan:
    nd, nx, ox, _ = _view(ch, user)
    nc = ch.nC
    a = nd + nc - nx - ox
    s0 = nx - nc + 1
    bands = {
        "U": (u_offset + 1, rates.r_U),
        "S": (s0, rates.r_S),
        "Zup": (nx + 1, rates.r_Zup),
        "Zdn": (nd + nc - ox + 1, rates.r_Zdn),
    }
    # Cooperative-private symbols of the first blocks would reach the other
    # destination before any echo exists to cancel them; the filter pushes
    # later blocks' symbols below the cross-link level after ``skip`` steps.
    skip = 0
    if rates.r_S:
        while s0 + a * skip <= nx:
            skip += 1
    return _UserPlan(True, bands, a, skip)


def _plain_plan(ch: LdChannel, user: int, rates, u_place) -> _UserPlan:
    """``u_place`` is a level offset or an ``n x r_U`` precoding matrix."""
    _, nx, _, _ = _view(ch, user)
    u = u_place if isinstance(u_place, np.ndarray) else (u_place + 1, rates.r_U)
    return _UserPlan(False, {"U": u, "Zdn": (nx + 1, rates.r_Zdn)})


def _precoders(ch: LdChannel, user: int, r: int):
    """Full-rank ``n x r`` matrices supported on the levels the user's own
    destination sees, in a fixed enumeration order."""
    n, p = ch.n, ch.p
    nd = _view(ch, user)[0]
    vecs = []
    for bits in itertools.product(range(p), repeat=nd):
        if any(bits):
            v = np.zeros(n, dtype=np.int64)
            v[:nd] = bits
            vecs.append(v)
    for combo in itertools.combinations(range(len(vecs)), r):
        m = np.stack([vecs[i] for i in combo], axis=1)
        if _full_column_rank(m, p):
            yield m


def _full_column_rank(m: np.ndarray, p: int) -> bool:
    b = RowBasis(m.shape[0], p)
    for col in m.T:
        b.add(col)
    return b.rank == m.shape[1]


def _assemble(name: str, ch: LdChannel, T: int, plans: dict, nominal: tuple[int, int],
              lagged_phase2: bool = False) -> Scheme:
    n, p = ch.n, ch.p
    lay = _Layout(n, T, p)
    for k in (1, 2):
        plan = plans[k]
        for t in range(1, T + 1):
            for kind, where in plan.bands.items():
                if isinstance(where, np.ndarray):
                    lay.add_coded(k, kind, t, where)
                    continue
                start, cnt = where
                if cnt <= 0:
                    continue
                if kind == "S" and t <= plan.s_skip:
                    continue
                lay.add_band(k, kind, t, range(start, start + cnt))
    neg = (p - 1) % p
    G = {k: ch.gain(k) for k in ("13", "23", "14", "24", "C")}
    filt = {k: shift_matrix(n, plans[k].shift, p) for k in (1, 2)}

    def source(k: int) -> Transmit:
        plan = plans[k]

        def tx(t: int, hist) -> np.ndarray:
            x = lay.zero()
            for kind in plan.bands:
                if kind == "S":
                    a_m = np.eye(n, dtype=np.int64)
                    for tau in range(t, T + 1):
                        x = x + a_m @ lay.codeword(k, "S", tau)
                        a_m = filt[k] @ a_m % p
                        if not a_m.any():
                            break
                else:
                    x = x + lay.codeword(k, kind, t)
            return x % p
        return tx

    # Destination d relays iff its own user nulls.
    relay = {3: plans[1].nulling, 4: plans[2].nulling}
    up = {3: shift_matrix(n, -(n - ch.n23), p) * neg % p,
          4: shift_matrix(n, -(n - ch.n14), p) * neg % p}
    direct = {3: G["13"], 4: G["24"]}
    cross_from_own = {3: G["14"], 4: G["23"]}  # own source seen at the other destination

    def dest(d: int) -> Transmit:
        k = 1 if d == 3 else 2
        other = 7 - d
        if not relay[d]:
            return _silent(lay)

        def tx(t: int, hist) -> np.ndarray:
            if t == 1:
                return lay.zero()
            j = t - 1
            res = hist[j - 1].copy()
            known = lay.codeword(k, "U", j) + lay.codeword(k, "S", j) + lay.codeword(k, "Zup", j)
            res = res - direct[d] @ known
            if relay[other] and j >= 2:
                prev = lay.codeword(k, "U", j - 1) + lay.codeword(k, "Zup", j - 1)
                res = res - G["C"] @ up[other] @ cross_from_own[d] @ prev
            return up[d] @ (res % p) % p
        return tx

    def schedule(d: int) -> tuple[DecodeStep, ...]:
        k = 1 if d == 3 else 2
        o = 3 - k
        out = []
        if plans[k].nulling:
            for t in range(1, T + 1):
                out.append(DecodeStep(t, lay.cols(k, "U", t) + lay.cols(k, "S", t)
                                      + lay.cols(k, "Zup", t), f"phase1[{t}]"))
            for t in range(1, T + 1):
                when = min(T, t + 1) if lagged_phase2 else T
                out.append(DecodeStep(when, lay.cols(o, "U", t) + lay.cols(k, "Zdn", t),
                                      f"phase2[{t}]"))
        else:
            for t in range(1, T + 1):
                out.append(DecodeStep(t, lay.cols(k, "U", t) + lay.cols(o, "U", t)
                                      + lay.cols(k, "Zdn", t), f"single[{t}]"))
        return tuple(out)

    # Programs are built after every symbol is registered so that all
    # matrices share the final width.
    programs = (
        NodeProgram(1, source(1)),
        NodeProgram(2, source(2)),
        NodeProgram(3, dest(3), schedule(3)),
        NodeProgram(4, dest(4), schedule(4)),
    )
    return Scheme(name, ch, T, tuple(lay.symbols), programs, nominal)


def _works(scheme: Scheme, trials: int = 2) -> bool:
    for s in range(trials):
        try:
            rep = run_ld_network(scheme, random_messages(scheme, s))
        except CausalityError:
            return False
        if not rep.success:
            return False
    return True


SEARCH_HORIZON = 5


def build_regime1_scheme(ch: LdChannel, T: int = 20) -> Scheme:
    """Uncoded block-Markov nulling scheme for a regime-(i) channel.

    Bands follow the supports of the coded scheme: public symbols on top,
    cooperative-private symbols just below the level where the cross link
    stops reaching, upper private symbols below the cross-link level and
    lower private symbols at the bottom of what the direct link delivers.
    Where the public symbols of the two users must share the observation of
    a single-phase destination (case (b)), or when no cooperation is used,
    the placement is chosen by a small search verified on a short horizon.
    """
    if T < 1:
        raise ValueError("horizon must be at least 1")
    alloc = regime1_ld_rates(ch)
    case = alloc.case
    nominal = (alloc.user1.total, alloc.user2.total)
    if case == "no-coop":
        return _no_coop_scheme(ch, T)
    if case == "b2":
        return _mirror_scheme(build_regime1_scheme(ch.mirrored(), T), ch)
    if case == "a":
        plans = {1: _nulling_plan(ch, 1, alloc.user1), 2: _nulling_plan(ch, 2, alloc.user2)}
        return _assemble("regime1", ch, T, plans, nominal)
    # case b1: user 1 nulls, user 2 sends public plus low private symbols.
    r1, r2 = alloc.user1.r_U, alloc.user2.r_U
    offsets1 = range(0, max(0, ch.n14 - ch.nC - r1) + 1)
    places2 = itertools.chain(range(0, max(0, ch.n23 - r2) + 1), _precoders(ch, 2, r2))
    for u2 in places2:
        for o1 in offsets1:
            plans = {1: _nulling_plan(ch, 1, alloc.user1, o1),
                     2: _plain_plan(ch, 2, alloc.user2, u2)}
            if _works(_assemble("regime1", ch, min(T, SEARCH_HORIZON), plans, nominal)):
                return _assemble("regime1", ch, T, plans, nominal)
    raise RuntimeError(f"no working public-symbol placement for {ch}")


def _mirror_scheme(sch: Scheme, ch: LdChannel) -> Scheme:
    """Relabel a scheme built for the mirrored channel."""
    swap_user = {1: 2, 2: 1}
    symbols = tuple(Symbol(swap_user[s.user], s.kind, s.t, s.index) for s in sch.symbols)
    p1, p2, p3, p4 = sch.programs
    programs = (NodeProgram(1, p2.transmit), NodeProgram(2, p1.transmit),
                NodeProgram(3, p4.transmit, p4.schedule),
                NodeProgram(4, p3.transmit, p3.schedule))
    return Scheme(sch.name, ch, sch.horizon, symbols, programs,
                  (sch.nominal_rates[1], sch.nominal_rates[0]))


def _no_coop_scheme(ch: LdChannel, T: int) -> Scheme:
    """Silent destinations; each source puts fresh symbols on a level subset.

    The subsets are found by exhaustive search for the largest total that
    both destinations can decode in a single use.
    """
    n, p = ch.n, ch.p
    target = ld_no_coop_sum(ch)
    best = None
    levels = range(1, n + 1)
    subsets = [tuple(c) for r in range(n, -1, -1) for c in itertools.combinations(levels, r)]
    for s1 in subsets:
        for s2 in subsets:
            tot = len(s1) + len(s2)
            if best is not None and tot <= best[0]:
                continue
            if _one_shot_ok(ch, s1, s2):
                best = (tot, s1, s2)
                if tot >= target:
                    break
        if best is not None and best[0] >= target:
            break
    _, s1, s2 = best
    lay = _Layout(n, T, p)
    for t in range(1, T + 1):
        lay.add_band(1, "Z", t, s1)
        lay.add_band(2, "Z", t, s2)

    def source(k: int) -> Transmit:
        return lambda t, hist: lay.codeword(k, "Z", t)

    programs = (
        NodeProgram(1, source(1)),
        NodeProgram(2, source(2)),
        NodeProgram(3, _silent(lay), tuple(DecodeStep(t, lay.cols(1, "Z", t), f"single[{t}]")
                                           for t in range(1, T + 1))),
        NodeProgram(4, _silent(lay), tuple(DecodeStep(t, lay.cols(2, "Z", t), f"single[{t}]")
                                           for t in range(1, T + 1))),
    )
    return Scheme("no-coop", ch, T, tuple(lay.symbols), programs, (len(s1), len(s2)))


def _one_shot_ok(ch: LdChannel, s1, s2) -> bool:
    n, p = ch.n, ch.p
    L = len(s1) + len(s2)
    x1 = np.zeros((n, L), dtype=np.int64)
    x2 = np.zeros((n, L), dtype=np.int64)
    for i, lvl in enumerate(s1):
        x1[lvl - 1, i] = 1
    for i, lvl in enumerate(s2):
        x2[lvl - 1, len(s1) + i] = 1
    for y, own in (((ch.gain("13") @ x1 + ch.gain("23") @ x2) % p, range(len(s1))),
                   ((ch.gain("24") @ x2 + ch.gain("14") @ x1) % p, range(len(s1), L))):
        b = RowBasis(L, p)
        for row in y:
            b.add(row)
        for c in own:
            e = np.zeros(L, dtype=np.int64)
            e[c] = 1
            if b.express(e) is None:
                return False
    return True


# -- the two worked examples -------------------------------------------------------


EXAMPLE1_CHANNEL = LdChannel(5, 2, 2, 5, 1)
EXAMPLE2_CHANNEL = LdChannel(2, 1, 1, 2, 3)


def build_example1_scheme(T: int = 20, ch: Optional[LdChannel] = None) -> Scheme:
    """Nulling example on (5,2,2,5,1): rates (4, 4).

    The lower private symbol and the interferer's public symbol of block t
    are decoded one step later, at t+1.
    """
    ch = EXAMPLE1_CHANNEL if ch is None else ch
    if ch.levels() != EXAMPLE1_CHANNEL.levels():
        raise ValueError(f"example 1 needs channel {EXAMPLE1_CHANNEL.levels()}, got {ch.levels()}")
    alloc = regime1_ld_rates(ch)
    plans = {1: _nulling_plan(ch, 1, alloc.user1), 2: _nulling_plan(ch, 2, alloc.user2)}
    return _assemble("example1", ch, T, plans, (4, 4), lagged_phase2=True)


def build_example2_scheme(T: int = 20, ch: Optional[LdChannel] = None) -> Scheme:
    """Relayed-public example on (2,1,1,2,3): rates (2, 2).

    Sources send ``(u[t]; z[t]; 0)`` with ``u[T] = 0``; each destination
    forwards the other user's previous public symbol on its top level.
    """
    ch = EXAMPLE2_CHANNEL if ch is None else ch
    if ch.levels() != EXAMPLE2_CHANNEL.levels():
        raise ValueError(f"example 2 needs channel {EXAMPLE2_CHANNEL.levels()}, got {ch.levels()}")
    if T < 1:
        raise ValueError("horizon must be at least 1")
    lay = _Layout(ch.n, T, ch.p)
    for t in range(1, T + 1):
        for k in (1, 2):
            if t < T:
                lay.add_band(k, "U", t, (1,))
            lay.add_band(k, "Z", t, (2,))

    def source(k: int) -> Transmit:
        return lambda t, hist: lay.codeword(k, "U", t) + lay.codeword(k, "Z", t)

    def dest(d: int) -> Transmit:
        k = 1 if d == 3 else 2
        return lambda t, hist: lay.codeword(k, "U", t - 1)

    def schedule(d: int) -> tuple[DecodeStep, ...]:
        k = 1 if d == 3 else 2
        o = 3 - k
        out = []
        for t in range(1, T + 1):
            tg = lay.cols(k, "U", t)
            if t > 1:
                tg += lay.cols(o, "U", t - 1) + lay.cols(k, "Z", t - 1)
            out.append(DecodeStep(t, tg, f"step[{t}]"))
        out.append(DecodeStep(T, lay.cols(k, "Z", T), "final"))
        return tuple(out)

    programs = (
        NodeProgram(1, source(1)),
        NodeProgram(2, source(2)),
        NodeProgram(3, dest(3), schedule(3)),
        NodeProgram(4, dest(4), schedule(4)),
    )
    return Scheme("example2", ch, T, tuple(lay.symbols), programs, (2, 2))
