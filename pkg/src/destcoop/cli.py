"""Command-line entry point: bounds, achievable rates, simulation, sweeps and
the normalized sum-capacity curve.

Exit codes are 0 on success, 1 when a verification fails and 2 on usage
errors (bad flags, unreadable or invalid channel JSON).
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .bounds import gaussian_bound_set, gaussian_primed_bound_set, ld_bound_set
from .channel import GaussChannel, LdChannel, channel_to_json, load_channel
from .schemes.gauss import gauss_achievable_sum
from .schemes.ld import ld_achievable_sum
from .simulator import (
    build_example1_scheme,
    build_example2_scheme,
    build_regime1_scheme,
    random_messages,
    run_ld_network,
    trace_csv,
)

__all__ = [
    "SweepReport",
    "GAP_LIMIT",
    "parse_ranges",
    "sample_gauss_channels",
    "cmd_verify_ld_sweep",
    "cmd_verify_gauss_gap",
    "cmd_curve_fig2",
    "fig2_breakpoints",
    "main",
]

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
GAP_LIMIT = 43.0
GAP_TOL = 1e-9  # float slack on "gap >= 0"
DEFAULT_RANGES = "0:5,0:5,0:5,0:5,0:8"
DEFAULT_DB = (-10.0, 60.0)
FLOAT_FMT = "{:.6f}"


def _num(x):
    """JSON-friendly number: exact integers stay integers."""
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    return x


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return _num(obj)


def _fmt(x) -> str:
    x = _num(x)
    if isinstance(x, int):
        return str(x)
    return FLOAT_FMT.format(x)


@dataclass
class SweepReport:
    mode: str
    total: int = 0
    mismatches: list = field(default_factory=list)
    max_gap: Optional[float] = None
    min_gap: Optional[float] = None
    runtime_ms: Optional[float] = None
    rows: list = field(default_factory=list)  # per-sample detail (Gaussian mode)

    @property
    def ok(self) -> bool:
        if self.mode == "ld":
            return not self.mismatches
        if self.total == 0:
            return True
        return self.max_gap <= GAP_LIMIT and self.min_gap >= -GAP_TOL and not self.mismatches

    def to_json(self, timing: bool = False) -> dict:
        out = {"mode": self.mode, "total": self.total, "ok": self.ok,
               "mismatches": _jsonable(self.mismatches)}
        if self.mode == "gauss":
            out["max_gap"] = self.max_gap
            out["min_gap"] = self.min_gap
        if timing and self.runtime_ms is not None:
            out["runtime_ms"] = self.runtime_ms
        return out


def _pool_map(fn, items: Sequence, jobs: int) -> list:
    # Results come back in input order whatever the completion order.
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    chunk = max(1, len(items) // (4 * jobs))
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items, chunksize=chunk))


def _default_jobs() -> int:
    return os.cpu_count() or 1


# -- LD sweep ----------------------------------------------------------------------


def parse_ranges(text: str) -> list[range]:
    """Five comma-separated inclusive ranges ``lo:hi`` (or single values) for
    n13, n23, n14, n24 and nC.  ``lo > hi`` gives an empty range."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 5:
        raise ValueError("--ranges needs five comma-separated entries (n13,n23,n14,n24,nC)")
    out = []
    for p in parts:
        lo, sep, hi = p.partition(":")
        try:
            a = int(lo)
            b = int(hi) if sep else a
        except ValueError:
            raise ValueError(f"bad range {p!r}") from None
        if a < 0:
            raise ValueError(f"levels must be non-negative, got {p!r}")
        out.append(range(a, b + 1))
    return out


def _ld_item(levels: tuple[int, ...]):
    ch = LdChannel(*levels)
    ach = ld_achievable_sum(ch).sum
    bound = ld_bound_set(ch).min_bound
    return levels, ach, bound


def cmd_verify_ld_sweep(ranges: Sequence[Iterable[int]], jobs: int = 1) -> SweepReport:
    t0 = time.perf_counter()
    items = list(itertools.product(*[list(r) for r in ranges]))
    rep = SweepReport("ld", total=len(items))
    for levels, ach, bound in _pool_map(_ld_item, items, jobs):
        if ach != bound:
            rep.mismatches.append({"channel": channel_to_json(LdChannel(*levels)),
                                   "achievable": ach, "bound": bound})
    rep.runtime_ms = (time.perf_counter() - t0) * 1e3
    return rep


# -- Gaussian gap ------------------------------------------------------------------


def sample_gauss_channels(n: int, gain_range_db=DEFAULT_DB, seed: int = 0,
                          zero_gains: bool = False) -> list[GaussChannel]:
    """Gains log-uniform in power (``10 log10 |g|^2`` uniform on the range),
    theta uniform on ``[0, 2 pi)``."""
    rng = np.random.default_rng(seed)
    lo, hi = gain_range_db
    db = rng.uniform(lo, hi, size=(n, 5))
    theta = rng.uniform(0.0, 2.0 * math.pi, size=n)
    mags = 10.0 ** (db / 20.0)
    if zero_gains:
        mags = np.zeros_like(mags)
    return [GaussChannel(*map(float, mags[i]), float(theta[i])) for i in range(n)]


def _gauss_item(ch: GaussChannel):
    b = gaussian_bound_set(ch).min_bound
    a = gauss_achievable_sum(ch)
    return b, float(a.sum), a.scheme


def cmd_verify_gauss_gap(n_samples: int, gain_range_db=DEFAULT_DB, rng_seed: int = 0,
                         jobs: int = 1, zero_gains: bool = False) -> SweepReport:
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    t0 = time.perf_counter()
    chans = sample_gauss_channels(n_samples, gain_range_db, rng_seed, zero_gains)
    rep = SweepReport("gauss", total=n_samples)
    gaps = []
    for i, (ch, (b, a, scheme)) in enumerate(zip(chans, _pool_map(_gauss_item, chans, jobs))):
        gap = b - a
        gaps.append(gap)
        rep.rows.append({"index": i, "channel": channel_to_json(ch), "bound": b,
                         "achievable": a, "gap": gap, "scheme": scheme})
        if not (-GAP_TOL <= gap <= GAP_LIMIT):
            rep.mismatches.append({"channel": channel_to_json(ch), "achievable": a, "bound": b})
    rep.max_gap = max(gaps)
    rep.min_gap = min(gaps)
    rep.runtime_ms = (time.perf_counter() - t0) * 1e3
    return rep


# -- curve -------------------------------------------------------------------------


def _alphas(step: float) -> list[float]:
    if not step > 0:
        raise ValueError("step must be positive")
    n = int(math.floor(2.0 / step + 1e-9))
    return [round(k * step, 12) for k in range(n + 1)]


def cmd_curve_fig2(gd_bits: float = 60.0, step: float = 0.05) -> list[tuple[float, float]]:
    """Rows ``(alpha, min(u1..u5) / gd_bits)`` with ``|gD|^2 = 2^gd_bits``,
    ``|gI|^2 = 2^(gd_bits/2)`` and ``|gC|^2 = 2^(alpha gd_bits)``."""
    if not gd_bits > 0:
        raise ValueError("gd_bits must be positive")
    gd = 2.0 ** (gd_bits / 2.0)
    gi = 2.0 ** (gd_bits / 4.0)
    rows = []
    for a in _alphas(step):
        gc = 2.0 ** (a * gd_bits / 2.0)
        ch = GaussChannel(gd, gi, gi, gd, gc, 0.0)
        rows.append((a, gaussian_bound_set(ch).min_bound / gd_bits))
    return rows


def fig2_breakpoints(n_d: int = 120) -> list[Fraction]:
    """Slope changes of the level-model limit of the curve.

    Uses the exact level bounds with ``n13 = n24 = n_d``, ``n14 = n23 = n_d/2``
    and ``nC`` stepping through the integers up to ``2 n_d``.
    """
    if n_d % 2:
        raise ValueError("n_d must be even")
    vals = [Fraction(ld_bound_set(LdChannel(n_d, n_d // 2, n_d // 2, n_d, k)).min_bound, n_d)
            for k in range(2 * n_d + 1)]
    out = []
    for k in range(1, 2 * n_d):
        if vals[k + 1] - vals[k] != vals[k] - vals[k - 1]:
            out.append(Fraction(k, n_d))
    return out


# -- CLI plumbing ------------------------------------------------------------------


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _channel(arg: Optional[str]):
    if arg is None:
        raise _UsageError("--channel is required")
    try:
        return load_channel(arg)
    except (OSError, ValueError, TypeError) as exc:
        raise _UsageError(f"invalid channel: {exc}") from None


def _csv(rows: Iterable[Sequence], header: Sequence[str], comments: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) if isinstance(v, (int, float, Fraction, np.number))
                    and not isinstance(v, bool) else v for v in r])
    return buf.getvalue()


def _dump(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True) + "\n"


def _run_bounds(args) -> tuple[str, int]:
    ch = _channel(args.channel)
    if isinstance(ch, LdChannel):
        bs = ld_bound_set(ch)
        out = bs.to_json()
    else:
        bs = gaussian_bound_set(ch)
        out = bs.to_json()
        out["primed"] = gaussian_primed_bound_set(ch, args.pairing).to_json()
    if args.format == "csv":
        rows = [(f"u{i}", v) for i, v in enumerate(bs.values, start=1)]
        rows.append(("min", bs.min_bound))
        return _csv(rows, ["bound", "value"]), EXIT_OK
    return _dump(out), EXIT_OK


def _run_achieve(args) -> tuple[str, int]:
    ch = _channel(args.channel)
    res = ld_achievable_sum(ch) if isinstance(ch, LdChannel) else gauss_achievable_sum(ch)
    if args.format == "csv":
        return _csv([(res.scheme, res.sum)], ["scheme", "sum"]), EXIT_OK
    out = res.to_json()
    out["candidates"] = res.candidates
    return _dump(out), EXIT_OK


def _run_simulate(args) -> tuple[str, int]:
    T = args.horizon
    if T < 1:
        raise _UsageError("--horizon must be at least 1")
    ch = None if args.channel is None else _channel(args.channel)
    if ch is not None and not isinstance(ch, LdChannel):
        raise _UsageError("simulate needs an LD channel")
    try:
        if args.scheme == "example1":
            sch = build_example1_scheme(T, ch)
        elif args.scheme == "example2":
            sch = build_example2_scheme(T, ch)
        else:
            if ch is None:
                raise _UsageError("--scheme regime1 needs --channel")
            sch = build_regime1_scheme(ch, T)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    rep = run_ld_network(sch, random_messages(sch, args.seed), record_trace=args.trace is not None)
    if args.trace is not None:
        with open(args.trace, "w", newline="") as fh:
            fh.write(trace_csv(rep))
    code = EXIT_OK if rep.success else EXIT_FAIL
    if args.format == "csv":
        r1, r2 = rep.achieved_rates
        return _csv([(rep.scheme, rep.T, rep.success, r1, r2)],
                    ["scheme", "T", "success", "R1", "R2"]), code
    return _dump(rep.to_json()), code


def _run_ld_sweep(args) -> tuple[str, int]:
    try:
        ranges = parse_ranges(args.ranges)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    rep = cmd_verify_ld_sweep(ranges, jobs=args.jobs)
    code = EXIT_OK if rep.ok else EXIT_FAIL
    if args.format == "csv":
        rows = []
        for m in rep.mismatches:
            c = m["channel"]["ld"]
            rows.append((c["n13"], c["n23"], c["n14"], c["n24"], c["nC"], m["achievable"], m["bound"]))
        comments = [f"total={rep.total} mismatches={len(rep.mismatches)}"]
        if args.timing:
            comments.append(f"runtime_ms={rep.runtime_ms:.3f}")
        return _csv(rows, ["n13", "n23", "n14", "n24", "nC", "achievable", "bound"], comments), code
    return _dump(rep.to_json(args.timing)), code


def _run_gauss_gap(args) -> tuple[str, int]:
    if args.samples < 1:
        raise _UsageError("--samples must be at least 1")
    lo, hi = args.gain_db
    if lo > hi:
        raise _UsageError("--gain-db needs LO <= HI")
    rep = cmd_verify_gauss_gap(args.samples, (lo, hi), args.seed, jobs=args.jobs,
                               zero_gains=args.zero_gains)
    code = EXIT_OK if rep.ok else EXIT_FAIL
    if args.format == "csv":
        rows = []
        for r in rep.rows:
            g = r["channel"]["gauss"]
            rows.append((r["index"], g["g13"], g["g23"], g["g14"], g["g24"], g["gC"], g["theta"],
                         r["bound"], r["achievable"], r["gap"], r["scheme"]))
        comments = [f"total={rep.total} max_gap={rep.max_gap:.6f} min_gap={rep.min_gap:.6f}"]
        if args.timing:
            comments.append(f"runtime_ms={rep.runtime_ms:.3f}")
        header = ["index", "g13", "g23", "g14", "g24", "gC", "theta",
                  "bound", "achievable", "gap", "scheme"]
        return _csv(rows, header, comments), code
    return _dump(rep.to_json(args.timing)), code


def _run_curve(args) -> tuple[str, int]:
    try:
        rows = cmd_curve_fig2(args.gd_bits, args.step)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    bps = fig2_breakpoints()
    if args.format == "json":
        return _dump({"gd_bits": args.gd_bits, "step": args.step,
                      "breakpoints": [float(b) for b in bps],
                      "rows": [{"alpha": a, "normalized_sum": v} for a, v in rows]}), EXIT_OK
    note = "breakpoints (level-model limit): " + ", ".join(str(b) for b in bps)
    return _csv(rows, ["alpha", "normalized_sum"], [note]), EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="destcoop", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, fn, help_, fmt="json"):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--format", choices=("json", "csv"), default=fmt)
        sp.set_defaults(run=fn)
        return sp

    sp = add("bounds", _run_bounds, "upper bounds u1..u5 for a channel")
    sp.add_argument("--channel", help="channel JSON, inline or a file path")
    sp.add_argument("--pairing", choices=("printed", "canonical"), default="printed",
                    help="link pairing used by the primed u'2/u'3 (Gaussian only)")

    sp = add("achieve", _run_achieve, "best achievable sum rate")
    sp.add_argument("--channel")

    sp = add("simulate", _run_simulate, "bit-exact LD simulation of a scheme")
    sp.add_argument("--scheme", choices=("example1", "example2", "regime1"), required=True)
    sp.add_argument("--channel")
    sp.add_argument("--horizon", type=int, default=20)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trace", metavar="PATH", help="write a t,node,level,value CSV here")

    sp = add("verify-ld-sweep", _run_ld_sweep, "LD exactness sweep")
    sp.add_argument("--ranges", default=DEFAULT_RANGES,
                    help="lo:hi for n13,n23,n14,n24,nC (inclusive)")
    sp.add_argument("--jobs", type=int, default=_default_jobs())
    sp.add_argument("--timing", action="store_true", help="include runtime (not reproducible)")

    sp = add("verify-gauss-gap", _run_gauss_gap, "Gaussian constant-gap check on random channels")
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--gain-db", type=float, nargs=2, metavar=("LO", "HI"), default=DEFAULT_DB)
    sp.add_argument("--zero-gains", action="store_true", help="force every gain to zero")
    sp.add_argument("--jobs", type=int, default=_default_jobs())
    sp.add_argument("--timing", action="store_true")

    sp = add("curve", _run_curve, "normalized sum capacity versus the link exponent", fmt="csv")
    sp.add_argument("--gd-bits", type=float, default=60.0)
    sp.add_argument("--step", type=float, default=0.05)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise _UsageError("a subcommand is required")
        text, code = args.run(args)
    except _UsageError as exc:
        sys.stderr.write(f"destcoop: error: {exc}\n")
        return EXIT_USAGE
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
