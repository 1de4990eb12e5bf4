import json
import math
from fractions import Fraction

import pytest

from destcoop.cli import (
    GAP_LIMIT, cmd_curve_fig2, cmd_verify_gauss_gap, cmd_verify_ld_sweep, fig2_breakpoints,
    main, parse_ranges, sample_gauss_channels,
)

EX1 = '{"ld": {"n13": 5, "n23": 2, "n14": 2, "n24": 5, "nC": 1}}'
GAUSS = '{"gauss": {"g13": 30.0, "g23": 4.0, "g14": 3.0, "g24": 25.0, "gC": 8.0, "theta": 0.3}}'


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# -- parse_ranges -------------------------------------------------------------------


def test_parse_ranges_inclusive():
    r = parse_ranges("0:2,1:1,3:4,0:0,0:8")
    assert [list(x) for x in r] == [[0, 1, 2], [1], [3, 4], [0], list(range(9))]


def test_parse_ranges_empty_interval():
    assert list(parse_ranges("3:2,0:1,0:1,0:1,0:1")[0]) == []


@pytest.mark.parametrize("bad", ["0:5,0:5", "a:b,0:1,0:1,0:1,0:1", "0-5,0:1,0:1,0:1,0:1",
                                 "-1:2,0:1,0:1,0:1,0:1"])
def test_parse_ranges_rejects(bad):
    with pytest.raises(ValueError):
        parse_ranges(bad)


# -- subcommands ----------------------------------------------------------------------


def test_bounds_ld_json(capsys):
    code, out, _ = run(capsys, "bounds", "--channel", EX1)
    assert code == 0
    assert json.loads(out) == {"min": 8, "u": [8, 8, 8, 10, 10]}


def test_bounds_gauss_has_primed(capsys):
    code, out, _ = run(capsys, "bounds", "--channel", GAUSS, "--pairing", "canonical")
    data = json.loads(out)
    assert code == 0
    assert len(data["u"]) == 5 and len(data["primed"]["u"]) == 5


def test_bounds_channel_from_file(tmp_path, capsys):
    path = tmp_path / "ch.json"
    path.write_text(EX1)
    code, out, _ = run(capsys, "bounds", "--channel", str(path))
    assert code == 0 and json.loads(out)["min"] == 8


def test_bounds_csv(capsys):
    code, out, _ = run(capsys, "bounds", "--channel", GAUSS, "--format", "csv")
    assert code == 0
    assert "\r" not in out
    lines = out.strip().split("\n")
    for cell in lines[1].split(",")[1:]:
        assert len(cell.split(".")[1]) == 6


def test_achieve_example1(capsys):
    code, out, _ = run(capsys, "achieve", "--channel", EX1)
    data = json.loads(out)
    assert code == 0 and data["sum"] == 8


def test_simulate_success(capsys, tmp_path):
    trace = tmp_path / "t.csv"
    code, out, _ = run(capsys, "simulate", "--scheme", "example2", "--horizon", "4",
                       "--trace", str(trace))
    data = json.loads(out)
    assert code == 0 and data["success"] is True
    assert trace.read_text().startswith("t,node,level,value\n")


def test_simulate_regime1_requires_channel(capsys):
    code, _, err = run(capsys, "simulate", "--scheme", "regime1")
    assert code == 2 and "channel" in err


@pytest.mark.parametrize("argv", [
    ["bounds"],
    ["bounds", "--channel", "{not json"],
    ["bounds", "--channel", '{"ld": {"n13": -1, "n23": 0, "n14": 0, "n24": 0, "nC": 0}}'],
    ["bounds", "--channel", "/no/such/file.json"],
    ["simulate", "--scheme", "example1", "--channel", '{"ld": {"n13": 1, "n23": 1, "n14": 1, "n24": 1, "nC": 1}}'],
    ["simulate", "--scheme", "example1", "--horizon", "0"],
    ["verify-ld-sweep", "--ranges", "0:1"],
    ["verify-gauss-gap", "--samples", "0"],
    ["curve", "--step", "0"],
    ["frobnicate"],
    [],
])
def test_usage_errors_exit_2(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 2 and out == ""


def test_ld_sweep_small(capsys):
    code, out, _ = run(capsys, "verify-ld-sweep", "--ranges", "0:2,0:2,0:1,0:2,0:3", "--jobs", "1")
    data = json.loads(out)
    assert code == 0
    assert data["total"] == 3 * 3 * 2 * 3 * 4 and data["mismatches"] == []
    assert "runtime_ms" not in data


def test_ld_sweep_singleton_and_empty():
    assert cmd_verify_ld_sweep(parse_ranges("5:5,2:2,2:2,5:5,1:1")).total == 1
    rep = cmd_verify_ld_sweep(parse_ranges("1:0,0:1,0:1,0:1,0:1"))
    assert rep.total == 0 and rep.ok


def test_ld_sweep_csv(capsys):
    code, out, _ = run(capsys, "verify-ld-sweep", "--ranges", "0:1,0:1,0:1,0:1,0:1",
                       "--format", "csv", "--jobs", "1")
    assert code == 0
    assert out.split("\n")[:2] == ["# total=32 mismatches=0", "n13,n23,n14,n24,nC,achievable,bound"]


def test_gauss_gap_small():
    rep = cmd_verify_gauss_gap(20, (-10.0, 60.0), 3)
    assert rep.total == 20 and rep.ok
    assert 0.0 <= rep.min_gap <= rep.max_gap <= GAP_LIMIT


def test_gauss_gap_zero_gains():
    rep = cmd_verify_gauss_gap(5, (-10.0, 60.0), 0, zero_gains=True)
    assert rep.ok
    assert rep.max_gap == 0.0 and rep.min_gap == 0.0


def test_sampler_range_and_determinism():
    a = sample_gauss_channels(200, (-10.0, 60.0), 7)
    b = sample_gauss_channels(200, (-10.0, 60.0), 7)
    assert a == b
    for ch in a:
        for g in (ch.g13, ch.g23, ch.g14, ch.g24, ch.gC):
            db = 20 * math.log10(abs(g))
            assert -10.0 - 1e-9 <= db <= 60.0 + 1e-9
        assert 0.0 <= ch.theta < 2 * math.pi


@pytest.mark.parametrize("argv", [
    ["verify-gauss-gap", "--samples", "15", "--seed", "4", "--jobs", "1"],
    ["verify-gauss-gap", "--samples", "15", "--seed", "4", "--format", "csv", "--jobs", "1"],
    ["simulate", "--scheme", "example1", "--seed", "9"],
    ["curve", "--step", "0.25"],
])
def test_outputs_are_byte_identical(capsys, argv):
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second and first


def test_gauss_gap_jobs_do_not_change_output(capsys):
    _, one, _ = run(capsys, "verify-gauss-gap", "--samples", "12", "--jobs", "1")
    _, two, _ = run(capsys, "verify-gauss-gap", "--samples", "12", "--jobs", "2")
    assert one == two


# -- curve ----------------------------------------------------------------------------


def test_curve_csv(capsys):
    code, out, _ = run(capsys, "curve", "--step", "0.5")
    lines = out.split("\n")
    assert code == 0
    assert lines[0] == "# breakpoints (level-model limit): 1/4, 1, 3/2"
    assert lines[1] == "alpha,normalized_sum"
    assert lines[2].startswith("0.000000,")
    assert len(lines) == 2 + 5 + 1


def test_curve_alpha0_row():
    # |gC|^2 = 2^0 = 1 at alpha = 0; u1 is the binding bound there
    assert cmd_curve_fig2(60.0)[0][1] == pytest.approx(1.0, abs=0.05)


def test_curve_alpha2_row():
    assert cmd_curve_fig2(60.0)[-1] == pytest.approx((2.0, 2.0), abs=0.05)


def test_curve_offset_shrinks_with_snr():
    # the excess over the level-model limit is a fixed number of bits
    excess = [(b * (cmd_curve_fig2(b, 1.0)[0][1] - 1.0)) for b in (60.0, 120.0, 240.0)]
    assert excess[0] == pytest.approx(excess[1], abs=0.05)
    assert excess[1] == pytest.approx(excess[2], abs=0.05)


@pytest.mark.parametrize("bits", [20.0, 60.0, 100.0])
def test_curve_nondecreasing(bits):
    vals = [v for _, v in cmd_curve_fig2(bits, 0.02)]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


def test_breakpoints():
    assert fig2_breakpoints() == [Fraction(1, 4), Fraction(1), Fraction(3, 2)]
    assert fig2_breakpoints(40) == fig2_breakpoints(120)
    with pytest.raises(ValueError):
        fig2_breakpoints(7)
