import itertools
import math

import numpy as np
import pytest

from destcoop.bounds import gaussian_bound_set, ld_bound_set
from destcoop.channel import GaussChannel, LdChannel
from destcoop.schemes.gauss import (
    gauss_achievable_sum, hk_noncoop_sum, regime1_gauss_rates, regime3_gauss_sum,
)
from destcoop.schemes.ld import (
    extended_channel, ld_achievable_sum, ld_no_coop_sum, regime1_case, regime1_closed_form,
    regime1_ld_rates, regime3_ld_sum,
)
from destcoop.schemes.theorem3 import (
    GaussRegime3Instantiation, LdRegime3Instantiation, theorem3_constraints, theorem3_terms,
)
from destcoop.polytope import max_linear

SMALL = [LdChannel(*lv) for lv in itertools.product(range(4), repeat=4) for lv in
         [lv + (c,) for c in range(5)]]
REGIME1 = [ch for ch in SMALL if ch.nC <= ch.n_min]


# -- LD regime (i) -----------------------------------------------------------------


def test_example1_allocation():
    a = regime1_ld_rates(LdChannel(5, 2, 2, 5, 1))
    assert a.case == "a"
    for u in (a.user1, a.user2):
        assert (u.r_U, u.r_S, u.r_Zup, u.r_Zdn) == (1, 1, 1, 1)
    assert a.sum == 8
    assert (a.a1, a.a2, a.a3, a.a4) == (2, 2, 3, 3)


def test_case_b_example():
    ch = LdChannel(6, 2, 2, 3, 1)
    a = regime1_ld_rates(ch)
    assert a.case == "b1"
    assert a.sum == 7 == regime1_closed_form(ch) == ld_bound_set(ch).min_bound
    assert a.a2 is None and a.a4 is None


def test_no_coop_case():
    a = regime1_ld_rates(LdChannel(3, 3, 3, 3, 0))
    assert a.case == "no-coop" and a.sum == 3


def test_not_regime_one():
    with pytest.raises(ValueError, match="not regime"):
        regime1_ld_rates(LdChannel(2, 1, 1, 2, 3))


@pytest.mark.parametrize("ch", REGIME1, ids=str)
def test_rate_list_matches_closed_form(ch):
    a = regime1_ld_rates(ch)
    rates = [a.user1.r_U, a.user1.r_S, a.user1.r_Zup, a.user1.r_Zdn,
             a.user2.r_U, a.user2.r_S, a.user2.r_Zup, a.user2.r_Zdn]
    assert all(r >= 0 for r in rates)
    assert a.sum == regime1_closed_form(ch)
    if a.case != "no-coop":
        assert a.sum == sum(rates)
    assert a.sum <= ld_bound_set(ch).min_bound
    if a.case == "a":
        n13, n23, n14, n24, nc = ch.levels()
        assert a.user1.total == min(n13 - n14 + nc, n13 - nc)
        assert a.a1 == n13 + nc - n14 - n23 and a.a3 == ch.n - n23


def test_mirror_case_is_symmetric():
    ch = LdChannel(3, 2, 2, 6, 1)
    assert regime1_case(ch) == "b2"
    a, m = regime1_ld_rates(ch), regime1_ld_rates(ch.mirrored())
    assert a.sum == m.sum and a.user1 == m.user2


# -- LD regime (iii) and the 28-row rate region ------------------------------------


@pytest.mark.parametrize("lv,want", [((2, 1, 1, 2, 3), 4), ((1, 0, 0, 1, 5), 2),
                                     ((0, 0, 0, 0, 1), 0), ((4, 1, 2, 4, 5), 7)])
def test_regime3_ld(lv, want):
    r = regime3_ld_sum(LdChannel(*lv))
    assert r.sum == want
    assert r.closed_form == want


def test_regime3_precondition():
    with pytest.raises(ValueError):
        regime3_ld_sum(LdChannel(5, 2, 2, 5, 1))


def test_theorem3_row_count():
    terms = theorem3_terms()
    assert len(terms) == 28
    sys = theorem3_constraints(LdRegime3Instantiation(LdChannel(2, 1, 1, 2, 3)))
    assert len(sys.constraints) == 28
    assert sys.nonneg == frozenset(sys.variables)


def test_theorem3_without_link_blocks_forwarding():
    sys = theorem3_constraints(LdRegime3Instantiation(LdChannel(3, 1, 1, 3, 0)))
    assert max_linear(sys, {"r4": 1}) == 0
    assert max_linear(sys, {"r3": 1}) == 0


@pytest.mark.parametrize("ch", [c for c in SMALL if c.nC > min(c.n13, c.n24)][::7], ids=str)
def test_theorem3_mi_nonnegative_and_zero_feasible(ch):
    inst = LdRegime3Instantiation(ch)
    for t in theorem3_terms():
        assert inst.mutual_info(t.a, t.b, t.c) >= 0
    sys = theorem3_constraints(inst)
    assert sys.is_feasible_point({v: 0 for v in sys.variables})


# -- LD composition ----------------------------------------------------------------


@pytest.mark.parametrize("lv,want", [((5, 2, 2, 5, 1), 8), ((2, 1, 1, 2, 3), 4), ((5, 2, 2, 5, 4), 8)])
def test_ld_achievable_examples(lv, want):
    assert ld_achievable_sum(LdChannel(*lv)).sum == want


def test_ld_achievable_monotone_in_link():
    for lv in itertools.product(range(4), repeat=4):
        vals = [ld_achievable_sum(LdChannel(*lv, c)).sum for c in range(6)]
        assert vals == sorted(vals)


def test_extension_channel():
    assert extended_channel(LdChannel(2, 1, 1, 2, 1), 2).levels() == (4, 2, 2, 4, 2)
    with pytest.raises(ValueError):
        extended_channel(LdChannel(1, 1, 1, 1, 1), 0)


def test_extension_needed_for_half_level():
    r = ld_achievable_sum(LdChannel(2, 1, 1, 2, 1))
    assert r.sum == 3 == ld_bound_set(LdChannel(2, 1, 1, 2, 1)).min_bound
    assert r.rates["extension"] == 2


def test_no_coop_sum():
    assert ld_no_coop_sum(LdChannel(5, 2, 2, 5, 3)) == 6


# -- Gaussian ------------------------------------------------------------------------


SYM = GaussChannel(2 ** 20, 2 ** 10, 2 ** 10, 2 ** 20, 2 ** 4)


def test_regime1_gauss_symmetric_case_a():
    a = regime1_gauss_rates(SYM)
    assert a.case == "a"
    assert a.A1 == pytest.approx(2 ** -4) and a.A2 == pytest.approx(2 ** -4)
    for k, v in a.log_forms.items():
        assert v >= a.int_forms[k] - 1e-12, k
    assert a.sum > 0


def test_regime1_nulling_identities():
    ch = GaussChannel(2 ** 20, 2 ** 10, 2 ** 10, 2 ** 20, 2 ** 3, 1.1)
    a = regime1_gauss_rates(ch)
    assert a.case == "a"
    g = ch.complex_gains()
    gc = a.gc_used
    assert -gc * g["24"] * a.A4 * a.A2 == pytest.approx(g["23"])
    assert -gc * g["13"] * a.A3 * a.A1 == pytest.approx(g["14"])


def test_regime1_gauss_case_b_mirror_filters():
    ch = GaussChannel(2 ** 8, 2 ** 10, 2 ** 10, 2 ** 20, 2 ** 4)
    a = regime1_gauss_rates(ch)
    assert a.case == "b2"
    assert a.A1 is None and a.A3 is None
    assert a.A2 is not None and a.A4 is not None
    g = ch.complex_gains()
    assert -a.gc_used * g["24"] * a.A4 * a.A2 == pytest.approx(g["23"])


def test_regime1_weak_link_falls_back():
    ch = GaussChannel(2 ** 10, 2 ** 4, 2 ** 4, 2 ** 10, 0.9)
    a = regime1_gauss_rates(ch)
    assert a.case == "hk"
    assert a.sum == hk_noncoop_sum(ch)


def test_regime1_gauss_precondition():
    with pytest.raises(ValueError):
        regime1_gauss_rates(GaussChannel(2.0, 2 ** 10, 2 ** 10, 2.0, 2 ** 3))


def test_log_forms_dominate_int_forms_random():
    rng = np.random.default_rng(4)
    checked = 0
    for _ in range(400):
        g13, g24 = 2 ** rng.uniform(4, 25, size=2)
        g14, g23 = 2 ** rng.uniform(2, 20, size=2)
        gc = 2 ** rng.uniform(0, 10)
        ch = GaussChannel(g13, g23, g14, g24, gc, rng.uniform(0, 6.28))
        try:
            a = regime1_gauss_rates(ch)
        except ValueError:
            continue
        if a.case == "hk":
            continue
        checked += 1
        for k, v in a.log_forms.items():
            assert v >= a.int_forms[k] - 1e-9, (ch, k)
    assert checked > 50


def test_log_form_with_zero_numerator():
    from destcoop.schemes.gauss import _case_a_user
    # a13 and a23 only appear in numerators of these four forms
    f = _case_a_user(0.0, 4.0, 0.0, 1.0)
    assert f["U_dest_own"] == f["S"] == f["Zup"] == f["Zdn"] == 0.0
    assert _case_a_user(5.0, 0.0 + 1e-300, 3.0, 1.0)["U_dest_other"] == pytest.approx(0.0, abs=1e-12)


def test_regime3_gauss_only_link():
    r = regime3_gauss_sum(GaussChannel(0, 0, 0, 0, 2 ** 10))
    assert r.sum == 0


def test_regime3_exact_dominates_printed():
    r = regime3_gauss_sum(GaussChannel(1, 1, 1, 1, 2 ** 10))
    assert r.exact >= r.printed
    assert r.sum == max(r.exact, r.printed)


def test_regime3_power_and_quantizers():
    rng = np.random.default_rng(8)
    for _ in range(50):
        ch = GaussChannel(*(10 ** rng.uniform(-0.5, 3, size=5)), rng.uniform(0, 6.28))
        inst = GaussRegime3Instantiation(ch)
        p1, p2 = inst.source_powers()
        assert p1 <= 1 + 1e-12 and p2 <= 1 + 1e-12
        assert inst.params.alpha1 >= 1 and inst.params.alpha2 >= 1
        assert inst.params.var_q3 >= 1 and inst.params.var_q4 >= 1


def test_regime3_matches_ld_within_15_bits():
    cases = [((2, 1, 1, 2, 3), 4), ((4, 1, 2, 4, 5), 4), ((10, 4, 6, 12, 16), 4),
             ((20, 10, 10, 20, 30), 2)]
    for lv, scale in cases:
        ld = regime3_ld_sum(LdChannel(*lv)).sum
        ch = GaussChannel(*(2.0 ** (scale * x / 2) if x else 0.0 for x in lv))
        r = regime3_gauss_sum(ch)
        assert r.exact_error is None
        assert abs(r.sum - scale * ld) <= 15


def test_regime3_beyond_float_range_is_reported():
    ch = GaussChannel(*(2.0 ** (2 * x) for x in (20, 10, 10, 20, 30)))
    r = regime3_gauss_sum(ch)
    assert r.exact_error is not None and r.exact == 0.0


def test_regime3_gauss_precondition():
    with pytest.raises(ValueError):
        regime3_gauss_sum(SYM)


def test_hk_no_interference():
    for g in (0.5, 3.0, 100.0, 1e4):
        ch = GaussChannel(g, 0.0, 0.0, 2 * g, 0.0)
        hk = hk_noncoop_sum(ch)
        assert hk >= math.log2(1 + g ** 2 / 2) + math.log2(1 + 4 * g ** 2 / 2) - 1e-9
        assert hk >= gaussian_bound_set(ch).u4 - 4


def test_hk_zero():
    assert hk_noncoop_sum(GaussChannel(0, 0, 0, 0, 0)) == 0


def test_hk_strong_interference_near_bound():
    rng = np.random.default_rng(0)
    for _ in range(100):
        gd = 10 ** rng.uniform(0, 2)
        gi = gd * 10 ** rng.uniform(1, 3)
        ch = GaussChannel(gd, gi, gi, gd, 0.0, rng.uniform(0, 6.28))
        assert gaussian_bound_set(ch).min_bound - hk_noncoop_sum(ch) <= 2


def test_gauss_achievable_zero():
    a = gauss_achievable_sum(GaussChannel(0, 0, 0, 0, 0))
    assert a.sum == 0 and gaussian_bound_set(GaussChannel(0, 0, 0, 0, 0)).min_bound == 0


def test_gauss_achievable_symmetric_gap():
    ch = GaussChannel(2 ** 20, 2 ** 10, 2 ** 10, 2 ** 20, 2 ** 5)
    a = gauss_achievable_sum(ch)
    gap = gaussian_bound_set(ch).min_bound - a.sum
    assert 0 <= gap <= 43
    assert a.scheme in {"hk", "regime1a", "regime1b", "regime3"}
    assert set(a.to_json()) == {"sum", "scheme", "rates"}
