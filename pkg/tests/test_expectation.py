"""Extended conditional expectation: identities, additivity classes,
weighted expectations, and density recovery."""

from fractions import Fraction

import pytest

from condind import (
    Event,
    FiniteProbabilitySpace,
    Partition,
    RandomVariable,
    Verdict,
    additivity_set,
    check_additivity_on_F,
    check_contractive,
    check_lemm_cond_exp,
    cond_exp_extended,
    condexp_indicator,
    esssup_indicator,
    is_conditional_expectation,
    recover_density,
    weighted_expectation,
    weighted_indicator,
)
from condind.battery import sample_normalized_density
from condind.errors import BadDensityError, HypothesisFailedError
from condind.extreal import NEG_INF, POS_INF, ext
from condind.sampling import derive_rng, sample_rv
from condind.space import expectation, is_refinement
from conftest import all_partitions, rv


def test_cond_exp_extended_examples(space4, H):
    doubly = RandomVariable(space4, (POS_INF, NEG_INF, ext(1), ext(1)))
    assert cond_exp_extended(doubly, H) == rv(space4, 0, 0, 1, 1)
    assert cond_exp_extended(rv(space4, 1, 3, 2, 6), H) == rv(space4, 2, 2, 4, 4)
    minus = RandomVariable(space4, (NEG_INF, ext(0), ext(2), ext(6)))
    assert cond_exp_extended(minus, H) == RandomVariable(
        space4, (NEG_INF, NEG_INF, ext(4), ext(4))
    )


def test_cond_exp_tower_on_refinements():
    space = FiniteProbabilitySpace.uniform(["a", "b", "c", "d"])
    rng = derive_rng(0, "ce-tower")
    parts = all_partitions(space)
    for coarse in parts:
        for fine in parts:
            if not is_refinement(fine, coarse):
                continue
            for _ in range(3):
                X = sample_rv(space, rng, allow_inf=False)
                inner = cond_exp_extended(X, fine)
                assert cond_exp_extended(inner, coarse) == cond_exp_extended(X, coarse)


def test_check_lemm_cond_exp(H):
    rep = check_lemm_cond_exp(H, samples=300, seed=1)
    assert rep.verdict is Verdict.VERIFIED, rep.witness


def test_additivity_set_tags(space4, H):
    ones = rv(space4, 1, 1, 1, 1)
    F, tags = additivity_set(ones, ones, H)
    assert tags == {0: "F1", 1: "F1"} and F == Event.full(space4)

    Xp = RandomVariable(space4, (POS_INF, ext(0), ext(1), ext(1)))
    F, tags = additivity_set(Xp, ones, H)
    assert tags[0] == "F2" and tags[1] == "F1"

    Xm = RandomVariable(space4, (NEG_INF, ext(0), ext(1), ext(1)))
    F, tags = additivity_set(Xm, ones, H)
    assert tags[0] == "F3"

    F, tags = additivity_set(ones, Xp, H)
    assert tags[0] == "F4"
    F, tags = additivity_set(ones, Xm, H)
    assert tags[0] == "F5"

    Ym = RandomVariable(space4, (NEG_INF, ext(0), ext(1), ext(1)))
    F, tags = additivity_set(Xp, Ym, H)
    assert tags[0] is None  # E(X+) and E(Y-) both blow up: unclassified
    assert frozenset(space4.index_of(l) for l in ("c", "d")) == F.members


def test_additivity_check_on_each_class(space4, H):
    ones = rv(space4, 1, 1, 1, 1)
    spiked = [
        RandomVariable(space4, (POS_INF, ext(0), ext(1), ext(1))),
        RandomVariable(space4, (NEG_INF, ext(0), ext(1), ext(1))),
    ]
    pairs = [(ones, ones)] + [(s, ones) for s in spiked] + [(ones, s) for s in spiked]
    for X, Y in pairs:
        rep = check_additivity_on_F(X, Y, H)
        assert rep.verdict is Verdict.VERIFIED, (X.values, Y.values, rep.witness)


def test_additivity_f2_value_is_plus_inf(space4, H):
    X = RandomVariable(space4, (POS_INF, ext(0), ext(1), ext(1)))
    Y = rv(space4, 1, 1, 1, 1)
    total = cond_exp_extended(X + Y, H)
    assert total.values[0] == POS_INF
    assert total == cond_exp_extended(X, H) + cond_exp_extended(Y, H)


def test_additivity_off_F_skips(space4):
    trivial = Partition.trivial(space4)
    X = RandomVariable(space4, (POS_INF, ext(0), ext(0), ext(0)))
    Y = RandomVariable(space4, (ext(0), NEG_INF, ext(0), ext(0)))
    rep = check_additivity_on_F(X, Y, trivial)
    assert rep.verdict is Verdict.SKIPPED and rep.reason == "off-F"
    assert any("off-F" in n for n in rep.notes)


def test_weighted_expectation_example(space4, H):
    rho0 = rv(space4, "1/2", "3/2", 1, 1)
    X = rv(space4, 2, 2, 0, 4)
    assert weighted_expectation(X, H, rho0) == rv(space4, 2, 2, 2, 2)
    # density 1 is the plain conditional expectation
    ones = rv(space4, 1, 1, 1, 1)
    Y = rv(space4, 1, 3, 2, 6)
    assert weighted_expectation(Y, H, ones) == cond_exp_extended(Y, H)
    # measurable X comes back unchanged thanks to conditional mean one
    Xm = rv(space4, 7, 7, -1, -1)
    assert weighted_expectation(Xm, H, rho0) == Xm


def test_weighted_expectation_validates_density(space4, H):
    X = rv(space4, 1, 2, 3, 4)
    with pytest.raises(BadDensityError):
        weighted_expectation(X, H, rv(space4, -1, 3, 1, 1))  # negative
    with pytest.raises(BadDensityError):
        weighted_expectation(X, H, rv(space4, 2, 2, 2, 2))  # mass 2
    with pytest.raises(BadDensityError):
        # global mass 1 but conditional means 3/2 and 1/2
        weighted_expectation(X, H, rv(space4, "3/2", "3/2", "1/2", "1/2"))


def test_recover_density_roundtrip_exact(space4, H):
    rho0 = rv(space4, "1/2", "3/2", 1, 1)
    I = weighted_indicator(H, rho0)
    report = recover_density(I, samples=60, seed=0)
    assert report.density == rho0
    assert report.conditional_mean_one and report.reconstruction_ok
    assert report.mismatch_witness is None


def test_recover_density_condexp_gives_unit_density(space4, H):
    report = recover_density(condexp_indicator(H), samples=60, seed=0)
    assert report.density == rv(space4, 1, 1, 1, 1)
    assert report.reconstruction_ok


def test_recover_density_esssup_fails_additivity(H):
    with pytest.raises(HypothesisFailedError) as err:
        recover_density(esssup_indicator(H), samples=60, seed=0)
    assert "additivity" in err.value.failed


def test_is_conditional_expectation(space4, H):
    ok, report = is_conditional_expectation(condexp_indicator(H), samples=60, seed=0)
    assert ok and report.reconstruction_ok
    rho0 = rv(space4, "1/2", "3/2", 1, 1)
    ok, report = is_conditional_expectation(weighted_indicator(H, rho0), samples=60, seed=0)
    assert not ok and report is not None and report.reconstruction_ok
    assert report.density == rho0
    ok, report = is_conditional_expectation(esssup_indicator(H), samples=60, seed=0)
    assert not ok and report is None


def test_contractive_selfdual_subadditive_is_condexp(space4, H):
    # conclusion-level test of the operator characterization: a contractive
    # self-dual additive indicator must be the conditional expectation
    I = condexp_indicator(H)
    assert check_contractive(I, samples=200, seed=1).verdict is Verdict.VERIFIED
    ok, _ = is_conditional_expectation(I, samples=80, seed=1)
    assert ok


def test_every_additive_selfdual_indicator_recovers(space4, H):
    # on a finite space the recovery always succeeds for weighted means:
    # there is no room for exotic additive self-dual indicators
    rng = derive_rng(3, "recover-all")
    for _ in range(25):
        rho0 = sample_normalized_density(H, rng)
        report = recover_density(weighted_indicator(H, rho0), samples=30, seed=5)
        assert report.reconstruction_ok and report.density == rho0


def test_mu_is_a_probability_measure(space4, H):
    rng = derive_rng(4, "mu-prob")
    for _ in range(10):
        rho0 = sample_normalized_density(H, rng)
        I = weighted_indicator(H, rho0)
        mu = [expectation(I(RandomVariable.indicator(Event(space4, frozenset({i})))))
              for i in range(space4.size)]
        assert all(m.is_finite and 0 <= m.frac <= 1 for m in mu)
        assert sum(m.frac for m in mu) == 1


def test_closed_form_agrees_with_extensions_on_attaining_anchors(space4, H):
    # truncations from below reach the closed form once they attain X
    from condind import condexp_ext_indicator, lower_extension, upper_extension

    I = condexp_ext_indicator(H)
    X = rv(space4, 0, 2, 5, 3)  # bounded, so E(X-|H) and E(X+|H) are finite
    caps = [RandomVariable.constant(space4, n) for n in range(6)]
    lower_anchors = [X.min_with(c) for c in caps]
    upper_anchors = [X.max_with(-c) for c in caps]
    assert lower_extension(I, lower_anchors, X) == cond_exp_extended(X, H)
    assert upper_extension(I, upper_anchors, X) == cond_exp_extended(X, H)


def test_shift_identity_restricted_to_non_doubly_infinite_cells(space4, H):
    # on a doubly infinite cell the value is pinned at 0 and shifts are moot;
    # the identity is claimed (and holds) on the other cells only
    X = RandomVariable(space4, (POS_INF, NEG_INF, ext(1), ext(3)))
    shifted = cond_exp_extended(X.shift(1), H)
    base = cond_exp_extended(X, H)
    assert shifted.values[2] == base.values[2] + ext(1)
    assert shifted.values[3] == base.values[3] + ext(1)
    assert shifted.values[0] == base.values[0] == ext(0)  # not base + 1


def test_scalar_identity_holds_even_with_negative_coefficients(space4, H):
    X = RandomVariable(space4, (POS_INF, ext(2), ext(1), ext(3)))
    for a in (-2, Fraction(-1, 2), 0, Fraction(1, 2), 3):
        A = RandomVariable.constant(space4, a)
        assert cond_exp_extended(A * X, H) == A * cond_exp_extended(X, H)
