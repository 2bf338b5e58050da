"""Checker battery against built-ins and constructed violators."""

import pytest

from condind import (
    CheckReport,
    Flag,
    IndicatorSpec,
    Partition,
    RandomVariable,
    Verdict,
    check_additive_implies_regular,
    check_axioms,
    check_convex_implies_regular,
    check_hplus_decomposition,
    check_regular,
    check_structural,
    condexp_ext_indicator,
    condexp_indicator,
    essinf_indicator,
    esssup_cond,
    esssup_indicator,
    expectation,
)
from condind.extreal import ZERO
from conftest import rv


def global_mean_indicator(space, H):
    """Constant global mean everywhere: idempotence fails off measurables and
    locality fails on any nontrivial partition."""
    def ev(X):
        return RandomVariable.constant(space, expectation(X))
    return IndicatorSpec("global-mean", H, ev, flags=frozenset())


def shifted_esssup(space, H):
    def ev(X):
        return esssup_cond(X, H).shift(1)
    return IndicatorSpec("esssup+1", H, ev, flags=frozenset())


def sign_switch_indicator(space):
    """A genuine indicator on the trivial partition that is not monotone:
    supremum when the first atom is <= 0, infimum otherwise."""
    H = Partition.trivial(space)
    sup, inf = esssup_indicator(H), essinf_indicator(H)

    def ev(X):
        return sup(X) if X.values[0] <= ZERO else inf(X)

    return IndicatorSpec("sign-switch", H, ev, flags=frozenset())


def test_axioms_builtins_verified(space4, H):
    for I in (esssup_indicator(H), essinf_indicator(H), condexp_indicator(H),
              condexp_ext_indicator(H)):
        rep = check_axioms(I, samples=200, seed=3)
        assert rep.verdict is Verdict.VERIFIED, rep


def test_axioms_catch_idempotence_violation(space4, H):
    rep = check_axioms(shifted_esssup(space4, H), samples=200, seed=3)
    assert rep.verdict is Verdict.COUNTEREXAMPLE
    # the witness re-evaluates to a genuine violation
    w = rep.witness
    assert w["axiom"] in ("idempotence", "sandwich")


def test_regular_builtins(space4, H):
    for I in (esssup_indicator(H), condexp_indicator(H), condexp_ext_indicator(H)):
        rep = check_regular(I, samples=120, seed=5)
        assert rep.verdict is Verdict.VERIFIED, rep


def test_regular_catches_global_mean(space4, H):
    rep = check_regular(global_mean_indicator(space4, H), samples=120, seed=5)
    assert rep.verdict is Verdict.COUNTEREXAMPLE


def test_structural_esssup(space4, H):
    I = esssup_indicator(H)
    for flag in (Flag.INCREASING, Flag.TRANSLATION_INVARIANT, Flag.POS_HOMOGENEOUS,
                 Flag.SUBADDITIVE, Flag.CONVEX):
        rep = check_structural(I, flag, samples=250, seed=11)
        assert rep.verdict is Verdict.VERIFIED, (flag, rep.witness)
    rep = check_structural(I, Flag.LINEAR, samples=250, seed=11)
    assert rep.verdict is Verdict.COUNTEREXAMPLE  # max(X+Y) < max X + max Y


def test_structural_condexp_linear(space4, H):
    rep = check_structural(condexp_indicator(H), Flag.LINEAR, samples=250, seed=11)
    assert rep.verdict is Verdict.VERIFIED, rep.witness


def test_structural_condexp_ext_not_translation_invariant(space4, H):
    rep = check_structural(condexp_ext_indicator(H), Flag.TRANSLATION_INVARIANT,
                           samples=400, seed=11)
    # a doubly infinite cell pins the value at 0 and ignores finite shifts
    assert rep.verdict is Verdict.COUNTEREXAMPLE


def test_structural_non_monotone_witness(space4):
    I = sign_switch_indicator(space4)
    assert check_axioms(I, samples=200, seed=2).verdict is Verdict.VERIFIED
    rep = check_structural(I, Flag.INCREASING, samples=400, seed=2)
    assert rep.verdict is Verdict.COUNTEREXAMPLE
    w = rep.witness
    assert w["X"].le(w["Y"]) and not w["lhs"].le(w["rhs"])


def test_fatou_skips_without_sequences(space4, H):
    rep = check_structural(esssup_indicator(H), "fatou", samples=10, seed=0)
    assert rep.verdict is Verdict.SKIPPED
    assert "partial" in (rep.reason or "")


def test_fatou_with_supplied_prefixes(space4, H):
    X = rv(space4, 1, 2, 3, 4)
    seqs = [[X.shift(k) for k in range(3)]]
    rep = check_structural(esssup_indicator(H), "fatou", samples=10, seed=0,
                           sequences=seqs)
    assert rep.verdict is Verdict.SKIPPED  # vacuous at finite scale, recorded


def test_hplus_decomposition_example(space4, H):
    I = esssup_indicator(H)
    h = rv(space4, -1, -1, 2, 2)
    X = rv(space4, 1, 3, 2, 6)
    lhs = I(h * X)
    rhs = h.pos() * I(X) + h.neg() * I(-X)
    assert lhs == rhs == rv(space4, -1, -1, 12, 12)
    rep = check_hplus_decomposition(I, samples=300, seed=4)
    assert rep.verdict is Verdict.VERIFIED, rep.witness


def test_hplus_handles_pure_signs(space4, H):
    I = esssup_indicator(H)
    X = rv(space4, 1, 3, 2, 6)
    h = rv(space4, -1, -1, -1, -1)
    assert I(h * X) == h.pos() * I(X) + h.neg() * I(-X) == I(-X)
    nonneg = rv(space4, 2, 2, 3, 3)
    assert I(nonneg * X) == nonneg * I(X)


def test_hplus_skips_without_flags(space4, H):
    bare = IndicatorSpec("bare", H, lambda X: esssup_cond(X, H), flags=frozenset())
    assert check_hplus_decomposition(bare).verdict is Verdict.SKIPPED


def test_implication_guards_never_alarm(space4, H):
    # seed sweep: the contradiction alarms must stay silent on regular built-ins
    for I in (condexp_indicator(H), esssup_indicator(H), essinf_indicator(H)):
        for seed in range(40):
            rep1 = check_convex_implies_regular(I, samples=25, seed=seed)
            rep2 = check_additive_implies_regular(I, samples=25, seed=seed)
            assert not rep1.alarm and rep1.verdict is not Verdict.COUNTEREXAMPLE
            assert not rep2.alarm and rep2.verdict is not Verdict.COUNTEREXAMPLE


def test_subadditive_half_inequality_note(space4, H):
    rep = check_additive_implies_regular(esssup_indicator(H), samples=80, seed=1)
    assert rep.verdict is Verdict.VERIFIED
    assert any("half inequality" in n for n in rep.notes)


def test_counterexample_witness_reevaluates(space4, H):
    I = shifted_esssup(space4, H)
    rep = check_axioms(I, samples=100, seed=9)
    assert rep.verdict is Verdict.COUNTEREXAMPLE
    X = rep.witness["X"]
    assert I(X) != X or not esssup_cond(X, H).ge(I(X))


def test_checkreport_helpers():
    ok = CheckReport.verified("p", 10)
    assert ok.ok and ok.cases == 10
    bad = CheckReport.counterexample("p", {"X": 1}, 3, alarm=True)
    assert not bad.ok and bad.alarm
    skip = CheckReport.skipped("p", "why")
    assert skip.ok and skip.reason == "why"
