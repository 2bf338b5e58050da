"""Falsification checkers for declared indicator properties.

Every checker returns a CheckReport: Verified with a case count, a
Counterexample whose witness re-evaluates to a genuine violation, or Skipped
with a reason. Exact arithmetic means there is no tolerance anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Mapping, Sequence

from .errors import CapExceededError
from .indicators import Flag, IndicatorSpec, essinf_cond, esssup_cond
from .sampling import (
    DEFAULT_SAMPLES,
    NONNEG_ALPHA_GRID,
    UNIT_GRID,
    derive_rng,
    iter_cases,
    sample_dominating_pair,
    sample_event,
    sample_measurable,
    sample_rv,
)
from .space import (
    DEFAULT_EVENT_CAP,
    RandomVariable,
    enumerate_events,
    is_measurable,
    patch,
    restrict,
)


class Verdict(str, Enum):
    VERIFIED = "verified"
    COUNTEREXAMPLE = "counterexample"
    SKIPPED = "skipped"


@dataclass(frozen=True)
class CheckReport:
    prop: str
    verdict: Verdict
    cases: int = 0
    witness: Mapping[str, Any] | None = None
    reason: str | None = None
    notes: tuple[str, ...] = ()
    alarm: bool = False

    @property
    def ok(self) -> bool:
        return self.verdict is not Verdict.COUNTEREXAMPLE and not self.alarm

    @staticmethod
    def verified(prop: str, cases: int, notes: tuple[str, ...] = ()) -> "CheckReport":
        return CheckReport(prop, Verdict.VERIFIED, cases=cases, notes=notes)

    @staticmethod
    def counterexample(
        prop: str,
        witness: Mapping[str, Any],
        cases: int,
        notes: tuple[str, ...] = (),
        alarm: bool = False,
    ) -> "CheckReport":
        return CheckReport(
            prop, Verdict.COUNTEREXAMPLE, cases=cases, witness=dict(witness), notes=notes, alarm=alarm
        )

    @staticmethod
    def skipped(prop: str, reason: str, notes: tuple[str, ...] = ()) -> "CheckReport":
        return CheckReport(prop, Verdict.SKIPPED, reason=reason, notes=notes)


class _Falsifier:
    """Accumulates cases until a violation shows up."""

    def __init__(self, prop: str):
        self.prop = prop
        self.cases = 0
        self.failure: dict[str, Any] | None = None

    def run(self, ok: bool, **witness) -> bool:
        self.cases += 1
        if not ok and self.failure is None:
            self.failure = dict(witness)
        return ok

    def report(self, notes: tuple[str, ...] = (), alarm_on_fail: bool = False) -> CheckReport:
        if self.failure is not None:
            return CheckReport.counterexample(
                self.prop, self.failure, self.cases, notes=notes, alarm=alarm_on_fail
            )
        return CheckReport.verified(self.prop, self.cases, notes=notes)


# -- core axioms ---------------------------------------------------------------


def check_axioms(I: IndicatorSpec, samples: int = DEFAULT_SAMPLES, seed: int = 0) -> CheckReport:
    """Sandwich between the cell extremes, idempotence, positivity, and
    closure of the domain under adding measurable variables."""
    rng = derive_rng(seed, f"axioms:{I.name}")
    H = I.target
    space = H.space
    f = _Falsifier(f"axioms:{I.name}")

    zero = RandomVariable.constant(space, 0)
    f.run(I.in_domain(zero), axiom="domain-contains-zero")

    for X in iter_cases(space, rng, samples):
        if not I.in_domain(X):
            continue
        IX = I(X)
        lo, hi = essinf_cond(X, H), esssup_cond(X, H)
        if not f.run(lo.le(IX) and IX.le(hi), axiom="sandwich", X=X, value=IX, lo=lo, hi=hi):
            break
        if not f.run(is_measurable(IX, H), axiom="measurability", X=X, value=IX):
            break
        if X.is_nonnegative() and not f.run(
            IX.ge(zero), axiom="positivity", X=X, value=IX
        ):
            break
        # P2 sampled: the domain absorbs measurable summands
        M = sample_measurable(H, rng, allow_inf=True)
        if not f.run(I.in_domain(X + M), axiom="domain-closure", X=X, M=M):
            break

    for _ in range(max(1, samples // 4)):
        M = sample_measurable(H, rng, allow_inf=True)
        if not I.in_domain(M):
            continue
        if not f.run(I(M) == M, axiom="idempotence", X=M, value=I(M)):
            break
    return f.report()


# -- regularity (cell locality) -----------------------------------------------


def check_regular(
    I: IndicatorSpec,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    cap: int = DEFAULT_EVENT_CAP,
) -> CheckReport:
    """Three equivalent locality statements, cross-reported.

    (1) agreement on an event forces agreement of the images on it,
    (2) I(X 1_H) = I(X) 1_H,
    (3) I splices across H and its complement,
    plus the averaging identity I(X 1_H) 1_{H^c} = 0.
    """
    rng = derive_rng(seed, f"regular:{I.name}")
    H = I.target
    space = H.space
    notes: list[str] = []
    try:
        events = enumerate_events(H, cap)
    except CapExceededError:
        events = [sample_event(H, rng) for _ in range(min(samples, 64))]
        notes.append(f"partial: 2^{H.cell_count} events exceed cap {cap}; sampled {len(events)}")

    tallies = {"agree": _Falsifier("s1"), "restrict": _Falsifier("s2"), "splice": _Falsifier("s3")}
    avg = _Falsifier("avg")
    first_failure: dict[str, Any] | None = None
    zero = RandomVariable.constant(space, 0)

    cases = 0
    while cases < samples:
        cases += 1
        X = sample_rv(space, rng)
        Y = sample_rv(space, rng)
        if not (I.in_domain(X) and I.in_domain(Y)):
            continue
        IX, IY = I(X), I(Y)
        for ev in events:
            XH = restrict(X, ev)
            spliced = patch(X, ev, Y)
            if not (I.in_domain(XH) and I.in_domain(spliced)):
                continue
            IXH = I(XH)
            ok2 = tallies["restrict"].run(IXH == restrict(IX, ev), X=X, H=ev, lhs=IXH, rhs=restrict(IX, ev))
            ok3 = tallies["splice"].run(
                I(spliced) == restrict(IX, ev) + restrict(IY, ev.complement()),
                X=X, Y=Y, H=ev, lhs=I(spliced), rhs=restrict(IX, ev) + restrict(IY, ev.complement()),
            )
            ok1 = tallies["agree"].run(
                restrict(I(spliced), ev) == restrict(IX, ev),
                X=X, Y=spliced, H=ev,
            )
            okavg = avg.run(restrict(IXH, ev.complement()) == zero, X=X, H=ev, lhs=restrict(IXH, ev.complement()))
            if first_failure is None and not (ok1 and ok2 and ok3 and okavg):
                bad = next(
                    t for ok, t in ((ok1, tallies["agree"]), (ok2, tallies["restrict"]), (ok3, tallies["splice"]), (okavg, avg))
                    if not ok
                )
                first_failure = bad.failure
        if first_failure is not None:
            break

    verdicts = {k: t.failure is None for k, t in tallies.items()}
    if len(set(verdicts.values())) > 1:
        notes.append(f"statement disagreement under sampling: {verdicts}")
    notes.append("statements: " + ", ".join(f"{k}={'ok' if v else 'fail'}" for k, v in verdicts.items()))
    if first_failure is not None:
        return CheckReport.counterexample(f"regular:{I.name}", first_failure, cases, notes=tuple(notes))
    if avg.failure is not None:
        return CheckReport.counterexample(f"regular:{I.name}", avg.failure, cases, notes=tuple(notes))
    return CheckReport.verified(f"regular:{I.name}", cases, notes=tuple(notes))


# -- structural flags -----------------------------------------------------------


def check_structural(
    I: IndicatorSpec,
    which: Flag | str,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    sequences: Sequence[Sequence[RandomVariable]] | None = None,
) -> CheckReport:
    """Falsification check for one structural property; `which` is a flag
    name or "fatou" (checkable but never declarable)."""
    flag = None if which == "fatou" else Flag(which)
    rng = derive_rng(seed, f"structural:{I.name}:{which}")
    H = I.target
    space = H.space
    prop = f"{which if flag is None else flag.value}:{I.name}"
    f = _Falsifier(prop)

    if flag is Flag.REGULAR:
        return check_regular(I, samples, seed)

    if flag is Flag.SELF_DUAL:
        for X in iter_cases(space, rng, samples):
            if not (I.in_domain(X) and I.in_domain(-X)):
                continue
            if not f.run(I(X) == -I(-X), X=X, lhs=I(X), rhs=-I(-X)):
                break
        return f.report()

    if flag is Flag.INCREASING:
        for _ in range(samples):
            X, Y = sample_dominating_pair(space, rng)
            if not (I.in_domain(X) and I.in_domain(Y)):
                continue
            if not f.run(I(X).le(I(Y)), X=X, Y=Y, lhs=I(X), rhs=I(Y)):
                break
        return f.report()

    if flag is Flag.TRANSLATION_INVARIANT:
        for X in iter_cases(space, rng, samples):
            if not I.in_domain(X):
                continue
            M = sample_measurable(H, rng, allow_inf=False)
            if not I.in_domain(X + M):
                continue
            if not f.run(I(X + M) == I(X) + M, X=X, alpha=M, lhs=I(X + M), rhs=I(X) + M):
                break
        return f.report()

    if flag is Flag.POS_HOMOGENEOUS:
        for X in iter_cases(space, rng, samples):
            if not I.in_domain(X):
                continue
            alphas = [RandomVariable.constant(space, a) for a in NONNEG_ALPHA_GRID]
            alphas.append(sample_measurable(H, rng, nonneg=True))
            bad = False
            for A in alphas:
                AX = A * X
                if not I.in_domain(AX):
                    continue
                if not f.run(I(AX) == A * I(X), X=X, alpha=A, lhs=I(AX), rhs=A * I(X)):
                    bad = True
                    break
            if bad:
                break
        return f.report()

    if flag is Flag.LINEAR:
        for X in iter_cases(space, rng, samples):
            Y = sample_rv(space, rng)
            if not (I.in_domain(X) and I.in_domain(Y)):
                continue
            A = sample_measurable(H, rng, allow_inf=False)
            for coeff in (RandomVariable.constant(space, 1), A):
                Z = coeff * X + Y
                if not I.in_domain(Z):
                    continue
                if not f.run(
                    I(Z) == coeff * I(X) + I(Y),
                    X=X, Y=Y, alpha=coeff, lhs=I(Z), rhs=coeff * I(X) + I(Y),
                ):
                    break
            if f.failure is not None:
                break
        return f.report()

    if flag in (Flag.SUBADDITIVE, Flag.SUPERADDITIVE):
        sub = flag is Flag.SUBADDITIVE
        for X in iter_cases(space, rng, samples):
            Y = sample_rv(space, rng)
            if not (I.in_domain(X) and I.in_domain(Y) and I.in_domain(X + Y)):
                continue
            lhs, rhs = I(X + Y), I(X) + I(Y)
            ok = lhs.le(rhs) if sub else lhs.ge(rhs)
            if not f.run(ok, X=X, Y=Y, lhs=lhs, rhs=rhs):
                break
        return f.report()

    if flag is Flag.CONVEX:
        for X in iter_cases(space, rng, samples):
            Y = sample_rv(space, rng)
            if not (I.in_domain(X) and I.in_domain(Y)):
                continue
            alphas = [RandomVariable.constant(space, a) for a in UNIT_GRID]
            bad = False
            for A in alphas:
                one_minus = RandomVariable.constant(space, 1) - A
                Z = A * X + one_minus * Y
                if not I.in_domain(Z):
                    continue
                rhs = A * I(X) + one_minus * I(Y)
                if not f.run(I(Z).le(rhs), X=X, Y=Y, alpha=A, lhs=I(Z), rhs=rhs):
                    bad = True
                    break
            if bad:
                break
        return f.report()

    # Fatou: on a finite space a.s. convergence is eventually constant, so
    # only supplied finite prefixes are checkable and the tail collapses.
    if sequences is None:
        return CheckReport.skipped(
            prop, "partial: finite spaces only admit eventually-constant sequences; supply them explicitly"
        )
    for seq in sequences:
        if not seq:
            continue
        limit = seq[-1]  # the constant tail
        if not all(I.in_domain(Xn) for Xn in seq):
            continue
        if not f.run(I(limit).ge(I(seq[-1])), sequence=list(seq)):
            break
    rep = f.report()
    if rep.verdict is Verdict.VERIFIED:
        return CheckReport.skipped(
            prop, "partial", notes=(f"eventually-constant prefixes checked: {f.cases}",)
        )
    return rep


# -- sign-split decomposition ----------------------------------------------------


def check_hplus_decomposition(
    I: IndicatorSpec, samples: int = DEFAULT_SAMPLES, seed: int = 0
) -> CheckReport:
    """I(hX) = h+ I(X) + h- I(-X) for measurable finite h of mixed sign."""
    prop = f"sign-split:{I.name}"
    if not (I.has(Flag.REGULAR) and I.has(Flag.POS_HOMOGENEOUS)):
        return CheckReport.skipped(prop, "needs regular and pos_homogeneous flags")
    rng = derive_rng(seed, prop)
    H = I.target
    f = _Falsifier(prop)
    for X in iter_cases(H.space, rng, samples):
        h = sample_measurable(H, rng, allow_inf=False)
        for coeff in (h, RandomVariable.constant(H.space, -1)):
            hX = coeff * X
            if not (I.in_domain(X) and I.in_domain(-X) and I.in_domain(hX)):
                continue
            rhs = coeff.pos() * I(X) + coeff.neg() * I(-X)
            if not f.run(I(hX) == rhs, X=X, h=coeff, lhs=I(hX), rhs=rhs):
                break
        if f.failure is not None:
            break
    return f.report()


# -- implication guards (must never fire) ----------------------------------------


def check_convex_implies_regular(
    I: IndicatorSpec, samples: int = DEFAULT_SAMPLES, seed: int = 0
) -> CheckReport:
    """Conditional convexity forces regularity; a verified premise with a
    falsified conclusion is a contradiction alarm."""
    prop = f"convex-implies-regular:{I.name}"
    premise = check_structural(I, Flag.CONVEX, samples, seed)
    if premise.verdict is not Verdict.VERIFIED:
        return CheckReport.verified(
            prop, premise.cases, notes=("premise falsified or skipped; implication vacuous",)
        )
    conclusion = check_regular(I, samples, seed)
    if conclusion.verdict is Verdict.COUNTEREXAMPLE:
        return CheckReport.counterexample(
            prop, conclusion.witness or {}, premise.cases + conclusion.cases,
            notes=("contradiction alarm: convexity verified but regularity falsified",),
            alarm=True,
        )
    return CheckReport.verified(prop, premise.cases + conclusion.cases)


def check_additive_implies_regular(
    I: IndicatorSpec, samples: int = DEFAULT_SAMPLES, seed: int = 0
) -> CheckReport:
    """Additivity forces regularity; subadditivity alone still gives the
    one-sided bound 1_H I(X) <= I(1_H X)."""
    prop = f"additive-implies-regular:{I.name}"
    sub = check_structural(I, Flag.SUBADDITIVE, samples, seed)
    sup = check_structural(I, Flag.SUPERADDITIVE, samples, seed)
    if sub.verdict is Verdict.VERIFIED and sup.verdict is Verdict.VERIFIED:
        conclusion = check_regular(I, samples, seed)
        if conclusion.verdict is Verdict.COUNTEREXAMPLE:
            return CheckReport.counterexample(
                prop, conclusion.witness or {}, conclusion.cases,
                notes=("contradiction alarm: additivity verified but regularity falsified",),
                alarm=True,
            )
        return CheckReport.verified(prop, sub.cases + sup.cases + conclusion.cases)
    if sub.verdict is Verdict.VERIFIED:
        rng = derive_rng(seed, prop)
        H = I.target
        f = _Falsifier(prop)
        try:
            events = enumerate_events(H)
        except CapExceededError:
            events = [sample_event(H, rng) for _ in range(32)]
        for X in iter_cases(H.space, rng, samples):
            if not I.in_domain(X):
                continue
            IX = I(X)
            for ev in events:
                XH = restrict(X, ev)
                if not I.in_domain(XH):
                    continue
                if not f.run(restrict(IX, ev).le(I(XH)), X=X, H=ev, lhs=restrict(IX, ev), rhs=I(XH)):
                    break
            if f.failure is not None:
                break
        return f.report(notes=("subadditive only: checked the half inequality",))
    return CheckReport.verified(prop, sub.cases + sup.cases, notes=("premise falsified; implication vacuous",))
