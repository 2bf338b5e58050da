"""Spaces, partitions, events, random variables, filtrations."""

from fractions import Fraction

import pytest

from condind import (
    Event,
    Filtration,
    FiniteProbabilitySpace,
    Partition,
    RandomVariable,
    enumerate_events,
    expectation,
    is_measurable,
    is_refinement,
    patch,
    restrict,
)
from condind.errors import CapExceededError, SpaceMismatchError, ValidationError
from condind.extreal import NEG_INF, POS_INF, ext

from conftest import all_partitions, rv


def test_space_rejects_null_atoms():
    with pytest.raises(ValidationError, match="null atom"):
        FiniteProbabilitySpace(("a", "b"), (Fraction(1), Fraction(0)))


def test_space_rejects_bad_mass():
    with pytest.raises(ValidationError, match="sum"):
        FiniteProbabilitySpace(("a", "b"), (Fraction(1, 2), Fraction(1, 3)))
    with pytest.raises(ValidationError, match="unique"):
        FiniteProbabilitySpace(("a", "a"), (Fraction(1, 2), Fraction(1, 2)))


def test_partition_canonical_form(space4):
    p = Partition.from_labels(space4, [["c", "d"], ["b", "a"]])
    assert p.cells == ((0, 1), (2, 3))
    q = Partition.from_labels(space4, [["a", "b"], ["c", "d"]])
    assert p == q  # structural equality of sigma-algebras


def test_partition_must_cover_and_be_disjoint(space4):
    with pytest.raises(ValidationError):
        Partition.from_labels(space4, [["a", "b"], ["b", "c", "d"]])
    with pytest.raises(ValidationError):
        Partition.from_labels(space4, [["a", "b"], ["c"]])


def test_refinement_examples(space4):
    fine = Partition.from_labels(space4, [["a"], ["b"], ["c", "d"]])
    coarse = Partition.from_labels(space4, [["a", "b"], ["c", "d"]])
    assert is_refinement(fine, coarse)
    assert is_refinement(coarse, coarse)
    crossed = Partition.from_labels(space4, [["a", "c"], ["b", "d"]])
    assert not is_refinement(crossed, coarse)


def test_refinement_requires_same_space(space4):
    other = FiniteProbabilitySpace.uniform(["x", "y"])
    with pytest.raises(SpaceMismatchError):
        is_refinement(Partition.trivial(other), Partition.trivial(space4))


def test_refinement_is_a_partial_order():
    space = FiniteProbabilitySpace.uniform(["a", "b", "c", "d"])
    parts = all_partitions(space)
    for p in parts:
        assert is_refinement(p, p)  # reflexive
    for p in parts:
        for q in parts:
            if is_refinement(p, q) and is_refinement(q, p):
                assert p == q  # antisymmetric on canonical forms
            for r in parts:
                if is_refinement(p, q) and is_refinement(q, r):
                    assert is_refinement(p, r)  # transitive


def test_enumerate_events_counts(space4, H):
    assert len(enumerate_events(H)) == 4
    trivial = Partition.trivial(space4)
    evs = enumerate_events(trivial)
    assert {frozenset(e.labels) for e in evs} == {frozenset(), frozenset("abcd")}
    three = Partition.from_labels(space4, [["a"], ["b"], ["c", "d"]])
    evs3 = enumerate_events(three)
    assert len(evs3) == 8
    cells = [frozenset(c) for c in three.cells]
    for e in evs3:
        # every event is a union of cells
        assert all(c <= e.members or not (c & e.members) for c in cells)


def test_enumerate_events_is_a_sigma_algebra(space4):
    three = Partition.from_labels(space4, [["a"], ["b"], ["c", "d"]])
    evs = {e.members for e in enumerate_events(three)}
    for e in enumerate_events(three):
        assert e.complement().members in evs
        for f in enumerate_events(three):
            assert e.union(f).members in evs


def test_enumerate_events_cap(space4):
    discrete = Partition.discrete(space4)
    with pytest.raises(CapExceededError):
        enumerate_events(discrete, cap=3)


def test_is_measurable(space4, H):
    assert is_measurable(rv(space4, 3, 3, 6, 6), H)
    assert not is_measurable(rv(space4, 1, 3, 2, 6), H)
    discrete = Partition.discrete(space4)
    assert is_measurable(rv(space4, 1, 3, 2, 6), discrete)


def test_restrict(space4):
    X = rv(space4, 1, 3, 2, 6)
    Hab = Event.from_labels(space4, ["a", "b"])
    assert restrict(X, Hab) == rv(space4, 1, 3, 0, 0)
    spiky = RandomVariable(space4, (POS_INF, ext(1), ext(2), ext(3)))
    assert restrict(spiky, Event.empty(space4)) == rv(space4, 0, 0, 0, 0)
    assert restrict(spiky, Event.full(space4)) == spiky


def test_patch(space4):
    X = rv(space4, 1, 1, 1, 1)
    Y = rv(space4, 2, 2, 2, 2)
    ev = Event.from_labels(space4, ["a", "d"])
    assert patch(X, ev, Y) == rv(space4, 1, 2, 2, 1)


def test_rv_validation(space4):
    with pytest.raises(ValidationError):
        RandomVariable(space4, (ext(1),))
    with pytest.raises(ValidationError, match="missing"):
        RandomVariable.of(space4, {"a": 1, "b": 2, "c": 3})
    with pytest.raises(ValidationError, match="unknown"):
        RandomVariable.of(space4, {"a": 1, "b": 2, "c": 3, "d": 4, "e": 5})


def test_rv_algebra_uses_conventions(space4):
    X = RandomVariable(space4, (POS_INF, NEG_INF, ext(1), ext(0)))
    Y = RandomVariable(space4, (NEG_INF, NEG_INF, ext(2), POS_INF))
    assert (X + Y).values == (ext(0), NEG_INF, ext(3), POS_INF)
    assert (X - Y).values == (POS_INF, ext(0), ext(-1), NEG_INF)
    assert (X.scale(0)).values == (ext(0),) * 4
    assert X.pos().values == (POS_INF, ext(0), ext(1), ext(0))
    assert X.neg().values == (ext(0), POS_INF, ext(0), ext(0))


def test_expectation_convention(space4):
    assert expectation(rv(space4, 1, 3, 2, 6)) == ext(3)
    assert expectation(RandomVariable(space4, (POS_INF, ext(0), ext(0), ext(0)))) == POS_INF
    both = RandomVariable(space4, (POS_INF, NEG_INF, ext(0), ext(0)))
    assert expectation(both) == ext(0)  # E(X+) - E(X-) = inf - inf


def test_filtration_checks_refinement(space4, H):
    trivial = Partition.trivial(space4)
    discrete = Partition.discrete(space4)
    Filtration(("t0", "t1", "t2"), (trivial, H, discrete))
    with pytest.raises(ValidationError, match="refinement"):
        Filtration(("t0", "t1"), (H, trivial))


def test_event_prob(space4):
    assert Event.from_labels(space4, ["a", "b"]).prob() == Fraction(1, 2)
