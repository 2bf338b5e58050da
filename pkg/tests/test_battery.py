"""Battery structure and cross-cutting invariants at small sample counts."""

import itertools

import pytest

from condind import (
    FiniteProbabilitySpace,
    Partition,
    RandomVariable,
    Scenario,
    Verdict,
    battery_failed,
    builtin_indicator,
    canonical_scenario,
    essinf_cond,
    esssup_cond,
    mix_self_dual,
    verify_all,
)
from condind.errors import EmptyDomainError
from condind.indicators import BUILTIN_NAMES, IndicatorSpec
from condind.sampling import GRID_VALUES
from conftest import all_partitions


def test_battery_green_and_named(scenario):
    reports = verify_all(scenario, seed=3, samples=30)
    assert not battery_failed(reports)
    names = [r.prop for r in reports]
    assert names[0] == "conv-table"
    assert len(names) == len(set(names))  # properties addressable by name
    for prefix in ("axioms:", "locality:", "averaging:", "structural:",
                   "sign-split:", "dual-involution:", "extension-sandwich:",
                   "extension-duality:", "tower:", "risk:", "density-roundtrip"):
        assert any(n.startswith(prefix) for n in names), prefix


def test_battery_without_filtration_skips_tower():
    space = FiniteProbabilitySpace.uniform(["a", "b"])
    bare = Scenario(
        space=space,
        partitions={"H": Partition.discrete(space)},
        variables={},
    )
    reports = verify_all(bare, seed=1, samples=15)
    assert not battery_failed(reports)
    skipped = [r for r in reports if r.verdict is Verdict.SKIPPED]
    assert any(r.prop == "tower" for r in skipped)


def test_battery_seed_sensitivity_is_only_in_cases(scenario):
    a = [r.prop for r in verify_all(scenario, seed=1, samples=12)]
    b = [r.prop for r in verify_all(scenario, seed=2, samples=12)]
    assert a == b  # property list independent of the seed


def test_sandwich_exhaustive_small_spaces():
    # every builtin stays inside [cell min, cell max] on the full grid
    for n in (2, 3):
        space = FiniteProbabilitySpace.uniform([chr(97 + i) for i in range(n)])
        for partition in all_partitions(space):
            indicators = [builtin_indicator(name, partition) for name in BUILTIN_NAMES]
            indicators.append(mix_self_dual(indicators[0]))
            for combo in itertools.product(GRID_VALUES, repeat=n):
                X = RandomVariable(space, combo)
                lo = essinf_cond(X, partition)
                hi = esssup_cond(X, partition)
                for I in indicators:
                    if not I.in_domain(X):
                        continue
                    out = I(X)
                    assert lo.le(out) and out.le(hi), (I.name, combo)


def test_mix_requires_zero_in_domain():
    space = FiniteProbabilitySpace.uniform(["a", "b"])
    H = Partition.trivial(space)
    never = IndicatorSpec("never", H, lambda X: X, domain_fn=lambda X: False)
    with pytest.raises(EmptyDomainError):
        mix_self_dual(never)


def _random_scenario(seed: int) -> Scenario:
    import random
    from fractions import Fraction
    from condind import Filtration

    rng = random.Random(seed)
    n = rng.randint(2, 6)
    weights = [rng.randint(1, 7) for _ in range(n)]
    total = sum(weights)
    space = FiniteProbabilitySpace(
        tuple(f"a{i}" for i in range(n)),
        tuple(Fraction(w, total) for w in weights),
    )
    atoms = list(range(n))
    rng.shuffle(atoms)
    k = rng.randint(1, n)
    fine = Partition.from_cells(space, [c for c in (atoms[i::k] for i in range(k)) if c])

    def coarsen(p):
        cells = [list(c) for c in p.cells]
        if len(cells) > 1:
            i, j = rng.sample(range(len(cells)), 2)
            cells[i] += cells[j]
            del cells[j]
        return Partition.from_cells(space, cells)

    mid = coarsen(fine)
    coarse = coarsen(mid)
    return Scenario(
        space=space,
        partitions={"P0": coarse, "P1": mid, "P2": fine},
        variables={},
        filtration_names=("P0", "P1", "P2"),
        filtration=Filtration(("P0", "P1", "P2"), (coarse, mid, fine)),
    )


def test_battery_green_on_random_scenario_shapes():
    # non-uniform masses, non-discrete terminal partitions, short chains
    for seed in (1000, 1003, 1011, 1017, 1029):
        reports = verify_all(_random_scenario(seed), seed=seed, samples=15)
        failing = [r.prop for r in reports if not r.ok]
        assert failing == [], (seed, failing)
