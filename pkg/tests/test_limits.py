import random
from fractions import Fraction

import pytest

from surfcover.limits import (
    bell_number,
    distinctness_warnings,
    factorization_identity_holds,
    limit_cycle_moment,
    limit_product_moment,
    poisson_moment,
    stirling2,
)
from surfcover.observables import ObservableGroup, ObservableSpec, d_count
from surfcover.words import word_from_text

BELL = [1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975]


def w(text):
    return word_from_text(text, 2)


def group(text, exps, power=1):
    return ObservableGroup(w(text), tuple(exps), power)


def spec_of(*groups):
    return ObservableSpec(tuple(groups), 2)


def test_stirling_triangle():
    assert stirling2(0, 0) == 1
    assert stirling2(3, 2) == 3
    assert stirling2(4, 2) == 7
    for m in range(9):
        assert sum(stirling2(m, j) for j in range(m + 1)) == BELL[m]


def test_poisson_moment_basics():
    lam = Fraction(3, 7)
    assert poisson_moment(lam, 0) == 1
    assert poisson_moment(lam, 1) == lam
    assert poisson_moment(lam, 2) == lam * lam + lam
    assert poisson_moment(1, 3) == 5
    with pytest.raises(ValueError):
        poisson_moment(0, 2)
    with pytest.raises(ValueError):
        poisson_moment(Fraction(1, 2), -1)


def test_bell_numbers():
    for m, value in enumerate(BELL):
        assert bell_number(m) == value


def test_worked_fifteen_example():
    spec = spec_of(group("a1", [2, 3]), group("a2", [4]))
    limit = limit_product_moment(spec)
    assert limit.value == 15
    assert limit.warnings == ()
    parts = [limit_product_moment(s).value for s in spec.single_group_specs()]
    assert parts == [5, 3]


def test_single_word_limits_are_divisor_counts():
    for a in range(1, 49):
        value = limit_product_moment(spec_of(group("a1", [a]))).value
        assert value == d_count(a)


def test_power_two_moment():
    spec = spec_of(group("a1", [1], power=2))
    assert limit_product_moment(spec).value == 2  # second moment of a mean-1 Poisson


def test_mean_shadow_of_expansion():
    # substituting each variable by its mean turns the limit into a product
    # of divisor counts
    from surfcover.limits import _expand_spec

    rng = random.Random(3)
    for _ in range(40):
        groups = []
        for gi in range(rng.randrange(1, 4)):
            exps = [rng.randrange(1, 9) for _ in range(rng.randrange(1, 3))]
            groups.append(group(f"a{gi % 2 + 1}" if gi < 2 else "b1", exps))
        spec = spec_of(*groups)
        poly = _expand_spec(spec)
        shadow = Fraction(0)
        for mono, coeff in poly.items():
            term = Fraction(coeff)
            for (_, k), m in mono:
                term *= Fraction(1, k) ** m
            shadow += term
        expected = Fraction(1)
        for g in spec.groups:
            for a in g.exponents:
                expected *= d_count(a) ** g.power
        assert shadow == expected


def test_limit_cycle_moment():
    assert limit_cycle_moment([(0, 1, 1)]) == 1
    assert limit_cycle_moment([(0, 2, 1)]) == Fraction(1, 2)
    assert limit_cycle_moment([(0, 1, 2)]) == 2
    # independence across groups: covariance contribution factors
    joint = limit_cycle_moment([(0, 1, 1), (1, 1, 1)])
    assert joint == limit_cycle_moment([(0, 1, 1)]) * limit_cycle_moment([(1, 1, 1)])
    # same variable twice merges exponents instead of factoring
    assert limit_cycle_moment([(0, 2, 1), (0, 2, 1)]) == poisson_moment(
        Fraction(1, 2), 2
    )


def test_factorization_identity_random_specs():
    rng = random.Random(41)
    words = ["a1", "a2", "b1"]
    for trial in range(200):
        t = rng.randrange(1, 4)
        groups = []
        for i in range(t):
            # two exponents occasionally; large powers of long lists explode
            # the expansion without testing anything new
            r = 2 if trial % 10 == 0 else 1
            exps = [rng.randrange(1, 13) for _ in range(r)]
            power = rng.randrange(1, 4) if r == 1 else 1
            groups.append(group(words[i], exps, power))
        assert factorization_identity_holds(spec_of(*groups))


def test_fifteen_factorizes():
    spec = spec_of(group("a1", [2, 3]), group("a2", [4]))
    assert factorization_identity_holds(spec)
    single = spec_of(group("a1", [2]))
    assert factorization_identity_holds(single)


def test_uncertified_specs_warn():
    # conjugate words share abelianization, so distinctness stays unknown
    spec = spec_of(group("a1", [1]), group("b1 a1 b1'", [1]))
    warnings = distinctness_warnings(spec)
    assert any("distinctness" in note for note in warnings)
    assert limit_product_moment(spec).warnings == warnings
    # proper powers leave primitivity unknown
    spec2 = spec_of(group("a1^2", [1]))
    assert any("primitivity" in note for note in distinctness_warnings(spec2))
    # the happy path stays silent
    spec3 = spec_of(group("a1", [1]), group("a2", [2]))
    assert distinctness_warnings(spec3) == ()
