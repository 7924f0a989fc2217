"""Observables on homomorphism points: fixed points, short cycles, moments.

A moment specification is a list of groups, each carrying a base word, a list
of exponents and an outer power. Evaluated at a homomorphism point it is the
product over groups of (product over exponents of the fixed-point count of
the powered word), raised to the group's power. Identity words are rejected
up front; the ambient group is torsion free, so powers of a non-identity word
never need re-checking.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import lru_cache

from .perms import (
    HomPoint,
    compose,
    d_cycle_count,
    evaluate_word,
    fix_count,
    identity,
)
from .words import IdentityWordError, Word, is_identity, word_from_text, word_to_text


def mobius(n: int) -> int:
    if n < 1:
        raise ValueError("mobius is defined on positive integers")
    result = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    if n > 1:
        result = -result
    return result


@lru_cache(maxsize=None)
def divisors(a: int) -> tuple[int, ...]:
    if a < 1:
        raise ValueError("divisors of positive integers only")
    small, large = [], []
    d = 1
    while d * d <= a:
        if a % d == 0:
            small.append(d)
            if d != a // d:
                large.append(a // d)
        d += 1
    return tuple(small + large[::-1])


def d_count(a: int) -> int:
    """Number of positive divisors."""
    return len(divisors(a))


@dataclass(frozen=True)
class ObservableGroup:
    word: Word
    exponents: tuple[int, ...]
    power: int = 1

    def __post_init__(self) -> None:
        if not self.exponents:
            raise ValueError("a group needs at least one exponent")
        if any(a < 1 for a in self.exponents):
            raise ValueError("exponents must be >= 1")
        if self.power < 1:
            raise ValueError("group power must be >= 1")
        if is_identity(self.word):
            raise IdentityWordError("observable words must not be the identity")


@dataclass(frozen=True)
class ObservableSpec:
    groups: tuple[ObservableGroup, ...]
    genus: int

    def __post_init__(self) -> None:
        for g in self.groups:
            if g.word.genus != self.genus:
                raise ValueError("group word genus differs from spec genus")

    def single_group_specs(self) -> list["ObservableSpec"]:
        return [ObservableSpec((g,), self.genus) for g in self.groups]


def fixed_points(h: HomPoint, w: Word) -> int:
    """Fixed points of the image of w; rejects the identity word."""
    if is_identity(w):
        raise IdentityWordError("fixed-point statistics need a non-identity word")
    return fix_count(evaluate_word(h, w))


def cycle_count(h: HomPoint, w: Word, d: int) -> int:
    """Number of d-cycles in the image of w; rejects the identity word."""
    if is_identity(w):
        raise IdentityWordError("cycle statistics need a non-identity word")
    return d_cycle_count(evaluate_word(h, w), d)


def _power_images(h: HomPoint, w: Word, wanted) -> dict[int, tuple[int, ...]]:
    """Images of w, w^2, ... for each exponent in `wanted`, by repeated composition."""
    base = evaluate_word(h, w)
    images: dict[int, tuple[int, ...]] = {}
    current = identity(h.n)
    exponent = 0
    for a in sorted(set(wanted)):
        while exponent < a:
            current = compose(current, base)
            exponent += 1
        images[a] = current
    return images


def power_identity_holds(h: HomPoint, w: Word, a: int) -> bool:
    """Fixed points of w^a match the weighted cycle counts of w, always."""
    if a < 1:
        raise ValueError("exponent must be >= 1")
    if is_identity(w):
        raise IdentityWordError("identity word rejected")
    img = evaluate_word(h, w)
    powered = _power_images(h, w, [a])[a]
    return fix_count(powered) == sum(
        d * d_cycle_count(img, d) for d in divisors(a) if d <= h.n
    )


def cycles_from_fixed_points(values, r: int) -> int:
    """Recover the r-cycle count from fixed-point counts of powers.

    `values` maps each divisor q of r to the fixed-point count of the q-th
    power. Inconsistent data fails the integrality check loudly.
    """
    if r < 1:
        raise ValueError("cycle length must be >= 1")
    total = 0
    for d in divisors(r):
        q = r // d
        if q not in values:
            raise ValueError(f"missing fixed-point value for power {q}")
        total += mobius(d) * values[q]
    quotient, remainder = divmod(total, r)
    if remainder:
        raise ArithmeticError("fixed-point data inconsistent with any cycle count")
    return quotient


def joint_moment(h: HomPoint, spec: ObservableSpec) -> int:
    """Product over groups of powered fixed-point products, at one point."""
    if h.genus != spec.genus:
        raise ValueError("genus mismatch")
    cache: dict[Word, dict[int, tuple[int, ...]]] = {}
    result = 1
    for group in spec.groups:
        images = cache.get(group.word)
        if images is None:
            images = _power_images(h, group.word, group.exponents)
            cache[group.word] = images
        else:
            missing = [a for a in group.exponents if a not in images]
            if missing:
                images.update(_power_images(h, group.word, missing))
        factor = 1
        for a in group.exponents:
            factor *= fix_count(images[a])
        result *= factor**group.power
    return result


_GROUP_RE = re.compile(
    r"""^\s*(?P<label>[A-Za-z_][A-Za-z_0-9]*)\s*=\s*"(?P<word>[^"]*)"
        (?:\s+exps\s*=\s*\[(?P<exps>[0-9,\s]*)\])?
        (?:\s+pow\s*=\s*(?P<pow>[0-9]+))?\s*$""",
    re.VERBOSE,
)


def spec_from_text(text: str, genus: int) -> ObservableSpec:
    """Parse 'gamma="a1" exps=[2,3] pow=1; delta="a2" exps=[4]' into a spec."""
    groups = []
    stripped = text.strip()
    if stripped:
        for chunk in stripped.split(";"):
            if not chunk.strip():
                continue
            m = _GROUP_RE.match(chunk)
            if m is None:
                raise ValueError(f"bad spec group {chunk.strip()!r}")
            word = word_from_text(m.group("word"), genus)
            exps_text = m.group("exps")
            if exps_text is None or not exps_text.strip():
                exponents: tuple[int, ...] = (1,)
            else:
                exponents = tuple(int(tok) for tok in exps_text.split(",") if tok.strip())
            power = int(m.group("pow") or 1)
            groups.append(ObservableGroup(word, exponents, power))
    return ObservableSpec(tuple(groups), genus)


def spec_to_text(spec: ObservableSpec) -> str:
    chunks = []
    for i, g in enumerate(spec.groups):
        exps = ",".join(str(a) for a in g.exponents)
        chunks.append(f'g{i + 1}="{word_to_text(g.word)}" exps=[{exps}] pow={g.power}')
    return "; ".join(chunks)


def spec_to_json(spec: ObservableSpec) -> dict:
    return {
        "genus": spec.genus,
        "groups": [
            {
                "word": word_to_text(g.word),
                "exps": list(g.exponents),
                "pow": g.power,
            }
            for g in spec.groups
        ],
    }


def spec_from_json(obj, genus: int | None = None) -> ObservableSpec:
    if isinstance(obj, str):
        obj = json.loads(obj)
    g = obj.get("genus", genus)
    if g is None:
        raise ValueError("spec JSON needs a genus")
    groups = tuple(
        ObservableGroup(
            word_from_text(entry["word"], g),
            tuple(entry.get("exps", [1])),
            entry.get("pow", 1),
        )
        for entry in obj["groups"]
    )
    return ObservableSpec(groups, g)
