"""Dense permutations of {0,...,n-1} with left-to-right composition.

compose(p, q) applies p first and q second, i.e. compose(p, q)[i] = q[p[i]].
This matches the way loops lift through a cover, and every word evaluation
here sticks to the same convention so that relator checks and commutators
agree bit for bit.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .words import Word

Permutation = tuple[int, ...]


def identity(n: int) -> Permutation:
    return tuple(range(n))


def check_permutation(p) -> Permutation:
    n = len(p)
    seen = [False] * n
    for v in p:
        if not 0 <= v < n or seen[v]:
            raise ValueError(f"not a permutation of range({n}): {p!r}")
        seen[v] = True
    return tuple(p)


def compose(p: Permutation, q: Permutation) -> Permutation:
    """Apply p first, then q."""
    if len(p) != len(q):
        raise ValueError("size mismatch")
    return tuple(q[v] for v in p)


def inverse(p: Permutation) -> Permutation:
    out = [0] * len(p)
    for i, v in enumerate(p):
        out[v] = i
    return tuple(out)


def conjugate(p: Permutation, by: Permutation) -> Permutation:
    """by^-1 * p * by under left-to-right composition: relabel p through by."""
    if len(p) != len(by):
        raise ValueError("size mismatch")
    out = [0] * len(p)
    for i, v in enumerate(p):
        out[by[i]] = by[v]
    return tuple(out)


def commutator(p: Permutation, q: Permutation) -> Permutation:
    """p^-1 q^-1 p q, composed left to right."""
    return compose(compose(compose(inverse(p), inverse(q)), p), q)


def cycles(p: Permutation) -> list[list[int]]:
    """Cycle decomposition including fixed points, each cycle led by its minimum."""
    seen = [False] * len(p)
    out = []
    for start in range(len(p)):
        if seen[start]:
            continue
        cyc = [start]
        seen[start] = True
        v = p[start]
        while v != start:
            cyc.append(v)
            seen[v] = True
            v = p[v]
        out.append(cyc)
    return out


def cycle_type(p: Permutation) -> tuple[int, ...]:
    return tuple(sorted((len(c) for c in cycles(p)), reverse=True))


def fix_count(p: Permutation) -> int:
    return sum(1 for i, v in enumerate(p) if i == v)


def d_cycle_count(p: Permutation, d: int) -> int:
    if not 1 <= d <= len(p):
        raise ValueError(f"cycle length {d} out of range for n={len(p)}")
    return sum(1 for c in cycles(p) if len(c) == d)


@dataclass(frozen=True)
class HomPoint:
    """Images of the 2g generators under one homomorphism to S_n.

    images[2*i] and images[2*i+1] are the images of handle i's generator pair.
    Construction checks the relator, so every HomPoint in circulation is a
    genuine homomorphism.
    """

    images: tuple[Permutation, ...]
    genus: int
    n: int

    def __post_init__(self) -> None:
        if len(self.images) != 2 * self.genus:
            raise ValueError("need one image per generator")
        for p in self.images:
            if len(p) != self.n:
                raise ValueError("image size mismatch")
        prod = identity(self.n)
        for i in range(self.genus):
            prod = compose(prod, commutator(self.images[2 * i], self.images[2 * i + 1]))
        if prod != identity(self.n):
            raise ValueError("images do not satisfy the surface relator")


def evaluate_word(h: HomPoint, w: Word) -> Permutation:
    """Product of generator images along the word, left to right."""
    if w.genus != h.genus:
        raise ValueError("genus mismatch")
    result = identity(h.n)
    for idx, sign in w.letters:
        img = h.images[idx] if sign > 0 else inverse(h.images[idx])
        result = compose(result, img)
    return result


def cycles_str(p: Permutation) -> str:
    """One-line cycle notation with 1-based points, fixed points omitted."""
    parts = [
        "(" + " ".join(str(v + 1) for v in c) + ")" for c in cycles(p) if len(c) > 1
    ]
    return "".join(parts) if parts else "()"


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str, n: int) -> Permutation:
    """Inverse of cycles_str for permutations of {1,...,n} as displayed."""
    stripped = text.replace(" ", "")
    if stripped in ("", "()"):
        return identity(n)
    if "".join(_CYCLE_RE.sub("", text).split()):
        raise ValueError(f"bad cycle notation {text!r}")
    mapping = list(range(n))
    used = set()
    for body in _CYCLE_RE.findall(text):
        points = [int(tok) - 1 for tok in body.split()]
        if not points:
            continue
        for v in points:
            if not 0 <= v < n or v in used:
                raise ValueError(f"bad cycle notation {text!r}")
            used.add(v)
        for a, b in zip(points, points[1:] + points[:1]):
            mapping[a] = b
    return tuple(mapping)
