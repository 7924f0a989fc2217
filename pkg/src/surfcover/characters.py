"""Exact symmetric-group character arithmetic and solution counting.

Everything in this module is integer or rational arithmetic; floating point
is deliberately absent because the alternating character sums that feed the
counting formulas cancel catastrophically in floats.

Character values come from the signed border-strip recursion, driven by
first-column hook lengths (beta numbers): removing a strip of length L from a
shape with beta set B means replacing some b in B by b - L when b - L is
fresh, with sign (-1)^(number of beta values jumped over).
"""

from __future__ import annotations

import threading
from fractions import Fraction
from functools import lru_cache
from math import factorial

Partition = tuple[int, ...]


def check_partition(parts) -> Partition:
    tup = tuple(parts)
    for x in tup:
        if not isinstance(x, int) or x <= 0:
            raise ValueError(f"partition parts must be positive integers: {tup!r}")
    for a, b in zip(tup, tup[1:]):
        if a < b:
            raise ValueError(f"partition parts must be weakly decreasing: {tup!r}")
    return tup


@lru_cache(maxsize=None)
def _partitions(n: int, max_part: int) -> tuple[Partition, ...]:
    if n == 0:
        return ((),)
    out = []
    for first in range(min(n, max_part), 0, -1):
        for rest in _partitions(n - first, first):
            out.append((first,) + rest)
    return tuple(out)


def partitions(n: int) -> list[Partition]:
    """All partitions of n in reverse-lexicographic (largest-first) order."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return list(_partitions(n, n))


def hook_lengths(lam: Partition) -> list[list[int]]:
    lam = check_partition(lam)
    cols = [0] * (lam[0] if lam else 0)
    for row_len in lam:
        for j in range(row_len):
            cols[j] += 1
    return [
        [row_len - j + cols[j] - i - 1 for j in range(row_len)]
        for i, row_len in enumerate(lam)
    ]


def hook_product(lam: Partition) -> int:
    prod = 1
    for row in hook_lengths(lam):
        for h in row:
            prod *= h
    return prod


def dim_irrep(lam: Partition) -> int:
    """Dimension by the hook length formula: n! over the product of hooks."""
    lam = check_partition(lam)
    n = sum(lam)
    q, r = divmod(factorial(n), hook_product(lam))
    if r:
        raise ArithmeticError(f"hook product does not divide n! for {lam!r}")
    return q


def centralizer_size(mu: Partition) -> int:
    mu = check_partition(mu)
    size = 1
    mult: dict[int, int] = {}
    for part in mu:
        mult[part] = mult.get(part, 0) + 1
    for length, m in mult.items():
        size *= length**m * factorial(m)
    return size


def class_size(mu: Partition) -> int:
    mu = check_partition(mu)
    return factorial(sum(mu)) // centralizer_size(mu)


def _strip_removals(lam: Partition, length: int):
    """Yield (smaller_shape, sign) for each removable border strip of `length`."""
    k = len(lam)
    beta = [lam[i] + (k - 1 - i) for i in range(k)]
    beta_set = set(beta)
    for i, b in enumerate(beta):
        b2 = b - length
        if b2 < 0 or b2 in beta_set:
            continue
        jumped = sum(1 for x in beta if b2 < x < b)
        new_beta = sorted((x for x in beta if x != b), reverse=True)
        new_beta.append(b2)
        new_beta.sort(reverse=True)
        parts = tuple(new_beta[j] - (k - 1 - j) for j in range(k))
        while parts and parts[-1] == 0:
            parts = parts[:-1]
        yield parts, (-1 if jumped % 2 else 1)


class CharacterTable:
    """Memoized character values for one symmetric group.

    Values fill in lazily; freeze() materializes the full table, after which
    the object is read-only and safe to share across threads.
    """

    def __init__(self, n: int):
        if n < 0:
            raise ValueError("n must be >= 0")
        self.n = n
        self.partitions: tuple[Partition, ...] = tuple(partitions(n))
        self.index = {lam: i for i, lam in enumerate(self.partitions)}
        self.hook_products = tuple(hook_product(lam) for lam in self.partitions)
        self.dims = tuple(dim_irrep(lam) for lam in self.partitions)
        self.class_sizes = tuple(class_size(mu) for mu in self.partitions)
        self.centralizer_sizes = tuple(
            centralizer_size(mu) for mu in self.partitions
        )
        self._memo: dict[tuple[Partition, Partition], int] = {}
        self._frozen = False
        self._lock = threading.Lock()

    def chi(self, lam: Partition, mu: Partition) -> int:
        """Exact character value of the irreducible `lam` on the class `mu`."""
        if sum(lam) != sum(mu):
            raise ValueError("partition sizes differ")
        return self._chi(tuple(lam), tuple(mu))

    def _chi(self, lam: Partition, mu: Partition) -> int:
        key = (lam, mu)
        memo = self._memo
        if key in memo:
            return memo[key]
        if self._frozen:
            raise AssertionError("frozen table is missing an entry")
        if not mu:
            memo[key] = 1
            return 1
        total = 0
        rest = mu[1:]
        for smaller, sign in _strip_removals(lam, mu[0]):
            total += sign * self._chi(smaller, rest)
        memo[key] = total
        return total

    def row(self, lam: Partition) -> tuple[int, ...]:
        return tuple(self.chi(lam, mu) for mu in self.partitions)

    def freeze(self) -> "CharacterTable":
        with self._lock:
            if not self._frozen:
                for lam in self.partitions:
                    for mu in self.partitions:
                        self._chi(lam, mu)
                self._frozen = True
        return self

    @property
    def frozen(self) -> bool:
        return self._frozen


_tables: dict[int, CharacterTable] = {}
_tables_lock = threading.Lock()


def get_table(n: int) -> CharacterTable:
    with _tables_lock:
        table = _tables.get(n)
        if table is None:
            table = CharacterTable(n)
            _tables[n] = table
        return table


def mn_character(lam: Partition, mu: Partition) -> int:
    lam, mu = check_partition(lam), check_partition(mu)
    return get_table(sum(lam)).chi(lam, mu)


def witten_zeta(n: int, s: int) -> Fraction:
    """Sum over irreducibles of dim^-s."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if s < 1:
        raise ValueError("s must be >= 1")
    table = get_table(n)
    return sum((Fraction(1, d**s) for d in table.dims), Fraction(0))


def hom_count(n: int, genus: int) -> int:
    """Number of 2g-tuples of permutations satisfying the surface relator.

    Equals (n!)^(2g-1) times the zeta value at 2g-2; computed here as
    n! * sum of hook-product powers, which is manifestly an integer.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if genus < 2:
        raise ValueError("genus must be >= 2")
    table = get_table(n)
    count = factorial(n) * sum(h ** (2 * genus - 2) for h in table.hook_products)
    _cross_check_hom_count(n, genus, count)
    return count


def _cross_check_hom_count(n: int, genus: int, count: int) -> None:
    via_zeta = Fraction(factorial(n)) ** (2 * genus - 1) * witten_zeta(n, 2 * genus - 2)
    if via_zeta.denominator != 1 or via_zeta.numerator != count:
        raise ArithmeticError("inconsistent homomorphism count (character bug)")


def commutator_count(n: int, mu: Partition) -> int:
    """Number of pairs (a, b) whose commutator lands on a fixed element of class mu."""
    mu = check_partition(mu) if mu else ()
    if sum(mu) != n:
        raise ValueError("class partition must have size n")
    table = get_table(n)
    total = sum(
        table.chi(lam, mu) * h for lam, h in zip(table.partitions, table.hook_products)
    )
    if total < 0:
        raise ArithmeticError(f"negative commutator count for {mu!r}")
    return total


def g_commutator_product_count(n: int, genus: int, mu: Partition) -> int:
    """Tuples (a_1,b_1,...,a_g,b_g) whose commutator product is a fixed element of class mu."""
    if genus < 1:
        raise ValueError("genus must be >= 1")
    mu = check_partition(mu) if mu else ()
    if sum(mu) != n:
        raise ValueError("class partition must have size n")
    table = get_table(n)
    total = sum(
        table.chi(lam, mu) * h ** (2 * genus - 1)
        for lam, h in zip(table.partitions, table.hook_products)
    )
    if total < 0:
        raise ArithmeticError(f"negative tuple count for {mu!r}")
    return total


def factorization_count(kappa1: Partition, kappa2: Partition, sigma: Partition) -> int:
    """Number of (x, y) with x in class kappa1, y in class kappa2 and x*y equal
    to a fixed representative of class sigma."""
    kappa1, kappa2, sigma = (
        check_partition(kappa1),
        check_partition(kappa2),
        check_partition(sigma),
    )
    n = sum(kappa1)
    if sum(kappa2) != n or sum(sigma) != n:
        raise ValueError("classes must share one n")
    table = get_table(n)
    total = sum(
        table.chi(lam, kappa1) * table.chi(lam, kappa2) * table.chi(lam, sigma) * h
        for lam, h in zip(table.partitions, table.hook_products)
    )
    scaled = class_size(kappa1) * class_size(kappa2) * total
    q, r = divmod(scaled, factorial(n) ** 2)
    if r or q < 0:
        raise ArithmeticError("factorization count is not a non-negative integer")
    return q
