import itertools
from fractions import Fraction
from math import factorial

import pytest

from surfcover.characters import (
    CharacterTable,
    centralizer_size,
    class_size,
    commutator_count,
    dim_irrep,
    factorization_count,
    g_commutator_product_count,
    get_table,
    hom_count,
    mn_character,
    partitions,
    witten_zeta,
)
from surfcover.perms import commutator, compose, cycle_type

S3_TABLE = {
    (3,): (1, 1, 1),
    (2, 1): (-1, 0, 2),
    (1, 1, 1): (1, -1, 1),
}

S4_TABLE = {
    (4,): (1, 1, 1, 1, 1),
    (3, 1): (-1, 0, -1, 1, 3),
    (2, 2): (0, -1, 2, 0, 2),
    (2, 1, 1): (1, 0, -1, -1, 3),
    (1, 1, 1, 1): (-1, 1, 1, -1, 1),
}


def test_partitions_order_and_counts():
    assert partitions(0) == [()]
    assert partitions(1) == [(1,)]
    assert partitions(4) == [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]
    known = {5: 7, 6: 11, 7: 15, 8: 22, 9: 30, 10: 42}
    for n, p_n in known.items():
        assert len(partitions(n)) == p_n

    def count(n, max_part):
        # independent recursive partition count
        if n == 0:
            return 1
        return sum(count(n - k, k) for k in range(1, min(n, max_part) + 1))

    for n in range(12):
        assert len(partitions(n)) == count(n, n)


def test_dimensions():
    assert dim_irrep((4,)) == 1
    assert dim_irrep((1, 1, 1, 1)) == 1
    assert dim_irrep((2, 1)) == 2
    assert dim_irrep((3, 2)) == 5
    for n in range(1, 13):
        assert sum(dim_irrep(lam) ** 2 for lam in partitions(n)) == factorial(n)


def test_small_tables_match_reference():
    for n, table in ((3, S3_TABLE), (4, S4_TABLE)):
        t = get_table(n)
        for lam, row in table.items():
            assert t.row(lam) == row, lam


def test_character_at_identity_is_dimension():
    for n in range(1, 9):
        ident = tuple([1] * n)
        for lam in partitions(n):
            assert mn_character(lam, ident) == dim_irrep(lam)


def test_trivial_and_sign_rows():
    for n in range(1, 8):
        for mu in partitions(n):
            assert mn_character((n,), mu) == 1
            parity = (-1) ** (n - len(mu))
            assert mn_character(tuple([1] * n), mu) == parity


# --- independent oracle: Young's seminormal representation -----------------


def standard_tableaux(shape):
    n = sum(shape)
    rows = [[] for _ in shape]

    def fill(value):
        if value == n:
            yield tuple(tuple(r) for r in rows)
            return
        for i, row in enumerate(rows):
            if len(row) < shape[i] and (i == 0 or len(rows[i - 1]) > len(row)):
                row.append(value)
                yield from fill(value + 1)
                row.pop()

    yield from fill(0)


def seminormal_matrix(shape, k, tableaux, index):
    """Matrix of the swap of values k and k+1 on the seminormal basis."""
    size = len(tableaux)
    matrix = [[Fraction(0)] * size for _ in range(size)]
    for col, t in enumerate(tableaux):
        pos = {}
        for i, row in enumerate(t):
            for j, v in enumerate(row):
                pos[v] = (i, j)
        (ri, ci), (rj, cj) = pos[k], pos[k + 1]
        r = (cj - rj) - (ci - ri)
        if r == 1 and ri == rj:
            matrix[col][col] = Fraction(1)
            continue
        if r == -1 and ci == cj:
            matrix[col][col] = Fraction(-1)
            continue
        swapped = [list(row) for row in t]
        swapped[ri][ci], swapped[rj][cj] = k + 1, k
        target = index[tuple(tuple(row) for row in swapped)]
        matrix[col][col] = Fraction(1, r)
        matrix[target][col] = Fraction(1) if ri < rj else 1 - Fraction(1, r * r)
    return matrix


def mat_mul(a, b):
    size = len(a)
    return [
        [sum(a[i][k] * b[k][j] for k in range(size)) for j in range(size)]
        for i in range(size)
    ]


def adjacent_swap_sequence(perm):
    """Bubble-sort decomposition; the product has perm's cycle type."""
    arr = list(perm)
    swaps = []
    changed = True
    while changed:
        changed = False
        for i in range(len(arr) - 1):
            if arr[i] > arr[i + 1]:
                arr[i], arr[i + 1] = arr[i + 1], arr[i]
                swaps.append(i)
                changed = True
    return swaps


def class_representative(mu):
    n = sum(mu)
    out = [0] * n
    pos = 0
    for part in mu:
        block = list(range(pos, pos + part))
        for a, b in zip(block, block[1:] + block[:1]):
            out[a] = b
        pos += part
    return tuple(out)


def seminormal_character(lam, mu):
    tableaux = list(standard_tableaux(lam))
    index = {t: i for i, t in enumerate(tableaux)}
    size = len(tableaux)
    rep = class_representative(mu)
    swaps = adjacent_swap_sequence(rep)
    result = [[Fraction(int(i == j)) for j in range(size)] for i in range(size)]
    for k in swaps:
        result = mat_mul(result, seminormal_matrix(lam, k, tableaux, index))
    trace = sum(result[i][i] for i in range(size))
    assert trace.denominator == 1
    return trace.numerator


def test_mn_matches_seminormal_traces():
    for n in range(1, 6):
        for lam in partitions(n):
            assert len(list(standard_tableaux(lam))) == dim_irrep(lam)
            for mu in partitions(n):
                rep = class_representative(mu)
                assert cycle_type(rep) == mu
                assert mn_character(lam, mu) == seminormal_character(lam, mu), (lam, mu)


# ---------------------------------------------------------------------------


def test_row_orthogonality():
    for n in range(1, 8):
        t = get_table(n)
        nf = factorial(n)
        for i, lam in enumerate(t.partitions):
            for j, lam2 in enumerate(t.partitions):
                inner = sum(
                    size * t.chi(lam, mu) * t.chi(lam2, mu)
                    for mu, size in zip(t.partitions, t.class_sizes)
                )
                assert inner == (nf if i == j else 0)


def test_witten_zeta():
    assert witten_zeta(2, 2) == 2
    assert witten_zeta(3, 2) == Fraction(9, 4)
    assert witten_zeta(1, 5) == 1
    with pytest.raises(ValueError):
        witten_zeta(0, 2)


def test_hom_count():
    assert hom_count(1, 2) == 1
    assert hom_count(2, 2) == 16
    assert hom_count(3, 2) == 486
    assert hom_count(2, 3) == 64
    for n in range(1, 21):
        for genus in (2, 3):
            assert hom_count(n, genus) > 0  # integrality is checked internally
    with pytest.raises(ValueError):
        hom_count(3, 1)


def test_commutator_count_s3():
    assert commutator_count(3, (1, 1, 1)) == 18
    assert commutator_count(3, (2, 1)) == 0
    assert commutator_count(3, (3,)) == 9
    with pytest.raises(ValueError):
        commutator_count(3, (2, 2))


def test_commutator_count_brute_force():
    for n in range(2, 6):
        counts = {mu: 0 for mu in partitions(n)}
        perms = list(itertools.permutations(range(n)))
        for a in perms:
            for b in perms:
                counts[cycle_type(commutator(a, b))] += 1
        for mu in partitions(n):
            assert counts[mu] == commutator_count(n, mu) * class_size(mu)


def test_total_commutator_mass():
    for n in range(1, 8):
        total = sum(
            class_size(mu) * commutator_count(n, mu) for mu in partitions(n)
        )
        assert total == factorial(n) ** 2


def test_g_commutator_product_count():
    for n in range(1, 7):
        ident = tuple([1] * n)
        assert g_commutator_product_count(n, 2, ident) == hom_count(n, 2)
    assert g_commutator_product_count(3, 1, (3,)) == commutator_count(3, (3,))
    assert g_commutator_product_count(2, 2, (2,)) == 0


def test_g_commutator_product_brute_force():
    n, genus = 3, 2
    perms = list(itertools.permutations(range(n)))
    target = {mu: 0 for mu in partitions(n)}
    fixed_rep = {mu: None for mu in partitions(n)}
    counts = {mu: 0 for mu in partitions(n)}
    reps = {}
    for p in perms:
        reps.setdefault(cycle_type(p), p)
    for a in perms:
        for b in perms:
            lead = commutator(a, b)
            for c in perms:
                for d in perms:
                    prod = compose(lead, commutator(c, d))
                    for mu, rep in reps.items():
                        if prod == rep:
                            counts[mu] += 1
    for mu in partitions(n):
        assert counts[mu] == g_commutator_product_count(n, genus, mu)


def test_class_and_centralizer_sizes():
    assert class_size((1, 1, 1, 1)) == 1
    assert centralizer_size((1, 1, 1, 1)) == 24
    assert class_size((2, 1, 1)) == 6
    assert class_size((2, 2)) == 3
    for n in range(1, 9):
        for mu in partitions(n):
            assert class_size(mu) * centralizer_size(mu) == factorial(n)
    # direct count over all of S_4
    found = {mu: 0 for mu in partitions(4)}
    for p in itertools.permutations(range(4)):
        found[cycle_type(p)] += 1
    for mu, count in found.items():
        assert count == class_size(mu)


def test_factorization_count():
    # fixing x = identity forces y to equal the target
    assert factorization_count((1, 1, 1), (2, 1), (2, 1)) == 1
    assert factorization_count((1, 1, 1), (2, 1), (3,)) == 0
    assert factorization_count((1, 1, 1), (1, 1, 1), (1, 1, 1)) == 1
    assert factorization_count((2, 1), (2, 1), (1, 1, 1)) == 3
    # brute force in S4: count x in k1 with x*y = rep for y in k2
    n = 4
    perms = list(itertools.permutations(range(n)))
    reps = {}
    for p in perms:
        reps.setdefault(cycle_type(p), p)
    for k1 in partitions(n):
        for k2 in partitions(n):
            for sigma in partitions(n):
                rep = reps[sigma]
                brute = 0
                for x in perms:
                    if cycle_type(x) != k1:
                        continue
                    y = compose(inverse_of(x), rep)
                    if cycle_type(y) == k2:
                        brute += 1
                assert brute == factorization_count(k1, k2, sigma), (k1, k2, sigma)


def inverse_of(p):
    out = [0] * len(p)
    for i, v in enumerate(p):
        out[v] = i
    return tuple(out)


def test_table_freeze():
    t = CharacterTable(4)
    assert not t.frozen
    t.freeze()
    assert t.frozen
    assert t.chi((2, 2), (2, 2)) == 2
