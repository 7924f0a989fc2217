"""The uniform probability space of surface-group homomorphisms into S_n.

Three access modes, all exact:

* full enumeration through commutator buckets (small n),
* exactly uniform sampling driven by character-sum class weights (moderate n),
* Monte Carlo estimation over the sampler with reproducible seeded streams.

The sampler picks the conjugacy class of each commutator block with its exact
integer weight, then draws a uniform pair inside the chosen fiber. Fibers are
sampled either by rejection from uniform pairs followed by a conjugation
transport (fast for large classes) or by choosing the class of the first
coordinate with centralizer-times-factorization weights (fast for classes
near the identity). Both routes are exactly uniform; the estimated trial
counts only pick which one runs.
"""

from __future__ import annotations

import hashlib
import itertools
import os
import random
import threading
from array import array
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from math import factorial, sqrt

from .characters import (
    CharacterTable,
    commutator_count,
    factorization_count,
    get_table,
    hom_count,
)
from .observables import ObservableSpec, joint_moment
from .perms import (
    HomPoint,
    Permutation,
    commutator,
    compose,
    conjugate,
    cycle_type,
    cycles,
    identity,
    inverse,
)

PAIR_MATERIALIZE_LIMIT = 7
COUNT_ONLY_LIMIT = 9
DEFAULT_MAX_VISITS = 10**9


class BudgetExceededError(RuntimeError):
    """Predicted work exceeds the configured budget; nothing was truncated."""


# ---------------------------------------------------------------------------
# Seeded random streams


@dataclass(frozen=True)
class Seed:
    """64-bit seed plus a stream index; equal pairs replay equal draws."""

    value: int
    stream: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.value < 2**64:
            raise ValueError("seed value must fit in 64 bits")
        if self.stream < 0:
            raise ValueError("stream index must be >= 0")


class RandomStream(random.Random):
    """Deterministic stream keyed by (seed, indices) through SHA-256."""

    def __new__(cls, value: int, *indices: int):
        return super().__new__(cls)

    def __init__(self, value: int, *indices: int):
        key = "surfcover:%d:%s" % (value, ":".join(str(i) for i in indices))
        digest = hashlib.sha256(key.encode()).digest()
        super().__init__(int.from_bytes(digest, "big"))


def stream_for(seed, *indices: int) -> RandomStream:
    if isinstance(seed, Seed):
        return RandomStream(seed.value, seed.stream, *indices)
    return RandomStream(int(seed), 0, *indices)


def uniform_in_class(mu, n: int, rng: random.Random) -> Permutation:
    """Uniform permutation with cycle type mu, by chopping a random arrangement."""
    if sum(mu) != n:
        raise ValueError("cycle type size mismatch")
    order = list(range(n))
    rng.shuffle(order)
    out = [0] * n
    pos = 0
    for length in mu:
        block = order[pos:pos + length]
        for a, b in zip(block, block[1:] + block[:1]):
            out[a] = b
        pos += length
    return tuple(out)


def conjugator_between(p: Permutation, q: Permutation) -> Permutation:
    """Some t with conjugate(p, t) == q; requires equal cycle types."""
    cp = sorted(cycles(p), key=lambda c: (len(c), c[0]))
    cq = sorted(cycles(q), key=lambda c: (len(c), c[0]))
    if [len(c) for c in cp] != [len(c) for c in cq]:
        raise ValueError("permutations are not conjugate")
    t = [0] * len(p)
    for a, b in zip(cp, cq):
        for x, y in zip(a, b):
            t[x] = y
    return tuple(t)


def centralizer_sample(p: Permutation, rng: random.Random) -> Permutation:
    """Uniform element commuting with p: permute equal-length cycles, rotate each."""
    by_length: dict[int, list[list[int]]] = {}
    for c in cycles(p):
        by_length.setdefault(len(c), []).append(c)
    t = [0] * len(p)
    for length, group in by_length.items():
        images = group[:]
        rng.shuffle(images)
        for src, dst in zip(group, images):
            offset = rng.randrange(length)
            for j, x in enumerate(src):
                t[x] = dst[(j + offset) % length]
    return tuple(t)


# ---------------------------------------------------------------------------
# Commutator buckets and enumeration


class CommutatorBuckets:
    """All pairs (a, b) of S_n grouped by their commutator.

    Pairs are materialized for small n (packed rank arrays); for n in the
    count-only range only per-class sizes are available and single pairs can
    be regenerated on demand through the exact fiber sampler.
    """

    def __init__(self, n: int, materialized: bool, pair_ranks, perms):
        self.n = n
        self.materialized = materialized
        self._pair_ranks = pair_ranks
        self._perms = perms
        self._key_list = sorted(pair_ranks.keys()) if materialized else None

    def keys(self) -> list[Permutation]:
        if not self.materialized:
            raise ValueError("pairs were not materialized at this n")
        return list(self._key_list)

    def size(self, sigma: Permutation) -> int:
        if self.materialized:
            packed = self._pair_ranks.get(tuple(sigma))
            return len(packed) if packed is not None else 0
        return commutator_count(self.n, cycle_type(sigma))

    def pairs(self, sigma: Permutation):
        if not self.materialized:
            raise ValueError("pairs were not materialized at this n")
        packed = self._pair_ranks.get(tuple(sigma))
        if packed is None:
            return
        size = factorial(self.n)
        perms = self._perms
        for code in packed:
            yield perms[code // size], perms[code % size]

    def total_pairs(self) -> int:
        if self.materialized:
            return sum(len(v) for v in self._pair_ranks.values())
        return factorial(self.n) ** 2

    def regenerate_pair(self, sigma: Permutation, rng: random.Random):
        """One uniform pair with the given commutator, without materialization."""
        plan = get_sampler(self.n, 2)
        return _sample_commutator_fiber(plan, tuple(sigma), rng)


def build_buckets(n: int, materialize_limit: int = PAIR_MATERIALIZE_LIMIT) -> CommutatorBuckets:
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > COUNT_ONLY_LIMIT:
        raise ValueError(
            f"buckets support n <= {COUNT_ONLY_LIMIT}; use the sampler beyond that"
        )
    if n > materialize_limit:
        return CommutatorBuckets(n, False, {}, ())
    perms = tuple(itertools.permutations(range(n)))
    rank = {p: i for i, p in enumerate(perms)}
    size = len(perms)
    inverses = [rank[inverse(p)] for p in perms]
    buckets: dict[Permutation, array] = {}
    for ia, a in enumerate(perms):
        a_inv = perms[inverses[ia]]
        for ib, b in enumerate(perms):
            sigma = compose(compose(compose(a_inv, perms[inverses[ib]]), a), b)
            packed = buckets.get(sigma)
            if packed is None:
                packed = array("I")  # rank pairs fit 32 bits up to n = 7
                buckets[sigma] = packed
            packed.append(ia * size + ib)
    return CommutatorBuckets(n, True, buckets, perms)


_bucket_cache: dict[int, CommutatorBuckets] = {}
_bucket_lock = threading.Lock()


def get_buckets(n: int) -> CommutatorBuckets:
    with _bucket_lock:
        buckets = _bucket_cache.get(n)
        if buckets is None:
            buckets = build_buckets(n)
            _bucket_cache[n] = buckets
        return buckets


def thread_cap() -> int:
    raw = os.environ.get("SCL_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def enumerate_homs(n: int, genus: int, visitor, max_visits: int = DEFAULT_MAX_VISITS) -> int:
    """Visit every homomorphism point exactly once; returns the visit count."""
    expected = hom_count(n, genus)
    if expected > max_visits:
        raise BudgetExceededError(
            f"enumeration needs {expected} visits, budget is {max_visits}"
        )
    buckets = get_buckets(n)
    count = 0

    def emit(images):
        nonlocal count
        visitor(HomPoint(tuple(images), genus, n))
        count += 1

    def recurse(prefix: Permutation, blocks_left: int, images):
        if blocks_left == 1:
            final = inverse(prefix)
            for a, b in buckets.pairs(final):
                emit(images + [a, b])
            return
        for sigma in buckets.keys():
            pair_iter = buckets.pairs(sigma)
            nxt = compose(prefix, sigma)
            for a, b in pair_iter:
                recurse(nxt, blocks_left - 1, images + [a, b])

    recurse(identity(n), genus, [])
    if count != expected:
        raise AssertionError("enumeration count disagrees with the character count")
    return count


def _expectation_for_keys(n, genus, spec, keys) -> int:
    buckets = get_buckets(n)
    total = 0
    if genus == 2:
        for sigma in keys:
            tail = list(buckets.pairs(inverse(sigma)))
            for a1, b1 in buckets.pairs(sigma):
                for a2, b2 in tail:
                    total += joint_moment(HomPoint((a1, b1, a2, b2), genus, n), spec)
        return total

    def recurse(prefix, blocks_left, images):
        nonlocal total
        if blocks_left == 1:
            for a, b in buckets.pairs(inverse(prefix)):
                total += joint_moment(HomPoint(tuple(images + [a, b]), genus, n), spec)
            return
        for sigma in buckets.keys():
            nxt = compose(prefix, sigma)
            for a, b in buckets.pairs(sigma):
                recurse(nxt, blocks_left - 1, images + [a, b])

    for first in keys:
        nxt = compose(identity(n), first)
        for a, b in buckets.pairs(first):
            recurse(nxt, genus - 1, [a, b])
    return total


def _expectation_worker(args):
    n, genus, spec, keys = args
    return _expectation_for_keys(n, genus, spec, keys)


def exact_expectation(
    n: int,
    genus: int,
    spec: ObservableSpec,
    max_visits: int = DEFAULT_MAX_VISITS,
    workers: int | None = None,
) -> Fraction:
    """Exact rational mean of the observable over every homomorphism point.

    Work is split over the outermost commutator value; partial sums are exact
    integers combined in key order, so results are identical at any worker
    count.
    """
    if spec.genus != genus:
        raise ValueError("spec genus differs from requested genus")
    total_points = hom_count(n, genus)
    if total_points > max_visits:
        raise BudgetExceededError(
            f"enumeration needs {total_points} visits, budget is {max_visits}"
        )
    buckets = get_buckets(n)
    keys = buckets.keys()
    if workers is None:
        workers = thread_cap()
    workers = max(1, min(workers, len(keys)))
    if workers == 1:
        total = _expectation_for_keys(n, genus, spec, keys)
    else:
        chunks = [keys[i::workers] for i in range(workers)]
        import multiprocessing

        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(workers) as pool:
            partials = pool.map(
                _expectation_worker, [(n, genus, spec, chunk) for chunk in chunks]
            )
        total = 0
        for part in partials:
            total += part
    return Fraction(total, total_points)


def generator_fix_expectation(n: int, genus: int) -> Fraction:
    """Exact mean fixed-point count of a single generator's image.

    The image of one generator has a class-function law whose weight on class
    kappa is the character sum over irreducibles of chi(kappa)^2 times the
    hook-product power matching the genus; this gives a closed form that
    cross-checks both enumeration and sampling.
    """
    table = get_table(n)
    weights_total = 0
    fix_total = 0
    for kappa, kappa_size in zip(table.partitions, table.class_sizes):
        w = sum(
            table.chi(lam, kappa) ** 2 * h ** (2 * genus - 2)
            for lam, h in zip(table.partitions, table.hook_products)
        )
        fixed = sum(1 for part in kappa if part == 1)
        weights_total += kappa_size * w
        fix_total += kappa_size * fixed * w
    if weights_total != hom_count(n, genus):
        raise ArithmeticError("marginal weights disagree with the point count")
    return Fraction(fix_total, weights_total)


# ---------------------------------------------------------------------------
# Exactly uniform sampling


class SamplerPlan:
    """Frozen integer weight tables that drive exact uniform sampling."""

    def __init__(self, n: int, genus: int):
        if n < 1:
            raise ValueError("n must be >= 1")
        if genus < 2:
            raise ValueError("genus must be >= 2")
        self.n = n
        self.genus = genus
        self.table: CharacterTable = get_table(n).freeze()
        parts = self.table.partitions
        self.class_index = {mu: i for i, mu in enumerate(parts)}
        self.n_factorial = factorial(n)
        # Dense character matrix indexed [class][irrep]; the table is frozen,
        # so this is a plain copy kept for tight loops.
        self.chi_matrix = [
            [self.table.chi(lam, mu) for lam in parts] for mu in parts
        ]
        # M_m[k] = tuples of m commutator blocks multiplying to a fixed element
        # of class k; m = 1 is the plain commutator count.
        hooks = self.table.hook_products
        self.block_counts: dict[int, tuple[int, ...]] = {}
        for m in range(1, genus):
            powers = [h ** (2 * m - 1) for h in hooks]
            self.block_counts[m] = tuple(
                sum(chi_row[l] * powers[l] for l in range(len(parts)))
                for chi_row in self.chi_matrix
            )
        self.pair_counts = self.block_counts[1]
        for mu, count in zip(parts, self.pair_counts):
            if count != commutator_count(n, mu):
                raise ArithmeticError("inconsistent commutator weights")
        stage = self.block_counts[genus - 1]
        self.first_block_weights = tuple(
            size * stage[i] * self.pair_counts[i]
            for i, size in enumerate(self.table.class_sizes)
        )
        if any(w < 0 for w in self.first_block_weights):
            raise ArithmeticError("negative stage weight")
        self.first_block_cum = list(itertools.accumulate(self.first_block_weights))
        self.total_weight = self.first_block_cum[-1]
        if self.total_weight != hom_count(n, genus):
            raise ArithmeticError("stage weights do not sum to the point count")
        # chi^2 * hook product per (class, irrep), reused by every fiber row.
        self._chi2h = [
            [chi_row[l] * chi_row[l] * hooks[l] for l in range(len(parts))]
            for chi_row in self.chi_matrix
        ]
        self._fiber_rows: dict[int, tuple[list[int], int]] = {}
        self._mid_slabs: dict[int, list[list[int]]] = {}
        self._lock = threading.Lock()

    # -- lazy weight rows ---------------------------------------------------

    def fiber_row(self, sigma_class: int):
        """Cumulative weights over the class of `a` for pairs with a fixed
        commutator in class sigma_class."""
        with self._lock:
            row = self._fiber_rows.get(sigma_class)
            if row is None:
                parts = self.table.partitions
                sizes = self.table.class_sizes
                centralizers = self.table.centralizer_sizes
                chi_sigma = self.chi_matrix[sigma_class]
                square = self.n_factorial**2
                weights = []
                for k in range(len(parts)):
                    chi2h = self._chi2h[k]
                    total = sum(chi2h[l] * chi_sigma[l] for l in range(len(parts)))
                    scaled = sizes[k] * sizes[k] * total
                    q, r = divmod(scaled, square)
                    if r or q < 0:
                        raise ArithmeticError("fiber weight is not a whole count")
                    weights.append(centralizers[k] * q)
                cum = list(itertools.accumulate(weights))
                if cum[-1] != self.pair_counts[sigma_class]:
                    raise ArithmeticError("fiber weights disagree with the pair count")
                row = (cum, cum[-1])
                self._fiber_rows[sigma_class] = row
            return row

    def mid_slab(self, r_class: int) -> list[list[int]]:
        """factorization_count(k_u, k_s, r_class) for every class pair."""
        with self._lock:
            slab = self._mid_slabs.get(r_class)
            if slab is None:
                parts = self.table.partitions
                r_mu = parts[r_class]
                slab = [
                    [
                        factorization_count(parts[u], parts[s], r_mu)
                        for s in range(len(parts))
                    ]
                    for u in range(len(parts))
                ]
                self._mid_slabs[r_class] = slab
            return slab

    # -- strategy estimates ---------------------------------------------------

    def _rejection_trials_estimate(self, kidx: int) -> float:
        hits = self.table.class_sizes[kidx] * self.pair_counts[kidx]
        if hits == 0:
            return float("inf")
        return self.n_factorial**2 / hits

    def _classwise_trials_estimate(self, kidx: int) -> float:
        count = self.pair_counts[kidx]
        if count == 0:
            return float("inf")
        return len(self.table.partitions) * self.n_factorial / count


def build_sampler(n: int, genus: int) -> SamplerPlan:
    return SamplerPlan(n, genus)


_plan_cache: dict[tuple[int, int], SamplerPlan] = {}
_plan_lock = threading.Lock()


def get_sampler(n: int, genus: int) -> SamplerPlan:
    """Shared immutable plan for (n, genus); building one is not free."""
    with _plan_lock:
        plan = _plan_cache.get((n, genus))
        if plan is None:
            plan = SamplerPlan(n, genus)
            _plan_cache[(n, genus)] = plan
        return plan


def _draw_class(cum: list[int], total: int, rng: random.Random) -> int:
    return bisect_right(cum, rng.randrange(total))


def _decode_perm(code: int, n: int) -> list[int]:
    """Factorial-base decode; a bijection from range(n!) onto permutations."""
    items = list(range(n))
    out = []
    for k in range(n, 0, -1):
        code, r = divmod(code, k)
        out.append(items.pop(r))
    return out


def _pair_with_commutator_type(plan: SamplerPlan, target, rng: random.Random):
    """Rejection loop: uniform pair whose commutator has the given cycle type."""
    n = plan.n
    fact = plan.n_factorial
    randrange = rng.randrange
    indices = range(n)
    while True:
        a = _decode_perm(randrange(fact), n)
        b = _decode_perm(randrange(fact), n)
        inv_a = [0] * n
        inv_b = [0] * n
        for i in indices:
            inv_a[a[i]] = i
            inv_b[b[i]] = i
        # commutator a^-1 b^-1 a b, left to right
        c = [b[a[inv_b[x]]] for x in inv_a]
        lengths = []
        seen = [False] * n
        for start in indices:
            if not seen[start]:
                seen[start] = True
                size = 1
                v = c[start]
                while v != start:
                    seen[v] = True
                    size += 1
                    v = c[v]
                lengths.append(size)
        lengths.sort(reverse=True)
        if tuple(lengths) == target:
            return tuple(a), tuple(b), tuple(c)


def _fiber_by_transport(plan: SamplerPlan, sigma: Permutation, rng: random.Random):
    """Uniform pair with commutator sigma: reject random pairs into the class,
    then conjugate into place by a uniform transporter."""
    a, b, tau = _pair_with_commutator_type(plan, cycle_type(sigma), rng)
    t = compose(centralizer_sample(tau, rng), conjugator_between(tau, sigma))
    return conjugate(a, t), conjugate(b, t)


def _fiber_by_class_weights(plan: SamplerPlan, sigma: Permutation, rng: random.Random):
    """Uniform pair with commutator sigma: draw the class of `a` with exact
    weights, place `a` by rejection, then pick the conjugating coordinate
    uniformly over the right centralizer coset."""
    sigma_class = plan.class_index[cycle_type(sigma)]
    cum, total = plan.fiber_row(sigma_class)
    if total == 0:
        raise ValueError("no pairs have this commutator")
    kidx = _draw_class(cum, total, rng)
    mu = plan.table.partitions[kidx]
    while True:
        a = uniform_in_class(mu, plan.n, rng)
        moved = compose(a, sigma)
        if cycle_type(moved) == mu:
            break
    b = compose(centralizer_sample(a, rng), conjugator_between(a, moved))
    return a, b


def _sample_commutator_fiber(plan: SamplerPlan, sigma: Permutation, rng: random.Random):
    kidx = plan.class_index[cycle_type(sigma)]
    if plan.pair_counts[kidx] == 0:
        raise ValueError("no pairs have this commutator")
    reject = plan._rejection_trials_estimate(kidx)
    classwise = plan._classwise_trials_estimate(kidx)
    if reject <= max(256.0, classwise):
        return _fiber_by_transport(plan, sigma, rng)
    return _fiber_by_class_weights(plan, sigma, rng)


def _sample_pair_in_class_union(plan: SamplerPlan, kidx: int, rng: random.Random):
    """Uniform pair whose commutator lies anywhere in the given class."""
    reject = plan._rejection_trials_estimate(kidx)
    classwise = plan._classwise_trials_estimate(kidx)
    mu = plan.table.partitions[kidx]
    if reject <= max(256.0, classwise):
        a, b, _ = _pair_with_commutator_type(plan, mu, rng)
        return a, b
    sigma = uniform_in_class(mu, plan.n, rng)
    return _fiber_by_class_weights(plan, sigma, rng)


def sample_hom(plan: SamplerPlan, seed) -> HomPoint:
    """One exactly uniform homomorphism point."""
    rng = seed if isinstance(seed, random.Random) else stream_for(seed)
    n, genus = plan.n, plan.genus
    images: list[Permutation] = []
    partial = identity(n)
    for j in range(1, genus):
        if j == 1:
            kidx = _draw_class(plan.first_block_cum, plan.total_weight, rng)
            a, b = _sample_pair_in_class_union(plan, kidx, rng)
            value = commutator(a, b)
        else:
            value = _draw_mid_block(plan, partial, genus - j, rng)
            a, b = _sample_commutator_fiber(plan, value, rng)
        images += [a, b]
        partial = compose(partial, value)
    a, b = _sample_commutator_fiber(plan, inverse(partial), rng)
    images += [a, b]
    return HomPoint(tuple(images), genus, n)


def _draw_mid_block(plan: SamplerPlan, partial: Permutation, remaining: int, rng):
    """Value of the next commutator block given the product so far, for chains
    with at least two free blocks remaining."""
    parts = plan.table.partitions
    r_class = plan.class_index[cycle_type(partial)]
    slab = plan.mid_slab(r_class)
    completions = plan.block_counts[remaining]
    weights = []
    pairs = []
    for u in range(len(parts)):
        n_u = plan.pair_counts[u]
        if n_u == 0:
            continue
        for s in range(len(parts)):
            w = n_u * slab[u][s] * completions[s]
            if w > 0:
                weights.append(w)
                pairs.append((u, s))
    cum = list(itertools.accumulate(weights))
    u_idx, s_idx = pairs[_draw_class(cum, cum[-1], rng)]
    mu_u, mu_s = parts[u_idx], parts[s_idx]
    while True:
        u = uniform_in_class(mu_u, plan.n, rng)
        if cycle_type(compose(partial, u)) == mu_s:
            return u


def sample_stream(plan: SamplerPlan, seed, count: int):
    """Deterministic iterator of `count` uniform points from one stream."""
    rng = stream_for(seed)
    for _ in range(count):
        yield sample_hom(plan, rng)


# ---------------------------------------------------------------------------
# Monte Carlo estimation


@dataclass(frozen=True)
class EstimateResult:
    mean: float
    stderr: float
    samples: int
    exact_mean: Fraction | None = None
    shard_means: tuple[float, ...] = ()


class SampledStats:
    """Aggregates for several named observables over one shared sample stream."""

    def __init__(self, names, samples: int, shards: int):
        self.names = list(names)
        self.samples = samples
        self.shards = shards
        self.sums = {name: 0 for name in self.names}
        self.sumsqs = {name: 0 for name in self.names}
        self.shard_sums = {name: [0] * shards for name in self.names}
        self.shard_counts = [0] * shards
        self.pair_sums: dict[tuple[str, str], int] = {}
        self.shard_pair_sums: dict[tuple[str, str], list[int]] = {}

    def track_pair(self, name_x: str, name_y: str) -> None:
        key = (name_x, name_y)
        self.pair_sums.setdefault(key, 0)
        self.shard_pair_sums.setdefault(key, [0] * self.shards)

    def add(self, shard: int, values: dict) -> None:
        self.shard_counts[shard] += 1
        for name, v in values.items():
            self.sums[name] += v
            self.sumsqs[name] += v * v
            self.shard_sums[name][shard] += v
        for (nx, ny), _ in self.pair_sums.items():
            prod = values[nx] * values[ny]
            self.pair_sums[(nx, ny)] += prod
            self.shard_pair_sums[(nx, ny)][shard] += prod

    def mean(self, name: str) -> float:
        return self.sums[name] / self.samples

    def exact_mean(self, name: str) -> Fraction:
        return Fraction(self.sums[name], self.samples)

    def stderr(self, name: str) -> float:
        m = self.mean(name)
        var = (self.sumsqs[name] - self.samples * m * m) / (self.samples - 1)
        return sqrt(max(var, 0.0) / self.samples)

    def shard_means(self, name: str) -> tuple[float, ...]:
        return tuple(
            s / c for s, c in zip(self.shard_sums[name], self.shard_counts)
        )

    def result(self, name: str) -> EstimateResult:
        return EstimateResult(
            mean=self.mean(name),
            stderr=self.stderr(name),
            samples=self.samples,
            exact_mean=self.exact_mean(name)
            if isinstance(self.sums[name], int)
            else None,
            shard_means=self.shard_means(name),
        )

    def covariance(self, name_x: str, name_y: str) -> float:
        key = (name_x, name_y)
        mx, my = self.mean(name_x), self.mean(name_y)
        return (self.pair_sums[key] - self.samples * mx * my) / (self.samples - 1)

    def covariance_stderr(self, name_x: str, name_y: str) -> float:
        """Spread of per-shard covariances, scaled by the shard count."""
        key = (name_x, name_y)
        covs = []
        for shard in range(self.shards):
            c = self.shard_counts[shard]
            if c < 2:
                continue
            mx = self.shard_sums[name_x][shard] / c
            my = self.shard_sums[name_y][shard] / c
            covs.append((self.shard_pair_sums[key][shard] - c * mx * my) / (c - 1))
        if len(covs) < 2:
            return float("inf")
        mean_cov = sum(covs) / len(covs)
        spread = sum((c - mean_cov) ** 2 for c in covs) / (len(covs) - 1)
        return sqrt(spread / len(covs))


def run_sampled_stats(
    plan: SamplerPlan,
    evaluators: dict,
    samples: int,
    seed,
    pairs=(),
    shards: int = 16,
) -> SampledStats:
    """Evaluate every named observable on one shared stream of uniform points.

    Samples are split over `shards` fixed sub-streams so the output does not
    depend on how the shards are executed.
    """
    if samples < 2:
        raise ValueError("need at least 2 samples")
    if isinstance(seed, int):
        seed = Seed(seed)
    shards = min(shards, samples)
    stats = SampledStats(evaluators.keys(), samples, shards)
    for nx, ny in pairs:
        stats.track_pair(nx, ny)
    per_shard = [samples // shards + (1 if i < samples % shards else 0) for i in range(shards)]
    for shard, count in enumerate(per_shard):
        rng = stream_for(seed, shard)
        for _ in range(count):
            h = sample_hom(plan, rng)
            stats.add(shard, {name: fn(h) for name, fn in evaluators.items()})
    return stats


def monte_carlo_expectation(
    plan: SamplerPlan, spec: ObservableSpec, samples: int, seed, shards: int = 16
) -> EstimateResult:
    """Sample mean and standard error of the spec's joint observable."""
    stats = run_sampled_stats(
        plan, {"joint": lambda h: joint_moment(h, spec)}, samples, seed, shards=shards
    )
    return stats.result("joint")
