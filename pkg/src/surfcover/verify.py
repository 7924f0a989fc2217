"""Desk-scale experiment drivers: convergence, independence, cycle statistics.

Each driver walks a list of n values, computing the observable exactly where
enumeration fits the budget and by seeded Monte Carlo elsewhere, then lines
the results up against the exact limit predictions. Exact rows carry
rationals and are bit-identical across runs and worker counts; sampled rows
carry a mean and a standard error.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .homspace import (
    DEFAULT_MAX_VISITS,
    exact_expectation,
    get_sampler,
    hom_count,
    run_sampled_stats,
)
from .limits import limit_cycle_moment, limit_product_moment
from .observables import (
    ObservableGroup,
    ObservableSpec,
    cycle_count,
    joint_moment,
    spec_to_text,
)
from .words import Word

ENUMERATE = "enumerate"
SAMPLE = "sample"


@dataclass(frozen=True)
class ExperimentPlan:
    spec: ObservableSpec
    n_values: tuple[int, ...]
    samples: int = 100_000
    seed: int = 0
    shards: int = 16
    budget_visits: int = DEFAULT_MAX_VISITS
    methods: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if any(b <= a for a, b in zip(self.n_values, self.n_values[1:])):
            raise ValueError("n values must be strictly increasing")
        if self.samples < 2:
            raise ValueError("need at least 2 samples")

    def method_for(self, n: int) -> str:
        choice = self.methods.get(n)
        if choice is not None:
            if choice not in (ENUMERATE, SAMPLE):
                raise ValueError(f"unknown method {choice!r}")
            return choice
        genus = self.spec.genus
        return ENUMERATE if hom_count(n, genus) <= self.budget_visits else SAMPLE


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    method: str
    joint: object
    joint_stderr: float | None
    product_of_groups: object
    prediction: Fraction
    abs_error: float
    n_times_error: float
    gap: float
    gap_stderr: float | None


@dataclass(frozen=True)
class ConvergenceReport:
    spec_text: str
    seed: int
    samples: int
    prediction: Fraction
    rows: tuple[ConvergenceRow, ...]


def _group_observables(spec: ObservableSpec):
    """Callables for the joint observable and each single-group observable."""
    evaluators = {"joint": lambda h: joint_moment(h, spec)}
    for i, sub in enumerate(spec.single_group_specs()):
        evaluators[f"group{i}"] = (lambda s: lambda h: joint_moment(h, s))(sub)
    return evaluators


def _exact_row(n: int, spec: ObservableSpec, prediction: Fraction, budget: int) -> ConvergenceRow:
    joint = exact_expectation(n, spec.genus, spec, max_visits=budget)
    product = Fraction(1)
    for sub in spec.single_group_specs():
        product *= exact_expectation(n, spec.genus, sub, max_visits=budget)
    err = abs(joint - prediction)
    gap = abs(joint - product)
    return ConvergenceRow(
        n=n,
        method=ENUMERATE,
        joint=joint,
        joint_stderr=None,
        product_of_groups=product,
        prediction=prediction,
        abs_error=float(err),
        n_times_error=float(n * err),
        gap=float(gap),
        gap_stderr=None,
    )


def _sampled_row(n: int, plan: ExperimentPlan, prediction: Fraction) -> ConvergenceRow:
    spec = plan.spec
    sampler = get_sampler(n, spec.genus)
    stats = run_sampled_stats(
        sampler,
        _group_observables(spec),
        plan.samples,
        plan.seed,
        shards=plan.shards,
    )
    joint = stats.mean("joint")
    stderr = stats.stderr("joint")
    product = 1.0
    for i in range(len(spec.groups)):
        product *= stats.mean(f"group{i}")
    gap = abs(joint - product)
    shard_gaps = []
    names = [f"group{i}" for i in range(len(spec.groups))]
    for shard in range(stats.shards):
        p = 1.0
        for name in names:
            p *= stats.shard_means(name)[shard]
        shard_gaps.append(stats.shard_means("joint")[shard] - p)
    mean_gap = sum(shard_gaps) / len(shard_gaps)
    spread = sum((g - mean_gap) ** 2 for g in shard_gaps) / (len(shard_gaps) - 1)
    gap_stderr = (spread / len(shard_gaps)) ** 0.5
    err = abs(joint - float(prediction))
    return ConvergenceRow(
        n=n,
        method=SAMPLE,
        joint=joint,
        joint_stderr=stderr,
        product_of_groups=product,
        prediction=prediction,
        abs_error=err,
        n_times_error=n * err,
        gap=gap,
        gap_stderr=gap_stderr,
    )


def run_convergence(plan: ExperimentPlan) -> ConvergenceReport:
    """Joint moment, per-group product and limit prediction for each n."""
    prediction = limit_product_moment(plan.spec).value
    rows = []
    for n in plan.n_values:
        if plan.method_for(n) == ENUMERATE:
            rows.append(_exact_row(n, plan.spec, prediction, plan.budget_visits))
        else:
            rows.append(_sampled_row(n, plan, prediction))
    return ConvergenceReport(
        spec_text=spec_to_text(plan.spec),
        seed=plan.seed,
        samples=plan.samples,
        prediction=prediction,
        rows=tuple(rows),
    )


def run_independence(plan: ExperimentPlan) -> ConvergenceReport:
    """Same rows as convergence with the joint-versus-product gap in focus."""
    if len(plan.spec.groups) < 2:
        raise ValueError("independence runs need at least two groups")
    return run_convergence(plan)


def negative_control_spec(base: Word, exponents) -> ObservableSpec:
    """Exponents of one base word split into separate fake groups.

    The honest prediction treats them as a single group; the fake per-group
    product differs, and the gap between the two must persist as n grows.
    """
    groups = tuple(ObservableGroup(base, (a,), 1) for a in exponents)
    return ObservableSpec(groups, base.genus)


def true_control_prediction(base: Word, exponents) -> Fraction:
    merged = ObservableSpec((ObservableGroup(base, tuple(exponents), 1),), base.genus)
    return limit_product_moment(merged).value


@dataclass(frozen=True)
class CycleRow:
    word_index: int
    cycle_length: int
    mean: float
    stderr: float
    prediction: Fraction


@dataclass(frozen=True)
class CycleCovRow:
    word_indices: tuple[int, int]
    cycle_lengths: tuple[int, int]
    covariance: float
    covariance_stderr: float


@dataclass(frozen=True)
class CycleReport:
    n: int
    samples: int
    seed: int
    rows: tuple[CycleRow, ...]
    covariances: tuple[CycleCovRow, ...]


def run_cycle_convergence(
    words, max_d: int, n: int, samples: int, seed: int = 0, shards: int = 16
) -> CycleReport:
    """Sampled means of short-cycle counts against 1/d, plus cross covariances."""
    words = list(words)
    if not words:
        raise ValueError("need at least one word")
    if max_d < 1 or max_d > n:
        raise ValueError("cycle lengths must satisfy 1 <= d <= n")
    genus = words[0].genus
    sampler = get_sampler(n, genus)
    evaluators = {}
    for i, w in enumerate(words):
        for d in range(1, max_d + 1):
            evaluators[f"c{i}_{d}"] = (lambda wi, di: lambda h: cycle_count(h, wi, di))(w, d)
    pairs = []
    for i in range(len(words)):
        for j in range(i + 1, len(words)):
            for d1 in range(1, max_d + 1):
                for d2 in range(1, max_d + 1):
                    pairs.append((f"c{i}_{d1}", f"c{j}_{d2}"))
    stats = run_sampled_stats(sampler, evaluators, samples, seed, pairs=pairs, shards=shards)
    rows = tuple(
        CycleRow(
            word_index=i,
            cycle_length=d,
            mean=stats.mean(f"c{i}_{d}"),
            stderr=stats.stderr(f"c{i}_{d}"),
            prediction=limit_cycle_moment([(i, d, 1)]),
        )
        for i in range(len(words))
        for d in range(1, max_d + 1)
    )
    covs = []
    for i in range(len(words)):
        for j in range(i + 1, len(words)):
            for d1 in range(1, max_d + 1):
                for d2 in range(1, max_d + 1):
                    covs.append(
                        CycleCovRow(
                            word_indices=(i, j),
                            cycle_lengths=(d1, d2),
                            covariance=stats.covariance(f"c{i}_{d1}", f"c{j}_{d2}"),
                            covariance_stderr=stats.covariance_stderr(
                                f"c{i}_{d1}", f"c{j}_{d2}"
                            ),
                        )
                    )
    return CycleReport(n=n, samples=samples, seed=seed, rows=rows, covariances=tuple(covs))


@dataclass(frozen=True)
class InverseFit:
    coefficient: float
    residuals: tuple[float, ...]
    max_n_times_error: float


def fit_inverse_n(points) -> InverseFit:
    """Least squares fit of error = C / n over (n, error) pairs."""
    points = [(int(n), float(e)) for n, e in points]
    if len(points) < 3:
        raise ValueError("need at least 3 points to fit")
    if any(e < 0 for _, e in points):
        raise ValueError("errors must be non-negative")
    num = sum(e / n for n, e in points)
    den = sum(1 / n**2 for n, _ in points)
    coeff = num / den
    residuals = tuple(e - coeff / n for n, e in points)
    return InverseFit(
        coefficient=coeff,
        residuals=residuals,
        max_n_times_error=max(n * e for n, e in points),
    )
