"""Exact and Monte Carlo statistics of uniformly random permutation actions
of genus-g surface groups: fixed points, short cycles, their joint moments,
and the Poisson limit predictions they converge to."""

from .words import (
    DISTINCT,
    PRIMITIVE,
    UNKNOWN,
    IdentityWordError,
    Word,
    abelianize,
    cyclic_reduce,
    dehn_reduce,
    distinct_in_p0_certificate,
    free_reduce,
    is_identity,
    power_word,
    primitivity_certificate,
    relator,
    word_from_text,
    word_to_text,
)
from .perms import (
    HomPoint,
    Permutation,
    commutator,
    compose,
    conjugate,
    cycle_type,
    cycles_str,
    d_cycle_count,
    evaluate_word,
    fix_count,
    identity,
    inverse,
    parse_cycles,
)
from .characters import (
    CharacterTable,
    class_size,
    centralizer_size,
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
from .observables import (
    ObservableGroup,
    ObservableSpec,
    cycle_count,
    cycles_from_fixed_points,
    d_count,
    divisors,
    fixed_points,
    joint_moment,
    mobius,
    power_identity_holds,
    spec_from_json,
    spec_from_text,
    spec_to_json,
    spec_to_text,
)
from .homspace import (
    BudgetExceededError,
    CommutatorBuckets,
    EstimateResult,
    RandomStream,
    SampledStats,
    SamplerPlan,
    Seed,
    build_buckets,
    build_sampler,
    enumerate_homs,
    exact_expectation,
    generator_fix_expectation,
    get_sampler,
    monte_carlo_expectation,
    run_sampled_stats,
    sample_hom,
    sample_stream,
    stream_for,
)
from .limits import (
    LimitValue,
    bell_number,
    factorization_identity_holds,
    limit_cycle_moment,
    limit_product_moment,
    poisson_moment,
    stirling2,
)
from .verify import (
    ExperimentPlan,
    fit_inverse_n,
    negative_control_spec,
    run_convergence,
    run_cycle_convergence,
    run_independence,
    true_control_prediction,
)

__version__ = "0.1.0"
