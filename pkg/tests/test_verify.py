import os
from fractions import Fraction

import pytest

from surfcover.observables import ObservableGroup, ObservableSpec
from surfcover.verify import (
    ENUMERATE,
    SAMPLE,
    ExperimentPlan,
    fit_inverse_n,
    negative_control_spec,
    run_convergence,
    run_cycle_convergence,
    run_independence,
    true_control_prediction,
)
from surfcover.words import word_from_text


def w(text):
    return word_from_text(text, 2)


def spec_of(*groups):
    return ObservableSpec(tuple(groups), 2)


F_A1 = spec_of(ObservableGroup(w("a1"), (1,)))


def test_fit_inverse_n():
    exact = fit_inverse_n([(n, 1.0 / n) for n in (2, 4, 8, 16)])
    assert abs(exact.coefficient - 1.0) < 1e-12
    assert all(abs(r) < 1e-12 for r in exact.residuals)
    zero = fit_inverse_n([(2, 0.0), (3, 0.0), (4, 0.0)])
    assert zero.coefficient == 0.0
    assert zero.max_n_times_error == 0.0
    with pytest.raises(ValueError):
        fit_inverse_n([(2, 0.1), (3, 0.2)])
    with pytest.raises(ValueError):
        fit_inverse_n([(2, -0.1), (3, 0.2), (4, 0.1)])


def test_plan_validation():
    with pytest.raises(ValueError):
        ExperimentPlan(F_A1, (3, 3))
    with pytest.raises(ValueError):
        ExperimentPlan(F_A1, (4, 3))
    with pytest.raises(ValueError):
        ExperimentPlan(F_A1, (2, 3), samples=1)
    plan = ExperimentPlan(F_A1, (2, 3), methods={3: SAMPLE})
    assert plan.method_for(2) == ENUMERATE
    assert plan.method_for(3) == SAMPLE
    auto = ExperimentPlan(F_A1, (2, 16), budget_visits=10**6)
    assert auto.method_for(2) == ENUMERATE
    assert auto.method_for(16) == SAMPLE


def test_run_convergence_exact_rows():
    plan = ExperimentPlan(F_A1, (2, 3, 4))
    report = run_convergence(plan)
    assert report.prediction == 1
    joints = [row.joint for row in report.rows]
    assert joints == [1, Fraction(10, 9), Fraction(97, 89)]
    assert all(row.method == ENUMERATE for row in report.rows)
    assert report.rows[1].n_times_error == pytest.approx(1 / 3)
    # single group: joint equals product, gap identically zero
    assert all(row.gap == 0.0 for row in report.rows)


def test_run_convergence_empty_spec():
    plan = ExperimentPlan(ObservableSpec((), 2), (2, 3))
    report = run_convergence(plan)
    assert [row.joint for row in report.rows] == [1, 1]
    assert report.prediction == 1


def test_report_is_reproducible_and_thread_invariant():
    spec = spec_of(
        ObservableGroup(w("a1"), (1, 2)), ObservableGroup(w("a2"), (1,))
    )
    plan = ExperimentPlan(spec, (2, 3), samples=300, seed=4, methods={3: SAMPLE})
    first = run_convergence(plan)
    second = run_convergence(plan)
    assert first == second
    previous = os.environ.get("SCL_THREADS")
    os.environ["SCL_THREADS"] = "2"
    try:
        third = run_convergence(plan)
    finally:
        if previous is None:
            del os.environ["SCL_THREADS"]
        else:
            os.environ["SCL_THREADS"] = previous
    assert first == third


def test_run_independence_exact_gap():
    spec = spec_of(
        ObservableGroup(w("a1"), (1,)), ObservableGroup(w("a2"), (1,))
    )
    plan = ExperimentPlan(spec, (2, 3))
    report = run_independence(plan)
    for row in report.rows:
        assert row.gap == pytest.approx(
            abs(float(row.joint) - float(row.product_of_groups))
        )
    with pytest.raises(ValueError):
        run_independence(ExperimentPlan(F_A1, (2, 3)))


def test_negative_control_spec():
    control = negative_control_spec(w("a1"), (1, 2))
    assert len(control.groups) == 2
    fake_product = 1
    from surfcover.limits import limit_product_moment

    for sub in control.single_group_specs():
        fake_product *= limit_product_moment(sub).value
    truth = true_control_prediction(w("a1"), (1, 2))
    assert fake_product == 2  # d(1) * d(2)
    assert truth == 3  # the same-base second moment keeps the cross term
    assert truth != fake_product


def test_negative_control_gap_exact_small_n():
    control = negative_control_spec(w("a1"), (1, 2))
    plan = ExperimentPlan(control, (3, 4))
    report = run_convergence(plan)
    for row in report.rows:
        assert row.gap > 0.2  # dependence never fades


def test_run_cycle_convergence_sampled():
    report = run_cycle_convergence([w("a1"), w("a2")], 2, 5, 4000, seed=2)
    assert report.n == 5
    for row in report.rows:
        assert abs(row.mean - float(row.prediction)) < 5 * row.stderr + 0.05
    for cov in report.covariances:
        assert abs(cov.covariance) < 5 * cov.covariance_stderr + 0.05
    with pytest.raises(ValueError):
        run_cycle_convergence([w("a1")], 9, 5, 100)
    with pytest.raises(ValueError):
        run_cycle_convergence([], 2, 5, 100)


def test_sampled_row_stderr_scaling():
    spec = F_A1
    small = ExperimentPlan(spec, (4,), samples=1500, seed=9, methods={4: SAMPLE})
    large = ExperimentPlan(spec, (4,), samples=6000, seed=9, methods={4: SAMPLE})
    row_small = run_convergence(small).rows[0]
    row_large = run_convergence(large).rows[0]
    ratio = row_large.joint_stderr / row_small.joint_stderr
    assert 0.4 < ratio < 0.6
