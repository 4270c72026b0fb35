import csv
import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from moutardnet.continuum import (
    conformal_square_obstruction,
    conjugated_transform,
    convergence_study,
    exact_exponential,
    fitted_order,
    gauge_flip,
    label_ratio_feasibility,
    minus_residuals,
    plus_coefficient,
    plus_moutard_transform,
    plus_residuals,
    propagate_plus_moutard,
    smooth_dual_check,
)
from moutardnet.errors import DimensionError, PreconditionError
from moutardnet.moebius import generate_isothermic_with_metric
from moutardnet.moutard_core import propagate_tnet
from moutardnet.samples import isothermic_sample

finite = st.floats(-3, 3, allow_nan=False)


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, (5, 3), elements=finite), arrays(np.float64, (6, 3), elements=finite),
       arrays(np.float64, (4, 5), elements=st.floats(0.2, 3)))
def test_gauge_identity(ax1, ax2, a):
    ax2[0] = ax1[0]
    net = propagate_tnet([ax1, ax2], {(1, 2): a}).vertices
    flipped = gauge_flip(net, 2)
    assert np.array_equal(minus_residuals(net, a), plus_residuals(flipped, a))
    assert np.max(plus_residuals(flipped, a)) < 1e-12 * max(1.0, np.max(np.abs(net)))


def test_gauge_flip_is_an_involution(rng):
    y = rng.normal(size=(4, 5, 2))
    assert np.array_equal(gauge_flip(gauge_flip(y, 1), 1), y)
    with pytest.raises(DimensionError):
        gauge_flip(y, 3)


def test_plus_propagation_reproduces_exponential():
    q, lam, eps = 0.7, 1.3, 0.1
    ex = exact_exponential(q, lam)
    u = np.arange(6) * eps
    # exp(lam u1 + mu u2) solves the plus form exactly with this coefficient
    mu = q / lam
    a = (np.exp(lam * eps) * np.exp(mu * eps) + 1) / (np.exp(lam * eps) + np.exp(mu * eps))
    y = propagate_plus_moutard([ex(u, 0.0), ex(0.0, u)], a)
    assert np.max(np.abs(y - ex(u[:, None], u[None, :]))) < 1e-13


def test_symmetric_coefficient_identity():
    # (y12 - y1 - y2 + y) = eps^2 q/4 (y12 + y1 + y2 + y) on a single face
    q, eps = 1.7, 0.05
    a = plus_coefficient(q, eps)
    y, y1, y2 = 0.3, -1.1, 2.0
    y12 = a * (y1 + y2) - y
    assert (y12 - y1 - y2 + y) == pytest.approx(eps * eps * q / 4 * (y12 + y1 + y2 + y), rel=1e-12)
    with pytest.raises(ValueError):
        plus_coefficient(q, eps, "cubic")


@pytest.mark.parametrize("q,lam", [(1.0, 1.0), (1.0, 2.0), (-2.0, 1.0), (0.5, -1.5)])
def test_second_order_convergence(q, lam):
    table = convergence_study(q, (1.0, 1.0), [1 / 8, 1 / 16, 1 / 32, 1 / 64], lam=lam)
    assert table.order >= 1.9
    assert np.all(np.diff(table.errors) < 0)


def test_linear_coefficient_has_a_different_limit():
    table = convergence_study(1.0, (1.0, 1.0), [1 / 8, 1 / 16, 1 / 32, 1 / 64], form="linear")
    # the error settles at a finite value instead of vanishing
    assert table.errors[-1] > 0.5 and abs(table.order) < 0.2


def test_q_zero_is_exact():
    for exact in (None, lambda u1, u2: np.exp(u1) + np.sin(u2) + 1.0):
        table = convergence_study(0.0, (1.0, 1.0), [1 / 8, 1 / 16, 1 / 32, 1 / 64], exact=exact)
        assert np.max(table.errors) < 1e-13


def test_convergence_study_validation():
    with pytest.raises(ValueError):
        convergence_study(1.0, eps_list=[0.1, 0.05])
    with pytest.raises(PreconditionError):
        convergence_study(1.0, target=(1.0, 1.0), eps_list=[0.3, 0.2, 0.1])


def test_threads_do_not_change_results():
    a = convergence_study(1.0, threads=1)
    b = convergence_study(1.0, threads=3)
    assert np.array_equal(a.errors, b.errors)


def test_fitted_order_on_synthetic_data():
    eps = np.array([0.1, 0.05, 0.025, 0.0125])
    assert fitted_order(eps, 3 * eps ** 2) == pytest.approx(2.0)
    assert fitted_order(eps, 3 * eps ** 2 + [1.0, 0, 0, 0]) == pytest.approx(2.0)


def test_csv_output(tmp_path):
    table = convergence_study(1.0, eps_list=[1 / 8, 1 / 16, 1 / 32])
    path = tmp_path / "t.csv"
    table.write_csv(path)
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["eps", "error", "local_order"]
    assert len(rows) == 4 and rows[1][2] == ""
    assert float(rows[3][1]) == table.errors[2]


def brute_force_labels(ratios, m):
    """Search sign patterns of constant labels alpha_i = +-1 times a positive scale."""
    for signs in itertools.product([1.0, -1.0], repeat=m):
        if all(signs[i - 1] / signs[j - 1] == r for (i, j), r in ratios.items()):
            return True
    return False


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_conformal_square_obstruction(m):
    feasible, witness = conformal_square_obstruction(m)
    ratios = {(i, j): -1.0 for i, j in itertools.combinations(range(1, m + 1), 2)}
    assert feasible == brute_force_labels(ratios, m)
    assert feasible == (m == 2)
    if not feasible:
        cycle, product = witness
        assert len(cycle) == 3 and product == pytest.approx(-1.0)


def test_label_ratios_consistent_case():
    feasible, witness = label_ratio_feasibility({(1, 2): 2.0, (2, 3): 3.0, (1, 3): 6.0})
    assert feasible and witness is None
    feasible, witness = label_ratio_feasibility({(1, 2): 2.0, (2, 3): 3.0, (1, 3): 5.0})
    assert not feasible
    with pytest.raises(PreconditionError):
        label_ratio_feasibility({(1, 2): 0.0})


def test_plus_transform_matches_conjugated(rng):
    n1, n2 = 6, 7
    ax1 = rng.normal(size=(n1, 3))
    ax2 = rng.normal(size=(n2, 3))
    ax2[0] = ax1[0]
    a = rng.uniform(0.5, 1.5, size=(n1 - 1, n2 - 1))
    y = propagate_plus_moutard([ax1, ax2], a)
    assert np.max(plus_residuals(y, a)) < 1e-12
    seed = rng.normal(size=3)
    b1, b2 = rng.uniform(0.5, 1.5, n1 - 1), rng.uniform(0.5, 1.5, n2 - 1)
    out = plus_moutard_transform(y, seed, b1, b2)
    assert out.consistency < 1e-10
    ref = conjugated_transform(y, a, seed, b1, b2)
    assert np.max(np.abs(out.vertices - ref)) < 1e-9 * max(1.0, np.max(np.abs(ref)))
    # the transformed net solves the plus form itself
    yp = out.vertices
    c = (yp[1:, 1:, 0] + yp[:-1, :-1, 0]) / (yp[1:, :-1, 0] + yp[:-1, 1:, 0])
    assert np.max(plus_residuals(yp, c)) < 1e-8 * max(1.0, np.max(np.abs(yp)))


def test_smooth_dual_check(iso15):
    rep = smooth_dual_check(iso15["f"])
    assert rep.passed and rep.details["applicable"]
    assert rep.details["min_s"] > 0 and rep.details["min_alpha"] > 0


def test_smooth_dual_is_orientation_independent(iso15):
    # transposing swaps the roles of the labels; the extracted gauge absorbs the sign
    assert smooth_dual_check(np.swapaxes(iso15["f"], 0, 1)).passed


def test_smooth_dual_not_applicable_for_positive_cross_ratios():
    axes, labels = isothermic_sample(6, 6, seed=3)
    f, _, _ = generate_isothermic_with_metric(axes, [labels[0], -labels[1]])
    rep = smooth_dual_check(f)
    assert not rep.passed and not rep.details["applicable"]
    assert (0, 0) in rep.witnesses
