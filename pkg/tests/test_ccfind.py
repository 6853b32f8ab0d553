import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles as O
from conftest import TRIANGLE
from ccspin.ccfind import (
    NoConvergence, bordered_nullity, cc_from_config, classify, collision_manifold_dimension,
    critical_gradient_check, solve_cc, tilde_mu,
)
from ccspin.core import MassedConfiguration, rotate_scale


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(0.1, 10.0), min_size=3, max_size=3), st.integers(0, 2**32 - 1))
def test_triangle_is_central_for_any_masses(m, seed):
    rng = np.random.default_rng(seed)
    cc = solve_cc(MassedConfiguration(m, np.array(TRIANGLE) + 1e-3 * rng.standard_normal(6)))
    P = cc.config.points
    sides = [np.linalg.norm(P[i] - P[j]) for i, j in ((0, 1), (1, 2), (0, 2))]
    assert np.ptp(sides) <= 1e-8
    assert cc.inertia == pytest.approx(1.0)
    assert cc.residual <= 1e-10


def test_collinear_equal_masses():
    cc = solve_cc(MassedConfiguration([1, 1, 1], [-1.1, 0.01, 0.0, -0.01, 0.9, 0.0]))
    P = cc.config.points
    a, b = P[1] - P[0], P[2] - P[0]
    assert abs(a[0] * b[1] - a[1] * b[0]) <= 1e-10
    # equal masses: the middle body sits at the centre of mass
    mid = np.argsort(P @ a)[1]
    assert np.allclose(P[mid], 0.0, atol=1e-10)
    rep = classify(cc)
    # Euler configuration: saddle with one negative direction
    assert rep.partition.n0 == 0 and (rep.mu_unit < 0).sum() >= 1


def test_square_lambda():
    s = 1 / np.sqrt(2)
    cc = cc_from_config(MassedConfiguration([1] * 4, [s, 0, 0, s, -s, 0, 0, -s]))
    # side 1, I = 4 * (1/2) = 2, U = 4 + 2/sqrt2
    assert cc.lam == pytest.approx((4 + np.sqrt(2)) / 2)
    assert cc.residual <= 1e-12


def test_no_convergence_reports_residual():
    seed = MassedConfiguration([1, 2, 3], np.array(TRIANGLE) + [0.2, 0, 0, 0.1, 0, 0])
    with pytest.raises(NoConvergence) as ei:
        solve_cc(seed, max_iter=0)
    assert ei.value.iterations == 0 and ei.value.residual > 1e-10


def test_spectrum_matches_oracle(lagrange123_chart):
    rep = lagrange123_chart.report
    eig, lam = O.restricted_eigs(rep.unit.config.masses, rep.unit.config.x)
    assert lam == pytest.approx(rep.lam_unit)
    assert np.allclose(eig, rep.mu_unit, rtol=1e-10, atol=1e-12)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.3, 4.0), st.floats(-3.0, 3.0))
def test_partition_is_scale_and_rotation_invariant(rho, alpha):
    base = cc_from_config(MassedConfiguration([1, 2, 3, 4], [1, 0, 0, 1, -1, 0, 0, -1]))
    base = solve_cc(base.config)
    moved = cc_from_config(rotate_scale(base.config, rho, alpha))
    r0, r1 = classify(base), classify(moved)
    assert np.allclose(r0.mu_unit, r1.mu_unit, rtol=1e-8, atol=1e-10)
    assert r1.mu == pytest.approx(np.sqrt(r1.cc.inertia) * r1.eig)
    assert r0.partition == r1.partition


def test_index_lower_bound(lagrange_chart, degenerate_report):
    for rep in (lagrange_chart.report, degenerate_report):
        assert rep.partition.np >= rep.cc.config.n - 2


def test_tilde_mu_quadratic_identity():
    k = 6.0
    mu = np.array([-1.0, -k / 16, 0.0, 0.7, 12.0])
    s = tilde_mu(mu, k)
    assert np.allclose(s * s + np.sqrt(k) / 2 * s - mu, 0.0)
    assert s[2] == 0 and s[3].real > 0 and s[0].imag != 0


def test_degenerate_counts(degenerate_report, lagrange_chart):
    assert degenerate_report.partition.n0 == 2
    assert bordered_nullity(degenerate_report.cc) == 2
    assert bordered_nullity(lagrange_chart.report.cc) == 0
    d = collision_manifold_dimension(degenerate_report)
    assert not d.exact and d.dimension == 2 + degenerate_report.partition.np + 8
    d = collision_manifold_dimension(lagrange_chart.report)
    assert d.exact and d.dimension == lagrange_chart.report.partition.np + 8


def test_critical_gradient(degenerate_report):
    assert critical_gradient_check(degenerate_report.cc) <= 1e-12


def test_report_json(lagrange_chart):
    js = lagrange_chart.report.to_json()
    assert js["lambda_unit"] == pytest.approx(3.0)
    assert set(js["partition"]) == {"n0", "np", "n1", "n2", "n3"}
