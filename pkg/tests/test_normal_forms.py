import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ccspin.normal_forms import (
    EmptyCenter, IdenticallyZero, PlanarSystem, build_linearization, center_manifold_quadratic,
    characteristic_directions, discriminant, example1_invariant, example1_rhs, example2_series,
    polar_forms, rate_estimate, resonance_scan, resultant, shifted_rhs, simulate_and_fit,
    spectrum_multiset, spin_verdict, trig_derivative, trig_eval, truncated_rhs, verdict_from_a,
)

coef = st.floats(-3.0, 3.0, allow_nan=False)


def test_linearization_kinds(lagrange_chart):
    k = lagrange_chart.kappa
    mu = np.array([0.0, 2.0, -k / 16, -k / 32, -k])
    lin = build_linearization(lagrange_chart, mu=mu)
    assert lin.kinds == ["zero", "real", "n3", "real", "complex"] and lin.n3_engaged
    assert lin.residual <= 1e-12
    ev = np.linalg.eigvals(lin.A)
    # the Jordan block splits by about sqrt(eps); match with a loose tolerance
    for w in spectrum_multiset(lagrange_chart, mu):
        assert np.min(np.abs(ev - w)) < 1e-6
    with pytest.raises(ValueError):
        build_linearization(lagrange_chart, epsilon=0.0)


def test_truncation_matches_exact_field(degenerate_chart):
    rng = np.random.default_rng(2)
    v = rng.standard_normal(2 * degenerate_chart.d + 1)
    errs = []
    for h in (1e-3, 5e-4):
        errs.append(np.linalg.norm(shifted_rhs(degenerate_chart, h * v) - truncated_rhs(degenerate_chart, h * v)))
    assert 7 <= errs[0] / errs[1] <= 9  # third-order remainder


def test_center_manifold(degenerate_chart, lagrange_chart):
    cd = center_manifold_quadratic(degenerate_chart, direction=[1.0, -0.3])
    assert cd.n0 == 2 and cd.c_reduced.size == 4
    assert 7 <= cd.residual_ratio <= 9
    with pytest.raises(EmptyCenter):
        center_manifold_quadratic(lagrange_chart)


def test_discriminant_signs():
    assert discriminant(1, 0, -1 / 3, 0) < 0        # x^3 - x y^2: three real lines
    assert discriminant(0, 1 / 3, 0, 0) == 0        # x^2 y: repeated factor
    assert discriminant(1, 0, 1 / 3, 0) > 0         # x^3 + x y^2: one real line


@settings(max_examples=50, deadline=None)
@given(coef, coef, coef, coef)
def test_resultant_proportional_to_discriminant(a, b, c, d):
    # partial derivatives of a binary cubic share a root iff its discriminant vanishes
    assert resultant(a, b, c, d) == pytest.approx(discriminant(a, b, c, d), abs=1e-9 * (1 + abs(a) + abs(b) + abs(c) + abs(d)) ** 4)


def test_verdicts(lagrange_chart, degenerate_report, degenerate_chart):
    assert verdict_from_a(0).case == "Nondegenerate"
    assert verdict_from_a(1).no_spin
    assert verdict_from_a(3).reason == "n0_ge_3"
    zero = verdict_from_a(2, [0, 0, 0, 0])
    assert zero.case == "Undecided" and zero.reason == "all tested orders zero"
    assert verdict_from_a(2, [0, 1, 0, 0]).reason == "zero_discriminant"
    v = spin_verdict(lagrange_chart.report, lagrange_chart)
    assert v.case == "Nondegenerate" and v.no_spin
    v = spin_verdict(degenerate_report, degenerate_chart)
    assert v.case == "DegTwo" and v.no_spin and v.to_json()["pass"] is True
    assert len(v.supporting["theta0"]) == 6


@settings(max_examples=40, deadline=None)
@given(coef, coef, coef, coef, st.floats(0, 2 * np.pi))
def test_polar_forms(c1, c2, c3, c4, th):
    sys_ = PlanarSystem.from_c(c1, c2, c3, c4)
    if not (np.any(sys_.Pm) or np.any(sys_.Qm)):
        return
    phi, psi = polar_forms(sys_)
    P, Q = sys_.leading([np.cos(th), np.sin(th)])[0]
    assert trig_eval(phi, th) == pytest.approx(P * np.cos(th) + Q * np.sin(th), abs=1e-12)
    assert trig_eval(psi, th) == pytest.approx(Q * np.cos(th) - P * np.sin(th), abs=1e-12)
    h = 1e-6
    fd = (trig_eval(psi, th + h) - trig_eval(psi, th - h)) / (2 * h)
    assert trig_derivative(psi, th) == pytest.approx(fd, abs=1e-6)
    for r in characteristic_directions(psi):
        assert abs(trig_eval(psi, r)) <= 1e-9 * max(1.0, np.max(np.abs(psi)))


def test_characteristic_direction_at_pi():
    # Psi = sin * cos^2 has zeros at 0, pi/2, pi, 3pi/2
    roots = characteristic_directions([0, 1, 0, 0])
    assert np.allclose(roots, [0, np.pi / 2, np.pi, 3 * np.pi / 2])
    with pytest.raises(IdenticallyZero):
        characteristic_directions([0, 0, 0])
    with pytest.raises(IdenticallyZero):
        polar_forms(PlanarSystem(2, [0, 0, 0], [0, 0, 0]))
    with pytest.raises(ValueError):
        PlanarSystem(1, [1, 0], [0, 1])


def test_rate_estimate_and_simulation():
    # zeta' = zeta^2, eta' = zeta eta: every ray is invariant; zeta = 1/(1 - tau) on theta = 0
    sys_ = PlanarSystem(2, [1, 0, 0], [0, 1, 0])
    phi, psi = polar_forms(sys_)
    r = rate_estimate(phi, 0.0, 2, psi)
    assert r.phi == pytest.approx(1.0) and r.sharp and r.prefactor == pytest.approx(1.0)
    fit = simulate_and_fit(sys_, [1.0, 0.0], tau_end=-1e4)
    assert fit["prefactor_num"] == pytest.approx(1.0, rel=1e-3)
    assert fit["exponent_num"] == pytest.approx(-1.0, abs=1e-3)
    assert fit["theta0_num"] == pytest.approx(0.0, abs=1e-12)
    back = rate_estimate(phi, np.pi, 2, psi)
    assert back.phi == pytest.approx(-1.0) and not back.sharp and back.prefactor is None


def test_example_fixtures():
    from scipy.integrate import solve_ivp

    sol = solve_ivp(lambda _, X: example1_rhs(X), (0, 2), [0.5, 1.0], rtol=1e-12, atol=1e-14,
                    method="DOP853")
    inv = example1_invariant(sol.y)
    assert np.ptp(inv) < 1e-9
    tau = np.linspace(10.0, 200.0, 20001)
    u, v, cum = example2_series(tau)
    assert np.allclose(cum, -np.log(np.log(tau)) + np.log(np.log(tau[0])), atol=1e-6)


def test_resonances():
    out = resonance_scan([1.0, 2.0], max_order=3)
    assert any(r.k == 1 and r.alpha == (2, 0) for r in out["resonances"])
    none = resonance_scan([1.0, np.sqrt(2)], max_order=6)
    assert none["resonances"] == [] and none["checked"] > 0
    near = resonance_scan([1.0, 2.0 + 1e-6], max_order=2)
    assert near["resonances"] == [] and near["near"]
    t = resonance_scan([0.3, 0.7, 1.3], max_order=5, threads=3)
    s = resonance_scan([0.3, 0.7, 1.3], max_order=5, threads=1)
    assert [r.to_json() for r in t["resonances"]] == [r.to_json() for r in s["resonances"]]
    with pytest.raises(ValueError):
        resonance_scan([1.0], max_order=13)
