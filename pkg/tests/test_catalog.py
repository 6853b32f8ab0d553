import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

import oracles as O
from ccspin.catalog import (
    SCAN_COLUMNS, BracketError, ExcludedLocus, KiteShape, equilateral_family, excluded_reason,
    kite_configuration, kite_determinants, kite_masses, kite_masses_geometric, kite_masses_rational,
    kite_two_degree_scan, locate_degenerate_mass, rhombic_eigenvalues, rhombic_family, rhombic_mass,
    rhombic_table,
)
from ccspin.ccfind import cc_from_config, classify


@pytest.mark.parametrize("zeta", [1.75, 2.0, 2.9, 3.6])
def test_rhombic_closed_forms(zeta):
    f = rhombic_family(zeta)
    assert f["positive"]
    cc = cc_from_config(f["configuration"])
    assert cc.residual <= 1e-12
    assert cc.lam == pytest.approx(f["lambda"], rel=1e-12)
    assert cc.inertia == pytest.approx(f["I"], rel=1e-12)
    e = rhombic_eigenvalues(zeta)
    rep = classify(cc)
    assert np.allclose(np.sort([e["mu5"], e["mu6"], e["mu7"], e["mu8"]]), rep.eig, rtol=1e-10)
    assert e["kappa_half"] == pytest.approx(np.sqrt(f["kappa"] / f["I"]), rel=1e-12)
    assert f["kappa_unit"] == pytest.approx(rep.kappa, rel=1e-12)


def test_rhombic_positivity_window():
    z = np.linspace(1.0 + 1e-3, 5.0, 2001)
    pos = rhombic_mass(z) > 0
    assert np.all(pos == ((z > O.RHOMBIC_LO) & (z < O.RHOMBIC_HI)))
    assert rhombic_family(1.5)["configuration"] is None
    assert len(rhombic_table([1.8, 2.0])) == 2


def test_degenerate_mass_bracket():
    assert locate_degenerate_mass((0.6, 0.9)) == pytest.approx(O.M4_STAR, abs=1e-12)
    with pytest.raises(BracketError):
        locate_degenerate_mass((0.9, 1.2))
    fam = equilateral_family(O.M4_STAR)
    assert fam["lambda"] == pytest.approx(1 / np.sqrt(3) + O.M4_STAR)
    assert fam["report"].partition.n0 == 2
    # indefinite above the degenerate mass, definite below
    assert equilateral_family(1.0)["report"].eig[0] < 0 < equilateral_family(0.5)["report"].eig[0]


def test_excluded_loci():
    assert excluded_reason(3.0, 0.5) == ""
    for xi, eta in [(1.0, 0.5), (3.0, 3.0), (2.0, 0.5), (2 + np.sqrt(3), 0.5), (0.5, -1.0)]:
        assert excluded_reason(xi, eta)
        with pytest.raises(ExcludedLocus):
            KiteShape(xi, eta)


@settings(max_examples=40, deadline=None)
@given(st.floats(1.05, 6.0), st.floats(0.2, 0.95))
def test_kite_masses_two_ways(xi, eta):
    assume(not excluded_reason(xi, eta, tol=1e-3))
    sh = KiteShape(xi, eta)
    m3r, m4r = kite_masses_rational(xi, eta)
    m3g, m4g, lam = kite_masses_geometric(sh)
    assert m3r == pytest.approx(m3g, rel=1e-8, abs=1e-10)
    assert m4r == pytest.approx(m4g, rel=1e-8, abs=1e-10)
    km = kite_masses(sh)
    assert km.positive == (km.m3 > 0 and km.m4 > 0)
    if km.positive:
        cc = cc_from_config(kite_configuration(sh, km))
        assert cc.residual <= 1e-10 * max(1.0, cc.lam)
        assert cc.lam == pytest.approx(km.lam, rel=1e-9)


def test_kite_rejects_negative_masses():
    sh = KiteShape(1.5, 0.9)
    km = kite_masses(sh)
    if not km.positive:
        with pytest.raises(ValueError):
            kite_configuration(sh, km)


def test_rhombus_limit_of_kite():
    xi = 2.5
    eta = 1 / xi + 1e-7
    m3, m4 = kite_masses_rational(xi, eta)
    mt = rhombic_mass((xi + 1) / (xi - 1))
    assert m3 == pytest.approx(mt, rel=1e-5) and m4 == pytest.approx(mt, rel=1e-5)


def test_kite_determinants_vanish_at_degenerate_equilateral():
    cc = cc_from_config(equilateral_family(O.M4_STAR)["cc"].config)
    # reorder to kite layout: unit pair, apex, centre
    d = kite_determinants(cc.config.masses, cc.config.x, cc.lam)
    assert abs(d["det1"]) < 1e-12 and abs(d["det2"]) < 1e-12
    d = kite_determinants(*_kite_cc(3.0, 0.5))
    assert abs(d["det1"]) > 1e-4 or abs(d["det2"]) > 1e-4


def _kite_cc(xi, eta):
    cc = cc_from_config(kite_configuration(KiteShape(xi, eta)))
    return cc.config.masses, cc.config.x, cc.lam


def test_scan_matches_pointwise_and_is_thread_stable():
    a = kite_two_degree_scan((1.5, 5.0), (0.25, 0.95), n=12, threads=1)
    b = kite_two_degree_scan((1.5, 5.0), (0.25, 0.95), n=12, threads=4)
    assert np.array_equal(a.table, b.table, equal_nan=True)
    assert a.table.shape == (144, len(SCAN_COLUMNS))
    row = a.table[np.isfinite(a.table[:, 4])][3]
    d = kite_determinants(*_kite_cc(row[0], row[1]))
    assert row[4] == pytest.approx(d["det1"], rel=1e-8, abs=1e-12)
    assert row[5] == pytest.approx(d["det2"], rel=1e-8, abs=1e-12)
    js = a.to_json()
    assert js["label"].endswith("not a proof") and js["grid"] == [12, 12]
