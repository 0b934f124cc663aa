import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sinegordon_n2.errors import CutsOverlap, DegenerateSpectrum, ParamOutOfRange, ZeroEnergy
from sinegordon_n2.spectral_curve import (Case, Kind, Spectrum, curve_data, involution,
                                          make_case_a_breather, make_case_a_kink,
                                          make_case_b_breather, make_case_b_kink, make_spectrum,
                                          matched_case_a_params, matched_case_b_params,
                                          relabel_case3, z_map)


def closed(points):
    pts = np.array(points)
    return all(np.abs(pts - 1 / (256 * e)).min() < 1e-12 * np.abs(pts).max() for e in pts)


def test_involution_and_z():
    assert involution(1 / 16) == pytest.approx(1 / 16)
    E = 0.03 + 0.01j
    assert z_map(E) == pytest.approx(z_map(involution(E)))
    with pytest.raises(ZeroEnergy):
        involution(0.0)
    with pytest.raises(ZeroEnergy):
        z_map(0.0)


def test_case_a_breather_points():
    s = make_case_a_breather(1 / 32, np.pi / 2)
    assert s.points[0] == pytest.approx(1j / 32)
    assert s.points[2] == pytest.approx(1j / 8)
    assert closed(s.points)
    assert s.family == "breather-a"


def test_case_b_kink_points():
    s = make_case_b_kink(1.0, 0.4)
    assert s.points[0] == pytest.approx(-np.exp(-1.0) / 16)
    assert all(np.diff(np.real(s.points)) < 0)
    assert closed(s.points)


def test_degenerate_and_invalid():
    with pytest.raises(DegenerateSpectrum):
        make_case_a_breather(1 / 16, 1.0)
    with pytest.raises(ParamOutOfRange):
        make_case_b_breather(2.0, 1.0)
    with pytest.raises(ParamOutOfRange):
        make_case_b_kink(0.4, 1.0)
    with pytest.raises(CutsOverlap):
        make_case_a_kink(0.06, 0.5)
    with pytest.raises(ParamOutOfRange):
        make_spectrum("a", "kink", r=0.01)


def test_matched_parameters_share_points():
    r, eta = 1 / 32, 0.5
    e1, e2 = matched_case_b_params(r, eta)
    a = np.sort_complex(np.array(make_case_a_kink(r, eta).points))
    b = np.sort_complex(np.array(make_case_b_kink(e1, e2).points))
    assert np.abs(a - b).max() < 1e-15
    assert matched_case_a_params(e1, e2) == pytest.approx((r, eta))


def test_relabel_case3():
    base = make_case_a_breather(0.02, 1.1)
    E1 = base.points[0]
    pts = [E1, np.conj(1 / (256 * E1)), np.conj(E1), 1 / (256 * E1)]
    assert relabel_case3(pts).points == base.points


def test_json_roundtrip():
    s = make_case_b_breather(1.0, 2.0)
    t = Spectrum.from_json(s.to_json())
    assert t == s and t.case is Case.B and t.kind is Kind.BREATHER


def test_curve_vanishes_at_branch_points():
    c = curve_data(make_case_a_kink(1 / 32, 0.5))
    assert np.abs(c.R_squared(np.array(c.spectrum.points))).max() < 1e-18
    assert c.R_squared(0.0) == 0


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 2.0), st.floats(0.01, 0.9))
def test_case_b_kink_closed(eta1, frac):
    s = make_case_b_kink(eta1, eta1 * frac)
    assert closed(s.points)


@settings(max_examples=40, deadline=None)
@given(st.floats(1e-3, 0.06), st.floats(0.05, 3.0))
def test_case_a_breather_closed(r, phi):
    s = make_case_a_breather(r, phi)
    assert closed(s.points)
    z1, z2 = curve_data(s).z_points
    assert abs(z1 - np.conj(z2)) < 1e-12 * abs(z1)
