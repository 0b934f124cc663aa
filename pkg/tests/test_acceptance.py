"""Acceptance criteria 1 to 9. A summary line per criterion is printed at the end of the run."""
import time

import numpy as np
import pytest

from sinegordon_n2 import floquet, symplectic, verify
from sinegordon_n2.elliptic_core import reciprocal_modulus_map
from sinegordon_n2.periods import compute_w, period_relations, primed_basis, w_relations
from sinegordon_n2.solutions import (build_model, local_residual, static_limit,
                                     theta_product_form, theta_value, time_shift_equivalence)
from sinegordon_n2.spectral_curve import (make_case_a_kink, make_case_b_kink,
                                          matched_case_b_params)

FAMILIES = list(verify.FAMILY_SAMPLES)


@pytest.mark.criterion(1)
def test_c1_elliptic_identities():
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    res = reciprocal_modulus_map(rng.uniform(-3, 3, 10_000), rng.uniform(0.05, 0.95, 10_000))
    elapsed = time.perf_counter() - start
    assert max(float(np.max(v)) for v in res.values()) < 1e-10
    assert elapsed < 10


@pytest.mark.criterion(2)
def test_c2_period_relations():
    start = time.perf_counter()
    for r, eta in verify.CASE_A_KINKS:
        p = compute_w(make_case_a_kink(r, eta))
        assert max(period_relations(p).values()) < 1e-8
        assert max(w_relations(p).values()) < 1e-8
    for e1, e2 in verify.CASE_B_KINKS:
        rel = period_relations(compute_w(make_case_b_kink(e1, e2)))
        assert len(rel) == 8 and max(rel.values()) < 1e-8
    assert time.perf_counter() - start < 60


@pytest.mark.criterion(3)
@pytest.mark.parametrize("r,eta", verify.CASE_A_KINKS[:3])
def test_c3_landen_action(r, eta):
    pa = compute_w(make_case_a_kink(r, eta))
    pb = compute_w(make_case_b_kink(*matched_case_b_params(r, eta)))
    # the matched Case-(b) kink carries the Landen-halved and doubled moduli
    assert abs(pb.tau_plus - pa.tau_plus / 2) < 1e-8 and abs(pb.tau_minus - 2 * pa.tau_minus) < 1e-8
    _, _, Bb = primed_basis(pa)
    Ba = symplectic.case_a_matrix(pa.tau_plus, pa.tau_minus)
    assert np.abs(symplectic.act(symplectic.SIGMA_C, Bb) - Ba).max() < 1e-8


@pytest.mark.criterion(3)
def test_c3_integer_constants():
    assert symplectic.compose(symplectic.SIGMA_A, symplectic.SIGMA_C) == symplectic.SIGMA_B
    assert symplectic.SIGMA_C.block_det == 4
    J = np.block([[np.zeros((2, 2), int), np.eye(2, dtype=int)], [-np.eye(2, dtype=int), np.zeros((2, 2), int)]])
    assert np.array_equal(symplectic.SIGMA_C.form_image(), 2 * J)


@pytest.mark.criterion(4)
@pytest.mark.parametrize("fam", FAMILIES)
def test_c4_theta_factorization(fam):
    m = build_model(verify.FAMILY_SAMPLES[fam])
    rng = np.random.default_rng(4)
    x, t = rng.uniform(-1, 1, 100), rng.uniform(-1, 1, 100)
    g0 = theta_value(m.theta_params, x, t)
    g1 = theta_value(m.theta_params, x, t, 0.5)
    scale = np.abs(g0).max()
    assert np.abs(g0 - theta_product_form(m, x, t)).max() < 1e-10 * scale
    assert np.abs(g1 - theta_product_form(m, x, t, True)).max() < 1e-10 * scale
    assert np.abs(g1 - np.conj(g0)).max() < 1e-10 * scale


@pytest.mark.criterion(5)
@pytest.mark.parametrize("fam", FAMILIES)
def test_c5_pde_residual(fam):
    start = time.perf_counter()
    m = build_model(verify.FAMILY_SAMPLES[fam], "calibrate")
    assert abs(m.C - 64) < 1e-4
    x, t = np.meshgrid(np.linspace(-5, 5, 101), np.linspace(-5, 5, 101), indexing="ij")
    res = local_residual(m, x.ravel(), t.ravel(), h=0.02)
    assert res.max() < 1e-4
    assert time.perf_counter() - start < 60


@pytest.mark.criterion(6)
@pytest.mark.parametrize("fam", ["kink-a", "kink-b", "breather-b"])
def test_c6_static_limit(fam):
    rep = static_limit(fam, 5e-7)
    assert rep["t_variation"] < 1e-4 and rep["profile_diff"] < 1e-4


@pytest.mark.criterion(6)
@pytest.mark.xfail(strict=True, reason="the breather-a spectrum has no t-independent degeneration; "
                   "the r -> 1/16 collision leaves a time-periodic field")
def test_c6_static_limit_breather_a():
    rep = static_limit("breather-a", 5e-7)
    assert rep["t_variation"] < 1e-4 and rep["profile_diff"] < 1e-4


@pytest.mark.criterion(6)
def test_c6_reciprocal_chains():
    for check in verify.suite_static(np.random.default_rng(6)):
        assert check["passed"], check


@pytest.mark.criterion(7)
@pytest.mark.parametrize("r,eta", verify.CASE_A_KINKS[:3])
def test_c7_time_shift(r, eta):
    x, t = np.meshgrid(np.linspace(-3, 3, 21), np.linspace(-3, 3, 21))
    rep = time_shift_equivalence((r, eta), matched_case_b_params(r, eta), x.ravel(), t.ravel())
    assert rep["max_diff"] < 1e-6


@pytest.mark.criterion(8)
def test_c8_floquet():
    E = floquet.default_E_samples(20)
    for pot, sign in ((floquet.even_potential(), 1), (floquet.odd_potential(), -1)):
        rep = floquet.verify_spectral_symmetry(pot, E)
        assert rep["sign"] == sign and rep["max_defect"] < 1e-6
        for e in E:
            for z in (e, 1 / (256 * e)):
                assert abs(floquet.transfer_matrix(pot, z).det - 1) < 1e-8
    free = floquet.free_potential()
    for e in (0.01, 0.04):
        res = floquet.transfer_matrix(free, e)
        assert abs(res.delta - floquet.free_discriminant(e, free.L)) < 1e-8
        assert abs(res.det - 1) < 1e-8


@pytest.mark.criterion(9)
def test_c9_characteristic_identity():
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(20):
        B11, B22 = 1j * rng.uniform(0.5, 2.0, 2)
        l = rng.normal(size=2) + 1j * rng.normal(scale=0.3, size=2)
        for a in np.ndindex(2, 2, 2, 2):
            a1, a2, b1, b2 = (0.5 * v for v in a)
            worst = max(worst, symplectic.characteristic_shift((a1, a2), (b1, b2), l, B11, B22)[2])
    assert worst < 1e-10
