import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sinegordon_n2.elliptic_core import (Modulus, agm, complete_K, complete_K_identities,
                                         complete_K_m, complete_K_prime, jacobi_elliptic,
                                         jacobi_theta, modulus_from_tau, quarter_period_from_tau,
                                         reciprocal_modulus_map, riemann_theta, tau_from_modulus)
from sinegordon_n2.errors import PoleEncountered, SingularModulus

mp.mp.dps = 30


def mp_jac(name, u, k):
    return complex(mp.ellipfun(name, mp.mpmathify(u), m=mp.mpmathify(k) ** 2))


def test_modulus_invariant():
    m = Modulus.from_k(0.6)
    assert m.kprime == pytest.approx(0.8, abs=1e-15)
    big = Modulus.from_k(2.0)
    assert abs(big.k ** 2 + big.kprime ** 2 - 1) < 1e-12
    assert big.kprime.imag < 0  # Im k -> 0+ continuation
    with pytest.raises(ValueError):
        Modulus(0.6, 0.7)


def test_agm_against_mpmath():
    assert abs(agm(1.0, 0.3) - complex(mp.agm(1, 0.3))) < 1e-15
    z = 0.4 + 0.7j
    assert abs(agm(1.0, z) - complex(mp.agm(1, z))) < 1e-14


@pytest.mark.parametrize("k", [0.05, 0.3, 0.6, 0.9, 0.999])
def test_complete_K_real(k):
    assert complete_K(k) == pytest.approx(float(mp.ellipk(k * k)), rel=1e-14)
    assert complete_K_prime(k) == pytest.approx(float(mp.ellipk(1 - k * k)), rel=1e-14)


@pytest.mark.parametrize("m", [0.3 + 0.4j, -2.0 + 0.1j, 0.9 - 0.2j, -5.0])
def test_complete_K_m_complex(m):
    assert abs(complete_K_m(m) - complex(mp.ellipk(m))) < 1e-13 * abs(complex(mp.ellipk(m)))


def test_K_singular():
    with pytest.raises(SingularModulus):
        complete_K(1.0)
    with pytest.raises(SingularModulus):
        complete_K_m(1.0)


def test_K_reciprocal_identities():
    for k in (0.2, 0.6, 0.95):
        res = complete_K_identities(k)
        assert max(res.values()) < 1e-13


@pytest.mark.parametrize("j", [1, 2, 3, 4])
def test_jacobi_theta_against_mpmath(j):
    tau = 0.3 + 0.8j
    q = mp.exp(1j * mp.pi * tau)
    for z in (0.1, 0.37 + 0.2j, -1.3 + 0.5j):
        ref = complex(mp.jtheta(j, mp.pi * z, q))
        assert abs(jacobi_theta(j, z, tau) - ref) < 1e-13 * max(1.0, abs(ref))


def test_modulus_tau_roundtrip():
    for k in (0.1, 0.5, 0.9):
        tau = tau_from_modulus(k)
        m = modulus_from_tau(tau)
        assert m.k == pytest.approx(k, rel=1e-13)
        assert quarter_period_from_tau(tau).real == pytest.approx(complete_K(k), rel=1e-13)


@pytest.mark.parametrize("k", [0.2, 0.7, 0.95])
def test_jacobi_real_modulus_mpmath(k):
    for u in (0.3, 1.7, -2.4, 0.5 + 0.8j, -1.1 - 0.3j):
        j = jacobi_elliptic(u, k)
        for name, val in (("sn", j.sn), ("cn", j.cn), ("dn", j.dn)):
            assert abs(complex(val) - mp_jac(name, u, k)) < 1e-13


@pytest.mark.parametrize("k", [1.5, 0.4 + 0.3j, 1 / 0.6])
def test_jacobi_complex_modulus_mpmath(k):
    for u in (0.3, 0.9 + 0.2j):
        j = jacobi_elliptic(u, Modulus.from_k(k))
        for name, val in (("sn", j.sn), ("cn", j.cn), ("dn", j.dn)):
            assert abs(complex(val) - mp_jac(name, u, k)) < 1e-11


def test_pole_raises():
    K = complete_K(0.6)
    with pytest.raises(PoleEncountered):
        jacobi_elliptic(K, 0.6).sc()


def test_riemann_theta_diagonal_factorizes():
    B = np.diag([0.9j, 1.4j])
    l = np.array([0.2 + 0.1j, -0.3 + 0.05j])
    prod = jacobi_theta(3, l[0], B[0, 0]) * jacobi_theta(3, l[1], B[1, 1])
    assert abs(riemann_theta(l, B) - prod) < 1e-14


def test_riemann_theta_against_direct_sum():
    B = np.array([[0.3 + 1.1j, 0.2 + 0.4j], [0.2 + 0.4j, -0.1 + 0.9j]])
    l = np.array([0.13 + 0.4j, -0.2 - 0.3j])
    a, b = (0.5, 0.0), (0.0, 0.5)
    ref = mp.mpc(0)
    for n1 in range(-25, 26):
        for n2 in range(-25, 26):
            k1, k2 = n1 + a[0], n2 + a[1]
            q = B[0, 0] * k1 * k1 + 2 * B[0, 1] * k1 * k2 + B[1, 1] * k2 * k2
            ref += mp.exp(1j * mp.pi * q + 2j * mp.pi * (k1 * (l[0] + b[0]) + k2 * (l[1] + b[1])))
    assert abs(riemann_theta(l, B, a, b) - complex(ref)) < 1e-12


@settings(max_examples=50, deadline=None)
@given(st.floats(-4, 4), st.floats(0.05, 0.95))
def test_pythagorean_identities(u, k):
    j = jacobi_elliptic(u, k)
    assert abs(j.sn ** 2 + j.cn ** 2 - 1) < 1e-13
    assert abs(k * k * j.sn ** 2 + j.dn ** 2 - 1) < 1e-13


@settings(max_examples=50, deadline=None)
@given(st.floats(-3, 3), st.floats(0.05, 0.95))
def test_reciprocal_map_property(u, k):
    res = reciprocal_modulus_map(u, k)
    assert max(float(np.max(v)) for v in res.values()) < 1e-10


def test_reciprocal_map_rejects_complex():
    with pytest.raises(ValueError):
        reciprocal_modulus_map(0.3, 1.2)
