import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sinegordon_n2.errors import SingularDenominator
from sinegordon_n2.symplectic import (IDENTITY, SIGMA_A, SIGMA_B, SIGMA_C, Sp4Element, act,
                                      case_a_matrix, case_b_matrix, characteristic_shift,
                                      compose, constants, second_order_diagonal)


def test_sigma_b_is_composition():
    assert compose(SIGMA_A, SIGMA_C) == SIGMA_B
    assert np.array_equal(SIGMA_B.matrix.astype(int),
                          [[0, -1, 0, 0], [0, 0, 1, 0], [0, 0, 0, -2], [-2, 0, 0, 0]])


def test_determinants_and_forms():
    assert SIGMA_A.block_det == 1 and SIGMA_A.is_symplectic
    assert SIGMA_C.block_det == 4 and not SIGMA_C.is_symplectic
    J = SIGMA_A.form_image() - SIGMA_A.symplectic_defect
    assert np.array_equal(SIGMA_C.form_image(), 2 * J)


def test_constants_blocks():
    c = constants()
    assert np.array_equal(c["a_ij"], [[2, -1], [0, 1]])
    assert np.array_equal(c["d_ij"], [[1, 0], [1, 2]])
    assert not c["b_ij"].any() and not c["c_ij"].any()


def test_identity_action():
    B = case_a_matrix(1.2j, 0.5j)
    assert np.allclose(act(IDENTITY, B), B)


def test_act_is_homomorphism():
    B = case_b_matrix(0.7j, 1.3j)
    assert np.allclose(act(SIGMA_B, B), act(SIGMA_A, act(SIGMA_C, B)), atol=1e-12)


def test_sigma_a_on_case_a():
    tp, tm = 1.23825j, 0.48208j
    out = act(SIGMA_A, case_a_matrix(tp, tm))
    assert np.allclose(out, [[tm / 2, 0.5], [0.5, -1 / (2 * tp)]], atol=1e-12)
    diag, n = second_order_diagonal(out)
    assert n == 1
    assert np.allclose(np.diag(diag), [tm, -1 / tp])


def test_singular_denominator():
    s = Sp4Element.from_matrix([[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 0, 0, 0]])
    with pytest.raises(SingularDenominator):
        act(s, np.diag([1j, 1j]))


def test_second_order_requires_integer():
    with pytest.raises(ValueError):
        second_order_diagonal(np.array([[1j, 0.3], [0.3, 1j]]))


@settings(max_examples=25, deadline=None)
@given(st.floats(0.4, 2.0), st.floats(0.4, 2.0), st.sampled_from([0.0, 0.5]),
       st.sampled_from([0.0, 0.5]), st.sampled_from([0.0, 0.5]), st.sampled_from([0.0, 0.5]))
def test_characteristic_shift_half_integers(b11, b22, a1, a2, c1, c2):
    l = np.array([0.3 + 0.1j, -0.2 + 0.05j])
    _, _, res = characteristic_shift((a1, a2), (c1, c2), l, 1j * b11, 1j * b22)
    assert res < 1e-10


def test_characteristic_shift_any_real_alpha():
    _, _, res = characteristic_shift((0.3, 0.17), (0.1, 0.0), np.array([0.1, 0.2]), 1.1j, 0.8j)
    assert res < 1e-10
