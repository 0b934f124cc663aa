"""Integer 4x4 block matrices acting on 2x2 Riemann matrices.

``sigma = [[a, b], [c, d]]`` acts by ``B -> (a B + b)(c B + d)^{-1}``. The
blocks act on cycles stacked as (b-cycles, a-cycles). Exact integer
arithmetic is used for determinants and the symplectic defect.
"""
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .elliptic_core import riemann_theta
from .errors import SingularDenominator

J4 = np.array([[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]], dtype=object)


def _int_block(m):
    m = np.array(m, dtype=object)
    if m.shape != (2, 2):
        raise ValueError("blocks are 2x2")
    return np.vectorize(int, otypes=[object])(m)


def _exact_det(M):
    """Determinant of an integer matrix by fraction-free elimination."""
    A = [[Fraction(int(v)) for v in row] for row in M]
    n = len(A)
    det = Fraction(1)
    for i in range(n):
        p = next((r for r in range(i, n) if A[r][i] != 0), None)
        if p is None:
            return 0
        if p != i:
            A[i], A[p] = A[p], A[i]
            det = -det
        det *= A[i][i]
        for r in range(i + 1, n):
            f = A[r][i] / A[i][i]
            for c in range(i, n):
                A[r][c] -= f * A[i][c]
    return int(det)


@dataclass(frozen=True, eq=False)
class Sp4Element:
    """``[[a, b], [c, d]]`` with 2x2 integer blocks."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, _int_block(getattr(self, name)))

    @classmethod
    def from_matrix(cls, M):
        M = np.array(M, dtype=object)
        return cls(M[:2, :2], M[:2, 2:], M[2:, :2], M[2:, 2:])

    @property
    def matrix(self):
        return np.block([[self.a, self.b], [self.c, self.d]]).astype(object)

    @property
    def block_det(self):
        return _exact_det(self.matrix)

    def form_image(self):
        """``sigma J sigma^t`` in exact integers."""
        M = self.matrix
        return M.dot(J4).dot(M.T)

    @property
    def symplectic_defect(self):
        return self.form_image() - J4

    @property
    def is_symplectic(self):
        return not np.any(self.symplectic_defect != 0)

    def __eq__(self, other):
        return isinstance(other, Sp4Element) and np.array_equal(self.matrix, other.matrix)

    def __matmul__(self, other):
        return compose(self, other)


IDENTITY = Sp4Element(np.eye(2, dtype=int), np.zeros((2, 2), int), np.zeros((2, 2), int), np.eye(2, dtype=int))


def compose(s1, s2):
    """Block product ``s1 . s2``; ``act(s1 . s2, B) = act(s1, act(s2, B))``."""
    return Sp4Element(
        s1.a.dot(s2.a) + s1.b.dot(s2.c), s1.a.dot(s2.b) + s1.b.dot(s2.d),
        s1.c.dot(s2.a) + s1.d.dot(s2.c), s1.c.dot(s2.b) + s1.d.dot(s2.d),
    )


def act(sigma, B, return_defect=False):
    """``(a B + b)(c B + d)^{-1}``, symmetrised; optionally also the symmetry defect."""
    B = np.asarray(B, dtype=complex)
    a, b, c, d = (np.asarray(m, dtype=float) for m in (sigma.a, sigma.b, sigma.c, sigma.d))
    den = c @ B + d
    if np.linalg.cond(den) > 1e12:
        raise SingularDenominator("c B + d is numerically singular")
    out = (a @ B + b) @ np.linalg.inv(den)
    defect = float(np.abs(out - out.T).max())
    out = 0.5 * (out + out.T)
    return (out, defect) if return_defect else out


# Loop change between the two cases: b' = a_c b, a' = d_c a
A_C = np.array([[2, -1], [0, 1]])
D_C = np.array([[1, 0], [1, 2]])
ZERO = np.zeros((2, 2), dtype=int)
SIGMA_C = Sp4Element(A_C, ZERO, ZERO, D_C)
SIGMA_A = Sp4Element.from_matrix([[0, -1, 0, 0], [0, 0, 1, 0], [0, 0, 1, -1], [-1, -1, 0, 0]])
SIGMA_B = compose(SIGMA_A, SIGMA_C)


def constants():
    """The fixed elements ``sigma_a``, ``sigma_c``, ``sigma_b`` and the loop-change blocks."""
    return {
        "sigma_a": SIGMA_A, "sigma_c": SIGMA_C, "sigma_b": SIGMA_B,
        "a_ij": A_C.copy(), "b_ij": ZERO.copy(), "c_ij": ZERO.copy(), "d_ij": D_C.copy(),
    }


def case_a_matrix(tau_plus, tau_minus):
    """``1/2 [[t+ + t-, t+ - t-], [t+ - t-, t+ + t-]]``."""
    s, d = tau_plus + tau_minus, tau_plus - tau_minus
    return 0.5 * np.array([[s, d], [d, s]], dtype=complex)


def case_b_matrix(tau_plus, tau_minus):
    """``[[t+, t+], [t+, t+ + t-]]``."""
    return np.array([[tau_plus, tau_plus], [tau_plus, tau_plus + tau_minus]], dtype=complex)


def second_order_diagonal(B, tol=1e-10):
    """Double ``B`` and drop the integer off-diagonal term (absorbed by a characteristic shift).

    Returns ``(diag(2 B11, 2 B22), n)`` where ``n = 2 B12`` must be an integer.
    """
    M = 2 * np.asarray(B, dtype=complex)
    off = M[0, 1]
    n = int(round(off.real))
    if abs(off - n) > tol:
        raise ValueError(f"2*B12 = {off} is not an integer")
    return np.diag([M[0, 0], M[1, 1]]), n


def characteristic_shift(alpha, beta, l, B11, B22):
    """Residual of the off-diagonal shift identity for genus-2 theta with characteristic.

    ``Theta[a; b](l | diag(B11, B22)) = exp(2 pi i a1 a2)
    Theta[a1, a2; b1 - a2, b2 - a1](l | [[B11, 1], [1, B22]])``.
    Returns ``(lhs, rhs, max |lhs - rhs| / max(1, |lhs|))``.
    """
    a1, a2 = alpha
    b1, b2 = beta
    D = np.array([[B11, 0], [0, B22]], dtype=complex)
    O = np.array([[B11, 1], [1, B22]], dtype=complex)
    l = np.asarray(l, dtype=complex)
    lhs = riemann_theta(l, D, (a1, a2), (b1, b2))
    rhs = np.exp(2j * np.pi * a1 * a2) * riemann_theta(l, O, (a1, a2), (b1 - a2, b2 - a1))
    res = np.max(np.abs(lhs - rhs) / np.maximum(1.0, np.abs(lhs)))
    return lhs, rhs, float(res)
