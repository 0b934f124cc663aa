"""Transfer matrix and Floquet discriminant of the periodic Sine-Gordon Lax problem.

The first-order system is ``phi' = J M(x, E) phi`` with ``J = [[0, -1], [1, 0]]`` and
``M = [[e^{iu}/(16 s) - s, i(v + u_x)/4], [i(v + u_x)/4, e^{-iu}/(16 s) - s]]``,
``s = sqrt(E)`` on the principal branch. ``J M`` is trace-free, so ``det T = 1``.
The gauge ``psi = diag(e^{iu/4}, e^{-iu/4}) phi`` gives the equivalent psi-system.
"""
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp

from .elliptic_core import Modulus, complete_K, complete_K_prime, jacobi_elliptic
from .errors import (AnalyticContinuationUnavailable, IntegratorTolExceeded, ParamOutOfRange,
                     ParityUntagged, ZeroEnergy)
from .spectral_curve import SPECTRAL_SCALE

RTOL = 1e-11
ATOL = 1e-12
NEGATIVE_AXIS_OFFSET = 1e-9
_J = np.array([[0, -1], [1, 0]], dtype=complex)


def _zero(x):
    return np.zeros_like(np.asarray(x, float))


@dataclass
class PeriodicPotential:
    """``u(x + L) = u(x) + 2 pi M``, ``v = u_t`` periodic. ``parity`` is "even", "odd" or None."""

    u: Callable
    L: float
    M: int = 0
    v: Callable = _zero
    ux: Optional[Callable] = None
    parity: Optional[str] = None

    def __post_init__(self):
        if not self.L > 0:
            raise ParamOutOfRange("period L must be positive")
        xs = np.linspace(0.0, self.L, 7)[:-1] + 0.123 * self.L
        u0 = np.asarray(self.u(xs), float)
        jump = np.asarray(self.u(xs + self.L), float) - u0
        if np.abs(jump - 2 * np.pi * self.M).max() > 1e-10 * max(1.0, np.abs(u0).max()):
            raise ParamOutOfRange("u(x + L) - u(x) is not 2 pi M")
        if np.abs(np.asarray(self.v(xs + self.L)) - np.asarray(self.v(xs))).max() > 1e-10:
            raise ParamOutOfRange("v is not L-periodic")
        charge = round(float(self.u(self.L) - self.u(0.0)) / (2 * np.pi))
        if charge != self.M:
            raise ParamOutOfRange(f"declared M = {self.M} but u(L) - u(0) gives {charge}")
        if self.parity is not None:
            if self.parity not in ("even", "odd"):
                raise ParamOutOfRange("parity must be 'even', 'odd' or None")
            sgn = 1 if self.parity == "even" else -1
            d = np.abs(np.asarray(self.u(-xs)) - sgn * u0).max()
            if d > 1e-10 * max(1.0, np.abs(u0).max()):
                raise ParamOutOfRange(f"u is not {self.parity} (defect {d:.2e})")

    def derivative(self, x):
        if self.ux is not None:
            return self.ux(x)
        h = 1e-3 * self.L
        u = self.u
        return (u(x - 2 * h) - 8 * u(x - h) + 8 * u(x + h) - u(x + 2 * h)) / (12 * h)


@dataclass
class FloquetResult:
    E: complex
    T: np.ndarray
    delta: complex
    rho_pm: tuple

    @property
    def det(self):
        return complex(np.linalg.det(self.T))


def _sqrt_E(E):
    E = complex(E)
    if E == 0:
        raise ZeroEnergy("E = 0 is singular in the Lax problem")
    if E.imag == 0 and E.real < 0:
        E = complex(E.real, NEGATIVE_AXIS_OFFSET)
    return E, np.sqrt(E)


def _integrate(rhs, L):
    sol = solve_ivp(rhs, (0.0, L), np.eye(2, dtype=complex).ravel(), method="DOP853",
                    rtol=RTOL, atol=ATOL)
    if not sol.success:
        raise IntegratorTolExceeded(sol.message)
    return sol.y[:, -1].reshape(2, 2)


def transfer_matrix(pot, E, gauge=False):
    """Monodromy over ``[0, L]`` and ``Delta(E) = tr T``.

    ``gauge=True`` integrates the psi-system and conjugates back to the phi frame.
    Negative real ``E`` is moved to ``E + 1e-9 i``.
    """
    E, s = _sqrt_E(E)
    a = 1.0 / (16 * s)

    if not gauge:
        def rhs(x, y):
            u = pot.u(x)
            w = 0.25j * (pot.v(x) + pot.derivative(x))
            M = np.array([[np.exp(1j * u) * a - s, w], [w, np.exp(-1j * u) * a - s]])
            return (_J @ M @ y.reshape(2, 2)).ravel()
        T = _integrate(rhs, pot.L)
    else:
        def rhs(x, y):
            u = pot.u(x)
            v = pot.v(x)
            p, m = np.exp(0.5j * u), np.exp(-0.5j * u)
            A = np.array([[-0.25j * v, -(m * a - s * p)], [p * a - s * m, 0.25j * v]])
            return (A @ y.reshape(2, 2)).ravel()
        Tpsi = _integrate(rhs, pot.L)
        G = lambda x: np.diag([np.exp(0.25j * pot.u(x)), np.exp(-0.25j * pot.u(x))])
        T = np.linalg.inv(G(pot.L)) @ Tpsi @ G(0.0)
    det = np.linalg.det(T)
    if abs(det - 1) > 1e-8:
        raise IntegratorTolExceeded(f"det T - 1 = {abs(det - 1):.2e}")
    rho = np.linalg.eigvals(T)
    return FloquetResult(E, T, complex(np.trace(T)), (complex(rho[0]), complex(rho[1])))


def free_discriminant(E, L):
    """``Delta(E) = 2 cos(L (sqrt E - 1/(16 sqrt E)))`` for ``u = v = 0``."""
    E, s = _sqrt_E(E)
    return complex(2 * np.cos(L * (s - 1 / (16 * s))))


def verify_spectral_symmetry(pot, E_samples):
    """Max over samples of ``|Delta(1/(256 E)) - (-1)^M Delta(E)|``."""
    if pot.parity is None:
        raise ParityUntagged("the symmetry needs an even or odd potential")
    sign = (-1) ** pot.M
    rows = []
    for E in E_samples:
        E = _sqrt_E(E)[0]
        d1 = transfer_matrix(pot, E).delta
        d2 = transfer_matrix(pot, SPECTRAL_SCALE / E).delta
        rows.append((E, d1, d2, abs(d2 - sign * d1)))
    return {"max_defect": max(r[3] for r in rows), "sign": sign, "rows": rows}


def scan(pot, E_samples):
    """Rows ``(E, Delta(E), defect)``; the defect column needs a parity tag, else NaN."""
    out = []
    for E in E_samples:
        E = _sqrt_E(E)[0]
        d1 = transfer_matrix(pot, E).delta
        if pot.parity is None:
            defect = np.nan
        else:
            d2 = transfer_matrix(pot, SPECTRAL_SCALE / E).delta
            defect = abs(d2 - (-1) ** pot.M * d1)
        out.append((E, d1, defect))
    return out


# ------------------------------------------------------ test potentials


def even_potential(a=0.3, L=2.0):
    """``4 atan(a cos(2 pi x/L))``, M = 0."""
    q = 2 * np.pi / L
    return PeriodicPotential(
        lambda x: 4 * np.arctan(a * np.cos(q * x)), L, 0,
        ux=lambda x: -4 * a * q * np.sin(q * x) / (1 + (a * np.cos(q * x)) ** 2), parity="even")


def odd_potential(eps=0.2, L=2.0):
    """``2 pi x/L + eps sin(2 pi x/L)``, M = 1."""
    q = 2 * np.pi / L
    return PeriodicPotential(lambda x: q * x + eps * np.sin(q * x), L, 1,
                             ux=lambda x: q + eps * q * np.cos(q * x), parity="odd")


def free_potential(L=2.0):
    return PeriodicPotential(_zero, L, 0, ux=_zero, parity="even")


def _elliptic_potential(k, a, beta, shifted):
    """``4 atan(a nd(beta x; k))`` (shifted) or ``4 atan(a sc(beta x; k))`` (unshifted)."""
    m = Modulus.from_k(k)
    K = float(complete_K(m))
    L = 2 * K / beta
    kk = float(k)
    if shifted:
        def u(x):
            return 4 * np.arctan(a * jacobi_elliptic(beta * np.asarray(x, float), kk).nd())

        def ux(x):
            j = jacobi_elliptic(beta * np.asarray(x, float), kk)
            nd = 1 / j.dn
            return 4 * a * beta * kk ** 2 * j.sn * j.cn * nd ** 2 / (1 + (a * nd) ** 2)
        return PeriodicPotential(u, L, 0, ux=ux, parity="even")

    def u(x):
        X = beta * np.asarray(x, float)
        j = jacobi_elliptic(X, kk)
        th = np.arctan2(a * j.sn, j.cn)
        return 4 * (th + 2 * np.pi * np.round((0.5 * np.pi * X / K - th) / (2 * np.pi)))

    def ux(x):
        j = jacobi_elliptic(beta * np.asarray(x, float), kk)
        return 4 * a * beta * j.dn / (j.cn ** 2 + (a * j.sn) ** 2)
    return PeriodicPotential(u, L, 2, ux=ux, parity="odd")


def imaginary_shift_check(k=0.5, a=0.3, beta=1.0, x0=None, E_samples=None, x_probe=None):
    """Spectral symmetry for ``4 atan(-i a sc(beta x + x0; k))`` with ``x0 = iK'`` (or 0).

    ``sc(u + iK') = i nd(u)``, so with ``x0 = iK'`` the potential is
    ``4 atan(a nd(beta x; k))``; the report gives
    the pointwise gap between the shifted ``sc`` and ``nd`` and the symmetry defect.
    ``x0 = 0`` is the unshifted odd ``4 atan(a sc(beta x; k))`` potential.
    """
    Kp = float(complete_K_prime(Modulus.from_k(k)))
    if x0 is None:
        x0 = 1j * Kp
    x0 = complex(x0)
    if E_samples is None:
        E_samples = default_E_samples(10)
    if x_probe is None:
        x_probe = np.linspace(-1.0, 1.0, 11)
    if x0 == 0:
        pot = _elliptic_potential(k, a, beta, shifted=False)
        return {"pointwise": 0.0, **verify_spectral_symmetry(pot, E_samples)}
    if abs(x0 - 1j * Kp) > 1e-12 * Kp:
        raise AnalyticContinuationUnavailable("only x0 = 0 or x0 = iK' give a real potential")
    shifted = -1j * jacobi_elliptic(beta * x_probe + x0, Modulus.from_k(k)).sc()
    direct = jacobi_elliptic(beta * x_probe, float(k)).nd()
    pointwise = float(np.abs(shifted - direct).max())
    pot = _elliptic_potential(k, a, beta, shifted=True)
    return {"pointwise": pointwise, **verify_spectral_symmetry(pot, E_samples)}


def default_E_samples(n=20, seed=0):
    """Reproducible mix of positive, negative and complex energies away from 0."""
    rng = np.random.default_rng(seed)
    mag = 10 ** rng.uniform(-2.5, 0.0, n)
    ang = rng.choice([0.0, np.pi, 0.5, 2.0, -1.0], n)
    return [complex(m * np.exp(1j * p)) for m, p in zip(mag, ang)]
