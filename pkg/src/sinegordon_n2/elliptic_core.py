"""Complete elliptic integrals, Jacobi elliptic functions and theta functions.

Conventions
-----------
* Theta functions use the nome ``q = exp(i*pi*tau)`` and the argument
  convention ``theta3(z|tau) = sum_n q**(n**2) * exp(2*pi*i*n*z)``, so that
  ``theta(z + 1) = theta(z)`` for theta3/theta4.
* A real modulus ``k > 1`` is continued from ``Im k > 0``. With that choice
  ``k' = -i*sqrt(k**2 - 1)`` and ``K(1/k) = k*(K(k) + i*K'(k))``.
* For real ``0 <= k <= 1`` the Jacobi functions of a real argument come from
  the Cephes AGM routine in :func:`scipy.special.ellipj`; complex arguments use
  the addition theorem on ``(Re u, i Im u)``. Any other modulus goes through
  theta quotients with ``tau = i K'/K``.
"""
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import NonConvergent, PoleEncountered, SingularModulus

POLE_TOL = 1e-12
_SING_TOL = 1e-15


def _is_real_unit(k):
    k = np.asarray(k)
    if np.iscomplexobj(k):
        if np.any(k.imag != 0):
            return False
        k = k.real
    return bool(np.all((k >= 0) & (k <= 1)))


def _kprime(k):
    """Complementary modulus with the ``Im k -> 0+`` convention for real k > 1."""
    k = np.asarray(k, dtype=complex)
    kp = np.sqrt(1 - k * k)
    real_big = (k.imag == 0) & (np.abs(k.real) > 1)
    if np.any(real_big):
        kp = np.where(real_big, -1j * np.sign(k.real) * np.sqrt(k.real ** 2 - 1 + 0j), kp)
    return kp


@dataclass(frozen=True)
class Modulus:
    """Elliptic modulus together with its complement."""

    k: complex
    kprime: complex

    def __post_init__(self):
        if abs(self.k ** 2 + self.kprime ** 2 - 1) > 1e-12 * max(1.0, abs(self.k) ** 2):
            raise ValueError("k**2 + kprime**2 != 1")

    @classmethod
    def from_k(cls, k):
        k = complex(k)
        if k.imag == 0 and 0 <= k.real <= 1:
            return cls(k.real, float(np.sqrt(1 - k.real ** 2)))
        return cls(k, complex(_kprime(k)))

    @property
    def m(self):
        return self.k ** 2

    @property
    def is_real_unit(self):
        return _is_real_unit(self.k)

    def complement(self):
        return Modulus(self.kprime, self.k)


def _as_k(k):
    if isinstance(k, Modulus):
        return k.k, k.kprime
    return k, None


def agm(a, b, maxiter=80):
    """Complex arithmetic-geometric mean with the "right" choice of root.

    Each step takes the square root with ``|a_n - b_n| <= |a_n + b_n|``, which
    gives the principal value of ``K`` off the cuts.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    for _ in range(maxiter):
        a1 = 0.5 * (a + b)
        b1 = np.sqrt(a * b)
        flip = np.abs(a1 - b1) > np.abs(a1 + b1)
        b1 = np.where(flip, -b1, b1)
        a, b = a1, b1
        if np.all(np.abs(a - b) <= 4e-16 * np.abs(a)):
            return 0.5 * (a + b)
    raise NonConvergent("AGM did not converge")


def complete_K(k):
    """Quarter period ``K(k)`` by the AGM, ``K = pi / (2 agm(1, k'))``.

    ``k`` may be a :class:`Modulus`, a scalar or an array. For a real
    ``k`` in (0, 1) the result is real.
    """
    k, kp = _as_k(k)
    k = np.asarray(k, dtype=complex)
    if np.any(np.abs(np.abs(k.real) - 1) + np.abs(k.imag) < _SING_TOL):
        raise SingularModulus(f"K(k) diverges at k = +-1 (k = {k})")
    if kp is None:
        kp = _kprime(k)
    val = np.pi / (2 * agm(1.0, kp))
    if _is_real_unit(k):
        val = val.real
    return val if val.ndim else val[()]


def complete_K_prime(k):
    """``K'(k) = K(k')``."""
    k, kp = _as_k(k)
    if kp is None:
        kp = _kprime(k)
    kp = np.asarray(kp, dtype=complex)
    k = np.asarray(k, dtype=complex)
    if np.any(np.abs(k) < _SING_TOL):
        raise SingularModulus("K'(k) diverges at k = 0")
    val = np.pi / (2 * agm(1.0, k))
    if _is_real_unit(k):
        val = val.real
    return val if val.ndim else val[()]


def complete_K_m(m):
    """``K`` as a function of the parameter ``m = k**2``, principal branch."""
    m = np.asarray(m, dtype=complex)
    if np.any(np.abs(m - 1) < _SING_TOL):
        raise SingularModulus("K(m) diverges at m = 1")
    val = np.pi / (2 * agm(1.0, np.sqrt(1 - m)))
    return val if val.ndim else val[()]


def complete_K_identities(k):
    """Residuals of ``K'(1/k) = k K'(k)`` and ``K(1/k) = k (K(k) + i K'(k))``."""
    K = complete_K(k)
    Kp = complete_K_prime(k)
    inv = Modulus.from_k(1 / k)
    return {
        "Kprime_reciprocal": abs(complete_K_prime(inv) - k * Kp),
        "K_reciprocal": abs(complete_K(inv) - k * (K + 1j * Kp)),
    }


# ---------------------------------------------------------------- theta


def _theta_terms(tau, zimag):
    """Symmetric truncation N with dropped terms below 1e-17 of the leading one."""
    im_tau = np.min(np.imag(tau))
    if im_tau <= 0:
        raise NonConvergent(f"theta series needs Im(tau) > 0, got {im_tau}")
    zmax = float(np.max(np.abs(zimag))) if np.size(zimag) else 0.0
    # pi*Im(tau)*n**2 - 2*pi*n*|Im z| > 40 for all n > N
    a = np.pi * im_tau
    b = 2 * np.pi * zmax
    n = (b + np.sqrt(b * b + 4 * a * 40.0)) / (2 * a)
    return int(np.ceil(n)) + 2


def jacobi_theta(j, z, tau):
    """Jacobi theta function ``theta_j(z | tau)``, vectorised over ``z`` and ``tau``."""
    z = np.asarray(z, dtype=complex)
    tau = np.asarray(tau, dtype=complex)
    z, tau = np.broadcast_arrays(z, tau)
    N = _theta_terms(tau, z.imag)
    n = np.arange(-N, N + 1).reshape((-1,) + (1,) * z.ndim)
    if j in (3, 4):
        expo = 1j * np.pi * tau * n ** 2 + 2j * np.pi * n * z
        if j == 4:
            expo = expo + 1j * np.pi * n
        val = np.exp(expo).sum(axis=0)
    elif j in (1, 2):
        h = n + 0.5
        expo = 1j * np.pi * tau * h ** 2 + 2j * np.pi * h * z
        if j == 1:
            val = -1j * (np.where(n % 2 == 0, 1.0, -1.0) * np.exp(expo)).sum(axis=0)
        else:
            val = np.exp(expo).sum(axis=0)
    else:
        raise ValueError("theta index must be 1..4")
    return val if val.ndim else val[()]


def theta_nulls(tau):
    """``(theta2(0), theta3(0), theta4(0))`` at ``tau``."""
    return tuple(jacobi_theta(j, 0.0, tau) for j in (2, 3, 4))


def modulus_from_tau(tau):
    """Modulus ``k = theta2^2/theta3^2``, ``k' = theta4^2/theta3^2``."""
    t2, t3, t4 = theta_nulls(tau)
    k = t2 ** 2 / t3 ** 2
    kp = t4 ** 2 / t3 ** 2
    if np.ndim(k) == 0:
        if abs(k.imag) < 1e-15 * max(1.0, abs(k)) and abs(kp.imag) < 1e-15 * max(1.0, abs(kp)):
            return Modulus(float(k.real), float(kp.real))
        return Modulus(complex(k), complex(kp))
    return k, kp


def quarter_period_from_tau(tau):
    """``K(k(tau)) = (pi/2) theta3(0|tau)^2``."""
    return 0.5 * np.pi * jacobi_theta(3, 0.0, tau) ** 2


def tau_from_modulus(k):
    """``tau = i K'(k)/K(k)`` with the same branch conventions as :func:`complete_K`."""
    return 1j * complete_K_prime(k) / complete_K(k)


def riemann_theta(l, B, alpha=(0.0, 0.0), beta=(0.0, 0.0)):
    """Genus-2 theta with characteristic, summed over a box in Z^2.

    ``Theta[alpha; beta](l | B) = sum_k exp(i pi (k+alpha).B.(k+alpha)
    + 2 pi i (k+alpha).(l+beta))``. ``l`` has shape ``(2, ...)``.
    """
    B = np.asarray(B, dtype=complex)
    l = np.asarray(l, dtype=complex)
    shape = l.shape[1:]
    l = l.reshape(2, -1)
    lam = np.linalg.eigvalsh(B.imag).min()
    if lam <= 0:
        raise NonConvergent("Im(B) is not positive definite")
    # a shift of the lattice centre cancels the linear growth from Im l
    centre = -np.linalg.solve(B.imag, l.imag)
    c0 = np.round(centre).astype(int)
    spread = np.abs(centre - c0).max() if centre.size else 0.0
    N = int(np.ceil(np.sqrt(40.0 / (np.pi * lam)) + spread)) + 2
    r = np.arange(-N, N + 1)
    K1, K2 = np.meshgrid(r, r, indexing="ij")
    K1 = K1.ravel()[:, None] + c0[0][None, :] + alpha[0]
    K2 = K2.ravel()[:, None] + c0[1][None, :] + alpha[1]
    quad = B[0, 0] * K1 ** 2 + 2 * B[0, 1] * K1 * K2 + B[1, 1] * K2 ** 2
    lin = K1 * (l[0] + beta[0]) + K2 * (l[1] + beta[1])
    val = np.exp(1j * np.pi * quad + 2j * np.pi * lin).sum(axis=0)
    return val.reshape(shape) if shape else val[0]


# ---------------------------------------------------------------- Jacobi


@dataclass(frozen=True)
class JacobiTriple:
    """``sn, cn, dn`` at an argument ``u``; ratios are exposed as methods."""

    u: object
    sn: object
    cn: object
    dn: object

    def _ratio(self, name, num, den):
        den = np.asarray(den)
        bad = np.abs(den) < POLE_TOL
        if np.any(bad):
            loc = np.asarray(self.u)[bad] if np.ndim(self.u) else self.u
            raise PoleEncountered(name, loc if np.ndim(loc) == 0 else loc.ravel()[0])
        return num / den

    def sc(self):
        return self._ratio("sc", self.sn, self.cn)

    def nc(self):
        return self._ratio("nc", 1.0, self.cn)

    def nd(self):
        return self._ratio("nd", 1.0, self.dn)

    def sd(self):
        return self._ratio("sd", self.sn, self.dn)

    def dc(self):
        return self._ratio("dc", self.dn, self.cn)

    def cd(self):
        return self._ratio("cd", self.cn, self.dn)

    def cs(self):
        return self._ratio("cs", self.cn, self.sn)

    def ns(self):
        return self._ratio("ns", 1.0, self.sn)

    def ds(self):
        return self._ratio("ds", self.dn, self.sn)


def _ellipj_real(u, m):
    sn, cn, dn, _ = special.ellipj(u, m)
    return sn, cn, dn


def _jacobi_real_modulus(u, k):
    u = np.asarray(u)
    m = np.real(np.asarray(k)) ** 2
    if not np.iscomplexobj(u) or np.all(np.imag(u) == 0):
        return _ellipj_real(np.real(u), m)
    x, y = u.real, u.imag
    s, c, d = _ellipj_real(x, m)
    s1, c1, d1 = _ellipj_real(y, 1 - m)
    den = c1 ** 2 + m * s ** 2 * s1 ** 2
    sn = (s * d1 + 1j * c * d * s1 * c1) / den
    cn = (c * c1 - 1j * s * d * s1 * d1) / den
    dn = (d * c1 * d1 - 1j * m * s * c * s1) / den
    return sn, cn, dn


def _jacobi_theta_route(u, k):
    u = np.asarray(u, dtype=complex)
    k = np.asarray(k, dtype=complex)
    u, k = np.broadcast_arrays(u, k)
    tau = tau_from_modulus(k)
    tau = np.asarray(tau, dtype=complex)
    if np.any(tau.imag <= 0):
        raise NonConvergent("modulus has no tau in the upper half plane")
    t2, t3, t4 = theta_nulls(tau)
    lam = t2 ** 4 / t3 ** 4
    if np.any(np.abs(lam - k ** 2) > 1e-9 * np.maximum(1.0, np.abs(k) ** 2)):
        raise NonConvergent("tau(k) inversion failed for complex modulus")
    v = u / (np.pi * t3 ** 2)
    # all three functions have periods 4K and 4iK', i.e. v -> v + 2, v + 2 tau
    n = np.round(v.imag / (2 * tau.imag))
    v = v - 2 * n * tau
    v = v - 2 * np.round(v.real / 2)
    th1, th2, th3, th4 = (jacobi_theta(j, v, tau) for j in (1, 2, 3, 4))
    sn = t3 / t2 * th1 / th4
    cn = t4 / t2 * th2 / th4
    dn = t4 / t3 * th3 / th4
    return sn, cn, dn


def jacobi_elliptic(u, k):
    """Jacobi ``sn, cn, dn`` of complex argument ``u`` and modulus ``k``.

    Returns a :class:`JacobiTriple`; ratio functions (``sc``, ``nc``, ``nd``,
    ``sd``, ``dc`` ...) raise :class:`PoleEncountered` at poles.
    """
    k, _ = _as_k(k)
    if _is_real_unit(k):
        sn, cn, dn = _jacobi_real_modulus(u, k)
    else:
        sn, cn, dn = _jacobi_theta_route(u, k)
    return JacobiTriple(u, sn, cn, dn)


def reciprocal_modulus_map(u, k):
    """Residuals of the shift and reciprocal-modulus identities at ``(u, k)``.

    Each residual is ``|lhs - rhs| / max(1, |rhs|)``. Keys:
    ``dn_shift``  dn(u+K+iK', k) = i k' sc(u, k)
    ``cn_shift``  cn(u+K+iK', k) = -(i k'/k) nc(u, k)
    ``dn_recip``  dn(k u, 1/k) = cn(u, k)
    ``cn_recip``  cn(k u, 1/k) = dn(u, k)
    ``sc_recip``  k sc(u, k) = sd(k u, 1/k)
    ``cn_half``   cn(u+K, k) = -k' sd(u, k)
    """
    k, _ = _as_k(k)
    kr = np.real(np.asarray(k))
    if np.iscomplexobj(k) and np.any(np.imag(k) != 0) or np.any((kr <= 0) | (kr >= 1)):
        raise ValueError("reciprocal_modulus_map needs real 0 < k < 1")
    u = np.asarray(u)
    kp = np.sqrt(1 - kr ** 2)
    K = complete_K(kr)
    Kp = complete_K_prime(kr)
    base = jacobi_elliptic(u, kr)
    shifted = jacobi_elliptic(u + K + 1j * Kp, kr)
    half = jacobi_elliptic(u + K, kr)
    recip = jacobi_elliptic(kr * u, 1 / kr)

    def res(lhs, rhs):
        return np.abs(lhs - rhs) / np.maximum(1.0, np.abs(rhs))

    return {
        "dn_shift": res(shifted.dn, 1j * kp * base.sc()),
        "cn_shift": res(shifted.cn, -1j * kp / kr * base.nc()),
        "dn_recip": res(recip.dn, base.cn),
        "cn_recip": res(recip.cn, base.dn),
        "sc_recip": res(recip.sd(), kr * base.sc()),
        "cn_half": res(half.cn, -kp * base.sd()),
    }
