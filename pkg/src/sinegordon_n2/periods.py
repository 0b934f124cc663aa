"""Cycle integrals of ``dI = dE/R`` and ``dJ = E dE/R`` and the theta data built from them.

``R^2(E) = E prod_j (E - E_j)``. The x-flow and t-flow combinations are
``X = I + 16 J`` and ``T = I - 16 J``.

Kink spectra are real, so every cycle is a signed sum of real-axis segments
``L0 = (-inf, E4), L1 = (E4, E3), L2 = (E3, E2), L3 = (E2, E1), L4 = (E1, 0)``
and ``L5 = (0, inf)``, each integrated on the upper bank of the cuts.
Breather periods come from the kink ones by analytic continuation of the
reduced elliptic integrals in ``z = (E + 1/(256 E))/2``, followed by a
lattice normalisation.
"""
import json
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import integrate

from .elliptic_core import complete_K_m
from .errors import BranchTrackingFailure, CaseMismatch, QuadratureNoConvergence
from .spectral_curve import Case, CurveData, Kind, Spectrum, curve_data

QUAD_EPSREL = 1e-13
QUAD_LIMIT = 200
DEFAULT_C_MAX = 100.0

# cycle -> {segment index: coefficient}
CASE_A_ROUTES = {
    "a1": {3: 2}, "a2": {1: 2}, "b1": {4: 2}, "b2": {0: -2},
}
CASE_B_ROUTES = {
    "a1": {1: 2, 2: 2, 3: 2}, "a2": {2: -2}, "b1": {4: 2}, "b2": {3: 2, 4: 2},
}
# equivalent loops for the Case (b) b-cycles, used on the J side of the
# b-cycle relations; they are images of the primary routes under E -> 1/(256E)
CASE_B_EQUIVALENT = {"b1": {0: -2}, "b2": {0: -2, 1: -2}}
# Case (a) combinations spanning the primed Landen basis
PRIMED_FROM_CASE_A = {
    "a1": {"a1": 2}, "a2": {"a1": -1, "a2": 1}, "b1": {"b1": 1, "b2": 1}, "b2": {"b2": 2},
}


def routes_for(case):
    return CASE_A_ROUTES if Case(case) is Case.A else CASE_B_ROUTES


# ------------------------------------------------------------ quadrature


def _segment_nodes(points):
    E1, E2, E3, E4 = (p.real for p in points)
    return [-np.inf, E4, E3, E2, E1, 0.0, np.inf]


def _quad(f, a, b):
    val, err, info = integrate.quad(f, a, b, epsabs=0.0, epsrel=QUAD_EPSREL,
                                    limit=QUAD_LIMIT, full_output=1)[:3]
    if err > 1e-10 * max(abs(val), 1e-300):
        raise QuadratureNoConvergence(f"quad error estimate {err:.3g} for value {val:.6g}")
    return val


def segment_integrals(curve, index):
    """``(I, J)`` over segment ``L_index`` on the upper bank.

    On the upper bank ``R = sqrt|R^2| * i**n`` where ``n`` counts negative
    factors among ``E, E - E_j``. Endpoint square-root singularities are
    removed by ``E = mid + half*sin(theta)``; the segment to ``-inf`` uses
    ``E = -1/s`` then ``s = s4 sin^2(theta)``; the segment to ``+inf`` uses
    ``E = t^2``.
    """
    if curve.spectrum.kind is not Kind.KINK:
        raise CaseMismatch("segment quadrature needs a real (kink) spectrum")
    pts = np.array([p.real for p in curve.spectrum.points])
    nodes = _segment_nodes(curve.spectrum.points)
    a, b = nodes[index], nodes[index + 1]
    probe = 0.5 * (a + b) if np.isfinite(a) and np.isfinite(b) else (
        b - 1.0 if not np.isfinite(a) else a + 1.0)
    n_neg = int(probe < 0) + int(np.sum(probe - pts < 0))
    r2 = curve.R_squared(probe)
    if abs(r2.imag) > 1e-12 * abs(r2) or np.sign(r2.real) != (-1) ** n_neg:
        raise BranchTrackingFailure(f"sign of R^2 inconsistent on segment L{index}")
    phase = 1j ** (-n_neg)

    if np.isfinite(a) and np.isfinite(b):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        others = [q for q in np.append(pts, 0.0) if q != a and q != b]

        def g(th, p):
            E = mid + half * np.sin(th)
            rest = np.prod([abs(E - q) for q in others])
            # |E-a||E-b| = half^2 cos^2(th) cancels the Jacobian half*cos(th)
            return E ** p / np.sqrt(rest)

        lo, hi = -0.5 * np.pi, 0.5 * np.pi
        I = _quad(lambda th: g(th, 0), lo, hi)
        J = _quad(lambda th: g(th, 1), lo, hi)
    elif not np.isfinite(a):
        s4 = -1.0 / b
        others = [p for p in pts if p != b]

        def rest(th):
            s = s4 * np.sin(th) ** 2
            return np.sqrt(np.prod([abs(1 + q * s) for q in others]))

        # dE/sqrt|R^2| = s^(1/2) ds / sqrt(prod |1 + E_j s|); E dE/... adds -1/s
        I = _quad(lambda th: 2 * s4 ** 1.5 * np.sin(th) ** 2 / rest(th), 0.0, 0.5 * np.pi)
        J = _quad(lambda th: -2 * np.sqrt(s4) / rest(th), 0.0, 0.5 * np.pi)
    else:
        def g(t, p):
            E = t * t
            return 2 * E ** p / np.sqrt(np.prod([abs(E - q) for q in pts]))

        I = _quad(lambda t: g(t, 0), 0.0, np.inf)
        J = _quad(lambda t: g(t, 1), 0.0, np.inf)
    return phase * I, phase * J


def all_segment_integrals(curve):
    """``{index: (I, J)}`` for the six real-axis segments, in fixed order."""
    return {i: segment_integrals(curve, i) for i in range(6)}


def route_integral(segs, route):
    I = sum(c * segs[i][0] for i, c in sorted(route.items()))
    J = sum(c * segs[i][1] for i, c in sorted(route.items()))
    return complex(I), complex(J)


def cycle_integral(differential, cycle, curve, route="primary", segments=None):
    """Closed-loop integral of ``dI``, ``dJ``, ``X`` or ``T`` over a kink cycle.

    ``cycle`` is ``a1, a2, b1, b2``, optionally prefixed with ``-`` to reverse
    orientation. ``route="equivalent"`` selects the Case (b) equivalent b-loops.
    """
    sign = 1
    if cycle.startswith("-"):
        sign, cycle = -1, cycle[1:]
    case = curve.spectrum.case
    table = routes_for(case)
    if route == "equivalent":
        if case is not Case.B or cycle not in CASE_B_EQUIVALENT:
            raise CaseMismatch("equivalent loops exist only for the Case (b) b-cycles")
        table = CASE_B_EQUIVALENT
    if cycle not in table:
        raise ValueError(f"unknown cycle {cycle!r}")
    segs = segments if segments is not None else all_segment_integrals(curve)
    I, J = route_integral(segs, table[cycle])
    vals = {"dI": I, "dJ": J, "X": I + 16 * J, "T": I - 16 * J}
    return sign * vals[differential]


# -------------------------------------------------- reduced z-integrals


def reduced_periods(z1, z2, e):
    """Periods ``(w, w')`` of ``-16 dz / sqrt(2 (z - e)(z - z1)(z - z2))``.

    ``w = -32 sqrt(2) K(m)/sqrt(e - z1)`` and ``w' = i(-32 sqrt(2)) K(1-m)/sqrt(e - z1)``
    with ``m = (z2 - z1)/(e - z1)``. Valid for complex ``z1, z2``; a
    different branch only changes the basis, not the lattice it spans.
    """
    m = (z2 - z1) / (e - z1)
    s = np.sqrt(complex(e - z1))
    c = -32 * np.sqrt(2)
    return complex(c * complete_K_m(m) / s), complex(1j * c * complete_K_m(1 - m) / s)


def normalize_real_basis(w, wp, search=3):
    """Reduce the lattice ``Z w + Z w'`` to a basis ``(w_r, w_r tau)``.

    ``w_r`` is the shortest real lattice vector (made negative), ``tau`` has
    ``Im tau > 0`` and ``Re tau`` in ``{0, 1/2}``. Returns ``(w_r, w_r*tau, tau)``.
    """
    best = None
    for n in range(-search, search + 1):
        for m in range(-search, search + 1):
            if np.gcd(n, m) != 1:
                continue
            v = n * w + m * wp
            if abs(v.imag) < 1e-9 * abs(v) and (best is None or abs(v) < abs(best[0]) * (1 - 1e-9)):
                best = (v, n, m)
    if best is None:
        raise BranchTrackingFailure("period lattice has no short real vector")
    v, n, m = best
    v = complex(v.real, 0.0)
    w2 = None
    for p in range(-search - 1, search + 2):
        for q in range(-search - 1, search + 2):
            if n * q - m * p == 1:
                w2 = p * w + q * wp
                break
        if w2 is not None:
            break
    tau = w2 / v
    tau = tau - np.floor(tau.real + 0.5 + 1e-9)
    if abs(tau.real + 0.5) < 1e-9:
        tau += 1
    if tau.imag < 0:
        tau = -tau
    if abs(tau.real) < 1e-9:
        tau = complex(0.0, tau.imag)
    elif abs(tau.real - 0.5) < 1e-9:
        tau = complex(0.5, tau.imag)
    if v.real > 0:
        v = -v
    return v, v * tau, tau


# ---------------------------------------------------------- CyclePeriods


@dataclass
class CyclePeriods:
    """Cycle integrals over ``a1, a2, b1, b2`` and the derived elliptic data."""

    case: str
    kind: str
    I_a1: complex
    I_a2: complex
    I_b1: complex
    I_b2: complex
    J_a1: complex
    J_a2: complex
    J_b1: complex
    J_b2: complex
    w_plus: complex
    w_minus: complex
    w_plus_prime: complex
    w_minus_prime: complex
    tau_plus: complex
    tau_minus: complex
    w_det: complex
    J_equivalent: dict = field(default_factory=dict)
    segments: dict = field(default_factory=dict)

    def I(self, cyc):
        return self._combo("I", cyc)

    def J(self, cyc):
        return self._combo("J", cyc)

    def X(self, cyc):
        return self.I(cyc) + 16 * self.J(cyc)

    def T(self, cyc):
        return self.I(cyc) - 16 * self.J(cyc)

    def _combo(self, which, cyc):
        if isinstance(cyc, str):
            cyc = {cyc: 1}
        return sum(c * getattr(self, f"{which}_{name}") for name, c in cyc.items())

    def J_route(self, cyc):
        """J over the Case (b) equivalent loops (b1, b2 and combinations)."""
        if isinstance(cyc, str):
            cyc = {cyc: 1}
        return sum(c * self.J_equivalent[name] for name, c in cyc.items())

    def to_dict(self):
        d = asdict(self)
        d["segments"] = {str(k): v for k, v in self.segments.items()}

        def enc(x):
            if isinstance(x, complex):
                return [x.real, x.imag]
            if isinstance(x, dict):
                return {k: enc(v) for k, v in x.items()}
            if isinstance(x, (list, tuple)):
                return [enc(v) for v in x]
            return x

        return enc(d)

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def _assemble(case, kind, XT, w, J_equiv=None, segments=None):
    I = {c: complex(0.5 * (x + t)) for c, (x, t) in XT.items()}
    J = {c: complex((x - t) / 32) for c, (x, t) in XT.items()}
    wp, wm, wpp, wmp = w
    return CyclePeriods(
        case=case, kind=kind,
        I_a1=I["a1"], I_a2=I["a2"], I_b1=I["b1"], I_b2=I["b2"],
        J_a1=J["a1"], J_a2=J["a2"], J_b1=J["b1"], J_b2=J["b2"],
        w_plus=complex(wp), w_minus=complex(wm),
        w_plus_prime=complex(wpp), w_minus_prime=complex(wmp),
        tau_plus=complex(wpp / wp), tau_minus=complex(wmp / wm),
        w_det=complex(I["a1"] * J["a2"] - I["a2"] * J["a1"]),
        J_equivalent=J_equiv or {}, segments=segments or {},
    )


def _case_w(case, XT):
    """``(w+, w-, w+', w-')`` from cycle X/T values."""
    X = {c: v[0] for c, v in XT.items()}
    T = {c: v[1] for c, v in XT.items()}
    if case is Case.A:
        return X["a1"], T["a1"], X["b1"], T["b1"]
    # Case (b): the T-lattice has the roles of a- and b-cycles exchanged
    return (0.5 * (X["a1"] + X["a2"]), 0.5 * (T["b2"] - T["b1"]),
            0.5 * X["b1"], 0.5 * T["a2"])


def synthesized_cycles(case, w):
    """Cycle X/T values implied by ``(w+, w-, w+', w-')``.

    These are the linear relations the kink quadrature satisfies; for
    breathers they define the cycle integrals of the normalised basis.
    """
    wp, wm, wpp, wmp = w
    if Case(case) is Case.A:
        return {"a1": (wp, wm), "a2": (wp, -wm), "b1": (wpp, wmp), "b2": (wpp, -wmp)}
    return {"a1": (2 * wp, -2 * wmp), "a2": (0.0, 2 * wmp), "b1": (2 * wpp, wmp),
            "b2": (wp + 2 * wpp, 2 * wm + wmp)}


def reduced_w(spectrum):
    """``(w+, w-, w+', w-')`` from the reduced z-integrals (no normalisation)."""
    curve = curve_data(spectrum)
    z1, z2 = curve.z_points
    if spectrum.kind is Kind.BREATHER and spectrum.case is Case.B:
        z1, z2 = complex(z1.real, 0.0), complex(z2.real, 0.0)
    wp, wpp = reduced_periods(z1, z2, 1 / 16)
    wm, wmp = reduced_periods(z1, z2, -1 / 16)
    if spectrum.case is Case.B:
        wpp, wm = wpp / 2, wm / 2
    return wp, wm, wpp, wmp


def compute_w(curve):
    """All cycle integrals and ``w+-, w+-', tau+-, w_det`` for a spectrum.

    Kinks: segment quadrature. Breathers: continued reduced integrals,
    normalised so that ``w+-`` are real and ``Re tau+-`` is 0 or 1/2.
    """
    if isinstance(curve, Spectrum):
        curve = curve_data(curve)
    spec = curve.spectrum
    case, kind = spec.case, spec.kind
    if kind is Kind.KINK:
        segs = all_segment_integrals(curve)
        table = routes_for(case)
        XT = {}
        for cyc, route in table.items():
            I, J = route_integral(segs, route)
            XT[cyc] = (I + 16 * J, I - 16 * J)
        J_equiv = {}
        if case is Case.B:
            J_equiv = {c: route_integral(segs, r)[1] for c, r in CASE_B_EQUIVALENT.items()}
        w = _case_w(case, XT)
        return _assemble(case.value, kind.value, XT, w, J_equiv, segs)
    wp, wm, wpp, wmp = reduced_w(spec)
    wp, wpp, _ = normalize_real_basis(wp, wpp)
    wm, wmp, _ = normalize_real_basis(wm, wmp)
    w = (wp, wm, wpp, wmp)
    XT = synthesized_cycles(case, w)
    J_equiv = {}
    if case is Case.B:
        # involution images of the primary b-routes, as on the kink curve
        Ib1 = 0.5 * sum(XT["b1"])
        Ib2 = 0.5 * sum(XT["b2"])
        J_equiv = {"b1": Ib1 / 16, "b2": (2 * Ib1 - Ib2) / 16}
    return _assemble(case.value, kind.value, XT, w, J_equiv)


# ------------------------------------------------------------ relations


def _rel(lhs, rhs):
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)


def period_relations(p):
    """Relative residuals of the cycle relations for the periods' case.

    Case (a): ``I(a1) = 16 J(a2)``, ``I(a2) = 16 J(a1)``, ``I(b1) = 16 J(b2)``,
    ``I(b2) = 16 J(b1)``.
    Case (b): ``I(a2) = -16 J(a2)``, ``I(a1+a2) = 16 J(a1+a2)``,
    ``I(b1) = 16 J(b1)``, ``I(b2-b1) = -16 J(b2-b1)`` (b-cycle J on the
    equivalent loops), plus the rearranged primed forms.
    """
    if Case(p.case) is Case.A:
        return {
            "I(a1)=16J(a2)": _rel(p.I("a1"), 16 * p.J("a2")),
            "I(a2)=16J(a1)": _rel(p.I("a2"), 16 * p.J("a1")),
            "I(b1)=16J(b2)": _rel(p.I("b1"), 16 * p.J("b2")),
            "I(b2)=16J(b1)": _rel(p.I("b2"), 16 * p.J("b1")),
        }
    a12 = {"a1": 1, "a2": 1}
    b21 = {"b2": 1, "b1": -1}
    a1_2a2 = {"a1": 1, "a2": 2}
    b1p = {"b1": 2, "b2": -1}
    return {
        "I(a2)=-16J(a2)": _rel(p.I("a2"), -16 * p.J("a2")),
        "I(a1+a2)=16J(a1+a2)": _rel(p.I(a12), 16 * p.J(a12)),
        "I(b1)=16J(b1)": _rel(p.I("b1"), 16 * p.J_route("b1")),
        "I(b2-b1)=-16J(b2-b1)": _rel(p.I(b21), -16 * p.J_route(b21)),
        "I(a1)=16J(a1+2a2)": _rel(p.I("a1"), 16 * p.J(a1_2a2)),
        "I(a1+2a2)=16J(a1)": _rel(p.I(a1_2a2), 16 * p.J("a1")),
        "I(2b1-b2)=16J(b2)": _rel(p.I(b1p), 16 * p.J_route("b2")),
        "I(b2)=16J(2b1-b2)": _rel(p.I("b2"), 16 * p.J_route(b1p)),
    }


def w_relations(p):
    """``w_det`` against ``I(a1)J(a2) - I(a2)J(a1)`` and, for Case (a), ``w+ w- / 16``."""
    out = {"w_det": _rel(p.w_det, p.I_a1 * p.J_a2 - p.I_a2 * p.J_a1)}
    if Case(p.case) is Case.A:
        out["w_det=w+w-/16"] = _rel(p.w_det, p.w_plus * p.w_minus / 16)
    return out


def primed_basis(periods_a):
    """Landen basis built from Case (a) cycles.

    ``a1' = 2 a1``, ``a2' = -a1 + a2``, ``b1' = b1 + b2``, ``b2' = 2 b2``.
    Returns ``(w', Iprime, Bprime)`` where ``Iprime`` is the l-coefficient
    matrix divided by ``iC`` and ``Bprime`` the Riemann matrix in this basis,
    ``[[tau+, tau+], [tau+, tau+ + tau-]]`` in Case (a) ``tau``.
    """
    if Case(periods_a.case) is not Case.A:
        raise CaseMismatch("the primed basis is built from Case (a) periods")
    P = {k: (periods_a.I(v), periods_a.J(v)) for k, v in PRIMED_FROM_CASE_A.items()}
    X = {k: I + 16 * J for k, (I, J) in P.items()}
    T = {k: I - 16 * J for k, (I, J) in P.items()}
    wdet = P["a1"][0] * P["a2"][1] - P["a2"][0] * P["a1"][1]
    Iprime = np.array([[T["a2"], X["a2"]], [-T["a1"], -X["a1"]]]) / (32 * wdet)
    M1 = np.array([[-X["b1"], T["b1"]], [-X["b2"], T["b2"]]])
    M2 = np.array([[T["a2"], -T["a1"]], [X["a2"], -X["a1"]]])
    Bprime = M1 @ M2 / (32 * wdet)
    return complex(wdet), Iprime, Bprime


def l_coeffs_direct(p, C):
    """The Case (a) l-coefficients from the ``1/(32 w)`` cycle formula."""
    X = {c: p.X(c) for c in ("a1", "a2")}
    T = {c: p.T(c) for c in ("a1", "a2")}
    return 1j * C / (32 * p.w_det) * np.array([[T["a2"], X["a2"]], [-T["a1"], -X["a1"]]])


def l_coeffs_inverse(p, C):
    """Same coefficients as ``-iC P^{-1} diag(1, -1)`` with ``P = [[X(a1), X(a2)], [T(a1), T(a2)]]``."""
    P = np.array([[p.X("a1"), p.X("a2")], [p.T("a1"), p.T("a2")]])
    return -1j * C * np.linalg.inv(P) @ np.diag([1.0, -1.0])


# ------------------------------------------------------------ theta data


def _Fa(a, b):
    return 0.5 * np.array([[a + b, a - b], [a - b, a + b]])


def _Fb(a, b):
    return np.array([[a, a], [a, a + b]])


@dataclass(frozen=True)
class ThetaParams:
    """``l(x, t) = l_coeffs @ (x, t) + l_offset`` and the Riemann matrix ``B``.

    ``alpha`` and ``beta`` give a theta characteristic (zero for three of the
    four families).
    """

    family: str
    l_coeffs: np.ndarray
    l_offset: np.ndarray
    B: np.ndarray
    C: float
    alpha: tuple = (0.0, 0.0)
    beta: tuple = (0.0, 0.0)

    def l(self, x, t):
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        x, t = np.broadcast_arrays(x, t)
        L = self.l_coeffs
        return np.stack([L[0, 0] * x + L[0, 1] * t + self.l_offset[0],
                         L[1, 0] * x + L[1, 1] * t + self.l_offset[1]])

    @property
    def is_breather(self):
        return self.family.startswith("breather")


def build_theta_params(spectrum, periods, C):
    """Theta data for the four families; ``spectrum`` supplies the case/kind tags.

    Case (a): ``B = F(tau+, tau-)`` with ``F = 1/2 [[a+b, a-b], [a-b, a+b]]``,
    ``l = (iC/2)(-x/w+ + t/w-, -x/w+ - t/w-)``; kinks add the offset (1/4, 1/4),
    breathers have ``Re B = diag(1/2, 1/2)``.
    Case (b) breather: ``B = diag(1/2, 1/2) + [[s, s], [s, s + d]]`` with
    ``s, d = i Im tau+, i Im tau-`` and ``l = (iC/2)(-x/w+, -x/w+ - t/w-)``.
    Case (b) kink: ``B = F(2 tau+, tau-/2)``, characteristic ``(1/2, -1/2)``,
    ``l = (1/4, 1/4) + (iC/2)(-x/w+ + t/(2w-), -x/w+ - t/(2w-))``.
    """
    case, kind = Case(spectrum.case), Kind(spectrum.kind)
    if (Case(periods.case), Kind(periods.kind)) != (case, kind):
        raise CaseMismatch(f"periods are {periods.kind}-{periods.case}, spectrum is {kind.value}-{case.value}")
    wp, wm = periods.w_plus.real, periods.w_minus.real
    tp, tm = periods.tau_plus, periods.tau_minus
    h = 0.5j * C
    family = f"{kind.value}-{case.value}"
    alpha = (0.0, 0.0)
    offset = np.zeros(2, dtype=complex)
    if case is Case.A:
        L = h * np.array([[-1 / wp, 1 / wm], [-1 / wp, -1 / wm]])
        if kind is Kind.KINK:
            B = _Fa(tp, tm)
            offset[:] = 0.25
        else:
            B = 0.5 * np.eye(2) + _Fa(1j * tp.imag, 1j * tm.imag)
    else:
        if kind is Kind.KINK:
            L = h * np.array([[-1 / wp, 0.5 / wm], [-1 / wp, -0.5 / wm]])
            B = _Fa(2 * tp, tm / 2)
            offset[:] = 0.25
            alpha = (0.5, -0.5)
        else:
            L = h * np.array([[-1 / wp, 0.0], [-1 / wp, -1 / wm]])
            B = 0.5 * np.eye(2) + _Fb(1j * tp.imag, 1j * tm.imag)
    B = 0.5 * (B + B.T)
    return ThetaParams(family, L.astype(complex), offset, B.astype(complex), float(C), alpha)


def calibrate_C(spectrum, periods, C_max=DEFAULT_C_MAX, threshold=1e-6):
    """Scale constant ``C`` minimising the closed-form solution's SG residual.

    Coarse scan of ``(0, C_max]`` then golden-section refinement of the best
    bracket. Raises :class:`CalibrationFailed` when the minimum residual stays
    above ``threshold``.
    """
    from .solutions import calibrate_scale

    return calibrate_scale(spectrum, periods, C_max=C_max, threshold=threshold)
