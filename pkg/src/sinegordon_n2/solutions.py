"""Closed-form and theta-function N=2 Sine-Gordon solutions.

Each family is ``u = 4 atan(A f(alpha x) g(beta t))`` with Jacobi ratio
functions whose moduli come from theta nulls at ``2 tau`` (Case (a)) or
``4 tau+``, ``tau-`` (Case (b)). Breathers use ``tau0 = i Im(tau)``.
Kinks are returned continuous (unwrapped through the poles of ``sc``).
Breathers are returned on the principal branch ``(-2 pi, 2 pi)``; the residual
checker differences modulo ``2 pi`` so the branch jump is harmless.
"""
import csv
import io
import json
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import optimize

from .elliptic_core import (Modulus, complete_K, jacobi_elliptic, jacobi_theta,
                            modulus_from_tau, quarter_period_from_tau, riemann_theta)
from .errors import (CalibrationFailed, GridTooCoarse, ParamOutOfRange, SpectraMismatch,
                     ThetaZero)
from .periods import DEFAULT_C_MAX, ThetaParams, build_theta_params, compute_w
from .spectral_curve import (Case, Kind, Spectrum, make_case_a_kink, make_case_b_kink,
                             matched_case_b_params)

C_UNIVERSAL = 64.0


class Family(str, Enum):
    BREATHER_A = "breather-a"
    KINK_A = "kink-a"
    KINK_B = "kink-b"
    BREATHER_B = "breather-b"
    STATIC_KINK = "static-kink"
    STATIC_BREATHER_A = "static-breather-a"
    STATIC_BREATHER_B = "static-breather-b"


@dataclass
class SolutionModel:
    """Everything needed to evaluate one solution family."""

    family: Family
    spectrum: Spectrum
    periods: object
    theta_params: ThetaParams
    C: float
    moduli: dict
    prefactor: float
    scale_x: float
    scale_t: float
    # quarter period of the x-modulus, used to unwrap kinks
    Kx: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def is_kink(self):
        return self.family in (Family.KINK_A, Family.KINK_B)

    def __call__(self, x, t):
        return evaluate(self, x, t)


def _real_modulus(tau):
    m = modulus_from_tau(tau)
    return Modulus(float(np.real(m.k)), float(np.real(m.kprime)))


def build_model(spectrum, C=C_UNIVERSAL, periods=None):
    """Periods, theta data and closed-form constants for a spectrum.

    ``C`` may be a number or ``"calibrate"``.
    """
    if periods is None:
        periods = compute_w(spectrum)
    if isinstance(C, str):
        if C != "calibrate":
            raise ParamOutOfRange(f"C must be a number or 'calibrate', got {C!r}")
        C = calibrate_scale(spectrum, periods)
    C = float(C)
    family = Family(spectrum.family)
    wp, wm = periods.w_plus.real, periods.w_minus.real
    tp = 1j * periods.tau_plus.imag
    tm = 1j * periods.tau_minus.imag
    if spectrum.case is Case.A:
        mx, mt = _real_modulus(2 * tp), _real_modulus(2 * tm)
        Kp = quarter_period_from_tau(2 * tp).real
        Km = quarter_period_from_tau(2 * tm).real
        sx, st = 2 * C * Kp / wp, 2 * C * Km / wm
        names = ("k(2tau+)", "k(2tau-)")
        if family is Family.BREATHER_A:
            A = np.sqrt(mx.k * mt.k / (mx.kprime * mt.kprime))
        else:
            A = np.sqrt(mx.k * mt.k)
    else:
        mx, mt = _real_modulus(4 * tp), _real_modulus(tm)
        Kp = quarter_period_from_tau(4 * tp).real
        Km = quarter_period_from_tau(tm).real
        sx, st = 2 * C * Kp / wp, C * Km / wm
        names = ("k(4tau+)", "k(tau-)")
        if family is Family.KINK_B:
            A = np.sqrt(mx.k / mt.k)
        else:
            A = np.sqrt(mx.k / mt.kprime)
    moduli = {names[0]: mx, names[1]: mt}
    Kx = float(complete_K(mx.kprime)) if family in (Family.KINK_A, Family.KINK_B) else 0.0
    theta = build_theta_params(spectrum, periods, C)
    return SolutionModel(family, spectrum, periods, theta, C, moduli, float(A),
                         float(sx), float(st), Kx)


def _jac(u, k):
    return jacobi_elliptic(np.asarray(u, dtype=float), float(k))


def _kink_unwrap(num, cn, X, Kx):
    """Continuous ``4 atan(num/cn)`` along ``X``; the quadrant of ``(cn, num)`` tracks ``pi X/(2 Kx)``."""
    theta = np.arctan2(num, cn)
    ref = 0.5 * np.pi * X / Kx
    return 4 * (theta + 2 * np.pi * np.round((ref - theta) / (2 * np.pi)))


def eval_breather_a(x, t, model):
    """``4 atan[A nc(alpha x; k'(2tau+)) nc(beta t; k'(2tau-))]``."""
    _check(model, Family.BREATHER_A)
    mx, mt = model.moduli.values()
    cx = _jac(model.scale_x * np.asarray(x, float), mx.kprime).cn
    ct = _jac(model.scale_t * np.asarray(t, float), mt.kprime).cn
    with np.errstate(divide="ignore"):
        return 4 * np.arctan(model.prefactor / (cx * ct))


def eval_kink_a(x, t, model):
    """``4 atan[A sc(alpha x; k'(2tau+)) nd(beta t; k'(2tau-))]``, unwrapped in x."""
    _check(model, Family.KINK_A)
    mx, mt = model.moduli.values()
    X = model.scale_x * np.asarray(x, float)
    jx = _jac(X, mx.kprime)
    dt = _jac(model.scale_t * np.asarray(t, float), mt.kprime).dn
    return _kink_unwrap(model.prefactor * jx.sn / dt, jx.cn, X, model.Kx)


def eval_kink_b(x, t, model):
    """``4 atan[sqrt(k(4tau+)/k(tau-)) sc(alpha x; k'(4tau+)) dn(beta t; k'(tau-))]``."""
    _check(model, Family.KINK_B)
    mx, mt = model.moduli.values()
    X = model.scale_x * np.asarray(x, float)
    jx = _jac(X, mx.kprime)
    dt = _jac(model.scale_t * np.asarray(t, float), mt.kprime).dn
    return _kink_unwrap(model.prefactor * jx.sn * dt, jx.cn, X, model.Kx)


def eval_breather_b(x, t, model):
    """``4 atan[sqrt(k(4tau+)/k'(tau-)) nd(alpha x; k'(4tau+)) dc(beta t; k'(tau-))]``."""
    _check(model, Family.BREATHER_B)
    mx, mt = model.moduli.values()
    dx = _jac(model.scale_x * np.asarray(x, float), mx.kprime).dn
    jt = _jac(model.scale_t * np.asarray(t, float), mt.kprime)
    with np.errstate(divide="ignore"):
        return 4 * np.arctan(model.prefactor * jt.dn / (dx * jt.cn))


_EVALUATORS = {
    Family.BREATHER_A: eval_breather_a, Family.KINK_A: eval_kink_a,
    Family.KINK_B: eval_kink_b, Family.BREATHER_B: eval_breather_b,
}


def _check(model, family):
    if model.family is not family:
        raise ParamOutOfRange(f"model is {model.family.value}, evaluator needs {family.value}")


def evaluate(model, x, t):
    """Closed-form value for the model's family."""
    x, t = np.broadcast_arrays(np.asarray(x, float), np.asarray(t, float))
    return _EVALUATORS[model.family](x, t, model)


# --------------------------------------------------------- theta route


def theta_value(theta_params, x, t, shift=0.0):
    """Genus-2 ``Theta[alpha](l(x, t) + shift | B)``."""
    l = theta_params.l(x, t) + shift
    return riemann_theta(l, theta_params.B, theta_params.alpha, theta_params.beta)


def _principal(theta_params, x, t):
    th0 = theta_value(theta_params, x, t)
    th1 = theta_value(theta_params, x, t, 0.5)
    tiny = np.abs(th0) < 1e-14 * max(1.0, float(np.max(np.abs(th1))))
    if np.any(tiny):
        raise ThetaZero("Theta(l) vanishes: the solution is singular there")
    ratio = th1 / th0
    return -2 * np.angle(ratio), 2 * np.log(np.abs(ratio))


def eval_theta_representation(x, t, theta_params, path_step=0.05):
    """``u = 2i ln[Theta(l + 1/2)/Theta(l)]``.

    Breathers: principal value, equal to ``4 atan(Im Theta / Re Theta)``.
    Kinks: unwrapped along ``x`` from the base point ``(0, t)`` in steps of at
    most ``path_step``, so the winding of the kink is kept.
    """
    x, t = np.broadcast_arrays(np.asarray(x, float), np.asarray(t, float))
    if theta_params.is_breather:
        return _principal(theta_params, x, t)[0]
    out = np.empty(x.shape)
    flat_x, flat_t = x.ravel(), t.ravel()
    res = out.ravel()
    for tv in np.unique(flat_t):
        idx = np.nonzero(flat_t == tv)[0]
        xs = flat_x[idx]
        lo, hi = min(0.0, xs.min()), max(0.0, xs.max())
        n = int(np.ceil((hi - lo) / path_step)) + 1
        path = np.union1d(np.linspace(lo, hi, n + 1), np.append(xs, 0.0))
        u = _principal(theta_params, path, np.full_like(path, tv))[0]
        u = np.unwrap(u, period=4 * np.pi)
        u = u - u[np.searchsorted(path, 0.0)] + _principal(theta_params, 0.0, tv)[0]
        res[idx] = u[np.searchsorted(path, xs)]
    return res.reshape(x.shape)


def theta_product_form(model, x, t, shifted=False):
    """Genus-1 product form of ``Theta(l)`` (or ``Theta(l + 1/2)``) for the model's family.

    With ``X = iCx/w+`` and ``T = iCt/w-``:
    breather-a ``th4(X|2t+) th4(T|2t-) + i th2(X|2t+) th2(T|2t-)``;
    kink-a ``th4(X|2t+) th3(T|2t-) + th1(X|2t+) th2(T|2t-)``;
    kink-b ``th4(X|4t+) th2(T/2|t-) + th1(X|4t+) th3(T/2|t-)``;
    breather-b ``th3(X|4t+) th4(T/2|t-) + i th2(X|4t+) th3(T/2|t-)``.
    The half shift conjugates breathers and flips the sign of the th1 term for kinks.
    """
    x, t = np.broadcast_arrays(np.asarray(x, float), np.asarray(t, float))
    p = model.periods
    X = 1j * model.C * x / p.w_plus.real
    T = 1j * model.C * t / p.w_minus.real
    tp, tm = 1j * p.tau_plus.imag, 1j * p.tau_minus.imag
    th = jacobi_theta
    fam = model.family
    if fam is Family.BREATHER_A:
        val = th(4, X, 2 * tp) * th(4, T, 2 * tm) + 1j * th(2, X, 2 * tp) * th(2, T, 2 * tm)
        return np.conj(val) if shifted else val
    if fam is Family.BREATHER_B:
        val = th(3, X, 4 * tp) * th(4, T / 2, tm) + 1j * th(2, X, 4 * tp) * th(3, T / 2, tm)
        return np.conj(val) if shifted else val
    s = -1 if shifted else 1
    if fam is Family.KINK_A:
        return th(4, X, 2 * tp) * th(3, T, 2 * tm) + s * th(1, X, 2 * tp) * th(2, T, 2 * tm)
    return th(4, X, 4 * tp) * th(2, T / 2, tm) + s * th(1, X, 4 * tp) * th(3, T / 2, tm)


# ------------------------------------------------------------- statics


def eval_static(kind, k, x, sign=1):
    """Static profiles.

    ``kink``: ``4 atan[sqrt(k') sc(x/(1-k'); k)]`` (unwrapped);
    ``breather-b``: ``4 atan[sqrt(k') nd(x/(1+k'); k)]``;
    ``breather-a``: ``4 atan[sqrt(ik'/k) nc((k + sign*ik') x; k)]``, any modulus
    (``k > 1`` uses the ``Im k -> 0+`` continuation). Raises
    :class:`ParamOutOfRange` if that expression is not real.
    """
    kind = str(getattr(kind, "value", kind)).replace("static-", "")
    m = k if isinstance(k, Modulus) else Modulus.from_k(k)
    x = np.asarray(x, float)
    if kind in ("kink", "breather-b"):
        if not (m.is_real_unit and 0 < np.real(m.k) < 1):
            raise ParamOutOfRange("static kink/breather-b need real 0 < k < 1")
        kk, kp = float(np.real(m.k)), float(np.real(m.kprime))
        if kind == "kink":
            X = x / (1 - kp)
            j = jacobi_elliptic(X, kk)
            return _kink_unwrap(np.sqrt(kp) * j.sn, j.cn * np.ones_like(X), X, float(complete_K(kk)))
        j = jacobi_elliptic(x / (1 + kp), kk)
        return 4 * np.arctan(np.sqrt(kp) * j.nd())
    if kind != "breather-a":
        raise ParamOutOfRange(f"unknown static kind {kind!r}")
    if sign not in (1, -1):
        raise ParamOutOfRange("sign must be +1 or -1")
    kk, kp = complex(m.k), complex(m.kprime)
    arg = (kk + sign * 1j * kp) * x
    j = jacobi_elliptic(arg, m)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = 4 * np.arctan(np.sqrt(1j * kp / kk) * j.nc())
    if np.any(np.abs(np.imag(val)) > 1e-10 * np.maximum(1.0, np.abs(val))):
        raise ParamOutOfRange("the static breather-a expression is complex for this modulus and sign")
    return np.real(val)


# ------------------------------------------------------------ residuals


@dataclass
class FieldGrid:
    """Samples ``u[i, j] = u(x[i], t[j])``."""

    x: np.ndarray
    t: np.ndarray
    u: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def nx(self):
        return len(self.x)

    @property
    def nt(self):
        return len(self.t)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "t", "u"])
        for i, xv in enumerate(self.x):
            for j, tv in enumerate(self.t):
                w.writerow([f"{xv:.17g}", f"{tv:.17g}", f"{self.u[i, j]:.17g}"])
        return buf.getvalue()

    def metadata_json(self):
        d = {"nx": self.nx, "nt": self.nt,
             "x_range": [float(self.x[0]), float(self.x[-1])],
             "t_range": [float(self.t[0]), float(self.t[-1])]}
        d.update(self.meta)
        return json.dumps(d, indent=2, sort_keys=True, default=_json_default)


def _json_default(o):
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, Modulus):
        return {"k": _json_default(o.k) if isinstance(o.k, complex) else o.k,
                "kprime": _json_default(o.kprime) if isinstance(o.kprime, complex) else o.kprime}
    raise TypeError(type(o))


def field_grid(fn, x_range=(-5.0, 5.0), t_range=(-5.0, 5.0), nx=101, nt=101, meta=None):
    """Evaluate ``fn(x, t)`` on a tensor grid."""
    x = np.linspace(*x_range, nx)
    t = np.linspace(*t_range, nt)
    Xg, Tg = np.meshgrid(x, t, indexing="ij")
    u = np.asarray(fn(Xg, Tg))
    if np.iscomplexobj(u):
        if np.abs(u.imag).max() > 1e-10:
            raise ParamOutOfRange("field has an imaginary part above 1e-10")
        u = u.real
    return FieldGrid(x, t, u, dict(meta or {}))


_D2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0


def _wrap(d):
    """Differences modulo 2 pi; the equation is invariant under u -> u + 2 pi."""
    return (d + np.pi) % (2 * np.pi) - np.pi


def pde_residual(field):
    """``u_tt - u_xx + sin u`` at interior points with 4th-order central differences.

    Returns ``{"max", "l2", "argmax": (x, t)}``; ``l2`` is the RMS over interior points.
    """
    u = np.asarray(field.u, float)
    if u.shape != (field.nx, field.nt) or field.nx < 5 or field.nt < 5:
        raise GridTooCoarse("need at least 5x5 samples")
    hx = np.diff(field.x)
    ht = np.diff(field.t)
    if not (np.allclose(hx, hx[0]) and np.allclose(ht, ht[0])):
        raise GridTooCoarse("grid must be uniform")
    hx, ht = hx[0], ht[0]
    c = u[2:-2, 2:-2]
    dxs = [_wrap(u[2 + s:u.shape[0] - 2 + s, 2:-2] - c) for s in (-2, -1, 1, 2)]
    dts = [_wrap(u[2:-2, 2 + s:u.shape[1] - 2 + s] - c) for s in (-2, -1, 1, 2)]
    if max(np.abs(d).max() for d in dxs + dts) > 1.0:
        raise GridTooCoarse("neighbouring samples differ by more than 1 rad")
    w = _D2[[0, 1, 3, 4]]
    uxx = sum(wi * d for wi, d in zip(w, dxs)) / hx ** 2
    utt = sum(wi * d for wi, d in zip(w, dts)) / ht ** 2
    r = np.abs(utt - uxx + np.sin(c))
    i, j = np.unravel_index(np.argmax(r), r.shape)
    return {"max": float(r.max()), "l2": float(np.sqrt(np.mean(r ** 2))),
            "argmax": (float(field.x[i + 2]), float(field.t[j + 2]))}


def local_residual(fn, x, t, h=0.02):
    """``|u_tt - u_xx + sin u|`` at each ``(x, t)`` with a 4th-order stencil of step ``h``."""
    x, t = np.broadcast_arrays(np.asarray(x, float), np.asarray(t, float))
    u0 = fn(x, t)
    uxx = sum(w * _wrap(fn(x + s * h, t) - u0) for w, s in zip(_D2[[0, 1, 3, 4]], (-2, -1, 1, 2))) / h ** 2
    utt = sum(w * _wrap(fn(x, t + s * h) - u0) for w, s in zip(_D2[[0, 1, 3, 4]], (-2, -1, 1, 2))) / h ** 2
    return np.abs(utt - uxx + np.sin(u0))


# ---------------------------------------------------------- calibration


_CAL_X, _CAL_T = np.meshgrid(np.linspace(-0.7, 1.3, 21), np.linspace(-0.8, 1.2, 21), indexing="ij")


def _calibration_residual(spectrum, periods, C):
    model = build_model(spectrum, C, periods)
    with np.errstate(all="ignore"):
        r = local_residual(model, _CAL_X, _CAL_T, h=0.01)
    r = r[np.isfinite(r)]
    return float(r.max()) if r.size else np.inf


def calibrate_scale(spectrum, periods=None, C_max=DEFAULT_C_MAX, threshold=1e-6, n_scan=60):
    """Golden-section search for the ``C`` that makes the closed form solve the equation."""
    if periods is None:
        periods = compute_w(spectrum)
    grid = np.linspace(C_max / n_scan, C_max, n_scan)
    vals = np.array([_calibration_residual(spectrum, periods, c) for c in grid])
    f = lambda c: _calibration_residual(spectrum, periods, c)
    # Interior local minima only: C -> 0 flattens the field towards a constant,
    # which can itself be a (trivial) solution.
    cands = [i for i in range(1, n_scan - 1) if vals[i] <= vals[i - 1] and vals[i] <= vals[i + 1]]
    if not cands:
        raise CalibrationFailed(f"no interior minimum of the residual on (0, {C_max:g}]")
    C, best = np.nan, np.inf
    for i in cands:
        res = optimize.minimize_scalar(f, bracket=(grid[i - 1], grid[i], grid[i + 1]),
                                       method="golden", options={"xtol": 1e-13})
        if res.fun < best:
            C, best = float(res.x), float(res.fun)
    if not (0 < C <= C_max) or best > threshold:
        raise CalibrationFailed(f"best C = {C:.6g} leaves residual {best:.3g} > {threshold:g}")
    return C


# ---------------------------------------------------------- time shift


def matched_time_shift(model_b):
    """Quarter-period shift ``w-_b Im(tau-_b)/C`` that maps the Case (b) kink onto Case (a)."""
    p = model_b.periods
    return p.w_minus.real * p.tau_minus.imag / model_b.C


def time_shift_equivalence(params_a, params_b, x=None, t=None, C=C_UNIVERSAL):
    """Compare the Case (a) kink ``(r, eta)`` with the Case (b) kink ``(eta1, eta2)``.

    Returns ``{"shift", "max_diff"}`` with
    ``max |q_a(x, t) - q_b(x, t + shift)|`` over the sample grid.
    """
    sa = params_a if isinstance(params_a, Spectrum) else make_case_a_kink(*params_a)
    sb = params_b if isinstance(params_b, Spectrum) else make_case_b_kink(*params_b)
    pa, pb = np.sort_complex(np.array(sa.points)), np.sort_complex(np.array(sb.points))
    if np.abs(pa - pb).max() > 1e-10 * np.abs(pa).max():
        raise SpectraMismatch("the two kinks do not share branch points")
    ma, mb = build_model(sa, C), build_model(sb, C)
    if x is None:
        x, t = np.meshgrid(np.linspace(-3, 3, 31), np.linspace(-3, 3, 31), indexing="ij")
    shift = matched_time_shift(mb)
    diff = np.abs(ma(x, t) - mb(x, t + shift))
    return {"shift": shift, "max_diff": float(diff.max())}


# --------------------------------------------------------- static limits


def static_limit(family, delta=5e-7, x=None, t=None, C=C_UNIVERSAL):
    """Degenerate a spectrum towards its static limit and compare with the static profile.

    Degenerations (``delta`` is the distance to the collision):
    kink-a ``r e^eta = (1 - delta)/16`` (``eta = 0.7``); kink-b ``eta2 = delta``
    (``eta1 = 1.2``); breather-b ``phi2 = pi - delta`` (``phi1 = 1``);
    breather-a ``r = (1 - delta)/16`` (``phi = pi/2``), the cusp ``2 tau- -> 1``.
    The reference profile uses the x-modulus of the model and ``x`` oriented
    by the sign of the x-scale. Breather-a is compared with the real form of
    its static expression, i.e. the breather-b profile with the same ``k``.

    Returns ``{"t_variation", "profile_diff", "k"}``.
    """
    from .spectral_curve import make_case_a_breather, make_case_b_breather

    family = Family(family)
    if family is Family.KINK_A:
        spec, kind = make_case_a_kink((1 - delta) * np.exp(-0.7) / 16, 0.7), "kink"
    elif family is Family.KINK_B:
        spec, kind = make_case_b_kink(1.2, delta), "kink"
    elif family is Family.BREATHER_B:
        spec, kind = make_case_b_breather(1.0, np.pi - delta), "breather-b"
    elif family is Family.BREATHER_A:
        spec, kind = make_case_a_breather((1 - delta) / 16, np.pi / 2), "breather-b"
    else:
        raise ParamOutOfRange(f"{family.value} has no static degeneration")
    model = build_model(spec, C)
    k = list(model.moduli.values())[0].kprime
    if x is None:
        x = np.linspace(-4, 4, 81)
    if t is None:
        t = np.linspace(-3, 3, 13)
    u = model(x[:, None], t[None, :])
    ref = eval_static(kind, k, np.sign(model.scale_x) * x)
    return {"t_variation": float(np.abs(u - u[:, :1]).max()),
            "profile_diff": float(np.abs(u - ref[:, None]).max()), "k": float(k)}


def landen_check(r, eta, C=C_UNIVERSAL):
    """Moduli of a Case (a) kink against its matched Case (b) kink.

    Checks ``k(2tau+_a) = k(4tau+_b)`` and ``k(2tau-_a) = k(tau-_b)``, and the one-step
    descending Landen map ``k(4tau+_b) = (1 - k'(2tau+_b))/(1 + k'(2tau+_b))``.
    Returns the relative residuals.
    """
    ma = build_model(make_case_a_kink(r, eta), C)
    mb = build_model(make_case_b_kink(*matched_case_b_params(r, eta)), C)
    (xa, ta), (xb, tb) = ma.moduli.values(), mb.moduli.values()
    half = _real_modulus(2j * mb.periods.tau_plus.imag)
    landen = (1 - half.kprime) / (1 + half.kprime)
    rel = lambda a, b: abs(a - b) / max(abs(b), 1e-300)
    return {"x_moduli": rel(xa.k, xb.k), "t_moduli": rel(ta.k, tb.k),
            "descending_landen": rel(xb.k, landen)}
