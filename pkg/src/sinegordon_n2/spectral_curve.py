"""Symmetry-closed four-point spectra and the curve data built on them.

The discrete spectrum is closed under the involution ``E -> 1/(256 E)``.
Case (a) pairs each point with the image of the other pair; Case (b) puts
the two a-cuts inside each other. Breathers sit in conjugate pairs, kinks on
the negative real axis.
"""
import json
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import CutsOverlap, DegenerateSpectrum, ParamOutOfRange, ZeroEnergy

SPECTRAL_SCALE = 1.0 / 256.0
DEGENERACY_TOL = 1e-10


class Case(str, Enum):
    A = "a"
    B = "b"


class Kind(str, Enum):
    KINK = "kink"
    BREATHER = "breather"


def involution(E):
    """``E -> 1/(256 E)``."""
    E = np.asarray(E, dtype=complex)
    if np.any(E == 0):
        raise ZeroEnergy("E = 0 has no image under the involution")
    out = SPECTRAL_SCALE / E
    return out if out.ndim else complex(out)


def z_map(E):
    """``z(E) = (E + 1/(256 E)) / 2``; invariant under the involution."""
    E = np.asarray(E, dtype=complex)
    if np.any(E == 0):
        raise ZeroEnergy("z(E) is singular at E = 0")
    out = 0.5 * (E + SPECTRAL_SCALE / E)
    return out if out.ndim else complex(out)


@dataclass(frozen=True)
class Spectrum:
    """Four branch points ``E1..E4`` with their case/kind tags and raw parameters."""

    case: Case
    kind: Kind
    points: tuple
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "case", Case(self.case))
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "points", tuple(complex(p) for p in self.points))
        if len(self.points) != 4:
            raise ParamOutOfRange("a spectrum needs exactly four points")
        self.validate()

    @property
    def family(self):
        return f"{self.kind.value}-{self.case.value}"

    def validate(self):
        pts = np.array(self.points)
        scale = np.abs(pts).max()
        diffs = np.abs(pts[:, None] - pts[None, :])[np.triu_indices(4, 1)]
        if diffs.min() <= DEGENERACY_TOL * scale:
            raise DegenerateSpectrum(f"branch points collide: {self.points}")
        images = SPECTRAL_SCALE / pts
        for e in images:
            if np.abs(pts - e).min() > 1e-12 * max(abs(e), scale):
                raise ParamOutOfRange("spectrum is not closed under E -> 1/(256E)")
        if self.kind is Kind.KINK:
            if np.any(np.abs(pts.imag) > 0) or np.any(pts.real >= 0):
                raise ParamOutOfRange("kink spectra are real and negative")
            if not np.all(np.diff(pts.real[::-1]) > 0):
                raise ParamOutOfRange("kink points must satisfy E4 < E3 < E2 < E1 < 0")
        else:
            for e in pts:
                if np.abs(pts - np.conj(e)).min() > 1e-12 * scale:
                    raise ParamOutOfRange("breather points must come in conjugate pairs")

    def to_dict(self):
        return {
            "case": self.case.value,
            "kind": self.kind.value,
            "params": dict(self.params),
            "points": [[p.real, p.imag] for p in self.points],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d):
        pts = tuple(complex(re, im) for re, im in d["points"])
        return cls(d["case"], d["kind"], pts, dict(d.get("params", {})))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def _finite(**kw):
    for name, v in kw.items():
        if not np.isfinite(v):
            raise ParamOutOfRange(f"{name} must be finite")


def make_case_a_breather(r, phi):
    """``{r e^{i phi}, r e^{-i phi}, e^{i phi}/(256 r), e^{-i phi}/(256 r)}``."""
    _finite(r=r, phi=phi)
    if not (0 < phi < np.pi):
        raise ParamOutOfRange("need 0 < phi < pi")
    if r == 1 / 16:
        raise DegenerateSpectrum("r = 1/16 puts both pairs on the same circle")
    if not (0 < r < 1 / 16):
        raise ParamOutOfRange("need 0 < r < 1/16")
    e = np.exp(1j * phi)
    R = SPECTRAL_SCALE / r
    pts = (r * e, r * np.conj(e), R * e, R * np.conj(e))
    return Spectrum(Case.A, Kind.BREATHER, pts, {"r": r, "phi": phi})


def case_a_cuts_disjoint(r, eta):
    """True when the Case (a) a-cuts ``[E2, E1]`` and ``[E4, E3]`` are disjoint."""
    return r * np.exp(eta) < SPECTRAL_SCALE / r * np.exp(-eta)


def make_case_a_kink(r, eta):
    """Real negative points ``-r e^{-+eta}``, ``-e^{-+eta}/(256 r)``, sorted ``E4 < ... < E1``."""
    _finite(r=r, eta=eta)
    if not (0 < r < 1 / 16):
        raise ParamOutOfRange("need 0 < r < 1/16")
    if not eta > 0:
        raise ParamOutOfRange("need eta > 0")
    if not case_a_cuts_disjoint(r, eta):
        raise CutsOverlap("r e^eta >= e^-eta/(256 r): this configuration is Case (b)")
    R = SPECTRAL_SCALE / r
    pts = (-r * np.exp(-eta), -r * np.exp(eta), -R * np.exp(-eta), -R * np.exp(eta))
    return Spectrum(Case.A, Kind.KINK, pts, {"r": r, "eta": eta})


def make_case_b_kink(eta1, eta2):
    """``E1..E4 = -(1/16) e^{-eta1}, -(1/16) e^{-eta2}, -(1/16) e^{eta2}, -(1/16) e^{eta1}``."""
    _finite(eta1=eta1, eta2=eta2)
    if not (eta1 > eta2 > 0):
        raise ParamOutOfRange("need eta1 > eta2 > 0")
    pts = tuple(-np.exp(s) / 16 for s in (-eta1, -eta2, eta2, eta1))
    return Spectrum(Case.B, Kind.KINK, pts, {"eta1": eta1, "eta2": eta2})


def make_case_b_breather(phi1, phi2):
    """``E1..E4 = e^{i phi1}/16, e^{i phi2}/16, e^{-i phi2}/16, e^{-i phi1}/16``."""
    _finite(phi1=phi1, phi2=phi2)
    if not (0 < phi1 < phi2 < np.pi):
        raise ParamOutOfRange("need 0 < phi1 < phi2 < pi")
    pts = tuple(np.exp(1j * s) / 16 for s in (phi1, phi2, -phi2, -phi1))
    return Spectrum(Case.B, Kind.BREATHER, pts, {"phi1": phi1, "phi2": phi2})


def make_spectrum(case, kind, **params):
    """Dispatch to the constructor for ``(case, kind)``."""
    key = (Case(case), Kind(kind))
    try:
        if key == (Case.A, Kind.BREATHER):
            return make_case_a_breather(params["r"], params["phi"])
        if key == (Case.A, Kind.KINK):
            return make_case_a_kink(params["r"], params["eta"])
        if key == (Case.B, Kind.KINK):
            return make_case_b_kink(params["eta1"], params["eta2"])
        return make_case_b_breather(params["phi1"], params["phi2"])
    except KeyError as exc:
        raise ParamOutOfRange(f"missing parameter {exc.args[0]!r} for {key[1].value}-{key[0].value}")


def matched_case_b_params(r, eta):
    """Case (b) kink parameters with the same branch points as the Case (a) kink ``(r, eta)``."""
    s = np.log(1 / (16 * r))
    return s + eta, s - eta


def matched_case_a_params(eta1, eta2):
    """Inverse of :func:`matched_case_b_params`."""
    return np.exp(-(eta1 + eta2) / 2) / 16, (eta1 - eta2) / 2


def relabel_case3(points):
    """Fold a "Case 3" labelling (``1/(256 E2) = conj(E1)``) into Case (a).

    Returns the Case (a) breather with the same point set. Raises
    :class:`ParamOutOfRange` if the points do not have that structure.
    """
    pts = [complex(p) for p in points]
    E1 = next((p for p in pts if p.imag > 0 and abs(p) < 1 / 16), None)
    if E1 is None:
        raise ParamOutOfRange("no point inside |E| < 1/16 in the upper half plane")
    spec = make_case_a_breather(abs(E1), float(np.angle(E1)))
    ref = np.array(spec.points)
    for p in pts:
        if np.abs(ref - p).min() > 1e-12 * np.abs(ref).max():
            raise ParamOutOfRange("point set is not a relabelled Case (a) spectrum")
    return spec


@dataclass(frozen=True)
class CurveData:
    """Spectral curve ``R^2(E) = E prod_j (E - E_j)`` and its z-reduction."""

    spectrum: Spectrum

    @property
    def points(self):
        return np.array(self.spectrum.points)

    def R_squared(self, E):
        E = np.asarray(E, dtype=complex)
        out = E.copy()
        for p in self.spectrum.points:
            out = out * (E - p)
        return out

    def z_of_E(self, E):
        return z_map(E)

    @property
    def z_points(self):
        """``(z1, z2)`` for the two independent pairs ``E1`` and ``E2``."""
        E1, E2 = self.spectrum.points[:2]
        return complex(z_map(E1)), complex(z_map(E2))


def curve_data(spectrum):
    return CurveData(spectrum)
