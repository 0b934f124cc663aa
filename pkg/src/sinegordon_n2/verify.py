"""Property suites behind ``sg-n2 verify``.

Each suite returns a list of ``{"name", "residual", "tol", "passed"}`` records.
Random sample points come from a seeded generator, so reports are reproducible.
"""
import numpy as np

from . import floquet, symplectic
from .elliptic_core import (Modulus, complete_K_identities, jacobi_elliptic,
                            reciprocal_modulus_map)
from .periods import compute_w, period_relations, primed_basis, w_relations
from .solutions import (build_model, eval_static, landen_check, theta_product_form, theta_value,
                        time_shift_equivalence)
from .spectral_curve import (make_case_a_breather, make_case_a_kink, make_case_b_breather,
                             make_case_b_kink, matched_case_b_params)

CASE_A_KINKS = [(1 / 32, 0.5), (0.01, 1.2), (0.02, 0.3), (0.005, 2.0), (0.04, 0.1)]
CASE_B_KINKS = [(1.0, 0.4), (0.7, 0.2), (2.0, 1.5), (0.5, 0.05), (3.0, 0.8)]
FAMILY_SAMPLES = {
    "breather-a": make_case_a_breather(1 / 32, np.pi / 2),
    "kink-a": make_case_a_kink(1 / 32, 0.5),
    "kink-b": make_case_b_kink(1.0, 0.4),
    "breather-b": make_case_b_breather(1.0, 2.0),
}


def _check(name, residual, tol):
    residual = float(residual)
    return {"name": name, "residual": residual, "tol": tol, "passed": bool(residual < tol)}


def suite_elliptic(rng, n=10_000, tol=1e-10):
    u = rng.uniform(-3, 3, n)
    k = rng.uniform(0.05, 0.95, n)
    res = reciprocal_modulus_map(u, k)
    out = [_check(f"elliptic:{key}", np.max(v), tol) for key, v in res.items()]
    ids = complete_K_identities(0.6)
    out += [_check(f"elliptic:K:{key}", v, tol) for key, v in ids.items()]
    return out


def suite_periods(rng, tol=1e-8):
    out = []
    for r, eta in CASE_A_KINKS:
        p = compute_w(make_case_a_kink(r, eta))
        for key, v in {**period_relations(p), **w_relations(p)}.items():
            out.append(_check(f"periods:a({r:g},{eta:g}):{key}", v, tol))
    for e1, e2 in CASE_B_KINKS:
        p = compute_w(make_case_b_kink(e1, e2))
        for key, v in period_relations(p).items():
            out.append(_check(f"periods:b({e1:g},{e2:g}):{key}", v, tol))
    return out


def suite_landen(rng, tol=1e-10):
    out = []
    for r, eta in CASE_A_KINKS[:3]:
        for key, v in landen_check(r, eta).items():
            out.append(_check(f"landen:({r:g},{eta:g}):{key}", v, tol))
        pa = compute_w(make_case_a_kink(r, eta))
        _, _, Bp = primed_basis(pa)
        Ba = symplectic.case_a_matrix(pa.tau_plus, pa.tau_minus)
        img = symplectic.act(symplectic.SIGMA_C, Bp)
        out.append(_check(f"landen:({r:g},{eta:g}):sigma_c.B'=B_a", np.abs(img - Ba).max(), tol))
        out.append(_check(f"landen:({r:g},{eta:g}):time_shift",
                          time_shift_equivalence((r, eta), matched_case_b_params(r, eta))["max_diff"],
                          1e-6))
    return out


def suite_theta(rng, n=100, tol=1e-10):
    out = []
    for fam, spec in FAMILY_SAMPLES.items():
        model = build_model(spec)
        x, t = rng.uniform(-1, 1, n), rng.uniform(-1, 1, n)
        for shifted in (False, True):
            g = theta_value(model.theta_params, x, t, 0.5 if shifted else 0.0)
            p = theta_product_form(model, x, t, shifted)
            out.append(_check(f"theta:{fam}:{'l+1/2' if shifted else 'l'}",
                              np.max(np.abs(g - p)) / np.max(np.abs(g)), tol))
        g0 = theta_value(model.theta_params, x, t)
        g1 = theta_value(model.theta_params, x, t, 0.5)
        out.append(_check(f"theta:{fam}:conjugation", np.max(np.abs(g1 - np.conj(g0))) / np.max(np.abs(g0)), tol))
    return out


def suite_static(rng, tol=1e-10):
    k, kp = 0.6, 0.8
    x = np.array([0.5])
    out = []
    lhs = 4 * np.arctan(np.sqrt(kp) * jacobi_elliptic(x / (1 - kp), k).sc())
    mid = 4 * np.arctan(np.sqrt(kp) / k * jacobi_elliptic(k * x / (1 - kp), 1 / k).sd())
    k1 = Modulus.from_k(1 / k)
    rhs = 4 * np.arctan(np.sqrt(1j * k1.k * k1.kprime)
                        * jacobi_elliptic((k1.k + 1j * k1.kprime) * x, k1).sd())
    out.append(_check("static:kink-chain:sd-form", np.abs(lhs - mid).max(), tol))
    out.append(_check("static:kink-chain:k1-form", np.abs(lhs - rhs).max(), tol))
    b = eval_static("breather-b", k, x)
    a = eval_static("breather-a", k1, x, sign=-1)
    out.append(_check("static:breather-chain", np.abs(a - b).max(), tol))
    out.append(_check("static:kink(0)=0", abs(eval_static("kink", k, np.array([0.0]))[0]), tol))
    return out


def suite_symplectic(rng, n=20, tol=1e-10):
    out = []
    comp = symplectic.compose(symplectic.SIGMA_A, symplectic.SIGMA_C)
    out.append(_check("symplectic:sigma_b=sigma_a.sigma_c", 0 if comp == symplectic.SIGMA_B else 1, 0.5))
    out.append(_check("symplectic:sigma_a", 0 if symplectic.SIGMA_A.is_symplectic else 1, 0.5))
    worst = 0.0
    for _ in range(n):
        B11, B22 = 1j * rng.uniform(0.5, 2.0, 2)
        l = rng.normal(size=2) + 1j * rng.normal(scale=0.3, size=2)
        for a1 in (0, 0.5):
            for a2 in (0, 0.5):
                for b1 in (0, 0.5):
                    for b2 in (0, 0.5):
                        worst = max(worst, symplectic.characteristic_shift((a1, a2), (b1, b2), l, B11, B22)[2])
    out.append(_check("symplectic:characteristic-shift", worst, tol))
    return out


def suite_floquet(rng, tol=1e-6):
    E = floquet.default_E_samples(20, seed=int(rng.integers(2 ** 31)))
    out = []
    for name, pot in (("even", floquet.even_potential()), ("odd", floquet.odd_potential())):
        out.append(_check(f"floquet:{name}", floquet.verify_spectral_symmetry(pot, E)["max_defect"], tol))
    free = floquet.free_potential()
    d = max(abs(floquet.transfer_matrix(free, e).delta - floquet.free_discriminant(e, free.L)) for e in (0.01, 0.04))
    out.append(_check("floquet:free", d, 1e-8))
    return out


SUITES = {
    "elliptic": suite_elliptic, "periods": suite_periods, "landen": suite_landen,
    "theta": suite_theta, "static": suite_static, "symplectic": suite_symplectic,
    "floquet": suite_floquet,
}


def run(seed=0, filter=None):
    """Run the selected suites (comma-separated names, default all)."""
    names = list(SUITES) if not filter else [s.strip() for s in filter.split(",") if s.strip()]
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        raise KeyError(f"unknown suite(s): {', '.join(unknown)}")
    rng = np.random.default_rng(seed)
    checks = []
    for name in names:
        checks.extend(SUITES[name](rng))
    return {"seed": seed, "suites": names, "passed": all(c["passed"] for c in checks),
            "checks": checks}
