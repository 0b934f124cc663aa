"""``sg-n2`` command-line driver: eval, periods, verify, floquet-scan.

Exit codes: 0 success, 1 numerical failure, 2 invalid input.
Settings come from flags, then a ``key=value`` config file, then defaults.
"""
import argparse
import csv
import io
import json
import sys

import numpy as np

from . import floquet
from .errors import GridTooCoarse, InvalidInput, ParamOutOfRange, SineGordonError
from .periods import compute_w, period_relations, w_relations
from .solutions import build_model, field_grid, pde_residual
from .spectral_curve import make_spectrum

FAMILIES = ("breather-a", "kink-a", "kink-b", "breather-b")
PARAMS = ("r", "phi", "eta", "eta1", "eta2", "phi1", "phi2")
DEFAULTS = {
    "format": "csv", "tol": 1e-8, "seed": 0, "grid": "101x101", "x_range": "-5,5",
    "t_range": "-5,5", "C": "64", "potential": "even", "L": 2.0, "amp": None,
    "E": None, "E_grid": None, "filter": None, "out": None,
}
FLOAT_KEYS = {"tol", "L", "amp", *PARAMS}
INT_KEYS = {"seed"}


def _parser():
    p = argparse.ArgumentParser(prog="sg-n2", description="Separable N=2 Sine-Gordon toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", help="output path (default stdout)")
        sp.add_argument("--format", choices=("csv", "json"))
        sp.add_argument("--tol", type=float)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--config", help="key=value settings file")

    def spectrum(sp):
        sp.add_argument("--family", choices=FAMILIES)
        sp.add_argument("--case", choices=("a", "b"))
        sp.add_argument("--kind", choices=("kink", "breather"))
        for name in PARAMS:
            sp.add_argument(f"--{name}", type=float)

    ev = sub.add_parser("eval", help="evaluate u(x, t) on a grid")
    common(ev)
    spectrum(ev)
    ev.add_argument("--grid", help="NXxNT, e.g. 101x101")
    ev.add_argument("--x-range", dest="x_range", help="lo,hi")
    ev.add_argument("--t-range", dest="t_range", help="lo,hi")
    ev.add_argument("--C", help="scale constant or 'calibrate'")

    pe = sub.add_parser("periods", help="cycle integrals and relation residuals")
    common(pe)
    spectrum(pe)

    ve = sub.add_parser("verify", help="run the property suites")
    common(ve)
    ve.add_argument("--filter", help="comma-separated suite names")

    fl = sub.add_parser("floquet-scan", help="Floquet discriminant over an E grid")
    common(fl)
    fl.add_argument("--potential", choices=("even", "odd", "free"))
    fl.add_argument("--L", type=float)
    fl.add_argument("--amp", type=float, help="amplitude a (even) or eps (odd)")
    fl.add_argument("--E", help="comma-separated energies (complex allowed, e.g. 0.2+0.1j)")
    fl.add_argument("--E-grid", dest="E_grid", help="lo:hi:n, log-spaced positive energies")
    return p


def read_config(path):
    """Plain ``key=value`` lines; ``#`` starts a comment; dashes in keys become underscores."""
    out = {}
    with open(path) as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParamOutOfRange(f"{path}:{n}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.lstrip("-").replace("-", "_")
            if key in FLOAT_KEYS:
                value = float(value)
            elif key in INT_KEYS:
                value = int(value)
            out[key] = value
    return out


def resolve(args):
    """Merge flags over config-file values over defaults."""
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        cfg.update(read_config(args.config))
    for key, value in vars(args).items():
        if value is not None and key != "config":
            cfg[key] = value
    return cfg


def _spectrum(cfg):
    fam = cfg.get("family")
    if fam:
        kind, case = fam.split("-")
    else:
        case, kind = cfg.get("case"), cfg.get("kind")
        if not (case and kind):
            raise ParamOutOfRange("give --family or both --case and --kind")
    params = {k: float(cfg[k]) for k in PARAMS if cfg.get(k) is not None}
    return make_spectrum(case, kind, **params)


def _pair(text, name):
    try:
        lo, hi = (float(s) for s in str(text).split(","))
    except ValueError:
        raise ParamOutOfRange(f"{name} must be 'lo,hi'")
    if not hi > lo:
        raise ParamOutOfRange(f"{name} needs hi > lo")
    return lo, hi


def _grid(text):
    try:
        nx, nt = (int(s) for s in str(text).lower().split("x"))
    except ValueError:
        raise ParamOutOfRange("grid must be NXxNT")
    if nx < 5 or nt < 5:
        raise ParamOutOfRange("grid needs at least 5 points per axis")
    return nx, nt


def _emit(text, out):
    if out:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj):
    return json.dumps(obj, indent=2, sort_keys=True, default=_encode) + "\n"


def _encode(o):
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o).__name__)


def cmd_eval(cfg):
    spec = _spectrum(cfg)
    C = cfg["C"]
    C = "calibrate" if str(C) == "calibrate" else float(C)
    model = build_model(spec, C)
    nx, nt = _grid(cfg["grid"])
    meta = {"family": spec.family, "params": spec.params, "C": model.C,
            "calibrated": C == "calibrate", "prefactor": model.prefactor,
            "scale_x": model.scale_x, "scale_t": model.scale_t,
            "moduli": {k: [m.k, m.kprime] for k, m in model.moduli.items()}}
    grid = field_grid(model, _pair(cfg["x_range"], "x-range"), _pair(cfg["t_range"], "t-range"),
                      nx, nt, meta)
    try:
        grid.meta["residual"] = pde_residual(grid)
    except GridTooCoarse as exc:
        grid.meta["residual"] = {"error": str(exc)}
    if cfg["format"] == "json":
        _emit(_json({"meta": json.loads(grid.metadata_json()), "x": grid.x, "t": grid.t,
                     "u": grid.u}), cfg["out"])
        return 0
    _emit(grid.to_csv(), cfg["out"])
    if cfg["out"]:
        with open(cfg["out"] + ".json", "w", newline="\n") as fh:
            fh.write(grid.metadata_json() + "\n")
    else:
        sys.stderr.write(grid.metadata_json() + "\n")
    return 0


def cmd_periods(cfg):
    spec = _spectrum(cfg)
    p = compute_w(spec)
    rel = {**period_relations(p), **w_relations(p)}
    tol = float(cfg["tol"])
    ok = all(v < tol for v in rel.values())
    report = {"spectrum": spec.to_dict(), "periods": p.to_dict(), "relations": rel,
              "tol": tol, "passed": ok}
    report["periods"].pop("segments", None)
    _emit(_json(report), cfg["out"])
    return 0 if ok else 1


def cmd_verify(cfg):
    from .verify import run
    try:
        report = run(seed=int(cfg["seed"]), filter=cfg.get("filter"))
    except KeyError as exc:
        raise ParamOutOfRange(str(exc.args[0]))
    _emit(_json(report), cfg["out"])
    return 0 if report["passed"] else 1


def _energies(cfg):
    if cfg.get("E"):
        try:
            Es = [complex(s.strip().replace(" ", "")) for s in str(cfg["E"]).split(",") if s.strip()]
        except ValueError:
            raise ParamOutOfRange("energies must be numbers")
    elif cfg.get("E_grid"):
        try:
            lo, hi, n = str(cfg["E_grid"]).split(":")
            lo, hi, n = float(lo), float(hi), int(n)
        except ValueError:
            raise ParamOutOfRange("E-grid must be lo:hi:n")
        if not (0 < lo < hi):
            raise ParamOutOfRange("E-grid needs 0 < lo < hi")
        Es = list(np.geomspace(lo, hi, n)) if n > 0 else []
    else:
        Es = floquet.default_E_samples(20, seed=int(cfg["seed"]))
    if not Es:
        raise ParamOutOfRange("empty E grid")
    return Es


def cmd_floquet_scan(cfg):
    L = float(cfg["L"])
    amp = cfg.get("amp")
    name = cfg["potential"]
    if name == "even":
        pot = floquet.even_potential(0.3 if amp is None else float(amp), L)
    elif name == "odd":
        pot = floquet.odd_potential(0.2 if amp is None else float(amp), L)
    else:
        pot = floquet.free_potential(L)
    rows = floquet.scan(pot, _energies(cfg))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["Re_E", "Im_E", "Re_Delta", "Im_Delta", "defect"])
    for E, d, defect in rows:
        w.writerow([f"{v:.17g}" for v in (E.real, E.imag, d.real, d.imag, defect)])
    _emit(buf.getvalue(), cfg["out"])
    return 0


COMMANDS = {"eval": cmd_eval, "periods": cmd_periods, "verify": cmd_verify,
            "floquet-scan": cmd_floquet_scan}


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        cfg = resolve(args)
        return COMMANDS[args.command](cfg)
    except SineGordonError as exc:
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return exc.exit_code
    except (InvalidInput, ValueError, OSError) as exc:
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return 2
    except Exception as exc:  # numerical failure outside the package hierarchy
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
