"""Command-line front end: ``magflow <subcommand> [flags]``.

Exit codes: 0 on success, 2 on argument errors, 1 on computation diagnostics,
which are reported on stderr as ``ERROR <code> <detail>``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .algebra import heisenberg
from .density import admissible_z0, spot_check
from .geodesics import HeisGeodesic, energy, heis_eval, integrate_numeric, trajectory_energy
from .httype import HTInitialData, ht_central_period_solve, ht_periodicity_residual
from .lattice import compare_mls, load_lattice, marked_spectrum, natural_marking
from .magnetic import make_system
from .spectrum import (DEFAULT_CAP, FreeHomotopyClass, central_line_families,
                       central_spiral_families, contractible_families, family_residual,
                       noncentral_families)

PERIODIC_TOL = 1e-8
ORACLE_TOL = 1e-6


class ComputationError(Exception):
    def __init__(self, code: str, detail: str):
        super().__init__(f"{code} {detail}")
        self.code = code
        self.detail = detail


@dataclass
class RunConfig:
    subcommand: str
    params: dict = field(default_factory=dict)
    out: str | None = None
    verify: bool = False


def fmt(x) -> str:
    """Shortest round-trip decimal (at most 17 significant digits)."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x) + 0.0)
    return str(x)


def threads() -> int:
    try:
        n = int(os.environ.get("MAGFLOW_THREADS", "0"))
    except ValueError:
        n = 0
    return max(1, n) if n > 0 else (os.cpu_count() or 1)


def pmap(fn, items):
    items = list(items)
    n = min(threads(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


def _floats(s: str) -> list:
    try:
        return [float(x) for x in str(s).split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {s!r}")


def _csv_rows(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(x) for x in r])
    return buf.getvalue()


def _table(header, rows) -> str:
    def cell(x):
        if isinstance(x, (float, np.floating)):
            return f"{float(x):.6f}"
        return fmt(x)

    cells = [list(header)] + [[cell(x) for x in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return "".join("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() + "\n"
                   for r in cells)


# subcommands


def run_geodesic(p: dict, verify: bool) -> str:
    A = _as_list(p["A"])
    n = len(A)
    u = _as_list(p.get("u", [0.0] * n))
    v = _as_list(p.get("v", [0.0] * n))
    if not (len(u) == len(v) == n):
        raise ComputationError("shape", "A, u and v need the same number of entries")
    geo = HeisGeodesic(A, p["B"], u, v, p["z0"])
    T, samples = float(p["T"]), int(p.get("samples", 101))
    t = np.linspace(0.0, T, samples)
    pts = heis_eval(geo, t)
    if verify:
        traj = integrate_numeric(geo.system(), geo.momentum(), T, store_every=10)
        err = float(np.max(np.abs(traj.points - heis_eval(geo, traj.times))))
        if not err <= ORACLE_TOL:
            raise ComputationError("oracle-mismatch", f"sup-norm {err:.3e} > {ORACLE_TOL:g}")
    header = ["t"] + [f"x{i + 1}" for i in range(n)] + [f"y{i + 1}" for i in range(n)] + ["z"]
    return _csv_rows(header, ([ti, *row] for ti, row in zip(t, pts)))


def _as_list(x) -> list:
    if isinstance(x, (list, tuple)):
        return [float(a) for a in x]
    return _floats(x) if isinstance(x, str) else [float(x)]


def spectrum_families(cls: FreeHomotopyClass, E, B, A, cap):
    kind = cls.kind
    if kind == "identity":
        return contractible_families(E, B, [A]), False
    if kind == "noncentral":
        return noncentral_families(cls, E, B, A), False
    fams, trunc = central_spiral_families(cls.z_gamma, E, B, A, cap=cap, with_flag=True)
    return fams + central_line_families(cls.z_gamma, E, B), trunc


def run_spectrum(p: dict, verify: bool) -> str:
    vals = _as_list(p["class"])
    if len(vals) != 2:
        raise ComputationError("bad-class", "--class takes vnorm,zgamma")
    cls = FreeHomotopyClass(*vals)
    E, B, A = float(p["E"]), float(p["B"]), float(p.get("A", 1.0))
    fams, trunc = spectrum_families(cls, E, B, A, int(p.get("cap", DEFAULT_CAP)))
    if trunc:
        print(f"note: enumeration truncated at cap {p.get('cap', DEFAULT_CAP)}", file=sys.stderr)
    if verify:
        gamma = cls.representative(A)
        res = pmap(lambda f: family_residual(f, B, A, gamma), fams)
        bad = [(f, r) for f, r in zip(fams, res) if not r <= PERIODIC_TOL]
        if bad:
            f, r = bad[0]
            raise ComputationError("periodicity", f"branch={f.branch} ell={f.ell} residual={r:.3e}")
    rows = [(f.branch, f.ell, f.z0, f.omega, f.length) for f in fams]
    header = ["branch", "ell", "z0", "omega", "length"]
    return _csv_rows(header, rows) if p.get("csv") else _table(header, rows)


def run_density(p: dict, verify: bool) -> str:
    E, B, A, zb = (float(p[k]) for k in ("E", "B", "A", "zbar"))
    bounds = [int(b) for b in _as_list(p.get("bounds", "10,100,1000"))]
    try:
        reps = pmap(lambda b: admissible_z0(zb, E, B, A, b), bounds)
    except ValueError as e:
        raise ComputationError("domain", str(e))
    if verify:
        worst = spot_check(zb, E, B, A, max(bounds))
        if not worst <= PERIODIC_TOL:
            raise ComputationError("periodicity", f"spot-check residual {worst:.3e}")
    return _csv_rows(["bound", "count", "max_gap"], ((r.bound, r.count, r.max_gap) for r in reps))


def run_mls(p: dict, verify: bool) -> str:
    files = p["lattice"]
    if len(files) != 2:
        raise ComputationError("bad-lattices", "exactly two --lattice files are needed")
    lat1, lat2 = (load_lattice(f) for f in files)
    E1, B1, A1 = float(p["E"]), float(p["B"]), float(p.get("A", 1.0))
    E2 = float(p.get("E2") or E1)
    B2 = float(B1 if p.get("B2") is None else p["B2"])
    A2 = float(p.get("A2") or A1)
    wl, cap = int(p.get("word_len", 6)), int(p.get("cap", DEFAULT_CAP))
    try:
        s1, s2 = pmap(lambda a: marked_spectrum(*a, word_len=wl, cap=cap),
                      [(lat1, E1, B1, A1), (lat2, E2, B2, A2)])
    except ValueError as e:
        raise ComputationError("domain", str(e))
    marking = None
    if p.get("marking", "natural") == "natural":
        try:
            m = natural_marking(lat1, lat2, wl, A1, A2)
        except ValueError as e:
            raise ComputationError("marking", str(e))
        marking = {k: v for k, v in m.items() if k in s1.entries and v in s2.entries}
    if verify:
        for s in (s1, s2):
            worst = _verify_spectrum(s)
            if not worst <= PERIODIC_TOL:
                raise ComputationError("periodicity", f"marked spectrum residual {worst:.3e}")
    equal, report = compare_mls(s1, s2, marking)
    rows = [(f"{k1[0]!r};{k1[1]!r}", f"{k2[0]!r};{k2[1]!r}", eq, detail)
            for k1, k2, eq, detail in report]
    out = _csv_rows(["class1", "class2", "equal", "detail"], rows)
    if equal:
        return out + "MLS-EQUAL\n"
    k1 = next(r[0] for r in report if not r[2])
    return out + f"MLS-DIFFER key={k1[0]!r},{k1[1]!r}\n"


def _verify_spectrum(s) -> float:
    worst = 0.0
    for (vn, zg) in s.entries:
        cls = FreeHomotopyClass(vn, zg)
        fams, _ = spectrum_families(cls, s.E, s.B, s.A, s.cap)
        gamma = cls.representative(s.A)
        for f in fams:
            worst = max(worst, family_residual(f, s.B, s.A, gamma))
    return worst


def _load_seeds(spec):
    if spec in (None, "grid"):
        return None
    path = Path(spec)
    if path.suffix == ".json":
        return [tuple(map(float, s)) for s in json.loads(path.read_text())]
    rows = [r for r in csv.reader(path.read_text().splitlines()) if r]
    if rows and not _is_number(rows[0][0]):
        rows = rows[1:]
    return [tuple(float(x) for x in r[:3]) for r in rows]


def _is_number(s) -> bool:
    try:
        float(s)
        return True
    except ValueError:
        return False


def run_httype(p: dict, verify: bool) -> str:
    xi1, xi2, E, B = (float(p[k]) for k in ("xi1", "xi2", "E", "B"))
    k = int(p["k"])
    try:
        seeds = _load_seeds(p.get("seeds"))
    except (OSError, ValueError) as e:
        raise ComputationError("seeds", str(e))
    try:
        rep = ht_central_period_solve(xi1, xi2, E, B, k, seeds=seeds)
    except ValueError as e:
        raise ComputationError("domain", str(e))
    if not rep.roots:
        raise ComputationError("no-roots", f"{len(rep.diagnostics)} seeds failed to converge")
    if verify:
        for r in rep.roots:
            # a second u-direction with the same û² must also close up
            u = math.sqrt(r.u_sq) * np.array([0.0, 0.6, 0.0, 0.8])
            res = max(r.periodicity, ht_periodicity_residual(HTInitialData(u, r.z1, r.z2, B),
                                                             xi1, xi2, r.omega))
            if not res <= PERIODIC_TOL:
                raise ComputationError("periodicity", f"root z1={r.z1!r} residual {res:.3e}")
    rows = [(r.u_sq, r.z1, r.z2, r.omega, r.residual) for r in rep.roots]
    return _csv_rows(["u_sq", "z1", "z2", "omega", "residual"], rows)


def run_verify_all(p: dict, verify: bool) -> str:
    """Fast end-to-end self-check; each line is check,status,worst."""
    rng = np.random.default_rng(int(p.get("seed", 0)))

    def oracle():
        worst = 0.0
        for _ in range(5):
            z0 = rng.uniform(-2, 2)
            geo = HeisGeodesic([1.0], rng.uniform(-2, 2), [rng.normal()], [rng.normal()], z0)
            tr = integrate_numeric(geo.system(), geo.momentum(), 5.0, store_every=50)
            worst = max(worst, float(np.max(np.abs(tr.points - heis_eval(geo, tr.times)))))
        return worst, ORACLE_TOL

    def spectrum():
        z = 20 * math.pi
        fams = central_spiral_families(z, 2.0, 1.0, 1.0)
        worst = max(family_residual(f, 1.0, 1.0, [0, 0, z]) for f in fams)
        want = 40 * math.pi / math.sqrt(3)
        if not any(abs(f.length - want) < 1e-9 for f in fams):
            worst = math.inf
        return worst, PERIODIC_TOL

    def density():
        return spot_check(1.0, 2.0, 1.0, 1.0, 200), PERIODIC_TOL

    def httype():
        rep = ht_central_period_solve(20 * math.pi, 0.0, 2.0, 1.0, 3)
        if not rep.roots:
            return math.inf, PERIODIC_TOL
        return max(max(r.periodicity, abs(r.z2)) for r in rep.roots), PERIODIC_TOL

    def energy_drift():
        geo = HeisGeodesic([1.0], 0.7, [0.3], [-1.1], 0.4)
        tr = integrate_numeric(geo.system(), geo.momentum(), 10.0)
        e = trajectory_energy(make_system(heisenberg([1.0]), 0.7), tr)
        return float(np.max(np.abs(e - energy(geo))) / energy(geo)), 1e-8

    checks = {"oracle": oracle, "spectrum": spectrum, "density": density,
              "httype": httype, "energy": energy_drift}
    results = pmap(lambda kv: (kv[0], *kv[1]()), list(checks.items()))
    rows, failed = [], []
    for name, worst, tol in results:
        ok = worst <= tol
        rows.append((name, "pass" if ok else "FAIL", worst))
        if not ok:
            failed.append(name)
    out = _csv_rows(["check", "status", "worst"], rows)
    if failed:
        raise _Partial(out, failed)
    return out


class _Partial(ComputationError):
    def __init__(self, out, failed):
        super().__init__("verify-failed", ",".join(failed))
        self.out = out


# argument handling

COMMANDS = {
    "geodesic": (run_geodesic, ["A", "B", "z0", "T"], {"samples": 101}),
    "spectrum": (run_spectrum, ["class", "E", "B"], {"A": 1.0, "cap": DEFAULT_CAP}),
    "density": (run_density, ["E", "B", "zbar"], {"A": 1.0, "bounds": "10,100,1000"}),
    "mls": (run_mls, ["lattice", "E", "B"], {"A": 1.0, "word_len": 6, "cap": DEFAULT_CAP,
                                            "marking": "natural"}),
    "httype": (run_httype, ["xi1", "xi2", "E", "B", "k"], {"seeds": "grid"}),
    "verify-all": (run_verify_all, [], {"seed": 0}),
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="magflow", description="Magnetic geodesics on Heisenberg groups")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON file with parameter values; flags override it")
        sp.add_argument("--out", help="write output here instead of stdout")
        sp.add_argument("--verify", action="store_true", default=None,
                        help="re-run residual checks and fail on violation")
        return sp

    g = common(sub.add_parser("geodesic", help="closed-form trajectory as CSV"))
    g.add_argument("--A", help="A_i, comma separated")
    g.add_argument("--B", type=float)
    g.add_argument("--u", help="u_i, comma separated")
    g.add_argument("--v", help="v_i, comma separated")
    g.add_argument("--z0", type=float)
    g.add_argument("--T", type=float)
    g.add_argument("--samples", type=int)

    s = common(sub.add_parser("spectrum", help="periodic families in a free homotopy class"))
    s.add_argument("--class", dest="class", help="vnorm,zgamma")
    s.add_argument("--E", type=float)
    s.add_argument("--B", type=float)
    s.add_argument("--A", type=float)
    s.add_argument("--cap", type=int)
    s.add_argument("--csv", action="store_true", default=None)

    d = common(sub.add_parser("density", help="max gap of admissible z0 per bound"))
    d.add_argument("--E", type=float)
    d.add_argument("--B", type=float)
    d.add_argument("--A", type=float)
    d.add_argument("--zbar", type=float)
    d.add_argument("--bounds", help="comma separated caps on h and l")

    m = common(sub.add_parser("mls", help="compare marked length spectra of two lattices"))
    m.add_argument("--lattice", action="append", help="JSON lattice file (give twice)")
    m.add_argument("--E", type=float)
    m.add_argument("--E2", type=float, help="energy for the second lattice (default: --E)")
    m.add_argument("--B", type=float)
    m.add_argument("--B2", type=float)
    m.add_argument("--A", type=float)
    m.add_argument("--A2", type=float)
    m.add_argument("--word-len", dest="word_len", type=int)
    m.add_argument("--cap", type=int)
    m.add_argument("--marking", choices=["natural", "identity"])

    h = common(sub.add_parser("httype", help="central periods on the 6-dim H-type group"))
    h.add_argument("--xi1", type=float)
    h.add_argument("--xi2", type=float)
    h.add_argument("--E", type=float)
    h.add_argument("--B", type=float)
    h.add_argument("--k", type=int)
    h.add_argument("--seeds", help="'grid' or a JSON/CSV file of (u_sq, z1, z2) seeds")

    v = common(sub.add_parser("verify-all", help="fast end-to-end self-check"))
    v.add_argument("--seed", type=int)
    return ap


def parse_config(argv=None, parser=None) -> RunConfig:
    parser = parser or build_parser()
    ns = parser.parse_args(argv)
    args = vars(ns)
    name = args.pop("subcommand")
    _, required, defaults = COMMANDS[name]
    cfg_path = args.pop("config")
    out, verify = args.pop("out"), args.pop("verify")
    if cfg_path:
        try:
            file_cfg = json.loads(Path(cfg_path).read_text())
        except (OSError, ValueError) as e:
            parser.error(f"cannot read config {cfg_path}: {e}")
        if not isinstance(file_cfg, dict):
            parser.error("config must be a JSON object")
        for k, val in file_cfg.items():
            k = k.replace("-", "_")
            if k == "verify":
                verify = verify if verify is not None else bool(val)
            elif k == "out":
                out = out or val
            elif args.get(k) is None:
                args[k] = val
    for k, val in defaults.items():
        if args.get(k) is None:
            args[k] = val
    missing = [k for k in required if args.get(k) is None]
    if missing:
        parser.error("missing required: " + ", ".join("--" + k.replace("_", "-") for k in missing))
    if name == "mls" and isinstance(args["lattice"], str):
        args["lattice"] = [args["lattice"]]
    for k in ("E", "E2"):
        if args.get(k) is not None and not float(args[k]) > 0:
            parser.error(f"--{k} must be positive")
    for k in ("A", "A2"):
        if args.get(k) is not None and isinstance(args[k], (int, float)) and not args[k] > 0:
            parser.error(f"--{k} must be positive")
    params = {k: val for k, val in args.items() if val is not None}
    return RunConfig(name, params, out, bool(verify))


def main(argv=None) -> int:
    parser = build_parser()
    cfg = parse_config(argv, parser)
    fn = COMMANDS[cfg.subcommand][0]
    try:
        text = fn(cfg.params, cfg.verify)
        code = 0
    except _Partial as e:
        text, code = e.out, 1
        print(f"ERROR {e.code} {e.detail}", file=sys.stderr)
    except ComputationError as e:
        print(f"ERROR {e.code} {e.detail}", file=sys.stderr)
        return 1
    except (ValueError, FloatingPointError, np.linalg.LinAlgError) as e:
        print(f"ERROR {type(e).__name__} {e}", file=sys.stderr)
        return 1
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
