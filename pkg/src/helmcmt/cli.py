"""Command-line interface.

Subcommands write CSV (17 significant digits) or JSON to ``--out`` or
standard output. Exit status is 0 on success, 1 when a numerical check or
solve fails, and 2 for invalid input.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from . import __version__
from .cmt_solver import sweep
from .config import SweepConfig, load_json, medium_from_dict
from .coupling import build_coupling, gram_H, rokhlin_lmax
from .errors import CapabilityError, DomainError, ModeSetFormatError, SolverError
from .exact_reference import exact_S
from .interior_expansion import BesselTarget, MixedBasis, linf_rel_error
from .model import FictitiousDisk, IncidentField
from .modeset_file import coupling_to_dict, read_modeset, write_modeset
from .radial_modes import DIRICHLET, NEUMANN, solve_modes
from .specfun import cyl_deriv, cyl_eval, cyl_zeros
from .waveguide import WaveguideSystem, solve_waveguide_cme, stub_reflection_oracle

__all__ = ["main"]

EXIT_OK, EXIT_FAILED, EXIT_INPUT = 0, 1, 2


def fmt(x):
    return "nan" if not np.isfinite(x) else f"{float(x):.17g}"


@contextmanager
def _open_out(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def write_csv(path, header, rows):
    with _open_out(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, str) else fmt(v) for v in row])


def _config(args):
    return load_json(args.config) if args.config else {}


def _pick(args, cfg, name, default=None):
    """Command-line value if given, else the config value, else ``default``."""
    v = getattr(args, name, None)
    if v is not None:
        return v
    return cfg.get(name, default)


# zeros -----------------------------------------------------------------

def cmd_zeros(args):
    cfg = _config(args)
    kinds = _pick(args, cfg, "kind", ["J'", "J"])
    if isinstance(kinds, str):
        kinds = [kinds]
    order = int(_pick(args, cfg, "order", 0))
    count = int(_pick(args, cfg, "count", 10))
    rows, ok = [], True
    for kind in kinds:
        table = cyl_zeros(kind, order, count)
        for i, z in enumerate(table.zeros, start=1):
            f = cyl_deriv("J", order, z) if table.kind == "J'" else cyl_eval("J", order, z)
            ok &= abs(float(f)) <= 1e-10
            rows.append([table.kind, str(order), str(i), z, z / (2 * np.pi)])
    write_csv(args.out, ["kind", "order", "index", "z", "z_over_2pi"], rows)
    return EXIT_OK if ok else EXIT_FAILED


# modes -----------------------------------------------------------------

def cmd_modes(args):
    cfg = _config(args)
    medium = medium_from_dict(cfg.get("medium", {"preset": "homogeneous"}))
    disk = FictitiousDisk(float(cfg.get("disk", {}).get("R", 1.0)))
    lmax = int(_pick(args, cfg, "lmax", 0))
    counts = cfg.get("counts")
    C = _pick(args, cfg, "C", None if counts else 1.5)
    coupling = build_coupling(medium, disk, lmax=lmax, C=C if counts is None else None,
                              counts=counts)
    # orthonormality of every kind and order
    ok = True
    for modes in (coupling.neumann_modes, coupling.dirichlet_modes):
        G = gram_H(modes, modes)
        ok &= bool(np.abs(G - np.eye(len(modes))).max() <= 1e-8)
    if args.out is None:
        json.dump(coupling_to_dict(coupling), sys.stdout, indent=1)
        sys.stdout.write("\n")
    else:
        write_modeset(coupling, args.out)
    return EXIT_OK if ok else EXIT_FAILED


# expand ----------------------------------------------------------------

def _pairs(values):
    out = []
    for v in values:
        if isinstance(v, str):
            nn, nd = v.split(":")
            out.append((int(nn), int(nd)))
        else:
            out.append((int(v[0]), int(v[1])))
    return out


def cmd_expand(args):
    cfg = _config(args)
    kRs = [float(x) for x in _pick(args, cfg, "kR", [np.pi])]
    pairs = _pairs(_pick(args, cfg, "pairs", [f"{n}:{n}" for n in (1, 2, 5, 10, 15, 20, 30)]))
    R = float(cfg.get("R", 1.0))
    medium = medium_from_dict(cfg.get("medium", {"preset": "homogeneous"}))
    nn_max = max(p[0] for p in pairs)
    nd_max = max(p[1] for p in pairs)
    neu = solve_modes(NEUMANN, medium, R, 0, count=nn_max).modes if nn_max else ()
    dirichlet = solve_modes(DIRICHLET, medium, R, 0, count=nd_max).modes if nd_max else ()
    rows, ok = [], True
    for kR in kRs:
        target = BesselTarget(kR / R)
        basis = MixedBasis(target, neu, dirichlet)
        for nn, nd in pairs:
            err = linf_rel_error(basis.fit(nn, nd), target)
            ok &= bool(np.isfinite(err))
            rows.append([str(nn), str(nd), kR, err])
    write_csv(args.out, ["N_N", "N_D", "kR", "linf_rel_error"], rows)
    return EXIT_OK if ok else EXIT_FAILED


# spectrum --------------------------------------------------------------

def run_spectrum(config: SweepConfig, out=None, summary_path=None, max_workers=None):
    """Sweep the configured medium and write the spectrum CSV and summary JSON.

    Returns the exit status.
    """
    t0 = time.perf_counter()
    omegas = config.omegas()
    if config.modeset:
        coupling = read_modeset(config.modeset)
        if abs(coupling.R - config.disk.R) > 1e-12 * config.disk.R:
            raise ModeSetFormatError(f"mode set has R = {coupling.R}, config has "
                                     f"{config.disk.R}", "disk.R")
    else:
        lmax = config.lmax
        if lmax is None:
            lmax = rokhlin_lmax(config.medium.wavenumber(omegas.max()) * config.disk.R)
        coupling = build_coupling(config.medium, config.disk, lmax=lmax, C=config.C)
    t_build = time.perf_counter() - t0
    orders = coupling.orders
    results = sweep(coupling, omegas, config.incident, max_workers=max_workers)
    t_sweep = time.perf_counter() - t0 - t_build

    header = ["omega", "omega_R_over_2pi_c"]
    for l in orders:
        header += [f"re_S_{l}", f"im_S_{l}"]
    header += ["sigma", "unitarity_residual", "optical_residual"]
    if config.compare == "exact":
        for l in orders:
            header += [f"re_S_exact_{l}", f"im_S_exact_{l}"]
        header += ["rel_error"]
    rows, failed = [], 0
    # optical residual stays null without a plane-wave direction
    worst = {"unitarity_residual": 0.0, "optical_residual": None, "rel_error": 0.0}
    c0 = coupling.c0
    for w, res in zip(omegas, results):
        row = [w, w * config.disk.R / (2 * np.pi * c0)]
        if res is None:
            failed += 1
            n_rest = len(header) - 2
            rows.append(row + [np.nan] * n_rest)
            continue
        d = np.diag(res.S)
        for z in d:
            row += [z.real, z.imag]
        opt = np.nan if res.optical_residual is None else res.optical_residual
        row += [res.sigma, res.unitarity, opt]
        worst["unitarity_residual"] = max(worst["unitarity_residual"], res.unitarity)
        if np.isfinite(opt):
            worst["optical_residual"] = max(worst["optical_residual"] or 0.0, opt)
        if config.compare == "exact":
            ex = np.array([exact_S(config.medium, int(abs(l)), res.omega) for l in orders])
            for z in ex:
                row += [z.real, z.imag]
            rel = float(np.max(np.abs(d - ex) / np.abs(ex)))
            row.append(rel)
            worst["rel_error"] = max(worst["rel_error"], rel)
        rows.append(row)
    write_csv(out, header, rows)
    summary = {
        "version": __version__,
        "provenance": coupling.provenance,
        "n_neumann": coupling.n_neumann,
        "n_dirichlet": coupling.n_dirichlet,
        "lmax": coupling.lmax,
        "per_order": {str(b.order): [len(b.omega_n), len(b.omega_d)] for b in coupling.blocks},
        "max_retained_omega": coupling.max_eigenfrequency,
        "points": int(omegas.size),
        "failed_points": failed,
        "max_residuals": worst if config.compare == "exact" else
        {k: v for k, v in worst.items() if k != "rel_error"},
        "timing_s": {"build": t_build, "sweep": t_sweep},
    }
    text = json.dumps(summary, indent=1)
    if summary_path is not None:
        Path(summary_path).write_text(text + "\n")
    elif out is not None:
        Path(str(out) + ".summary.json").write_text(text + "\n")
    else:
        print(text, file=sys.stderr)
    return EXIT_FAILED if failed else EXIT_OK


def cmd_spectrum(args):
    if not args.config:
        raise ModeSetFormatError("spectrum needs --config")
    cfg = load_json(args.config)
    if args.compare:
        cfg["compare"] = args.compare
    if args.modeset:
        cfg["modeset"] = args.modeset
    config = SweepConfig.from_dict(cfg)
    return run_spectrum(config, args.out, args.summary, args.workers)


# exact -----------------------------------------------------------------

def cmd_exact(args):
    if not args.config:
        raise ModeSetFormatError("exact needs --config")
    config = SweepConfig.from_dict(load_json(args.config))
    omegas = config.omegas()
    medium = config.medium
    lmax = config.lmax
    if lmax is None:
        lmax = rokhlin_lmax(medium.wavenumber(omegas.max()) * config.disk.R)
    orders = np.arange(-lmax, lmax + 1)
    incident: IncidentField = config.incident
    header = ["omega", "omega_R_over_2pi_c"]
    for n in range(lmax + 1):
        header += [f"re_S_{n}", f"im_S_{n}"]
    header.append("sigma")
    rows, ok = [], True
    for w in omegas:
        s = {n: exact_S(medium, n, w) for n in range(lmax + 1)}
        ok &= all(abs(abs(z) - 1) <= 1e-10 for z in s.values())
        alpha = incident.incoming(orders)
        F = np.array([s[abs(int(l))] for l in orders]) * alpha - incident.incident_outgoing(orders)
        k = medium.wavenumber(w)
        row = [w, w * config.disk.R / (2 * np.pi * medium.c0)]
        for n in range(lmax + 1):
            row += [s[n].real, s[n].imag]
        row.append(4.0 / k * float(np.sum(np.abs(F) ** 2)))
        rows.append(row)
    write_csv(args.out, header, rows)
    return EXIT_OK if ok else EXIT_FAILED


# waveguide -------------------------------------------------------------

def cmd_waveguide(args):
    cfg = _config(args)
    system = WaveguideSystem(float(_pick(args, cfg, "width", 0.01)),
                             float(_pick(args, cfg, "depth", 1.0)),
                             float(cfg.get("rho0", 1.0)), float(cfg.get("kappa0", 1.0)))
    n_cavity = int(_pick(args, cfg, "n_cavity", 80))
    kw = _pick(args, cfg, "K0W", [0.3, 0.7, 1.2])
    c0, W = system.c0, system.depth
    header = ["omega", "K0W", "re_alpha_plus", "im_alpha_plus", "abs_alpha_plus",
              "re_oracle", "im_oracle", "error"]
    rows, ok = [], True
    for x in kw:
        w = float(x) * c0 / W
        sol = solve_waveguide_cme(system, w, 1.0, n_cavity)
        a = complex(sol.alpha_plus[0])
        r = stub_reflection_oracle(system, w)
        ok &= abs(abs(a) - 1.0) <= 1e-6
        rows.append([w, float(x), a.real, a.imag, abs(a), r.real, r.imag, abs(a - r)])
    write_csv(args.out, header, rows)
    return EXIT_OK if ok else EXIT_FAILED


# -----------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="helmcmt", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        s = sub.add_parser(name, help=help)
        s.add_argument("--config", help="JSON configuration file")
        s.add_argument("--out", help="output path (default: standard output)")
        s.set_defaults(func=func)
        return s

    s = add("zeros", cmd_zeros, "zeros of J_n and J_n' as CSV")
    s.add_argument("--kind", action="append", choices=["J", "J'"])
    s.add_argument("--order", type=int)
    s.add_argument("--count", type=int)

    s = add("modes", cmd_modes, "normal modes and coupling data as a mode-set JSON file")
    s.add_argument("--lmax", type=int)
    s.add_argument("--C", type=float)

    s = add("expand", cmd_expand, "mixed-expansion error of J_0(k r) as CSV")
    s.add_argument("--kR", type=float, action="append")
    s.add_argument("--pairs", action="append", metavar="NN:ND")

    s = add("spectrum", cmd_spectrum, "coupled-mode scattering sweep")
    s.add_argument("--compare", choices=["exact"])
    s.add_argument("--modeset", help="mode-set file to use instead of computed modes")
    s.add_argument("--summary", help="summary JSON path (default: OUT.summary.json)")
    s.add_argument("--workers", type=int)

    add("exact", cmd_exact, "closed-form scattering of concentric disks")

    s = add("waveguide", cmd_waveguide, "duct with closed stub: reflection vs mode matching")
    s.add_argument("--width", type=float)
    s.add_argument("--depth", type=float)
    s.add_argument("--n-cavity", dest="n_cavity", type=int)
    s.add_argument("--K0W", type=float, action="append")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ModeSetFormatError, DomainError, CapabilityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
