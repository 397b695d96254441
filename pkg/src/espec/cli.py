"""Command-line entry point: ``espec {free,ed,scan,validate}``.

Effective settings are resolved as built-in defaults, then a JSON config
file (``--config``), then explicit flags; the result is echoed into the
output metadata so a document is enough to reproduce its run.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, analysis, report
from .ed import DEFAULT_FLOOR, DEFAULT_GAP_TOL, DEFAULT_MAX_STATES, EDOptions, ed_entanglement_spectrum
from .errors import EngineMismatch, EspecError, InvalidParams
from .freefermion import DEFAULT_MAX_LEVELS, DEFAULT_XI_WINDOW, free_entanglement_spectrum
from .model import CutSpec, ModelParams, validate_params

log = logging.getLogger("espec")

DEFAULTS = {
    "common": {"U": 0.0, "t": 1.0, "out": None, "format": "json", "figures": True, "phase_labels": None},
    "free": {"max_levels": DEFAULT_MAX_LEVELS, "xi_window": DEFAULT_XI_WINDOW, "rel_tol": 1e-8},
    "ed": {
        "seed": 0, "tol": 1e-10, "max_iter": 500, "max_states": DEFAULT_MAX_STATES,
        "rel_tol": 1e-6, "gap_tol": DEFAULT_GAP_TOL, "floor": DEFAULT_FLOOR, "audit": False,
    },
    "scan": {
        "engine": "auto", "workers": None, "rel_tol_free": 1e-8, "rel_tol_ed": 1e-6,
        "max_levels": DEFAULT_MAX_LEVELS, "xi_window": DEFAULT_XI_WINDOW, "seed": 0, "tol": 1e-10,
        "max_iter": 500, "audit": False, "gnuplot": False,
    },
}
REQUIRED = {"free": ("L", "LA", "dt"), "ed": ("L", "LA", "dt"), "scan": ("L", "LA", "dt", "U")}


def _finite_or_str(x):
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    if isinstance(x, dict):
        return {k: _finite_or_str(v) for k, v in x.items()}
    if isinstance(x, list):
        return [_finite_or_str(v) for v in x]
    return x


def parse_axis(tokens) -> list[float]:
    """Axis values from comma lists and ``start:stop:count`` ranges."""
    if isinstance(tokens, (int, float)):
        return [float(tokens)]
    values: list[float] = []
    for tok in tokens:
        if isinstance(tok, (int, float)):
            values.append(float(tok))
            continue
        for part in str(tok).split(","):
            part = part.strip()
            if not part:
                continue
            if ":" in part:
                start, stop, count = part.split(":")
                values.extend(float(v) for v in np.linspace(float(start), float(stop), int(count)))
            else:
                values.append(float(part))
    return values


def resolve_config(command: str, flags: dict, config_path: str | None = None) -> dict:
    cfg = {"command": command}
    cfg.update(DEFAULTS["common"])
    cfg.update(DEFAULTS.get(command, {}))
    if config_path:
        with open(config_path, encoding="utf-8") as fh:
            cfg.update(json.load(fh))
    cfg.update({k: v for k, v in flags.items() if v is not None})
    cfg["command"] = command
    missing = [k for k in REQUIRED.get(command, ()) if cfg.get(k) is None]
    if missing:
        raise InvalidParams(f"missing required settings: {', '.join(missing)}")
    if "xi_window" in cfg:
        cfg["xi_window"] = float(cfg["xi_window"])
    return cfg


def _params(cfg) -> tuple[ModelParams, CutSpec]:
    p = validate_params(ModelParams(int(cfg["L"]), float(cfg["dt"]), float(cfg["U"]), float(cfg["t"])))
    cut = CutSpec(int(cfg["LA"])).check(p.L)
    return p, cut


def compute(cfg: dict):
    """Run the engine named by ``cfg['command']``; returns the spectrum,
    its groups, signature and metadata."""
    params, cut = _params(cfg)
    t0 = time.perf_counter()
    if cfg["command"] == "free":
        if params.U != 0:
            raise EngineMismatch(f"free engine requires U = 0, got {params.U}")
        spec = free_entanglement_spectrum(params, cut, int(cfg["max_levels"]), float(cfg["xi_window"]))
        extra = {}
    else:
        opts = EDOptions(
            seed=int(cfg["seed"]), tol=float(cfg["tol"]), max_iter=int(cfg["max_iter"]),
            max_states=int(cfg["max_states"]), gap_tol=float(cfg["gap_tol"]), floor=float(cfg["floor"]),
            audit=bool(cfg["audit"]),
        )
        spec = ed_entanglement_spectrum(params, cut, opts)
        extra = {k: spec.meta[k] for k in ("seed", "iterations", "residual", "gap", "energies", "dim")}
    groups, sig = analysis.analyse(spec, float(cfg["rel_tol"]))
    meta = {
        "engine": cfg["command"],
        "params": {"L": params.L, "t": params.t, "delta_t": params.delta_t, "U": params.U},
        "cut": {"L_A": cut.L_A},
        "config": _finite_or_str({k: v for k, v in cfg.items() if k not in ("out",)}),
        **extra,
        "wall_time": time.perf_counter() - t0,
    }
    if cfg.get("phase_labels"):
        meta["phase_labels"] = cfg["phase_labels"]
    return spec, groups, sig, meta


def rerun(doc: dict):
    """Recompute a spectrum from a document's metadata alone."""
    cfg = dict(doc["metadata"]["config"])
    cfg["xi_window"] = float(cfg.get("xi_window", DEFAULT_XI_WINDOW))
    spec, _, _, _ = compute(cfg)
    return spec


def _stem(cfg) -> str:
    return f"{cfg['command']}_L{cfg['L']}_LA{cfg['LA']}_dt{float(cfg['dt']):g}_U{float(cfg['U']):g}"


def run_spectrum(cfg: dict, stdout=sys.stdout) -> dict:
    spec, groups, sig, meta = compute(cfg)
    doc = report.spectrum_document(spec, groups, sig, meta)
    out = cfg.get("out")
    if out:
        base = Path(out) / _stem(cfg)
        if cfg["format"] == "csv":
            report.write_atomic(f"{base}.csv", report.levels_csv(spec))
        report.write_atomic(f"{base}.json", report.dumps(doc))
        report.write_atomic(f"{base}_plot.csv", report.plot_table(spec))
        if cfg.get("figures"):
            from .plotting import plot_spectrum

            title = f"L={cfg['L']}, L_A={cfg['LA']}, dt={float(cfg['dt']):g}, U={float(cfg['U']):g}"
            plot_spectrum(spec, groups, f"{base}.png", title=title)
    elif cfg["format"] == "csv":
        stdout.write(report.levels_csv(spec))
    else:
        stdout.write(report.dumps(doc))
    log.info("%s: %s (multiplicity %d)", cfg["command"], sig.tag, sig.ground_multiplicity)
    return doc


def run_free(cfg: dict, stdout=sys.stdout) -> dict:
    return run_spectrum({**cfg, "command": "free"}, stdout)


def run_ed(cfg: dict, stdout=sys.stdout) -> dict:
    return run_spectrum({**cfg, "command": "ed"}, stdout)


def grid_from_config(cfg: dict):
    from .scan import GridSpec

    return GridSpec(
        delta_t_values=parse_axis(cfg["dt"]),
        U_values=parse_axis(cfg["U"]),
        L=int(cfg["L"]),
        L_A=int(cfg["LA"]),
        engine=cfg["engine"],
        t=float(cfg["t"]),
        rel_tol_free=float(cfg["rel_tol_free"]),
        rel_tol_ed=float(cfg["rel_tol_ed"]),
        max_levels=int(cfg["max_levels"]),
        xi_window=float(cfg["xi_window"]),
        seed=int(cfg["seed"]),
        lanczos_tol=float(cfg["tol"]),
        max_iter=int(cfg["max_iter"]),
        audit=bool(cfg["audit"]),
    )


def scan_document(grid, cells) -> dict:
    from .scan import SCHEMA_VERSION

    return {
        "metadata": {
            "tool": "espec", "version": __version__, "schema_version": SCHEMA_VERSION,
            "grid": _finite_or_str(grid.to_dict()),
        },
        "cells": [
            {
                "delta_t": c.delta_t, "U": c.U, "engine": c.engine_used, "signature": c.signature,
                "ground_multiplicity": c.ground_multiplicity, "ground_xi": c.ground_xi,
                "splitting": c.splitting, "distribution": c.distribution, "error": c.error,
            }
            for c in cells
        ],
    }


def run_scan(cfg: dict, stdout=sys.stdout):
    from . import scan

    grid = grid_from_config(cfg)
    cells = scan.sweep(grid, cfg.get("workers"))
    csv_text = scan.table_to_csv(scan.diagram_to_table(cells))
    out = cfg.get("out")
    if out:
        base = Path(out) / "phase_diagram"
        report.write_atomic(base.with_suffix(".csv"), csv_text)
        report.write_atomic(base.with_suffix(".json"), report.dumps(scan_document(grid, cells)))
        timing = [{"delta_t": c.delta_t, "U": c.U, "wall_time": c.wall_time} for c in cells]
        report.write_atomic(f"{base}_timing.json", report.dumps({"cells": timing}))
        if cfg.get("gnuplot"):
            report.write_atomic(base.with_suffix(".dat"), scan.multiplicity_matrix(grid, cells))
        if cfg.get("figures"):
            from .plotting import plot_phase_diagram

            plot_phase_diagram(grid, cells, base.with_suffix(".png"))
    else:
        stdout.write(csv_text)
    return cells


def run_validate(stdout=sys.stdout) -> int:
    from .validate import run_checks

    results = run_checks()
    width = max(len(r.name) for r in results)
    for r in results:
        stdout.write(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  {r.detail}\n")
    n_ok = sum(r.passed for r in results)
    stdout.write(f"{n_ok}/{len(results)} checks passed\n")
    return 0 if n_ok == len(results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="espec", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"espec {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, scan=False):
        p.add_argument("--config", help="JSON file of settings (overridden by flags)")
        p.add_argument("--L", type=int, dest="L")
        p.add_argument("--LA", type=int, dest="LA")
        if scan:
            p.add_argument("--dt", nargs="+", help="values, comma lists or start:stop:count")
            p.add_argument("--U", nargs="+", dest="U", help="values, comma lists or start:stop:count")
        else:
            p.add_argument("--dt", type=float)
            p.add_argument("--U", type=float, dest="U")
        p.add_argument("--t", type=float, dest="t")
        p.add_argument("--out", help="output directory (stdout when omitted)")
        p.add_argument("--format", choices=["json", "csv"])
        p.add_argument("--no-figures", dest="figures", action="store_const", const=False)

    def free_opts(p):
        p.add_argument("--max-levels", type=int, dest="max_levels")
        p.add_argument("--xi-window", type=float, dest="xi_window")

    def ed_opts(p):
        p.add_argument("--seed", type=int)
        p.add_argument("--tol", type=float, help="Lanczos residual tolerance")
        p.add_argument("--max-iter", type=int, dest="max_iter")
        p.add_argument("--audit", action="store_const", const=True)

    p = sub.add_parser("free", help="free-fermion engine (U = 0)")
    common(p)
    free_opts(p)
    p.add_argument("--rel-tol", type=float, dest="rel_tol")

    p = sub.add_parser("ed", help="exact diagonalization engine")
    common(p)
    ed_opts(p)
    p.add_argument("--rel-tol", type=float, dest="rel_tol")
    p.add_argument("--max-states", type=int, dest="max_states")
    p.add_argument("--gap-tol", type=float, dest="gap_tol")
    p.add_argument("--floor", type=float)

    p = sub.add_parser("scan", help="phase diagram sweep over (dt, U)")
    common(p, scan=True)
    free_opts(p)
    ed_opts(p)
    p.add_argument("--engine", choices=["auto", "free", "ed"])
    p.add_argument("--workers", type=int, help="worker processes (default: ESPEC_THREADS or CPU count)")
    p.add_argument("--rel-tol-free", type=float, dest="rel_tol_free")
    p.add_argument("--rel-tol-ed", type=float, dest="rel_tol_ed")
    p.add_argument("--gnuplot", action="store_const", const=True, help="also write a gnuplot matrix")

    sub.add_parser("validate", help="run the built-in oracle checks")
    return parser


def _attach_negative_values(argv):
    # argparse reads "-0.4,0.4" as an option; bind such values to their flag
    out = []
    for tok in argv:
        if out and out[-1] in ("--dt", "--U") and tok[:1] == "-" and tok[1:2] in set("0123456789."):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def main(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    argv = _attach_negative_values(sys.argv[1:] if argv is None else list(argv))
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    if args.command == "validate":
        return run_validate(stdout)
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config", "verbose")}
    try:
        cfg = resolve_config(args.command, flags, args.config)
        if args.command == "scan":
            run_scan(cfg, stdout)
        else:
            run_spectrum(cfg, stdout)
    except EspecError as exc:
        print(f"espec: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
