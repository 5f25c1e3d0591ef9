"""Command-line driver.

    spectral-enclose enclose --potential harmonic --box-l 6 --mesh-n 400
    spectral-enclose mesh-sweep --mesh-n 100,141,200,282,400
    spectral-enclose shift-sweep --mesh-n 200 --shifts 12,16,20,40,80
    spectral-enclose galerkin-compare --mesh-n 200 --shifts=-5,-10,-20,-40
    spectral-enclose truncation-probe --mesh-n 300,350,...,1050
    spectral-enclose dump-matrices --mesh-n 10 --out matrices/

Errors go to stderr as one JSON object; the exit code names the failure class
(2 config, 3 shift in spectrum, 4 solver failure, 5 crossed enclosure).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

from . import __version__
from .assembly import assemble, write_matrix
from .errors import EncloseError, InvalidArgumentError
from .mesh import make_mesh
from .studies import (
    RunConfig,
    StudyResult,
    galerkin_compare,
    mesh_sweep,
    run_enclose,
    shift_sweep,
    to_csv,
    to_json,
    truncation_probe,
)

log = logging.getLogger("spectral_enclose")


def _floats(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text):
    vals = [int(v) for v in text.split(",") if v.strip()]
    return vals[0] if len(vals) == 1 else vals


def _potential(text):
    return text if not any(c.isdigit() for c in text) else _floats(text)


FLAG_FIELDS = {
    "potential": "potential",
    "box_l": "L",
    "mesh_n": "n",
    "t_minus": "t_minus",
    "t_plus": "t_plus",
    "count": "count",
    "ell_hint": "ell_hint",
    "out": "out",
    "format": "format",
    "jobs": "jobs",
    "shifts": "shifts",
    "slope_window": "slope_window",
    "order": "order",
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="spectral-enclose",
        description="Two-sided eigenvalue enclosures for -u'' + V(x) u on [-L, L].",
    )
    p.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat JSON object with RunConfig fields; flags override it")
    common.add_argument("--potential", type=_potential,
                        help="harmonic, anharmonic, free, or ascending coefficients '0,0,1'")
    common.add_argument("--box-l", type=float, help="half-length L of the box")
    common.add_argument("--mesh-n", type=_ints, help="element count, or comma list for sweeps")
    common.add_argument("--t-minus", type=float, help="shift below the spectrum (upper bounds)")
    common.add_argument("--t-plus", type=float, help="shift above the wanted eigenvalues (lower bounds)")
    common.add_argument("--count", type=int, help="number of eigenvalues to enclose")
    common.add_argument("--ell-hint", type=int, help="known number of eigenvalues below t_plus")
    common.add_argument("--out", help="output path (stdout when omitted)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--deterministic", action="store_true", default=None,
                        help="single worker, fixed summation order")
    common.add_argument("--jobs", type=int, help="worker processes (default $SPECTRAL_ENCLOSE_JOBS or 1)")
    common.add_argument("-v", "--verbose", action="store_true")

    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("enclose", parents=[common], help="enclosure table at one mesh")
    ms = sub.add_parser("mesh-sweep", parents=[common], help="widths and fitted order over meshes")
    ms.add_argument("--slope-window", type=_floats, help="n_min,n_max used in the slope fit")
    ss = sub.add_parser("shift-sweep", parents=[common], help="widths over symmetric shift pairs")
    ss.add_argument("--shifts", type=_floats, help="ladder of t_plus values; t_minus = -t_plus")
    gc = sub.add_parser("galerkin-compare", parents=[common], help="LMG vs Galerkin upper bound for lambda_1")
    gc.add_argument("--shifts", type=_floats, help="ladder of t_minus values moving away from 0")
    tp = sub.add_parser("truncation-probe", parents=[common], help="locate the round-off floor")
    tp.add_argument("--order", type=float, help="expected convergence order (default 4)")
    sub.add_parser("dump-matrices", parents=[common], help="write A0, A1, A2 as sparse text")
    return p


def config_from_args(args) -> RunConfig:
    base = RunConfig.load(args.config) if getattr(args, "config", None) else RunConfig()
    d = asdict(base)
    for flag, name in FLAG_FIELDS.items():
        val = getattr(args, flag, None)
        if val is not None:
            d[name] = val
    if args.deterministic:
        d["deterministic"] = True
    cfg = RunConfig.from_dict(d)
    if args.command in ("enclose", "shift-sweep", "galerkin-compare", "dump-matrices") and isinstance(cfg.n, list):
        if len(cfg.n) != 1:
            raise InvalidArgumentError(f"{args.command} takes a single --mesh-n")
        cfg.n = cfg.n[0]
    return cfg.validate()


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)


def _summary_path(out: str) -> str:
    p = Path(out)
    return str(p.with_name(p.stem + "_summary" + p.suffix))


def write_study(res: StudyResult, cfg: RunConfig):
    if cfg.format == "json":
        _emit(to_json({"kind": res.kind, "config": res.config, "rows": res.rows,
                       "summary": res.summary}), cfg.out)
        return
    _emit(to_csv(res.rows), cfg.out)
    if cfg.out is not None:
        _emit(to_csv(res.summary), _summary_path(cfg.out))
    for s in res.summary:
        log.info("summary %s", s)


def cmd_enclose(cfg: RunConfig):
    rep = run_enclose(cfg)
    if cfg.format == "json":
        payload = rep.to_dict()
        payload["config"] = asdict(cfg)
        _emit(to_json(payload), cfg.out)
    else:
        rows = [vars(r) for r in rep.records]
        text = to_csv(rows) if rows else (
            "index,lower,upper,width,t_minus,t_plus,galerkin_upper\n")
        _emit(text, cfg.out)
    if rep.index_caveat:
        log.warning("%s", rep.index_caveat)
    for f in rep.flags:
        log.warning("flag: %s", f)
    return rep


def cmd_dump_matrices(cfg: RunConfig):
    forms = assemble(cfg.potential, make_mesh(cfg.L, cfg.n_list[0]))
    outdir = Path(cfg.out or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    for name in ("A0", "A1", "A2"):
        write_matrix(outdir / f"{name}.mtx", getattr(forms, name))
    return forms


COMMANDS = {
    "mesh-sweep": mesh_sweep,
    "shift-sweep": shift_sweep,
    "galerkin-compare": galerkin_compare,
    "truncation-probe": truncation_probe,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        cfg = config_from_args(args)
        if args.command == "enclose":
            cmd_enclose(cfg)
        elif args.command == "dump-matrices":
            cmd_dump_matrices(cfg)
        else:
            write_study(COMMANDS[args.command](cfg), cfg)
    except EncloseError as exc:
        sys.stderr.write(json.dumps(exc.to_dict()) + "\n")
        return exc.exit_code
    except (OSError, TypeError, ValueError) as exc:
        err = InvalidArgumentError(str(exc))
        sys.stderr.write(json.dumps(err.to_dict()) + "\n")
        return err.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
