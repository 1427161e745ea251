"""``chainrec`` command line: chain, scan, tangency, plotdata.

Exit codes: 0 success, 1 configuration error, 2 numerical failure,
3 a scan event stayed unclassified.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import config as cfgmod
from . import homoclinic as hc
from .errors import ChainrecError, ConfigError, NumericalError, RasterFormatError
from .graph import BoxPartition
from .raster import Raster, write_covering_csv, write_jsonl, write_plotdata
from .scan import UNCLASSIFIED, covering, scan

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_UNCLASSIFIED = 0, 1, 2, 3

log = logging.getLogger("chainrec")


def _out_dir(cfg: cfgmod.RunConfig, args) -> Path:
    d = Path(args.out) if args.out else cfg.out_dir
    d.mkdir(parents=True, exist_ok=True)
    return d


def _load(args) -> cfgmod.RunConfig:
    if not args.config:
        raise ConfigError("--config is required for this command")
    cfg = cfgmod.load(args.config)
    if args.workers is not None:
        if args.workers < 1:
            raise ConfigError("--workers must be positive")
        cfg.workers = args.workers
    return cfg


def cmd_chain(args) -> int:
    cfg = _load(args)
    out = _out_dir(cfg, args)
    fam = cfg.family
    part = BoxPartition.of(fam, cfg.n_boxes)
    raster = Raster(cfg.n_boxes, *fam.domain)
    rows, summary = [], []
    for lam in cfg.lams:
        a = covering(fam, float(lam), cfg.n_boxes, cfg.eps_factor)
        raster.add(lam, a.boxes)
        rows.extend((lam, part.lower(i), part.upper(i), c) for i, c in zip(a.boxes.tolist(), a.labels.tolist()))
        summary.append({"lambda": float(lam), "n_boxes": cfg.n_boxes, "n_components": a.n_components,
                        "measure": a.measure, "coverage": a.measure / fam.width})
    with open(out / "covering.csv", "w") as fh:
        write_covering_csv(rows, fh)
    raster.save(out / "covering.chxr")
    with open(out / "summary.jsonl", "w") as fh:
        write_jsonl(summary, fh)
    for s in summary:
        print(f"lambda={s['lambda']:.10g} components={s['n_components']} measure={s['measure']:.6g}")
    return EXIT_OK


def cmd_scan(args) -> int:
    cfg = _load(args)
    out = _out_dir(cfg, args)
    profiles, events = scan(cfg.family, cfg.lams, cfg.scan_settings(), workers=cfg.workers)
    raster = Raster(cfg.n_boxes, *cfg.family.domain)
    for p in profiles:
        raster.add(p.lam, p.boxes)
    raster.save(out / "scan.chxr")
    with open(out / "events.jsonl", "w") as fh:
        write_jsonl((e.to_json() for e in events), fh)
    for p in profiles:
        if p.error:
            log.warning("lambda=%.10g: %s", p.lam, p.error)
    for e in events:
        print(f"{e.cause} side={e.side} lambda0={e.lam0:.12g} x={e.x:.6g}")
    print(f"{len(events)} event(s)")
    if any(e.cause == UNCLASSIFIED for e in events):
        log.error("unclassified explosion event present")
        return EXIT_UNCLASSIFIED
    return EXIT_OK


def cmd_tangency(args) -> int:
    cfg = _load(args)
    if args.lam is None:
        raise ConfigError("--lambda is required for tangency")
    fam, lam = cfg.family, args.lam
    w_lo, w_hi = fam.window
    if not w_lo <= lam <= w_hi:
        raise ConfigError(f"--lambda {lam} outside the family window [{w_lo}, {w_hi}]")
    if args.polish:
        params = hc.tangency_parameters(fam, max(w_lo, lam - args.polish), min(w_hi, lam + args.polish),
                                        period_max=cfg.period_max, k_max=cfg.k_max)
        if params:
            lam = min(params, key=lambda p: abs(p.lam - lam)).lam
            log.info("polished parameter to %.16g", lam)
    notes: list[str] = []
    recs = hc.find_tangencies(fam, lam, period_max=cfg.period_max, iterate_cap=cfg.iterate_cap,
                              tol_land=cfg.tol_land, notes=notes)
    lines = [r.to_json() for r in recs]
    for note in notes:
        log.info("%s", note)
    write_jsonl(lines, sys.stdout)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "tangency.jsonl", "w") as fh:
            write_jsonl(lines, fh)
    return EXIT_OK


def cmd_plotdata(args) -> int:
    try:
        raster = Raster.load(args.raster)
    except OSError as exc:
        raise ConfigError(f"{args.raster}: {exc.strerror}") from None
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "plotdata.csv", "w") as fh:
            write_plotdata(raster, fh)
    else:
        write_plotdata(raster, sys.stdout)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="chainrec", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, workers=True):
        p.add_argument("--config", metavar="PATH")
        p.add_argument("--out", metavar="DIR")
        if workers:
            p.add_argument("--workers", type=int, metavar="N")

    p = sub.add_parser("chain", help="recurrent covering at each grid parameter")
    common(p)
    p.set_defaults(func=cmd_chain)
    p = sub.add_parser("scan", help="sweep, detect and classify explosions")
    common(p)
    p.set_defaults(func=cmd_scan)
    p = sub.add_parser("tangency", help="homoclinic tangency records at one parameter")
    common(p)
    p.add_argument("--lambda", dest="lam", type=float, metavar="VALUE")
    p.add_argument("--polish", type=float, metavar="RADIUS",
                   help="snap VALUE to the nearest landing parameter within RADIUS")
    p.set_defaults(func=cmd_tangency)
    p = sub.add_parser("plotdata", help="expand a raster to (lambda, box_lo, box_hi) CSV")
    p.add_argument("raster", metavar="RASTER")
    p.add_argument("--out", metavar="DIR")
    p.set_defaults(func=cmd_plotdata)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, RasterFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ChainrecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
