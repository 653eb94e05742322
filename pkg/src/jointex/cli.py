"""Command-line front end.

Exit status: 0 on success, 2 when a model or input fails validation, 1 on
I/O or parse failures.  Random draws use PCG64 seeded by ``--seed`` (or the
config's ``seed``); identical inputs give byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import transforms
from .errors import JEError
from .existence import check_gje, check_je, check_me
from .model import (
    DEFAULT_MC_COUNT,
    cdf,
    cf_product_from_rows,
    make_rng,
    pearson_from_rows,
    region_label,
    sample,
)
from .config import ModelConfig

EXIT_OK, EXIT_IO, EXIT_INVALID = 0, 1, 2


class InputError(Exception):
    """Unreadable or malformed input file."""


def fmt(v: float) -> str:
    return f"{v:.17g}"


def _read_text(path):
    try:
        if path in (None, "-"):
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _load_config(args) -> ModelConfig:
    path = args.config_opt or args.config
    if path is None:
        raise InputError("no configuration given (positional path or --config)")
    try:
        obj = json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from None
    return ModelConfig.from_json(obj)


def _read_csv(path):
    """Return (header, numeric columns, region column or None)."""
    text = _read_text(path)
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise InputError("empty CSV input") from None
    xcols = [k for k, h in enumerate(header) if h.startswith("x")]
    rcol = header.index("region") if "region" in header else None
    values, regions = [], []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        try:
            values.append([float(row[k]) for k in xcols])
        except (ValueError, IndexError):
            raise InputError(f"malformed CSV row {lineno}: {row}") from None
        if rcol is not None:
            regions.append(row[rcol])
    data = np.array(values, dtype=float).reshape(-1, len(xcols))
    return [header[k] for k in xcols], data, (regions if rcol is not None else None)


def _write(out, text):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        try:
            with open(out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise InputError(f"cannot write {out}: {exc.strerror}") from None


def _csv_text(header, rows, regions=None):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header + (["region"] if regions is not None else []))
    for k, r in enumerate(rows):
        line = [fmt(v) for v in r]
        if regions is not None:
            line.append(regions[k])
        writer.writerow(line)
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _seed(args, cfg):
    return cfg.seed if args.seed is None else args.seed


# -- subcommands ----------------------------------------------------------------

def cmd_check(args):
    cfg = _load_config(args)
    out = {"ME": check_me(cfg.marginals).to_json(), "JE": check_je(cfg.marginals).to_json()}
    if cfg.distortions:
        out["GJE"] = check_gje(cfg.marginals, cfg.caps()).to_json()
    _write(args.output, _json(out))


def cmd_allocate(args):
    cfg = _load_config(args)
    alloc = cfg.make_allocation(args.strategy, args.lam, args.t)
    _write(args.output, _json(alloc.to_json()))


def _model(args):
    cfg = _load_config(args)
    return cfg, cfg.build(args.strategy, args.lam, args.t)


def cmd_build(args):
    _, model = _model(args)
    _write(args.output, _json(model.to_json()))


def cmd_sample(args):
    cfg, model = _model(args)
    batch = sample(model, make_rng(_seed(args, cfg)), args.count)
    header = [f"x{i + 1}" for i in range(model.n)]
    _write(args.output, _csv_text(header, batch.rows, batch.labels()))


def cmd_cdf(args):
    _, model = _model(args)
    header, pts, _ = _read_csv(args.points)
    if pts.shape[1] != model.n:
        raise JEError(f"points file has {pts.shape[1]} coordinates, model has {model.n}")
    values = cdf(model, pts) if len(pts) else np.empty(0)
    rows = np.column_stack([pts, values]) if len(pts) else np.empty((0, model.n + 1))
    _write(args.output, _csv_text(header + ["cdf"], rows))


def cmd_corr(args):
    cfg, model = _model(args)
    rows = sample(model, make_rng(_seed(args, cfg)), args.count).rows
    rho = pearson_from_rows(rows)
    _write(args.output, _json({"count": args.count, "pearson": rho.tolist()}))


def cmd_cfcheck(args):
    cfg, model = _model(args)
    try:
        t = [float(v) for v in args.t_vec.split(",")]
    except ValueError:
        raise JEError(f"malformed --t {args.t_vec!r}") from None
    rows = sample(model, make_rng(_seed(args, cfg)), args.count).rows
    mag = cf_product_from_rows(rows, t)
    _write(args.output, _json({"t": t, "count": args.count, "magnitude": mag}))


def cmd_transform(args):
    header, rows, regions = _read_csv(args.input)
    if args.mode == "je2jm":
        out = transforms.je_to_jm(rows)
    elif args.mode == "jm2je":
        out = transforms.jm_to_je(rows)
    elif args.mode == "reflect":
        out = transforms.reflect(rows)
    else:
        if args.shift is None:
            raise JEError("translate needs --shift")
        try:
            shift = [float(v) for v in args.shift.split(",")]
        except ValueError:
            raise JEError(f"malformed --shift {args.shift!r}") from None
        out = transforms.translate(rows, shift)
    _write(args.output, _csv_text(header, out.reshape(-1, len(header)), regions))


def cmd_export_support(args):
    cfg, model = _model(args)
    batch = sample(model, make_rng(_seed(args, cfg)), args.count)
    groups = {}
    for k, r in enumerate(model.regions):
        pts = batch.rows[batch.region == k]
        groups[region_label(r)] = {
            "mass": float(model.region_mass_vector()[k]),
            "points": pts.tolist(),
        }
    _write(args.output, _json({"n": model.n, "count": args.count, "seed": _seed(args, cfg), "regions": groups}))


# -- parser -----------------------------------------------------------------------

def _add_config(p):
    p.add_argument("config", nargs="?", help="model configuration JSON")
    p.add_argument("--config", dest="config_opt", help="model configuration JSON")
    p.add_argument("--output", "-o", help="output path (default stdout)")


def _add_alloc(p, t_flag="--t"):
    p.add_argument("--strategy", help="override the allocation strategy")
    p.add_argument("--lambda", dest="lam", type=float, help="trivariate lambda")
    p.add_argument(t_flag, dest="t", type=float, help="scaling factor for the scaled strategy")


def _add_mc(p, default=DEFAULT_MC_COUNT):
    p.add_argument("--count", type=int, default=default)
    p.add_argument("--seed", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jointex", description="Jointly exclusive random vectors")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="existence report for ME, JE and G-JE")
    _add_config(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("allocate", help="face-mass allocation as JSON")
    _add_config(p)
    _add_alloc(p)
    p.set_defaults(func=cmd_allocate)

    p = sub.add_parser("build", help="validated model summary")
    _add_config(p)
    _add_alloc(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("sample", help="sample rows as CSV")
    _add_config(p)
    _add_alloc(p)
    _add_mc(p, default=1000)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("cdf", help="evaluate the joint CDF at CSV points")
    _add_config(p)
    _add_alloc(p)
    p.add_argument("--points", required=True, help="CSV with columns x1..xn")
    p.set_defaults(func=cmd_cdf)

    p = sub.add_parser("corr", help="Monte Carlo Pearson matrix")
    _add_config(p)
    _add_alloc(p)
    _add_mc(p)
    p.set_defaults(func=cmd_corr)

    p = sub.add_parser("cfcheck", help="characteristic-function product check")
    _add_config(p)
    _add_alloc(p, t_flag="--scale-t")
    _add_mc(p)
    p.add_argument("--t", dest="t_vec", required=True, help='comma-separated, e.g. "1,2,3"')
    p.set_defaults(func=cmd_cfcheck)

    p = sub.add_parser("transform", help="apply a support map to a sample CSV")
    p.add_argument("--mode", required=True, choices=["je2jm", "jm2je", "reflect", "translate"])
    p.add_argument("--shift", help="comma-separated translation vector")
    p.add_argument("--input", "-i", default="-", help="sample CSV (default stdin)")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("export-support", help="sampled point cloud grouped by region (JSON)")
    _add_config(p)
    _add_alloc(p)
    _add_mc(p, default=5000)
    p.set_defaults(func=cmd_export_support)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except InputError as exc:
        print(f"jointex: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (JEError, ValueError) as exc:
        print(f"jointex: invalid: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
