"""Command-line interface: ``nbldpc {construct,de,simulate,concentration}``.

Exit codes: 0 success, 2 validation error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .channel import noise_dimension
from .codes import (
    ConstructionError,
    ParameterError,
    build_coupled,
    build_regular,
    check_degrees,
    design_rate,
    dumps_code,
    read_code,
)
from .decoder import DecoderConfig
from .density import (
    de_closed_form,
    de_coupled_run,
    de_regular_trace,
    threshold_coupled,
    threshold_regular,
)
from .field import is_prime
from .montecarlo import mc_concentration, mc_subspace_de
from .simulate import simulate, summarize

SCHEMA = 1
log = logging.getLogger("nbldpc")


class ValidationError(ValueError):
    pass


def parse_epsilons(values: list[str]) -> list[float]:
    """Expand repeated ``--epsilon`` values; ``a:b:step`` is an inclusive range."""
    out: list[float] = []
    for v in values:
        if ":" in v:
            parts = v.split(":")
            if len(parts) != 3:
                raise ValidationError(f"range {v!r} must look like start:stop:step")
            a, b, step = (float(p) for p in parts)
            if step <= 0 or b < a:
                raise ValidationError(f"range {v!r} needs step > 0 and stop >= start")
            n = int(math.floor((b - a) / step + 1e-9)) + 1
            out.extend(round(a + i * step, 12) for i in range(n))
        else:
            out.append(float(v))
    for e in out:
        if not 0.0 <= e <= 1.0:
            raise ValidationError(f"epsilon {e} outside [0, 1]")
    return out


def _validate_code_params(dl, dr, q=None, L=None, M=None, m=None):
    try:
        check_degrees(dl, dr)
    except ParameterError as exc:
        raise ValidationError(str(exc)) from exc
    if q is not None and not is_prime(q):
        raise ValidationError(f"q={q} is not prime (only prime fields are supported)")
    for name, val in (("L", L), ("M", M), ("m", m)):
        if val is not None and val < 1:
            raise ValidationError(f"--{name} must be >= 1")


def _warn_integrality(epsilons, m):
    for e in epsilons:
        if not math.isclose(e * m, round(e * m), abs_tol=1e-9):
            log.warning("eps*m = %g is not an integer; noise dimension rounded to %d", e * m, noise_dimension(e, m))


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _dump_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def _write_meta(args, extra: dict) -> None:
    path = getattr(args, "meta", None)
    if not path:
        return
    meta = {
        "schema": SCHEMA,
        "version": __version__,
        "started": getattr(args, "_started_iso", None),
        "elapsed_seconds": time.perf_counter() - args._started,
        **extra,
    }
    Path(path).write_text(_dump_json(meta))


# ---------------------------------------------------------------- construct

def cmd_construct(args) -> int:
    _validate_code_params(args.dl, args.dr, args.q, args.L, args.M, args.m)
    rng = np.random.default_rng(args.seed)
    if args.L is None:
        code = build_regular(args.dl, args.dr, args.M, args.m, args.q, rng, seed=args.seed)
    else:
        code = build_coupled(args.dl, args.dr, args.L, args.M, args.m, args.q, rng, seed=args.seed)
    _emit(dumps_code(code), args.out)
    log.info("wrote %d x %d code (%d edges)", code.n_checks, code.n_vars, code.n_edges)
    return 0


# ---------------------------------------------------------------- de

def _de_params(args):
    if args.dl < 2 or args.dr <= args.dl:
        raise ValidationError("density evolution needs dl >= 2 and dr > dl")


def cmd_de(args) -> int:
    _de_params(args)
    what = args.de_command
    if what in ("trace", "closed-form"):
        eps = parse_epsilons([args.epsilon])[0]
        if what == "trace":
            values = de_regular_trace(args.dl, args.dr, eps, args.T)
        else:
            if eps >= 1.0 / (args.dr - 1):
                raise ValidationError(f"closed form needs eps < 1/(dr-1) = {1 / (args.dr - 1):.6g}")
            values = [de_closed_form(args.dl, args.dr, eps, t) for t in range(args.T + 1)]
        rows = [{"t": t, "xi": x} for t, x in enumerate(values)]
        if args.format == "csv":
            _emit(_dump_csv(rows, ["t", "xi"]), args.out)
        else:
            report = {"schema": SCHEMA, "command": f"de {what}", "dl": args.dl, "dr": args.dr,
                      "epsilon": eps, "trace": rows}
            _emit(_dump_json(report), args.out)
        return 0

    if what == "threshold":
        value = threshold_regular(args.dl, args.dr, args.tol)
        rows = [{"dl": args.dl, "dr": args.dr, "L": None, "threshold": value,
                 "reference": 1.0 / (args.dr - 1), "design_rate": design_rate(args.dl, args.dr)}]
    elif what == "coupled-threshold":
        _validate_code_params(args.dl, args.dr)
        rows = []
        for L in args.L:
            t_max = args.T_max if args.T_max is not None else 10 * (L + args.dl)
            rows.append({"dl": args.dl, "dr": args.dr, "L": L,
                         "threshold": threshold_coupled(args.dl, args.dr, L, args.tol, t_max),
                         "reference": args.dl / args.dr,
                         "design_rate": design_rate(args.dl, args.dr, L)})
    elif what == "coupled-run":
        _validate_code_params(args.dl, args.dr)
        eps = parse_epsilons([args.epsilon])[0]
        ok, steps, state = de_coupled_run(args.dl, args.dr, args.L, eps, args.T_max or 10 * (args.L + args.dl))
        rows = [{"section": j, "xi": float(x)} for j, x in enumerate(state.xi_post)]
        if args.format == "csv":
            _emit(_dump_csv(rows, ["section", "xi"]), args.out)
        else:
            _emit(_dump_json({"schema": SCHEMA, "command": "de coupled-run", "converged": ok,
                              "steps": steps, "epsilon": eps, "sections": rows}), args.out)
        return 0
    elif what == "subspace-mc":
        eps = parse_epsilons([args.epsilon])[0]
        if not is_prime(args.q):
            raise ValidationError(f"q={args.q} is not prime")
        _warn_integrality([eps], args.m)
        means = mc_subspace_de(args.dl, args.dr, args.m, args.q, eps, args.T, args.trials, args.seed)
        scalar = de_regular_trace(args.dl, args.dr, eps, args.T)
        rows = [{"t": t, "mc_mean": a, "xi": b, "abs_diff": abs(a - b)} for t, (a, b) in enumerate(zip(means, scalar))]
        if args.format == "csv":
            _emit(_dump_csv(rows, ["t", "mc_mean", "xi", "abs_diff"]), args.out)
        else:
            _emit(_dump_json({"schema": SCHEMA, "command": "de subspace-mc", "m": args.m, "q": args.q,
                              "epsilon": eps, "trials": args.trials, "seed": args.seed, "rows": rows}), args.out)
        return 0
    else:  # pragma: no cover - argparse guards this
        raise ValidationError(f"unknown de command {what}")

    columns = ["dl", "dr", "L", "threshold", "reference", "design_rate"]
    if args.format == "csv":
        _emit(_dump_csv(rows, columns), args.out)
    else:
        _emit(_dump_json({"schema": SCHEMA, "command": f"de {what}", "tol": args.tol, "results": rows}), args.out)
    return 0


# ---------------------------------------------------------------- simulate

def cmd_simulate(args) -> int:
    epsilons = parse_epsilons(args.epsilon)
    if args.trials < 0:
        raise ValidationError("--trials must be >= 0")
    if args.max_iter < 1:
        raise ValidationError("--max-iter must be >= 1")
    if args.code:
        try:
            code = read_code(args.code)
        except (OSError, ValueError) as exc:
            raise ValidationError(f"cannot read code file {args.code}: {exc}") from exc
    else:
        if args.dl is None or args.dr is None or args.M is None:
            raise ValidationError("give --code FILE or all of --dl --dr --M (and optionally --L)")
        _validate_code_params(args.dl, args.dr, args.q, args.L, args.M, args.m)
        rng = np.random.default_rng(args.seed)
        if args.L is None:
            code = build_regular(args.dl, args.dr, args.M, args.m, args.q, rng, seed=args.seed)
        else:
            code = build_coupled(args.dl, args.dr, args.L, args.M, args.m, args.q, rng, seed=args.seed)
    _warn_integrality(epsilons, code.m)

    cfg = DecoderConfig(max_iterations=args.max_iter)
    records = simulate(code, epsilons, args.trials, args.seed, cfg, args.decoder, args.workers)
    summary = summarize(records, epsilons)
    for row in summary:
        row["noise_dim"] = noise_dimension(row["epsilon"], code.m)

    if args.records:
        cols = ["trial", "epsilon", "status", "iterations_used", "max_final_dim", "truth_violations"]
        Path(args.records).write_text(_dump_csv([r.primary() for r in records], cols))
    if args.format == "csv":
        cols = ["epsilon", "noise_dim", "trials", "block_errors", "bler", "wilson_low", "wilson_high"]
        _emit(_dump_csv(summary, cols), args.out)
    else:
        report = {
            "schema": SCHEMA,
            "command": "simulate",
            "config": {"q": code.q, "m": code.m, "n_checks": code.n_checks, "n_vars": code.n_vars,
                       "code_meta": code.meta, "epsilons": epsilons, "trials": args.trials,
                       "max_iter": args.max_iter, "seed": args.seed, "decoder": args.decoder},
            "records": [r.primary() for r in records],
            "summary": summary,
        }
        _emit(_dump_json(report), args.out)
    _write_meta(args, {"wall_times": [r.wall_time for r in records]})
    return 0


# ---------------------------------------------------------------- concentration

def cmd_concentration(args) -> int:
    if not is_prime(args.q):
        raise ValidationError(f"q={args.q} is not prime")
    rows = []
    for d1 in args.d1:
        for d2 in args.d2:
            for k in args.k:
                if not (0 <= d1 <= args.m and 0 <= d2 <= args.m and k >= 0):
                    raise ValidationError(f"need 0 <= d1, d2 <= m and k >= 0 (got d1={d1}, d2={d2}, k={k})")
                rep = mc_concentration(args.m, args.q, d1, d2, k, args.trials, args.seed, args.workers)
                rows.append(rep.to_dict())
    if args.format == "csv":
        cols = ["m", "q", "d1", "d2", "k", "trials", "intersection_frequency", "sum_frequency",
                "bound", "sigma", "margin", "passes"]
        _emit(_dump_csv(rows, cols), args.out)
    else:
        for r in rows:
            r["intersection_dims"] = {str(a): b for a, b in r["intersection_dims"].items()}
            r["sum_dims"] = {str(a): b for a, b in r["sum_dims"].items()}
        _emit(_dump_json({"schema": SCHEMA, "command": "concentration", "seed": args.seed, "results": rows}), args.out)
    return 0


# ---------------------------------------------------------------- parser

def _common(p, *, fmt_default="json"):
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=["csv", "json"], default=fmt_default)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nbldpc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a regular or spatially-coupled code")
    p.add_argument("--dl", type=int, required=True)
    p.add_argument("--dr", type=int, required=True)
    p.add_argument("--L", type=int, help="coupling number (omit for a regular code)")
    p.add_argument("--M", type=int, required=True, help="lifting number")
    p.add_argument("--m", type=int, required=True, help="symbol dimension")
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("de", help="density evolution")
    de = p.add_subparsers(dest="de_command", required=True)
    for name in ("trace", "closed-form"):
        s = de.add_parser(name)
        s.add_argument("--dl", type=int, required=True)
        s.add_argument("--dr", type=int, required=True)
        s.add_argument("--epsilon", required=True)
        s.add_argument("--T", type=int, default=20)
        _common(s, fmt_default="csv")
    s = de.add_parser("threshold")
    s.add_argument("--dl", type=int, required=True)
    s.add_argument("--dr", type=int, required=True)
    s.add_argument("--tol", type=float, default=1e-9)
    _common(s)
    s = de.add_parser("coupled-threshold")
    s.add_argument("--dl", type=int, required=True)
    s.add_argument("--dr", type=int, required=True)
    s.add_argument("--L", type=int, action="append", required=True)
    s.add_argument("--tol", type=float, default=1e-6)
    s.add_argument("--T-max", dest="T_max", type=int)
    _common(s)
    s = de.add_parser("coupled-run")
    s.add_argument("--dl", type=int, required=True)
    s.add_argument("--dr", type=int, required=True)
    s.add_argument("--L", type=int, required=True)
    s.add_argument("--epsilon", required=True)
    s.add_argument("--T-max", dest="T_max", type=int)
    _common(s)
    s = de.add_parser("subspace-mc", help="compare subspace Monte Carlo with the scalar recursion")
    s.add_argument("--dl", type=int, required=True)
    s.add_argument("--dr", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--q", type=int, default=2)
    s.add_argument("--epsilon", required=True)
    s.add_argument("--T", type=int, default=5)
    s.add_argument("--trials", type=int, default=500)
    s.add_argument("--seed", type=int, default=0)
    _common(s)
    p.set_defaults(func=cmd_de)

    p = sub.add_parser("simulate", help="Monte Carlo decoding of the all-zero codeword")
    p.add_argument("--code", help="code file written by 'construct'")
    p.add_argument("--dl", type=int)
    p.add_argument("--dr", type=int)
    p.add_argument("--L", type=int)
    p.add_argument("--M", type=int)
    p.add_argument("--m", type=int, default=20)
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--epsilon", action="append", required=True, help="value or start:stop:step; repeatable")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--max-iter", dest="max_iter", type=int, default=100)
    p.add_argument("--decoder", choices=["spa", "peeling"], default="spa")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--records", help="also write per-trial records as CSV")
    p.add_argument("--meta", help="write timing metadata (non-deterministic) to this JSON file")
    _common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("concentration", help="intersection/sum dimension windows vs analytic bound")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--d1", type=int, action="append", required=True)
    p.add_argument("--d2", type=int, action="append", required=True)
    p.add_argument("--k", type=int, action="append", required=True)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    _common(p)
    p.set_defaults(func=cmd_concentration)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    args._started = time.perf_counter()
    args._started_iso = datetime.now(timezone.utc).isoformat()
    try:
        return args.func(args)
    except (ValidationError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConstructionError, OSError, RuntimeError, ValueError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
