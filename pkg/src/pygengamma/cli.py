"""
Cli
Command line front end, installed as `g2g`.

    g2g eval   --f u --g r --alpha 1 --beta 1 --gamma 0
    g2g eval   --omega "x+y^2" --nu 1 --omega-exp 1 --lambda 0
    g2g verify [--only eq12,lemma1] [--corpus FILE] [--jobs N]
    g2g bench  --f "u^2" --g "exp(-r/2)"
    g2g hyp    --a 1 --b 1 --c 2 --z 0.5
    g2g series --coeffs 1@1 --alpha 2 --beta 2
    g2g detect --omega "x*y"

Exit codes: 0 success, 1 failed identity checks, 2 invalid configuration,
3 numerical failure.
"""

import argparse
import json
import logging
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
import pandas as pd

from pygengamma import __version__
from pygengamma.config import load_corpus, load_defaults, quad_config
from pygengamma.damped import KINDS, OSCILLATION_CAP, gamma2d_damped
from pygengamma.errors import ConfigError, DomainError, GenGammaError, ParseError
from pygengamma.exprdsl import FuncSpec, detect_separable
from pygengamma.genspecial import Params, gamma2d, gamma2d_factorized, gamma2d_omega
from pygengamma.hyperg import hyp2f1, hyp2f1_f_paths
from pygengamma.oracle import hyp2f1_series, mc2d
from pygengamma.quadcore import ORDERS
from pygengamma.seriesrep import SeriesSpec, beta_f_series, gamma2d_series, gamma2d_series_viagamma2d
from pygengamma.suite import TAGS, build_checks, parameter_cells, run_bench, run_checks

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
MC_SAMPLES = 200_000
MC_BOX = 40.0


@dataclass
class JobConfig:
    """What a command was asked to do, echoed in every report."""

    command: str
    f_expr: Optional[str] = None
    g_expr: Optional[str] = None
    omega_expr: Optional[str] = None
    params: dict = field(default_factory=dict)
    output: Optional[str] = None
    format: str = "json"

    @classmethod
    def from_args(cls, args):
        names = ("alpha", "beta", "gamma", "nu", "omega_exp", "lam", "a", "b", "c", "z", "tol")
        params = {name: getattr(args, name) for name in names if getattr(args, name, None) is not None}
        return cls(command=args.command, f_expr=getattr(args, "f", None), g_expr=getattr(args, "g", None),
                   omega_expr=getattr(args, "omega", None), params=params, output=args.out, format=args.format)

    def validate(self):
        if self.command == "eval" and (self.f_expr is not None or self.g_expr is not None) == (
                self.omega_expr is not None):
            raise ConfigError("eval takes either --f/--g or --omega")
        if self.command == "detect" and self.omega_expr is None:
            raise ConfigError("detect requires --omega")
        return self

    def as_dict(self):
        return asdict(self)


def build_parser():
    parser = argparse.ArgumentParser(prog="g2g", description="Generalized gamma and beta functions, "
                                     "two-dimensional generalized gamma function and its identities.")
    parser.add_argument("--version", action="version", version="%(prog)s " + __version__)
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--tol", type=float, help="relative tolerance (default from the defaults file)")
        p.add_argument("--format", choices=("json", "table"), default="json")
        p.add_argument("--out", help="write the report to this file instead of stdout")

    def params(p):
        p.add_argument("--alpha", type=float)
        p.add_argument("--beta", type=float)
        p.add_argument("--gamma", type=float)

    p_eval = sub.add_parser("eval", help="evaluate a two-dimensional generalized gamma function")
    common(p_eval)
    params(p_eval)
    p_eval.add_argument("--f", help="f(u) over (0, 1)")
    p_eval.add_argument("--g", help="g(r) over (0, inf)")
    p_eval.add_argument("--omega", help="general kernel Omega(y, x)")
    p_eval.add_argument("--nu", type=float)
    p_eval.add_argument("--omega-exp", dest="omega_exp", type=float)
    p_eval.add_argument("--lambda", dest="lam", type=float)
    p_eval.add_argument("--a", type=float, help="damping rate of e^(-a(x+y))")
    p_eval.add_argument("--b", type=float, help="frequency of the cos/sin damper")
    p_eval.add_argument("--kind", choices=KINDS, default="cos")
    p_eval.add_argument("--mode", choices=("direct", "factorized", "auto"), default="auto")
    p_eval.add_argument("--order", choices=ORDERS, default="su")
    p_eval.add_argument("--seed", type=int, help="add a Monte Carlo oracle estimate with this seed")

    p_verify = sub.add_parser("verify", help="run the identity checks")
    common(p_verify)
    p_verify.add_argument("--only", help="comma separated tags: " + ",".join(TAGS))
    p_verify.add_argument("--corpus", help="JSON file replacing the function corpus")
    p_verify.add_argument("--jobs", type=int, default=1)
    p_verify.add_argument("--full", action="store_true", help="sweep the complete parameter grids")

    p_bench = sub.add_parser("bench", help="time the direct and factorized paths")
    common(p_bench)
    p_bench.add_argument("--f", default="1")
    p_bench.add_argument("--g", default="1")
    p_bench.add_argument("--warmup", type=int)
    p_bench.add_argument("--repeat", type=int)
    p_bench.add_argument("--jobs", type=int, default=1)
    p_bench.add_argument("--full", action="store_true", help="time every cell of the parameter grid")

    p_hyp = sub.add_parser("hyp", help="Gauss hypergeometric function")
    common(p_hyp)
    p_hyp.add_argument("--a", type=float, required=True)
    p_hyp.add_argument("--b", type=float, required=True)
    p_hyp.add_argument("--c", type=float, required=True)
    p_hyp.add_argument("--z", type=float, required=True)
    p_hyp.add_argument("--f", help="multiplier f(u) of the generalized form")
    p_hyp.add_argument("--g", help="radial factor of the two-dimensional paths")
    p_hyp.add_argument("--gamma", type=float, default=0.0)

    p_series = sub.add_parser("series", help="series representation from Taylor coefficients")
    common(p_series)
    params(p_series)
    p_series.add_argument("--coeffs", required=True, help="value@index,... e.g. 1@1,1@2")
    p_series.add_argument("--g", help="g(r), adds the two-dimensional series forms")

    p_detect = sub.add_parser("detect", help="separability of a kernel Omega(y, x)")
    common(p_detect)
    p_detect.add_argument("--omega", required=True)
    p_detect.add_argument("--grid", type=int)
    p_detect.add_argument("--strict", action="store_true", help="fail on a vanishing probe")
    return parser


"""
Report helpers ------------------------------------------------------------------------------------
"""


def _clean(value):
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    return value


def _result(res):
    return None if res is None else _clean(res.as_dict())


def _timed(func):
    start = time.perf_counter()
    out = func()
    return out, 1e3 * (time.perf_counter() - start)


def _discrepancy(x, y):
    if x is None or y is None:
        return None
    diff = abs(x.value - y.value)
    scale = max(abs(x.value), abs(y.value))
    return {"abs": diff, "rel": diff / scale if scale else diff}


def _rows(report):
    """Flatten a report into table rows."""
    for key in ("checks", "cells"):
        if key in report:
            return pd.DataFrame(report[key])
    flat = pd.json_normalize(_clean(report), sep=".")
    return flat.T.rename(columns={0: "value"})


def emit(report, fmt, out):
    report = _clean(report)
    if fmt == "json":
        text = json.dumps(report, indent=2, sort_keys=False)
    else:
        with pd.option_context("display.max_rows", None, "display.max_colwidth", 80, "display.width", 200):
            text = _rows(report).to_string()
    if out:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
        print("Report written to: {}".format(out), file=sys.stderr)
    else:
        print(text)


def _header(command, cfg):
    return {"command": command, "version": __version__,
            "quad": {"rel_tol": cfg.rel_tol, "abs_tol": cfg.abs_tol, "max_levels": cfg.max_levels,
                     "trunc_eps": cfg.trunc_eps}}


def _first(*values):
    for value in values:
        if value is not None:
            return value
    return None


"""
Commands ------------------------------------------------------------------------------------------
"""


def _mc_oracle(kernel, p, rate, seed):
    def integrand(y, x):
        s = x + y
        with np.errstate(all="ignore"):
            weight = np.exp((p.alpha - 1.0) * np.log(y) + (p.beta - 1.0) * np.log(x)
                            + p.gamma * np.log(s) - rate * s)
        return kernel(y, x) * weight

    value, std_err = mc2d(integrand, MC_BOX, MC_BOX, MC_SAMPLES, seed)
    return {"value": value, "std_err": std_err, "samples": MC_SAMPLES, "seed": seed}


def cmd_eval(args, defaults):
    cfg = quad_config(defaults, rel_tol=args.tol)
    report = _header("eval", cfg)
    if args.omega is not None:
        p = Params.omega_form(_first(args.nu, args.alpha, 1.0), _first(args.omega_exp, args.beta, 1.0),
                              _first(args.lam, args.gamma, 0.0))
        omega = FuncSpec.from_text(args.omega, 2)
        sep = detect_separable(omega, tol=defaults.get("separability", {}).get("tol", 1e-9))
        direct, t_direct = _timed(lambda: gamma2d_omega(omega, p, cfg, order=args.order))
        factorized, t_fact = None, None
        if sep.separable and args.mode != "direct":
            factorized, t_fact = _timed(lambda: gamma2d_factorized(sep.f_extracted, sep.g_extracted, p, cfg))
        report["inputs"] = {"omega": args.omega, "nu": p.nu, "omega_exp": p.omega, "lambda": p.lam}
        report["separable"] = sep.separable
        report["certified"] = sep.certified
        kernel, rate = omega, 1.0
    else:
        p = Params(_first(args.alpha, 1.0), _first(args.beta, 1.0), _first(args.gamma, 0.0),
                   a=_first(args.a, 1.0), b=_first(args.b, 0.0))
        f = FuncSpec.from_text(args.f or "1", 1)
        g = FuncSpec.from_text(args.g or "1", 1)
        report["inputs"] = {"f": str(f), "g": str(g), **p.as_dict()}
        damped_run = p.a != 1.0 or p.b != 0.0
        if damped_run:
            report["inputs"]["kind"] = args.kind

            def run_direct():
                return gamma2d_damped(f, g, p, kind=args.kind, mode="direct", cfg=cfg, order=args.order)

            def run_fact():
                return gamma2d_damped(f, g, p, kind=args.kind, mode="reduced", cfg=cfg)
        else:
            def run_direct():
                return gamma2d(f, g, p, cfg, mode="direct", order=args.order)

            def run_fact():
                return gamma2d(f, g, p, cfg, mode="factorized")

        skip_direct = args.mode == "factorized"
        if damped_run and args.mode == "auto" and abs(p.b) > OSCILLATION_CAP:
            logger.info("|b| = %g above the oscillation cap, reporting the reduced path only", abs(p.b))
            report["notes"] = ["direct path skipped: |b| above the oscillation cap {}".format(OSCILLATION_CAP)]
            skip_direct = True
        direct, t_direct = (None, None) if skip_direct else _timed(run_direct)
        factorized, t_fact = (None, None) if args.mode == "direct" else _timed(run_fact)
        trig = np.cos if args.kind == "cos" else np.sin

        def kernel(y, x):
            s = x + y
            out = f(y / s) * g(s)
            return out * trig(p.b * s) if damped_run else out

        rate = p.a
    chosen = factorized if factorized is not None else direct
    report["value"] = chosen.value
    report["path"] = chosen.path
    report["direct"] = _result(direct)
    report["factorized"] = _result(factorized)
    report["discrepancy"] = _discrepancy(direct, factorized)
    report["timings_ms"] = {"direct": t_direct, "factorized": t_fact}
    if args.seed is not None:
        report["oracle"] = _mc_oracle(kernel, p, rate, args.seed)
    return report, EXIT_OK


def cmd_verify(args, defaults):
    cfg = quad_config(defaults, rel_tol=args.tol)
    corpus = load_corpus(args.corpus) if args.corpus else None
    only = [t.strip() for t in args.only.split(",") if t.strip()] if args.only else None
    sweep = "full" if args.full else defaults.get("verify", {}).get("sweep", "sample")
    try:
        checks = build_checks(defaults, cfg, corpus=corpus, sweep=sweep, only=only)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    start = time.perf_counter()
    results = run_checks(checks, jobs=max(args.jobs, 1))
    counts = {status: sum(r.status == status for r in results)
              for status in ("pass", "fail", "skipped-inadmissible", "error")}
    report = _header("verify", cfg)
    report["summary"] = {"total": len(results), **counts, "all_passed": all(r.passed for r in results)}
    report["checks"] = [r.as_dict() for r in results]
    report["timings_ms"] = {"total": 1e3 * (time.perf_counter() - start)}
    return report, EXIT_OK if report["summary"]["all_passed"] else EXIT_FAILED


def cmd_bench(args, defaults):
    cfg = quad_config(defaults, rel_tol=args.tol)
    bench = defaults.get("bench", {})
    warmup = _first(args.warmup, bench.get("warmup"), 3)
    repeat = _first(args.repeat, bench.get("repeat"), 10)
    if warmup < 0 or repeat < 1:
        raise ConfigError("warmup must be >= 0 and repeat >= 1")
    cells = parameter_cells(defaults, "full" if args.full else "sample")
    f, g = FuncSpec.from_text(args.f, 1), FuncSpec.from_text(args.g, 1)
    results = run_bench(f, g, cells, cfg, warmup, repeat, jobs=max(args.jobs, 1))
    speedups = [c.speedup for c in results]
    report = _header("bench", cfg)
    report["inputs"] = {"f": args.f, "g": args.g, "warmup": warmup, "repeat": repeat}
    report["summary"] = {"cells": len(results), "median_speedup": float(np.median(speedups)),
                         "min_speedup": min(speedups), "all_faster": all(s > 1 for s in speedups)}
    report["cells"] = [c.as_dict() for c in results]
    return report, EXIT_OK


def cmd_hyp(args, defaults):
    cfg = quad_config(defaults, rel_tol=args.tol)
    report = _header("hyp", cfg)
    report["inputs"] = {"a": args.a, "b": args.b, "c": args.c, "z": args.z}
    if args.f is None and args.g is None:
        res, elapsed = _timed(lambda: hyp2f1(args.a, args.b, args.c, args.z, cfg))
        report["value"] = res.value
        report["result"] = _result(res)
        if abs(args.z) <= 0.9:
            series = hyp2f1_series(args.a, args.b, args.c, args.z)
            report["series_oracle"] = series
            report["discrepancy"] = {"abs": abs(res.value - series),
                                     "rel": abs(res.value - series) / abs(series) if series else None}
        report["timings_ms"] = {"integral": elapsed}
        return report, EXIT_OK
    report["inputs"].update({"f": args.f or "1", "g": args.g or "1", "gamma": args.gamma})
    paths, elapsed = _timed(lambda: hyp2f1_f_paths(args.f, args.a, args.b, args.c, args.z, g=args.g,
                                                   gamma=args.gamma, cfg=cfg))
    report["value"] = paths["integral"].value
    report["paths"] = {name: _result(res) for name, res in paths.items()}
    values = [res.value for res in paths.values()]
    report["spread"] = max(values) - min(values)
    report["timings_ms"] = {"all_paths": elapsed}
    return report, EXIT_OK


def cmd_series(args, defaults):
    cfg = quad_config(defaults, rel_tol=args.tol)
    sp = SeriesSpec.from_text(args.coeffs)
    p = Params(_first(args.alpha, 2.0), _first(args.beta, 2.0), _first(args.gamma, 0.0))
    report = _header("series", cfg)
    report["inputs"] = {"coeffs": args.coeffs, "L": sp.L, "N": sp.N, "alpha": p.alpha, "beta": p.beta,
                        "gamma": p.gamma}
    beta_series = beta_f_series(sp, p.alpha, p.beta)
    report["value"] = beta_series.value
    report["beta_f"] = _result(beta_series)
    if args.g is not None:
        report["inputs"]["g"] = args.g
        report["gamma2d"] = _result(gamma2d_series(sp, args.g, p, cfg))
        report["gamma2d_viagamma2d"] = _result(gamma2d_series_viagamma2d(sp, args.g, p, cfg))
    return report, EXIT_OK


def cmd_detect(args, defaults):
    sep_defaults = defaults.get("separability", {})
    tol = _first(args.tol, sep_defaults.get("tol"), 1e-9)
    grid = _first(args.grid, sep_defaults.get("grid"), 8)
    if grid < 2:
        raise ConfigError("grid must be at least 2")
    omega = FuncSpec.from_text(args.omega, 2)
    report = {"command": "detect", "version": __version__, "inputs": {"omega": args.omega}}
    sep = detect_separable(omega, tol=tol, grid=grid, strict=args.strict)
    report.update(sep.as_dict())
    if sep.separable:
        u = np.linspace(0.1, 0.9, 5)
        s = np.geomspace(0.1, 20.0, 5)
        report["f_extracted"] = {"label": str(sep.f_extracted), "u": u.tolist(), "values": sep.f_extracted(u).tolist()}
        report["g_extracted"] = {"label": str(sep.g_extracted), "s": s.tolist(), "values": sep.g_extracted(s).tolist()}
    return report, EXIT_OK


HANDLERS = {
    "eval": cmd_eval,
    "verify": cmd_verify,
    "bench": cmd_bench,
    "hyp": cmd_hyp,
    "series": cmd_series,
    "detect": cmd_detect,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        job = JobConfig.from_args(args).validate()
        defaults = load_defaults()
        report, code = HANDLERS[args.command](args, defaults)
        report["job"] = job.as_dict()
    except (ConfigError, ParseError, DomainError) as exc:
        print("g2g: configuration error: {}".format(exc), file=sys.stderr)
        return EXIT_CONFIG
    except (GenGammaError, ArithmeticError) as exc:
        print("g2g: numerical error: {}: {}".format(type(exc).__name__, exc), file=sys.stderr)
        return EXIT_NUMERIC
    emit(report, args.format, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
