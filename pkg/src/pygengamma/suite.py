"""
Suite
Catalogue of the identity checks run by `g2g verify` and the timing cells
run by `g2g bench`.

Every check carries an equation tag (eq12, lemma1, ...) so a run can be
restricted with --only. Checks are independent and may run on a thread
pool; results come back in catalogue order.
"""

import itertools
import logging
import math
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import hyp2f1 as scipy_hyp2f1

from pygengamma import damped, genspecial, hyperg, logmoments, oracle, seriesrep
from pygengamma.errors import GenGammaError
from pygengamma.exprdsl import FuncSpec, as_funcspec, detect_separable
from pygengamma.genspecial import Params

logger = logging.getLogger(__name__)

TAGS = ("eq12", "eq10f2", "prop4", "prop1", "prop3", "lemma1", "lemma2", "prop6", "prop7",
        "eq26", "eq101k1", "eq101f", "thm8", "eq45", "eq251", "eq253", "sep")
SWEEPS = ("sample", "full")

PASS, FAIL, SKIPPED, ERROR = "pass", "fail", "skipped-inadmissible", "error"
# endpoint probes of the admissibility gate
_ADMISSIBILITY_EPS = (1e-6, 1e-12)
_ADMISSIBILITY_LIMIT = 1e-3
SERIES_Z = 0.9


@dataclass
class Check:
    tag: str
    name: str
    case: str
    run: Callable[[], tuple]
    gate: Optional[Callable[[], bool]] = None
    tolerance: float = float("nan")


@dataclass
class CheckResult:
    tag: str
    name: str
    case: str
    status: str
    residual: float = float("nan")
    tolerance: float = float("nan")
    seconds: float = 0.0
    detail: str = ""

    @property
    def passed(self):
        return self.status in (PASS, SKIPPED)

    def as_dict(self):
        return asdict(self)


def admissible(f, alpha, beta):
    """
    Endpoint gate: f(x) x^alpha (1-x)^beta must decrease towards zero at
    both ends of (0, 1). Probed at two distances from each end.
    """
    f = as_funcspec(f, 1)
    for power, at in ((alpha, lambda e: e), (beta, lambda e: 1.0 - e)):
        with np.errstate(all="ignore"):
            probes = [abs(float(f(at(e)))) * e ** power for e in _ADMISSIBILITY_EPS]
        if not all(np.isfinite(probes)):
            return False
        far, near = probes
        if near > _ADMISSIBILITY_LIMIT or (near > 0 and near >= far):
            return False
    return True


def agreement(x, y, tol, factor=10.0):
    """Relative discrepancy of two EvalResults and whether it is acceptable."""
    diff = abs(x.value - y.value)
    scale = max(abs(x.value), abs(y.value))
    rel = diff / scale if scale > 0 else diff
    return rel, rel <= tol or diff <= factor * (x.err_est + y.err_est)


def _residual(res, tol):
    return res.relative, res.passes(tol)


def parameter_cells(defaults, sweep="sample", count=None):
    grid = defaults["grid"]
    cells = [Params(a, b, c) for a, b, c in itertools.product(grid["alpha"], grid["beta"], grid["gamma"])]
    if sweep == "full":
        return cells
    count = count or 8
    step = max(len(cells) // count, 1)
    return cells[::step][:count]


def _pick(cells, i):
    return cells[(7 * i) % len(cells)]


def _case(entry, p=None, extra=""):
    text = "{}: f={} g={}".format(entry.get("name", "?"), entry["f"], entry["g"])
    if p is not None:
        text += " alpha={} beta={} gamma={}".format(p.alpha, p.beta, p.gamma)
    return text + (" " + extra if extra else "")


"""
Catalogue -----------------------------------------------------------------------------------------
"""


def _classical(cfg, tol):
    checks = []
    for gam in (0.0, 1.0, 2.0):
        for alpha, exact in ((1.0, math.gamma(2.0 + gam)), (0.5, math.pi * math.gamma(1.0 + gam))):
            def run(alpha=alpha, gam=gam, exact=exact):
                res = genspecial.classical_reduction(alpha, gam, cfg)
                rel = abs(res.value - exact) / exact
                return rel, rel <= tol
            case = "alpha=beta={} gamma={}".format(alpha, gam)
            checks.append(Check("eq12", "classical_reduction", case, run, tolerance=tol))
    return checks


def _factorization(corpus, cells, cfg, tol, sweep):
    checks = []
    pairs = ([(e, p) for e in corpus for p in cells] if sweep == "full"
             else [(e, _pick(cells, i)) for i, e in enumerate(corpus)])
    for entry, p in pairs:
        def run(entry=entry, p=p):
            direct = genspecial.gamma2d(entry["f"], entry["g"], p, cfg, mode="direct")
            factorized = genspecial.gamma2d(entry["f"], entry["g"], p, cfg, mode="factorized")
            return agreement(direct, factorized, tol, factor=0.0)
        checks.append(Check("eq12", "factorization", _case(entry, p), run,
                            gate=lambda entry=entry, p=p: admissible(entry["f"], p.alpha, p.beta), tolerance=tol))
    return checks


def _halfline(corpus, cells, cfg, tol):
    checks = []
    for i, entry in enumerate(corpus):
        p = _pick(cells, i)

        def run(entry=entry, p=p):
            return agreement(genspecial.beta_f_halfline(entry["f"], p.alpha, p.beta, cfg),
                             genspecial.beta_f(entry["f"], p.alpha, p.beta, cfg), tol)
        checks.append(Check("eq10f2", "halfline_beta", _case(entry, p), run,
                            gate=lambda entry=entry, p=p: admissible(entry["f"], p.alpha, p.beta), tolerance=tol))
    return checks


def _polar(corpus, cells, cfg, tol):
    checks = []
    for i, entry in enumerate(corpus[:5]):
        p = _pick(cells, i)
        variant = ("sin", "cos")[i % 2]

        def run(entry=entry, p=p, variant=variant):
            return agreement(genspecial.gamma2d_polar(entry["f"], entry["g"], p, cfg, variant=variant),
                             genspecial.gamma2d(entry["f"], entry["g"], p, cfg, mode="factorized"), tol)
        checks.append(Check("prop4", "polar_" + variant, _case(entry, p), run,
                            gate=lambda entry=entry, p=p: admissible(entry["f"], p.alpha, p.beta), tolerance=tol))
    return checks


def _symmetry(corpus, cells, cfg, tol):
    checks = []
    for tag, form in (("prop1", "mirror"), ("prop3", "swap")):
        for i, entry in enumerate(corpus[1:4]):
            p = _pick(cells, i + 3)

            def run(entry=entry, p=p, form=form):
                return _residual(genspecial.residual_symmetry(entry["f"], entry["g"], p, cfg, form=form), tol)
            checks.append(Check(tag, "symmetry_" + form, _case(entry, p), run,
                                gate=lambda entry=entry, p=p: admissible(entry["f"], p.alpha, p.beta), tolerance=tol))
    return checks


def _lemmas(corpus, cells, cfg, tol):
    checks = []
    with_fprime = [e for e in corpus if e.get("fprime")]
    for i, entry in enumerate(with_fprime[:5]):
        p = _pick(cells, i + 1)

        def run(entry=entry, p=p):
            rec = genspecial.residual_beta_recurrence(entry["f"], p.alpha, p.beta, cfg, fprime=entry["fprime"])
            worst = max(rec.residuals(), key=lambda r: r.relative)
            return worst.relative, rec.passes(tol)
        checks.append(Check("lemma1", "beta_recurrence", _case(entry, p), run,
                            gate=lambda entry=entry, p=p: admissible(entry["f"], p.alpha, p.beta), tolerance=tol))
    for i, entry in enumerate(with_fprime[:3]):
        p = _pick(cells, i + 2)

        def run(entry=entry, p=p):
            first, second = genspecial.residual_gamma2d_recurrence(entry["f"], entry["g"], p, cfg,
                                                                   fprime=entry["fprime"])
            worst = max(first.relative, second.relative)
            return worst, first.passes(tol) and second.passes(tol)
        checks.append(Check("lemma2", "gamma2d_recurrence", _case(entry, p), run,
                            gate=lambda entry=entry, p=p: admissible(entry["f"], p.alpha, p.beta), tolerance=tol))
    return checks


def _properties(corpus, cells, cfg, tol):
    checks = []
    for i, entry in enumerate(corpus[1:4]):
        p = _pick(cells, i + 5)

        def run(entry=entry, p=p):
            return _residual(genspecial.residual_ratio_property(entry["f"], entry["g"], p, cfg), tol)
        checks.append(Check("prop6", "ratio_property", _case(entry, p), run,
                            gate=lambda entry=entry, p=p: admissible(entry["f"], p.alpha, p.beta), tolerance=tol))
    with_gprime = [e for e in corpus if e.get("gprime")]
    for i, entry in enumerate(with_gprime[1:4]):
        p = _pick(cells, i + 6)

        def run(entry=entry, p=p):
            return _residual(genspecial.residual_gprime_recurrence(entry["f"], entry["g"], entry["gprime"], p,
                                                                   cfg), tol)
        checks.append(Check("prop7", "gprime_recurrence", _case(entry, p), run,
                            gate=lambda entry=entry, p=p: admissible(entry["f"], p.alpha, p.beta), tolerance=tol))
    return checks


def _logmoments(defaults, corpus, cfg, tol, fd_tol, sweep):
    checks = []
    log_cfg = cfg.replace(rel_tol=max(cfg.rel_tol, logmoments.DEFAULT_CONFIG.rel_tol))
    orders = [logmoments.LogMomentOrder(*o) for o in defaults.get("logmoment_orders", [])]
    entries = corpus if sweep == "full" else corpus[:2]
    p = Params(1.7, 1.0, 1.0)
    for entry in entries:
        for order in orders:
            def run(entry=entry, order=order):
                return _residual(logmoments.logmoment_residual(entry["f"], entry["g"], p, order, log_cfg), tol)
            checks.append(Check("eq26", "logmoment", _case(entry, p, "order=" + str(order)), run, tolerance=tol))
    entry = corpus[0]

    def run_fd(entry=entry):
        moment = logmoments.gamma2d_logmoment_direct(entry["f"], entry["g"], p, logmoments.LogMomentOrder(1, 0, 0),
                                                     log_cfg)
        fd = logmoments.gamma_finite_difference(entry["f"], entry["g"], p, cfg=cfg)
        rel = abs(moment.value - fd) / abs(moment.value)
        return rel, rel <= fd_tol
    checks.append(Check("eq26", "finite_difference", _case(entry, p, "order=(1, 0, 0)"), run_fd, tolerance=fd_tol))
    return checks


def _classical_derivatives(defaults, cfg, tol, sweep):
    section = defaults.get("classical_derivative", {})
    combos = list(itertools.product(section.get("points", []), section.get("orders", [])))
    if sweep != "full":
        combos = combos[::3]
    checks = []
    log_cfg = cfg.replace(rel_tol=max(cfg.rel_tol, logmoments.DEFAULT_CONFIG.rel_tol))
    for (alpha, beta), (m, n) in combos:
        def run(alpha=alpha, beta=beta, m=m, n=n):
            return _residual(logmoments.classical_derivative_identity(m, n, alpha, beta, log_cfg), tol)
        checks.append(Check("eq101k1", "classical_derivative",
                            "m={} n={} alpha={} beta={}".format(m, n, alpha, beta), run, tolerance=tol))
    return checks


def _damped(defaults, corpus, cfg, tol, inv_tol, sweep):
    section = defaults.get("damped", {})
    combos = list(itertools.product(section.get("a", []), section.get("b", []), damped.KINDS))
    if sweep != "full":
        combos = combos[::5]
    checks = []
    one = FuncSpec.one()
    p = Params(1.0, 1.0, 0.0)
    for a, b, kind in combos:
        def run(a=a, b=b, kind=kind):
            d = damped.DampParams(a, b)
            return agreement(damped.gamma2d_damped(one, one, p, d, kind, mode="direct", cfg=cfg),
                             damped.gamma2d_damped(one, one, p, d, kind, mode="reduced", cfg=cfg), tol)
        checks.append(Check("eq101f", "damped_closed_form", "a={} b={} kind={}".format(a, b, kind), run, tolerance=tol))

    def run_invariants():
        worst = 0.0
        for s, a, b in ((1.0, 1.0, 1.0), (2.5, 0.5, 3.0), (3.7, 2.0, -1.5)):
            c, sn = damped.laplace_cos_1d(s, a, b), damped.laplace_sin_1d(s, a, b)
            pyth = math.exp(2.0 * math.lgamma(s) - s * math.log(a * a + b * b))
            worst = max(worst, abs(c * c + sn * sn - pyth) / pyth)
            k = 1.7
            scaled = damped.laplace_cos_1d(s, k * a, k * b)
            worst = max(worst, abs(scaled - k ** -s * c) / max(abs(scaled), 1e-300))
        return worst, worst <= inv_tol
    checks.append(Check("eq101f", "trig_invariants", "pythagorean and scaling", run_invariants, tolerance=inv_tol))

    for entry in [e for e in corpus if e["g"] != "1"][:2]:
        def run(entry=entry):
            d = damped.DampParams(1.0, 0.5)
            q = Params(1.0, 1.5, 0.5)
            return agreement(damped.gamma2d_damped(entry["f"], entry["g"], q, d, "sin", mode="direct", cfg=cfg),
                             damped.gamma2d_damped(entry["f"], entry["g"], q, d, "sin", mode="reduced", cfg=cfg), tol)
        checks.append(Check("thm8", "damped_reduced", _case(entry, extra="a=1 b=0.5 kind=sin"), run, tolerance=tol))
    return checks


def _series(defaults, cfg, tol):
    checks = []
    for entry in defaults.get("series", []):
        if "ratio" in entry:
            sp = seriesrep.SeriesSpec.geometric(entry["ratio"], L=entry.get("L", 1), N=entry.get("N", 60))
        else:
            sp = seriesrep.SeriesSpec(entry["coeffs"], L=entry.get("L", 0), N=entry.get("N"))

        def run(entry=entry, sp=sp):
            p = Params(2.0, 2.0, 1.0)
            g = entry.get("g", "1")
            forms = [
                seriesrep.gamma2d_series(sp, g, p, cfg),
                seriesrep.gamma2d_series_viagamma2d(sp, g, p, cfg),
                genspecial.gamma2d(entry["f"], g, p, cfg, mode="factorized"),
            ]
            results = [agreement(x, y, tol, factor=0.0) for x, y in itertools.combinations(forms, 2)]
            return max(r[0] for r in results), all(r[1] for r in results)
        case = "{}: f={}".format(entry.get("name"), entry["f"])
        checks.append(Check("eq45", "series_forms", case, run, tolerance=tol))
    return checks


def _hypergeometric(defaults, cfg, tol, series_tol, sweep):
    section = defaults.get("hyperg", {})
    combos = list(itertools.product(section.get("a", []), section.get("bc", []), section.get("z", [])))
    if sweep != "full":
        combos = combos[::7]
    checks = []
    for a, (b, c), z in combos:
        def run(a=a, b=b, c=c, z=z):
            value = hyperg.hyp2f1(a, b, c, z, cfg).value
            # the Pochhammer series is only summed where it converges quickly
            exact = oracle.hyp2f1_series(a, b, c, z) if abs(z) <= SERIES_Z else float(scipy_hyp2f1(a, b, c, z))
            rel = abs(value - exact) / abs(exact)
            return rel, rel <= series_tol
        checks.append(Check("eq251", "hyp2f1_series", "a={} b={} c={} z={}".format(a, b, c, z), run,
                            tolerance=series_tol))

    for a, b, c, z in ((1.0, 1.0, 2.0, 0.5), (2.0, 1.0, 3.0, -0.5)):
        def run(a=a, b=b, c=c, z=z):
            return agreement(hyperg.hyp2f1_gamma2d(a, b, c, z, cfg), hyperg.hyp2f1(a, b, c, z, cfg), tol, factor=0.0)
        checks.append(Check("eq251", "hyp2f1_gamma2d", "a={} b={} c={} z={}".format(a, b, c, z), run, tolerance=tol))

    cases = list(itertools.product(section.get("gamma", [0.0]), section.get("g", ["1"])))
    if sweep != "full":
        cases = cases[1::2]
    for gam, g in cases:
        def run(gam=gam, g=g):
            paths = hyperg.hyp2f1_f_paths("u", 1.0, 1.0, 2.0, 0.5, g=g, gamma=gam, cfg=cfg)
            results = [agreement(x, y, tol, factor=0.0) for x, y in itertools.combinations(paths.values(), 2)]
            return max(r[0] for r in results), all(r[1] for r in results)
        case = "f=u a=1 b=1 c=2 z=0.5 g={} gamma={}".format(g, gam)
        checks.append(Check("eq253", "hyp2f1_f_paths", case, run, tolerance=tol))
    return checks


def _separability(defaults):
    section = defaults.get("separability", {})
    tol = section.get("tol", 1e-9)
    grid = section.get("grid", 8)
    checks = []
    for expected, key in ((True, "separable"), (False, "non_separable"), (None, "vanishing")):
        for text in section.get(key, []):
            def run(text=text, expected=expected):
                report = detect_separable(text, tol=tol, grid=grid)
                if expected is None:
                    return float("nan"), not report.certified
                if expected:
                    return report.max_residual, report.separable
                return report.max_residual, (not report.separable and report.certified
                                             and report.max_residual >= 1e3 * tol)
            checks.append(Check("sep", key, "omega=" + text, run, tolerance=tol))
    return checks


def build_checks(defaults, cfg, corpus=None, sweep="sample", only=None):
    """Catalogue of checks in a fixed order, optionally restricted to the tags in `only`."""
    if sweep not in SWEEPS:
        raise ValueError("sweep must be one of {}, got '{}'".format(SWEEPS, sweep))
    corpus = corpus or defaults["corpus"]
    tols = defaults["tolerances"]
    cells = parameter_cells(defaults, "full")
    checks = (
        _classical(cfg, tols["classical"])
        + _factorization(corpus, cells, cfg, tols["eq12"], sweep)
        + _halfline(corpus, cells, cfg, tols["residual"])
        + _polar(corpus, cells, cfg, tols["residual"])
        + _symmetry(corpus, cells, cfg, tols["residual"])
        + _lemmas(corpus, cells, cfg, tols["residual"])
        + _properties(corpus, cells, cfg, tols["residual"])
        + _logmoments(defaults, corpus, cfg, tols["logmoment"], tols["finite_difference"], sweep)
        + _classical_derivatives(defaults, cfg, tols["classical_derivative"], sweep)
        + _damped(defaults, corpus, cfg, tols["damped"], tols["trig_invariant"], sweep)
        + _series(defaults, cfg, tols["series"])
        + _hypergeometric(defaults, cfg, tols["hyperg"], tols["hyperg_series"], sweep)
        + _separability(defaults)
    )
    if only:
        unknown = set(only) - set(TAGS)
        if unknown:
            raise ValueError("unknown tag(s): {}".format(", ".join(sorted(unknown))))
        checks = [c for c in checks if c.tag in only]
    return checks


def _errored(check, exc, start):
    return CheckResult(check.tag, check.name, check.case, ERROR, tolerance=check.tolerance,
                       seconds=time.perf_counter() - start, detail="{}: {}".format(type(exc).__name__, exc))


def run_check(check):
    """Run one check; an exception becomes an `error` row instead of stopping the run."""
    start = time.perf_counter()
    tolerance = check.tolerance
    try:
        if check.gate is not None and not check.gate():
            return CheckResult(check.tag, check.name, check.case, SKIPPED, tolerance=tolerance,
                               detail="endpoint condition fails")
        residual, ok = check.run()
    except GenGammaError as exc:
        logger.debug("check %s (%s) raised %r", check.name, check.case, exc)
        return _errored(check, exc, start)
    except Exception as exc:
        logger.warning("check %s (%s) failed unexpectedly", check.name, check.case, exc_info=True)
        return _errored(check, exc, start)
    return CheckResult(check.tag, check.name, check.case, PASS if ok else FAIL, residual=float(residual),
                       tolerance=tolerance, seconds=time.perf_counter() - start)


def run_checks(checks, jobs=1):
    """Run the checks, `jobs` at a time, and return their results in catalogue order."""
    if jobs <= 1:
        return [run_check(c) for c in checks]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_check, checks))


"""
Bench ---------------------------------------------------------------------------------------------
"""


@dataclass
class BenchCell:
    alpha: float
    beta: float
    gamma: float
    direct_ms: float
    factorized_ms: float
    direct_value: float
    factorized_value: float
    speedup: float = field(init=False)

    def __post_init__(self):
        self.speedup = self.direct_ms / self.factorized_ms if self.factorized_ms > 0 else float("inf")

    def as_dict(self):
        return asdict(self)


def _median_ms(func, warmup, repeat):
    for _ in range(warmup):
        func()
    times = []
    result = None
    for _ in range(repeat):
        start = time.perf_counter()
        result = func()
        times.append(time.perf_counter() - start)
    return 1e3 * statistics.median(times), result


def bench_cell(f, g, p, cfg, warmup=3, repeat=10):
    """Median wall time of the direct and factorized paths for one parameter cell."""
    direct_ms, direct = _median_ms(lambda: genspecial.gamma2d(f, g, p, cfg, mode="direct"), warmup, repeat)
    fact_ms, fact = _median_ms(lambda: genspecial.gamma2d(f, g, p, cfg, mode="factorized"), warmup, repeat)
    return BenchCell(p.alpha, p.beta, p.gamma, direct_ms, fact_ms, direct.value, fact.value)


def run_bench(f, g, cells, cfg, warmup=3, repeat=10, jobs=1):
    f, g = as_funcspec(f, 1), as_funcspec(g, 1)
    if jobs <= 1:
        return [bench_cell(f, g, p, cfg, warmup, repeat) for p in cells]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda p: bench_cell(f, g, p, cfg, warmup, repeat), cells))