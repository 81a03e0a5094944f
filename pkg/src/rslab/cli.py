"""rslab command-line front end.

Every subcommand writes report.json, its CSV series and manifest.json to
out/<command>/<instance>/<tag or timestamp>/ and prints a one-line summary.
Exit codes: 0 pass, 2 bound violation, 1 usage error.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import sys
from pathlib import Path
from typing import Callable, List, Optional

import numpy as np

from . import explicit_formula as ef
from . import instances as inst
from . import lfunc_core as core
from . import sieve, sums
from . import zeros as zmod
from .errors import (
    DegenerateRegion,
    DivergentLocalFactor,
    InadmissibleParameters,
    RsLabError,
)
from .modular import hecke_table
from .parallel import set_threads
from .report import Report, RunManifest, Series, write_run

# flags that steer execution but never change results
_NON_PARAMS = {"config", "out", "tag", "threads", "command", "handler"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit with status 2, reserved for bound violations
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# argument types


def num(text) -> float:
    """Float that accepts scientific notation."""
    try:
        return float(text)
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")


def integer(text) -> int:
    """Integer that also accepts forms like 1e6."""
    v = num(text)
    if not v.is_integer():
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(v)


def num_list(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [num(t) for t in text]
    parts = [p for p in str(text).split(",") if p.strip()]
    return [num(p) for p in parts]


def int_list(text) -> list[int]:
    if isinstance(text, (list, tuple)):
        return [integer(t) for t in text]
    return [integer(p) for p in str(text).split(",") if p.strip()]


def point(text) -> tuple[float, float]:
    """beta:gamma pair for a planted zero."""
    if isinstance(text, (list, tuple)) and len(text) == 2:
        return num(text[0]), num(text[1])
    try:
        b, g = str(text).split(":")
        return num(b), num(g)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected BETA:GAMMA, got {text!r}")


# ---------------------------------------------------------------------------
# shared helpers


def _rep(args, X: float):
    return inst.instance_for(args.instance, max(X, 2))


def _zero_set(args, T: float) -> zmod.ZeroSet:
    """Zero set from --zeros FILE, or the zeta zeros up to T."""
    if getattr(args, "zeros", None):
        text = Path(args.zeros).read_text()
        return zmod.ZeroSet.from_csv(text, T_max=max(T, 0.0), complete=True)
    if inst.parse_spec(args.instance).family != "zeta":
        raise UsageError(
            f"no built-in zero set for {args.instance}; pass --zeros FILE (beta,gamma,multiplicity,source)"
        )
    return zmod.find_zeta_zeros(T)


def _ratio(a: float, b: float):
    return a / b if b else None


# ---------------------------------------------------------------------------
# handlers: each returns (Report, [Series])


def cmd_coeffs(args):
    pmax = args.pmax
    rep = _rep(args, max(pmax, args.x))
    kmax = args.kmax
    exp_worst, rs_worst, rows = 0.0, 0.0, []
    for i in np.flatnonzero(rep.norms <= pmax).tolist():
        loc = rep.local(i)
        lam = core.local_standard_coeffs(loc, kmax)
        rs = core.ramified_rs_satake(loc) if loc.ramified else core.rs_satake(loc)
        lam_rs = core.rs_local_coeffs(rs, kmax)
        vm1 = core.rs_vonmangoldt(rs, 1)
        mism = core.exp_identity_check(rs, kmax)
        exp_worst = max(exp_worst, mism)
        if not loc.ramified:
            rs_worst = max(rs_worst, abs(lam_rs[1] - abs(lam[1]) ** 2))
        rows.append((loc.norm, loc.degree, loc.ramified, int(rep.primes[i]),
                     lam[1].real, lam[1].imag, lam_rs[1], vm1, mism))

    # per-ideal Lambda(p^k) over all prime powers of norm <= x
    min_vm, X = math.inf, args.x
    k = 1
    while 2.0**k <= X:
        idx = np.flatnonzero(rep.norms.astype(float) ** k <= X)
        if idx.size == 0:
            break
        vals = core.rs_power_sums(rep, k, idx)[:, k - 1] * np.log(rep.norms[idx].astype(float))
        min_vm = min(min_vm, float(vals.min()))
        k += 1

    table = inst.enumerate_prime_ideals(rep.field, int(pmax))
    icount = inst.ideal_count(rep.field, args.z, args.eps)
    first = table.norms[: args.omega].tolist()
    omega = inst.prime_divisor_count_check(first, args.eps, rep.field.degree)

    details = {
        "exp_identity_max": exp_worst,
        "rs_vs_abs_square_max": rs_worst,
        "min_rs_vonmangoldt": min_vm,
        "ideal_count": icount,
        "prime_divisor_check": omega,
        "conductor": rep.conductor,
        "kappa": rep.kappa,
    }
    series = [
        Series("coeffs", ["norm", "degree", "ramified", "p", "lambda_re", "lambda_im",
                          "lambda_rs", "Lambda_rs", "exp_mismatch"], rows),
        Series("ideals", ["norm", "degree", "ramified", "p"], table.rows()),
    ]
    passed = (exp_worst <= 1e-9 and rs_worst <= 1e-12 and min_vm >= -1e-9
              and icount.passed and omega.passed)
    if "weight" in rep.meta:
        w = rep.meta["weight"]
        if w == 12:
            tau = inst.tau_expansion(int(pmax))
            hrows = [(p, a) for p, a in tau.items()]
        else:
            tab = hecke_table(w, int(pmax))
            hrows = list(zip(tab.primes.tolist(), tab.a_p))
        deligne = hecke_table(w, int(pmax)).deligne_ok()
        details["deligne_ok"] = deligne
        passed = passed and deligne
        series.append(Series("hecke", ["p", "a_p"], [(p, str(a)) for p, a in hrows]))
    value = max(exp_worst, rs_worst)
    return Report("coeffs", args.instance, {}, value, 1e-9, _ratio(value, 1e-9), passed, details), series


def cmd_conductor(args):
    rep = _rep(args, 2)
    checks = core.bh_conductor_check(rep, args.t)
    rows = [(c.t, core.analytic_conductor(rep, c.t), c.lhs, c.rhs, c.ratio, c.passed) for c in checks]
    worst = max(c.ratio for c in checks) if checks else None
    details = {"C_pi": core.analytic_conductor(rep), "C_rs": core.rs_analytic_conductor(rep)}
    rep_ = Report("conductor", args.instance, {}, details["C_rs"], None, worst,
                  all(c.passed for c in checks), details)
    return rep_, [Series("conductor", ["t", "C_pi", "C_rs", "bh_bound", "ratio", "pass"], rows)]


def cmd_interval(args):
    rep = _rep(args, args.x + args.h)
    r = sums.short_interval(rep, args.x, args.h, args.beta1)
    grc = sums.grc_prime_interval(rep, args.x, args.h)
    psi = sums.psi_rs(rep, args.x)
    details = {"psi_x": psi, "grc_prime_part": grc, "xi": r.xi, "raw": r.raw}
    passed = r.raw >= -1e-9 and grc <= r.raw + 1e-9
    rows = [(r.x, r.h, r.raw, grc, r.main, r.ratio)]
    return (Report("interval", args.instance, {}, r.raw, r.main, r.ratio, passed, details),
            [Series("interval", ["x", "h", "raw", "grc", "main", "ratio"], rows)])


def cmd_composite_tail(args):
    rep = _rep(args, 2 * max(args.x))
    res = [sums.composite_tail(rep, x) for x in args.x]
    worst = max(r.ratio for r in res)
    rows = [(r.x, r.tail, r.bound, r.ratio) for r in res]
    return (Report("composite-tail", args.instance, {}, res[-1].tail, res[-1].bound, worst,
                   worst <= args.max_ratio, {"max_ratio_allowed": args.max_ratio}),
            [Series("tail", ["x", "tail", "bound", "ratio"], rows)])


def cmd_hyp_h(args):
    rep = _rep(args, args.X)
    r = sums.hypothesis_h_partial(rep, args.k, args.X)
    rows = [(lo, hi, inc) for lo, hi, inc in r.blocks]
    return (Report("hyp-h", args.instance, {}, r.total, None, None, r.decreasing(),
                   {"increments": r.increments}),
            [Series("blocks", ["lo", "hi", "increment"], rows)])


def cmd_mertens(args):
    rep = _rep(args, args.X)
    r = sums.mertens_check(rep, args.eta, args.X)
    return (Report("mertens", args.instance, {}, r.partial, r.budget, _ratio(r.partial, r.budget),
                   r.passed), [])


def cmd_brumley(args):
    rep = _rep(args, args.X)
    try:
        r = sums.brumley_max_product(rep, args.eps, args.X)
    except DivergentLocalFactor as exc:
        return Report("brumley", args.instance, {}, None, None, None, False, {"error": str(exc)}), []
    # finite product for eps > 0 means the bound side is finite
    return (Report("brumley", args.instance, {}, r.value, None, r.max_ratio, True,
                   {"log_value": r.log_value, "max_geometric_ratio": r.max_ratio}), [])


def cmd_zeros(args):
    zs = _zero_set(args, args.tmax)
    upper = [z for z in zs.zeros if z.gamma > 0]
    grid = set(np.arange(1.0, math.floor(args.tmax) + 1).tolist()) | {float(args.tmax)}
    for z in upper:
        grid.add(z.gamma)
        grid.add(max(z.gamma - 1e-7, 0.0))
    checks = [zmod.counting_formula_check(zs, T) for T in sorted(grid) if T <= zs.T_max]
    worst = max((c.diff for c in checks), default=0.0)
    details = {"count": len(upper), "gamma_1": upper[0].gamma if upper else None,
               "max_counting_diff": worst}
    crow = [(c.T, c.count, c.main, c.diff) for c in checks if float(c.T).is_integer()]
    return (Report("zeros", args.instance, {}, len(upper), 2.0, worst, worst <= 2.0, details),
            [Series("zeros", ["beta", "gamma", "multiplicity", "source"],
                    [(z.beta, z.gamma, z.multiplicity, z.source) for z in upper]),
             Series("counting", ["T", "count", "main", "diff"], crow)])


def cmd_density(args):
    rep = _rep(args, 2)
    zs = _zero_set(args, args.T)
    rows = zmod.density_bound_compare(zs, rep, args.T, args.sigma, args.A)
    counts = {s: zmod.zero_count(zs, s, args.T) for s in args.sigma}
    return (Report("density", args.instance, {}, counts, None, None, all(r.passed for r in rows)),
            [Series("density", ["sigma", "count", "log_bound", "pass"],
                    [(r.sigma, r.count, r.log_bound, r.passed) for r in rows])])


def _violation_rows(v):
    return [(x.zero.beta, x.zero.gamma, x.boundary) for x in v]


def cmd_zfr(args):
    rep = _rep(args, 2)
    zs = _zero_set(args, args.T)
    if args.plant:
        zs = zs.with_zeros(args.plant)
    v = zmod.zfr_check(zs, rep, args.c1)
    return (Report("zfr", args.instance, {}, len(v), 0, None, not v),
            [Series("violations", ["beta", "gamma", "boundary"], _violation_rows(v))])


def cmd_repulsion(args):
    rep = _rep(args, 2)
    zs = _zero_set(args, args.T)
    if args.plant:
        zs = zs.with_zeros(args.plant)
    siegel = zmod.siegel_bound_check(rep, args.beta1, args.c)
    details = {"siegel": siegel}
    try:
        v = zmod.repulsion_region_check(zs.with_exceptional(args.beta1), rep, args.beta1, args.c4, args.c5)
    except DegenerateRegion as exc:
        details["degenerate"] = str(exc)
        return Report("repulsion", args.instance, {}, None, None, None, siegel.passed, details), []
    return (Report("repulsion", args.instance, {}, len(v), 0, None, not v and siegel.passed, details),
            [Series("violations", ["beta", "gamma", "boundary"], _violation_rows(v))])


def cmd_powersum(args):
    zs = _zero_set(args, args.T)
    gamma_p = args.gamma_prime
    if gamma_p is None:
        first = next(z for z in zs.zeros if z.gamma > 0)
        beta_p, gamma_p = first.beta, first.gamma
    else:
        beta_p = args.beta_prime
    cfg = zmod.power_sum_experiment(zs, args.beta1, beta_p, gamma_p, args.jmax)
    trace = list(zip(cfg.js, cfg.sums, cfg.upper))
    wrows, failures = [], 0
    for c, (czs, b1, bp, gp) in enumerate(zmod.seeded_configurations(zs, args.configs, args.seed)):
        z = zmod.build_z_list(czs, gp)
        L = float(np.abs(z).sum() / abs(z[0]))
        ok_z1 = abs(z[0]) >= (2 - bp) ** -2 * (1 - 1e-12)
        try:
            j = zmod.turan_witness(z)
        except RsLabError:
            j = None
        if j is None or not ok_z1:
            failures += 1
        wrows.append((c, len(czs), b1, bp, gp, L, j))
    details = {"L": cfg.L, "witness": cfg.witness, "c_implied": cfg.c_implied,
               "configs": args.configs, "failures": failures}
    passed = failures == 0 and cfg.witness is not None
    return (Report("powersum", args.instance, {}, failures, 0, None, passed, details),
            [Series("trace", ["j", "sum_re", "upper_middle"], trace),
             Series("witness", ["config", "zeros", "beta1", "beta_prime", "gamma_prime", "L", "j1"], wrows)])


def cmd_ef(args):
    Ts = sorted(args.T)
    rep = _rep(args, args.x + args.h)
    zs = _zero_set(args, max(Ts))
    sweep = ef.ef_sweep(rep, zs, args.x, Ts)
    rows = [(r.T, r.psi, r.zero_sum.real, r.im_residue, r.residual, r.budget, r.ratio) for r in sweep]
    details = {"residuals": [r.residual for r in sweep]}
    passed = all(r.residual <= r.budget for r in sweep)
    if len(sweep) > 1:
        passed = passed and sweep[-1].residual < sweep[0].residual
    series = [Series("sweep", ["T", "psi", "zero_sum_re", "im_residue", "residual", "budget", "ratio"], rows)]
    if 2 <= args.h <= args.x:
        izt = ef.interval_zero_term(zs, args.x, args.h, max(Ts))
        dy = ef.dyadic_zero_bound(zs, args.x, args.h, max(Ts))
        details.update({"interval_zero_term": izt.total, "per_zero_within": izt.all_within,
                        "dyadic": dy, "dyadic_total": dy.total})
        passed = passed and izt.all_within
        series.append(Series("per_zero", ["gamma", "magnitude", "bound", "branch"],
                             list(zip(izt.gammas, izt.magnitudes, izt.bounds, izt.branch))))
    last = sweep[-1]
    return Report("ef", args.instance, {}, last.residual, last.budget, last.ratio, passed, details), series


def _sieve_kappa(args, rep):
    if args.kappa is not None:
        return args.kappa, "flag"
    if rep.kappa is not None:
        return rep.kappa, "instance"
    return sieve.estimate_kappa(rep, min(args.x, rep.cutoff / 6)).euler, "euler-product"


def cmd_sieve_local(args):
    w = sieve.DEFAULT_WEIGHT
    top = args.x * math.exp(w.support[1] / args.T)
    rep = _rep(args, top)
    kappa, source = _sieve_kappa(args, rep)
    ideals = sieve.ideals_from_norms(rep, args.d)
    r = sieve.weighted_divisor_sum(rep, ideals, args.x, args.T, w, kappa=kappa)
    unit = r if not ideals else sieve.weighted_divisor_sum(rep, [], args.x, args.T, w, kappa=kappa)
    strip = sieve.g_strip_bound_check(rep, ideals, args.t)
    s = 1 / args.T
    details = {
        "kappa": kappa, "kappa_source": source, "g": r.g, "Nd": r.Nd,
        "lhs_unit": unit.lhs, "lhs_over_unit": _ratio(r.lhs, unit.lhs),
        "difference": r.difference, "budget": r.budget, "budget_ratio": r.budget_ratio,
        "phi_check": sieve.phi_check(s, w), "decay_constant": sieve.decay_constant(complex(s, 10.0), w),
    }
    passed = r.budget_ratio <= 10 and all(row.passed for row in strip)
    return (Report("sieve-local", args.instance, {}, r.lhs, r.main, r.ratio, passed, details),
            [Series("strip", ["t", "value", "budget", "pass"],
                    [(row.t, row.value, row.budget, row.passed) for row in strip])])


def cmd_sieve_upper(args):
    w = sieve.DEFAULT_WEIGHT
    rep = _rep(args, args.x * math.exp(w.support[1] / args.T))
    r = sieve.selberg_upper(rep, args.x, args.T, args.z, w)
    return (Report("sieve-upper", args.instance, {}, r.lhs, r.main + r.error_budget,
                   _ratio(r.lhs, r.main), r.passed,
                   {"main": r.main, "error_budget": r.error_budget, "flags": r.flags}), [])


def cmd_bt(args):
    top = max(args.x) * math.exp(1 / min(args.T))
    rep = _rep(args, top)
    res = [sieve.brun_titchmarsh(rep, x, T) for x in args.x for T in args.T]
    worst = max(r.ratio for r in res)
    rows = [(r.x, r.T, r.total, r.budget, r.ratio, r.in_range) for r in res]
    return (Report("bt", args.instance, {}, worst, args.max_ratio, worst, worst <= args.max_ratio),
            [Series("grid", ["x", "T", "total", "budget", "ratio", "in_range"], rows)])


def cmd_xi(args):
    sols = [ef.xi_solve(args.x, args.h, args.beta1)]
    if args.grid:
        rng = np.random.default_rng(args.seed)
        for _ in range(args.grid):
            x = float(10 ** rng.uniform(2, 8))
            h = float(rng.uniform(2, x))
            b = float(rng.uniform(0.5, 1 - 1e-6))
            sols.append(ef.xi_solve(x, h, b))
    scaled = [s.residual / s.x**s.beta1 for s in sols]
    ok = all(r <= 1e-10 for r in scaled) and all(0 <= s.factor < 1 for s in sols)
    head = sols[0]
    rows = [(s.x, s.h, s.beta1, s.xi, s.factor, s.residual) for s in sols]
    return (Report("xi", "none", {}, head.xi, None, max(scaled) / 1e-10, ok,
                   {"factor": head.factor, "max_scaled_residual": max(scaled)}),
            [Series("xi", ["x", "h", "beta1", "xi", "factor", "residual"], rows)])


def cmd_plan(args):
    try:
        p = ef.choices_plan(args.A, args.n, args.dF, args.theta, args.x)
    except InadmissibleParameters as exc:
        return Report("plan", "none", {}, None, None, None, False, {"error": str(exc)}), []
    return Report("plan", "none", {}, p.delta, p.limit, None, True, {"plan": p}), []


# ---------------------------------------------------------------------------
# parser


def _common() -> argparse.ArgumentParser:
    c = argparse.ArgumentParser(add_help=False)
    c.add_argument("--instance", default="zeta",
                   help="zeta | dirichlet:q:i | dedekind:d | holomorphic:k (default zeta)")
    c.add_argument("--threads", type=integer, default=1, help="worker cap; never changes results")
    c.add_argument("--config", help="JSON file of flag values (same keys as flags)")
    c.add_argument("--tag", help="run directory name (default: timestamp)")
    c.add_argument("--out", default="out", help="output root (default ./out)")
    c.add_argument("--seed", type=integer, default=0, help="RNG seed for seeded grids")
    return c


def _zero_flags(p, T=100.0):
    p.add_argument("--T", type=num, default=T, help="height of the zero set")
    p.add_argument("--zeros", help="zero-set CSV (beta,gamma,multiplicity,source) instead of zeta zeros")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    top = _Parser(prog="rslab", description="Rankin-Selberg L-function experiments.")
    sub = top.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, handler: Callable, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help, description=help)
        p.set_defaults(handler=handler)
        return p

    p = add("coeffs", cmd_coeffs, "local coefficient identities, nonnegativity, ideal tables")
    p.add_argument("--pmax", type=integer, default=1000, help="primes (ideal norms) checked")
    p.add_argument("--kmax", type=integer, default=12)
    p.add_argument("--x", type=num, default=1e4, help="nonnegativity range for N(n)")
    p.add_argument("--z", type=num, default=100.0, help="ideal-count cutoff")
    p.add_argument("--eps", type=num, default=0.5)
    p.add_argument("--omega", type=integer, default=100, help="number of smallest prime ideals in d")

    p = add("conductor", cmd_conductor, "analytic conductors and the conductor growth check")
    p.add_argument("--t", type=num_list, default=[0.0, 1.0, 10.0, 100.0, 1000.0])

    p = add("interval", cmd_interval, "short-interval sum of Rankin-Selberg von Mangoldt values")
    p.add_argument("--x", type=num, default=1e5)
    p.add_argument("--h", type=num, default=1e4)
    p.add_argument("--beta1", type=num, default=None, help="synthetic exceptional zero")

    p = add("composite-tail", cmd_composite_tail, "prime-power part of Lambda on [x, 2x]")
    p.add_argument("--x", type=num_list, default=[1e3, 1e4, 1e5])
    p.add_argument("--max-ratio", type=num, default=10.0)

    p = add("hyp-h", cmd_hyp_h, "Hypothesis H partial sums on dyadic blocks")
    p.add_argument("--k", type=integer, default=2)
    p.add_argument("--X", type=num, default=1e5)

    p = add("mertens", cmd_mertens, "weighted Mertens-type partial sum")
    p.add_argument("--eta", type=num, default=0.1)
    p.add_argument("--X", type=num, default=1e5)

    p = add("brumley", cmd_brumley, "product of maximal local geometric series")
    p.add_argument("--eps", type=num, default=0.1)
    p.add_argument("--X", type=num, default=1e4)

    p = add("zeros", cmd_zeros, "zeta zeros up to --tmax with the counting-formula check")
    p.add_argument("--tmax", type=num, default=100.0)
    p.add_argument("--zeros", help=argparse.SUPPRESS)

    p = add("density", cmd_density, "zero-density counts against the log-free bound")
    _zero_flags(p)
    p.add_argument("--sigma", type=num_list, default=[0.5, 0.6, 0.7, 0.8, 0.9])
    p.add_argument("--A", type=num, default=1e7)

    p = add("zfr", cmd_zfr, "zero-free region check")
    _zero_flags(p)
    p.add_argument("--c1", type=num, default=0.05)
    p.add_argument("--plant", type=point, action="append", help="extra zero BETA:GAMMA (repeatable)")

    p = add("repulsion", cmd_repulsion, "exceptional-zero repulsion region and Siegel check")
    _zero_flags(p)
    p.add_argument("--beta1", type=num, default=0.9)
    p.add_argument("--c4", type=num, default=1.0)
    p.add_argument("--c5", type=num, default=0.1)
    p.add_argument("--c", type=num, default=3.0, help="Siegel exponent")
    p.add_argument("--plant", type=point, action="append", help="extra zero BETA:GAMMA (repeatable)")

    p = add("powersum", cmd_powersum, "power-sum trace and Turan witnesses on seeded configurations")
    _zero_flags(p)
    p.add_argument("--beta1", type=num, default=0.95)
    p.add_argument("--beta-prime", type=num, default=0.5)
    p.add_argument("--gamma-prime", type=num, default=None, help="default: lowest zero")
    p.add_argument("--jmax", type=integer, default=50)
    p.add_argument("--configs", type=integer, default=100)

    p = add("ef", cmd_ef, "truncated explicit formula and short-interval zero sums")
    p.add_argument("--x", type=num, default=1000.0)
    p.add_argument("--T", type=num_list, default=[50.0, 100.0, 200.0])
    p.add_argument("--h", type=num, default=100.0)
    p.add_argument("--zeros", help="zero-set CSV instead of zeta zeros")

    p = add("sieve-local", cmd_sieve_local, "smoothed divisor-restricted sums against kappa g(d) x/T")
    p.add_argument("--x", type=num, default=1e5)
    p.add_argument("--T", type=num, default=1.0)
    p.add_argument("--d", type=int_list, default=[], help="prime-ideal norms of d (comma list)")
    p.add_argument("--t", type=num_list, default=[0.0, 1.0, 10.0, 100.0])
    p.add_argument("--kappa", type=num, default=None, help="residue override")

    p = add("sieve-upper", cmd_sieve_upper, "Selberg upper bound for sifted sums")
    p.add_argument("--x", type=num, default=1e5)
    p.add_argument("--T", type=num, default=1.0)
    p.add_argument("--z", type=num, default=10.0)

    p = add("bt", cmd_bt, "Brun-Titchmarsh ratio on an (x, T) grid")
    p.add_argument("--x", type=num_list, default=[1e4, 1e5, 1e6])
    p.add_argument("--T", type=num_list, default=[1.0, 10.0, 100.0])
    p.add_argument("--max-ratio", type=num, default=5.0)

    p = add("xi", cmd_xi, "solve for xi in the exceptional-zero mean value")
    p.add_argument("--x", type=num, default=1e6)
    p.add_argument("--h", type=num, default=1e4)
    p.add_argument("--beta1", type=num, default=0.9)
    p.add_argument("--grid", type=integer, default=0, help="extra seeded random (x, h, beta1) points")

    p = add("plan", cmd_plan, "T and delta choices with admissibility checks")
    p.add_argument("--A", type=num, default=1e7)
    p.add_argument("--n", type=integer, default=1)
    p.add_argument("--dF", type=integer, default=1)
    p.add_argument("--theta", type=num, default=0.0)
    p.add_argument("--x", type=num, default=None)
    return top


def _apply_config(parser: argparse.ArgumentParser, argv: List[str]) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    try:
        cfg = json.loads(Path(known.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read --config {known.config}: {exc}")
    if not isinstance(cfg, dict):
        raise UsageError("--config must hold a JSON object of flag values")
    cfg = {k.lstrip("-").replace("-", "_"): v for k, v in cfg.items()}
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    for name, p in sub.choices.items():
        dests = {a.dest for a in p._actions}
        unknown = set(cfg) - dests
        if name in argv and unknown:
            raise UsageError(f"--config: unknown keys for {name}: {', '.join(sorted(unknown))}")
        p.set_defaults(**{k: v for k, v in cfg.items() if k in dests})


def _params(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in _NON_PARAMS}


def _run_dir(args, instance: str) -> Path:
    name = args.tag or _dt.datetime.now().strftime("%Y%m%dT%H%M%S%f")
    return Path(args.out) / args.command / instance.replace(":", "_") / name


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return "-" if v is None else str(v)


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        set_threads(args.threads)
        if args.command not in ("xi", "plan"):
            args.instance = inst.parse_spec(args.instance).label
        report, series = args.handler(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (RsLabError, ValueError, OSError) as exc:
        print(f"usage error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1

    report.params = _params(args)
    outdir = _run_dir(args, report.instance)
    manifest = RunManifest(args.command, report.instance, report.params, args.seed)
    write_run(outdir, report, series, manifest)
    status = {True: "PASS", False: "FAIL", None: "n/a"}[report.passed]
    print(f"{args.command} {report.instance}: value={_fmt(report.value)} bound={_fmt(report.bound)} "
          f"ratio={_fmt(report.ratio)} {status} -> {outdir}")
    return 2 if report.passed is False else 0


if __name__ == "__main__":
    sys.exit(main())
