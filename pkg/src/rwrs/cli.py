"""Command line interface: ``rwrs <command> ...``; results go to stdout as JSON.

Exit codes: 0 success, 1 usage or input error, 2 a failed experiment check.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__, confinement, probes, rates
from .core import Color, StepDistribution
from .events import EVENT_NAMES, by_name, isolated_whites
from .grammar import RecordSyntaxError, parse_record
from .inference import (
    EnumerationInfeasible,
    ImpossibleRecord,
    StateExplosion,
    conditional_color_at_origin,
    delta,
    enumerate_compatible,
)

USAGE, CHECK_FAILED = 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE, f"{self.prog}: error: {message}\n")


def _num(x):
    if isinstance(x, Fraction):
        return {"value": float(x), "exact": f"{x.numerator}/{x.denominator}"}
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def _emit(doc: dict):
    json.dump({k: _num(v) for k, v in doc.items()}, sys.stdout, indent=1, sort_keys=True)
    sys.stdout.write("\n")


def _dist(args) -> StepDistribution:
    if args.exact:
        return StepDistribution(Fraction(str(args.p)), Fraction(str(args.eps)))
    return StepDistribution(float(Fraction(str(args.p))), float(Fraction(str(args.eps))))


def _record(text: str) -> str:
    return parse_record(text).symbols


def _add_dist(p, p_default="0.5"):
    p.add_argument("--p", default=p_default, help="right-step bias in [1/2, 1]; fractions like 7/10 accepted")
    p.add_argument("--eps", default="0", help="pause probability in [0, 1)")
    p.add_argument("--exact", action="store_true", help="exact rational arithmetic")


# -- commands ----------------------------------------------------------------


def cmd_cond(args):
    dist = _dist(args)
    rec = _record(args.record)
    if args.particles is not None:
        from .sampler import sis_conditional

        est = sis_conditional(rec, dist, particles=args.particles, seed=args.seed)
        _emit({"record": rec, "mean": est.mean, "stderr": est.stderr, "ess": est.ess, "particles": est.particles,
               "seed": est.seed, "log_normalizer": est.log_normalizer, "resamples": est.resamples})
        return 0
    r = conditional_color_at_origin(rec, dist, backend=args.backend, top_k=args.top_k)
    _emit({"record": rec, "p_black": r.p_black, "p_white": r.p_white, "log_normalizer": r.log_normalizer,
           "states_explored": r.states_explored, "pruned": r.pruned, "backend": r.backend,
           "approximate": r.approximate})
    return 0


def cmd_event(args):
    dist = _dist(args)
    rec = _record(args.record)
    if args.pivots is not None:
        pivots = tuple(int(x) for x in args.pivots.split(",") if x.strip())
    else:
        pivots = tuple(isolated_whites(rec))
    ev = by_name(args.event, pivots, args.l)
    res = enumerate_compatible(rec, dist)
    pe = res.probability(ev)
    doc = {"record": rec, "event": ev.name, "pivots": list(pivots), "probability": pe, "paths": len(res.paths())}
    doc["p_black_given_event"] = res.given(ev, Color.B) if pe else None
    _emit(doc)
    return 0


def cmd_delta(args):
    dist = _dist(args)
    pre, e1, e2 = _record(args.prefix), _record(args.ext1), _record(args.ext2)
    if args.audit:
        from .cuts import audit_delta_chain

        r = audit_delta_chain(pre, e1, e2, dist, kind=args.kind)
        _emit({"delta": r.delta, "f_tilde": r.f_tilde, "A": list(r.A), "m": r.m, "n": r.n, "bound": r.bound,
               "applicable": r.applicable, "size_ok": r.size_ok, "bound_ok": r.bound_ok})
        return 0
    _emit({"prefix": pre, "ext1": e1, "ext2": e2, "delta": delta(pre, e1, e2, dist, backend=args.backend)})
    return 0


def cmd_rate(args):
    p, eps = float(Fraction(str(args.p))), float(Fraction(str(args.eps)))
    g = rates.goodness_criterion(p, eps)
    doc = {"p": p, "eps": eps, "drift": args.drift, "criterion_holds": g.holds, "margin": g.margin,
           "drift_ok": g.drift_ok, "crossover_sign": rates.crossover_sign(Fraction(str(args.p)), 0)}
    try:
        t = rates.solve_tilt(p, eps, args.drift)
        doc.update(lambda_bar=t.lambda_bar, rate=t.rate)
    except rates.UnattainableDrift as exc:
        doc.update(lambda_bar=None, rate=math.inf, note=str(exc))
    _emit(doc)
    return 0


def cmd_confine(args):
    val = confinement.confinement_probability(args.n, args.i, args.j, exact=args.exact)
    doc = {"n": args.n, "i": args.i, "j": args.j, "probability": val}
    if not args.exact:
        doc["log_probability"] = confinement.log_confinement(args.n, args.i, args.j)
    _emit(doc)
    return 0


def cmd_build(args):
    rec = probes.build(args.name, m=args.m, L=args.L, k=args.k, K=args.K, n=args.n)
    doc = {"name": args.name, "length": len(rec), "record": rec.symbols, "compressed": rec.render()}
    if args.name in ("barY", "tildeY"):
        g = probes.ProbeGeometry(args.m, args.L)
        doc.update(start=args.m, pivot_times=list(g.pivot_times if args.name == "barY" else g.pivot_times[:-1]))
    elif args.name == "goodPrefix":
        doc["pivot_times"] = list(probes.good_pivot_times(args.L))
    _emit(doc)
    return 0


def _param_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def cmd_exp(args):
    from .experiments import CATALOG, ExperimentSpec, resolve, run, write_result

    if args.id == "list":
        for e in CATALOG.values():
            crit = ",".join(str(c) for c in e.criteria)
            print(f"{e.id:4} {e.name:20} criteria {crit:6} {e.summary}")
        return 0
    entry = resolve(args.id)
    params = dict(args.parameters or {})
    for item in args.param or []:
        if "=" not in item:
            raise UsageError(f"--param expects name=value, got {item!r}")
        k, v = item.split("=", 1)
        params[k.strip()] = _param_value(v)
    result = run(ExperimentSpec(entry.id, params, args.seed))
    out = Path(args.out) if args.out else Path("results") / entry.name
    files = write_result(result, out, args.format)
    if args.figures:
        from .plotting import figures

        files += figures(result, out)
    for c in result.checks:
        print(c.line())
        if c.required and not c.passed:
            print(f"  violated claim: {c.claim}", file=sys.stderr)
    print(f"wrote {len(files)} files to {out} in {result.wall_time:.1f} s")
    return 0 if result.passed else CHECK_FAILED


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="rwrs", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"rwrs {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="JSON file of default flag values (command line wins)")
        p.set_defaults(fn=fn)
        return p

    p = add("cond", cmd_cond, "P(Y_0 = B | Y_1^n = record)")
    p.add_argument("--record", required=True)
    _add_dist(p)
    p.add_argument("--backend", choices=("filter", "enumeration", "oracle"), default="filter")
    p.add_argument("--top-k", type=int, default=None, help="keep only the k heaviest filter states (approximate)")
    p.add_argument("--particles", type=int, default=None, help="use the particle estimator with this many particles")
    p.add_argument("--seed", type=int, default=0)

    p = add("event", cmd_event, "probability of a path event given the record")
    p.add_argument("--record", required=True)
    p.add_argument("--event", required=True, help=f"one of {', '.join(EVENT_NAMES[:-1])}")
    p.add_argument("--l", type=int, default=None, help="pivot index for LT_l")
    p.add_argument("--pivots", default=None, help="comma-separated pivot times (default: isolated W's)")
    _add_dist(p)

    p = add("delta", cmd_delta, "gap in P(Y_0 = B) between two extensions")
    p.add_argument("--prefix", required=True)
    p.add_argument("--ext1", required=True)
    p.add_argument("--ext2", required=True)
    _add_dist(p)
    p.add_argument("--backend", choices=("filter", "enumeration", "oracle"), default="filter")
    p.add_argument("--audit", action="store_true", help="run the cut-time bound audit")
    p.add_argument("--kind", choices=("definition", "right"), default="right")

    p = add("rate", cmd_rate, "tilt, rate and goodness criterion")
    p.add_argument("--p", required=True)
    p.add_argument("--eps", default="0")
    p.add_argument("--drift", type=float, default=rates.DRIFT)

    p = add("confine", cmd_confine, "interval confinement probability p(n, i, j)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--i", type=int, required=True)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--exact", action="store_true")

    p = add("build", cmd_build, "build a named probe record")
    p.add_argument("name", choices=sorted(probes.BUILDERS))
    for flag in ("m", "L", "k", "K", "n"):
        p.add_argument(f"--{flag}", type=int, default=None)

    p = add("exp", cmd_exp, "run a catalog experiment ('list' to show the catalog)")
    p.add_argument("id")
    p.add_argument("--out", default=None, help="output directory (default results/<name>)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--param", action="append", help="override an experiment parameter, name=value (JSON values)")
    p.add_argument("--figures", action="store_true", help="also write PNG figures")
    p.set_defaults(parameters=None)
    return ap


def _apply_config(ap: argparse.ArgumentParser, argv) -> argparse.Namespace:
    argv = list(sys.argv[1:] if argv is None else argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    choices = ap._subparsers._group_actions[0].choices
    command = next((a for a in argv if a in choices), None)
    if known.config and command:
        try:
            doc = json.loads(Path(known.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {known.config}: {exc}")
        if not isinstance(doc, dict):
            raise UsageError("config must be a JSON object")
        sub = choices[command]
        doc = {k.replace("-", "_"): v for k, v in doc.items()}
        unknown = sorted(set(doc) - {a.dest for a in sub._actions} - {"parameters"})
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        sub.set_defaults(**doc)
        # required flags may come from the config file
        for a in sub._actions:
            if a.dest in doc:
                a.required = False
    return ap.parse_args(argv)


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = _apply_config(ap, argv)
        return args.fn(args)
    except (UsageError, RecordSyntaxError, ValueError, KeyError, ImpossibleRecord) as exc:
        print(f"rwrs: error: {exc.args[0] if isinstance(exc, KeyError) else exc}", file=sys.stderr)
        return USAGE
    except (EnumerationInfeasible, StateExplosion) as exc:
        print(f"rwrs: error: {exc}", file=sys.stderr)
        return USAGE
