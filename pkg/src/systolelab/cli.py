"""Command-line front door.

Each subcommand writes one JSON document to standard output.  Exit status
is 0 on success, 2 when a certificate is indeterminate, 1 on any error.
Points are given as ``--point l1,l2,l3,t1,t2,t3`` (use ``--point=...`` when
the first value is negative) or as the keyword ``schmutz``.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
import time

import numpy as np

from . import __version__
from .cones import (ConeProblem, descendents_from_problem, is_balanced, is_eutactic, locus_tangent,
                    rank_and_index)
from .config import Config, load_config
from .curves import load_catalog
from .errors import DivergedAsExpected, Indeterminate, SystoleLabError
from .fenchel import FNPoint
from .hypkernel import hexagon_solve
from .lengths import WeightVector, bers_check, gradients, lengths_at, systole, twist_escape_probe, wolpert_check
from .optimize import (LocusSpec, classify_locus, classify_point, min_cell_probe, minimize_multistart,
                       minimize_weighted, refine_stationary, restricted_minimize, start_points)
from .report import any_indeterminate, build_report, dumps, to_csv
from .testbed import verify_claims

log = logging.getLogger("systolelab")

SCHMUTZ_LENGTH = 2.0 * math.acosh(2.0)
N_STARTS = 8


class UsageError(SystoleLabError, ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def schmutz_point() -> FNPoint:
    return FNPoint((SCHMUTZ_LENGTH,) * 3)


def _floats(text: str, what: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"cannot parse {what} {text!r}") from None


def parse_point(text: str) -> FNPoint:
    if text.strip().lower() == "schmutz":
        return schmutz_point()
    vals = _floats(text, "point")
    if len(vals) != 6:
        raise UsageError(f"a point has six coordinates l1,l2,l3,t1,t2,t3; got {len(vals)}")
    try:
        return FNPoint.from_array(vals)
    except ValueError as e:
        raise UsageError(str(e)) from None


class Context:
    def __init__(self, args, cfg: Config):
        self.args = args
        self.cfg = cfg
        self.system = load_catalog(cfg.catalog)

    def point(self, required=True) -> FNPoint | None:
        if self.args.point is None:
            if required:
                raise UsageError("--point is required")
            return None
        return parse_point(self.args.point)

    def curves(self, default=None) -> tuple[str, ...]:
        if self.args.curves is None:
            return tuple(default if default is not None else self.system.ids)
        ids = tuple(s.strip() for s in self.args.curves.split(",") if s.strip())
        for i in ids:
            self.system[i]
        return ids

    def weights(self, ids) -> WeightVector:
        if self.args.weights is None:
            return WeightVector.uniform(ids)
        return WeightVector(ids, tuple(_floats(self.args.weights, "weights")), normalized=True)

    def spec(self) -> LocusSpec:
        ids = self.curves()
        d = () if self.args.offsets is None else tuple(_floats(self.args.offsets, "offsets"))
        return LocusSpec(ids, d)

    def systole_ids(self, x) -> tuple[str, ...]:
        return systole(x, self.cfg.systole_rel, self.system).systoles


# -- subcommands ------------------------------------------------------------------

def cmd_lengths(ctx: Context):
    x = ctx.point()
    return {"point": x, "lengths": lengths_at(x, ctx.curves(), ctx.system)}, {}


def cmd_systole(ctx: Context):
    x = ctx.point()
    sr = systole(x, ctx.cfg.systole_rel, ctx.system)
    return {"point": x, "systole": sr, "bers_bound": ctx.cfg.bers_bound,
            "within_bers_bound": bers_check(x, ctx.cfg.bers_bound, ctx.system)}, {}


def cmd_gradients(ctx: Context):
    x = ctx.point()
    gs = gradients(ctx.curves(), x, ctx.cfg.fd_step, ctx.system)
    return {"gradients": gs, "rank": rank_and_index(gs.rows)}, {}


def cmd_eutactic(ctx: Context):
    x = ctx.point()
    ids = ctx.curves(ctx.systole_ids(x))
    gs = gradients(ids, x, ctx.cfg.fd_step, ctx.system)
    cert = is_eutactic(ConeProblem.from_gradients(gs), ctx.cfg.lp_margin)
    return {"point": x, "curves": list(ids), "eutactic": cert.label}, {"eutactic": cert}


def cmd_balanced(ctx: Context):
    x = ctx.point()
    ids = ctx.curves(ctx.systole_ids(x))
    gs = gradients(ids, x, ctx.cfg.fd_step, ctx.system)
    cert = is_balanced(ConeProblem.from_gradients(gs), locus_tangent(gs.rows), ctx.cfg.lp_margin)
    return {"point": x, "curves": list(ids), "balanced": cert.label}, {"balanced": cert}


def cmd_min(ctx: Context):
    ids = ctx.curves()
    A = ctx.weights(ids)
    kw = dict(system=ctx.system, box=ctx.cfg.box, tol=ctx.cfg.grad_tol, h=ctx.cfg.fd_step)
    x0 = ctx.point(required=False)
    try:
        if x0 is not None:
            res = minimize_weighted(A, ids, x0, **kw)
            runs = [res]
        else:
            res, runs = minimize_multistart(A, ids, start_points(N_STARTS, ctx.cfg.rng("min-starts"), ctx.cfg.box), **kw)
    except DivergedAsExpected as e:
        out = {"curves": list(ids), "diverged": True, "message": str(e), "last_point": e.point,
               "iterations": e.iterations, "twist_escape": twist_escape_probe(ids, e.point, system=ctx.system)}
        return out, {}
    return {"curves": list(ids), "weights": list(A.weights), "diverged": False, "minimum": res,
            "runs": len(runs)}, {}


def cmd_restricted_min(ctx: Context):
    spec = ctx.spec()
    x0 = ctx.point(required=False) or FNPoint((2.5, 2.5, 2.5))
    res = restricted_minimize(spec, x0, system=ctx.system, box=ctx.cfg.box, tol=ctx.cfg.grad_tol,
                              h=ctx.cfg.fd_step)
    return {"C": list(spec.C), "d": list(spec.d), "minimum": res}, {}


def cmd_classify(ctx: Context):
    x = ctx.point()
    rep = classify_point(x, system=ctx.system, tol_rel=ctx.cfg.systole_rel, h=ctx.cfg.fd_step,
                         margin=ctx.cfg.lp_margin)
    return rep, rep.certificates


def cmd_locus_class(ctx: Context):
    spec = ctx.spec()
    rep = classify_locus(spec, ctx.point(required=False), system=ctx.system, h=ctx.cfg.fd_step,
                         margin=ctx.cfg.lp_margin, box=ctx.cfg.box, tol=ctx.cfg.grad_tol)
    return rep, rep.certificates


def _descendent_certs(rep):
    return {",".join(c.ids): c for c in rep.certificates}


def cmd_descendents(ctx: Context):
    x = ctx.point()
    ids = ctx.curves(ctx.systole_ids(x))
    gs = gradients(ids, x, ctx.cfg.fd_step, ctx.system)
    rep = descendents_from_problem(ConeProblem.from_gradients(gs), ctx.cfg.lp_margin)
    return {"point": x, "curves": list(ids), "descendents": rep}, _descendent_certs(rep)


def run_schmutz(cfg: Config, system) -> tuple[dict, dict]:
    """Locate the six-systole critical point and read off its structure."""
    t0 = time.perf_counter()
    ids = system.ids
    A = WeightVector.uniform(ids)
    starts = start_points(N_STARTS, cfg.rng("schmutz-starts"), cfg.box)
    best, runs = minimize_multistart(A, ids, starts, system=system, box=cfg.box, tol=cfg.grad_tol, h=cfg.fd_step)
    refined = refine_stationary(A, ids, best.point, system=system, h=cfg.fd_step, box=cfg.box)
    x = refined.point
    crit = classify_point(x, system=system, tol_rel=cfg.systole_rel, h=cfg.fd_step, margin=cfg.lp_margin)
    ls = lengths_at(x, ids, system)
    out = {"point": x, "minimum": best, "refined": refined, "starts": len(runs),
           "lengths": ls, "length_spread": max(ls.values()) - min(ls.values()),
           "expected_length": SCHMUTZ_LENGTH, "classification": crit}
    certs = {"classification": crit.certificates}
    if crit.kind == "critical":
        gs = gradients(crit.systoles, x, cfg.fd_step, system)
        desc = descendents_from_problem(ConeProblem.from_gradients(gs), cfg.lp_margin)
        out["descendents"] = desc
        certs["descendents"] = _descendent_certs(desc)
    twist_terms = {}
    for c in system.curves:
        if c.is_cuff:
            continue
        for i, cuff in system.cuffs().items():
            if system.intersection(c.id, cuff.id) == 1:
                twist_terms[f"{c.id}/cuff{i}"] = wolpert_check(c, i, x, system, cfg.fd_step).fd
    out["twist_derivatives"] = twist_terms
    out["min_cell"] = min_cell_probe(ids, x, system=system, h=cfg.fd_step)
    out["seconds"] = round(time.perf_counter() - t0, 1)
    return out, certs


def cmd_schmutz(ctx: Context):
    return run_schmutz(ctx.cfg, ctx.system)


def cmd_testbed(ctx: Context):
    n = ctx.args.samples or 200
    rep = verify_claims(n, ctx.cfg.seed)
    return rep, {}


def cmd_hexagon(ctx: Context):
    if ctx.args.alternate is None:
        raise UsageError("--alternate a b c is required")
    hx = hexagon_solve(*ctx.args.alternate)
    return {"alternate": list(hx.alternate), "opposite": list(hx.opposite),
            "cyclic_sides": list(hx.cyclic_sides()), "residuals": list(hx.residuals())}, {}


COMMANDS = {
    "lengths": (cmd_lengths, "lengths of catalog curves at a point"),
    "systole": (cmd_systole, "catalog systole value and systole set"),
    "gradients": (cmd_gradients, "finite-difference length gradients"),
    "eutactic": (cmd_eutactic, "eutactic test for the systole gradients"),
    "balanced": (cmd_balanced, "balanced test on the equal-length locus"),
    "min": (cmd_min, "minimize a weighted length sum"),
    "restricted-min": (cmd_restricted_min, "minimize on an offset-equal-length locus"),
    "classify": (cmd_classify, "regular, boundary or critical point"),
    "locus-class": (cmd_locus_class, "inner, borderline or outer locus"),
    "descendents": (cmd_descendents, "descendents of a critical point"),
    "schmutz": (cmd_schmutz, "locate and analyse the six-systole critical point"),
    "testbed": (cmd_testbed, "closed-form R^4 cone checks"),
    "hexagon": (cmd_hexagon, "solve a right-angled hexagon"),
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="flat key = value configuration file")
    common.add_argument("--seed", type=int)
    common.add_argument("--tol-systole", type=float, dest="tol_systole")
    common.add_argument("--point")
    common.add_argument("--curves")
    common.add_argument("--weights")
    common.add_argument("--offsets")
    common.add_argument("--samples", type=int)
    common.add_argument("--alternate", type=float, nargs=3, metavar=("A", "B", "C"))
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("-v", "--verbose", action="store_true")
    p = _Parser(prog="systolelab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    for name, (_, help_) in COMMANDS.items():
        sub.add_parser(name, help=help_, parents=[common])
    return p


def _emit(report: dict, fmt: str, stream):
    stream.write(to_csv(report) if fmt == "csv" else dumps(report))


def cli(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    command, digest, fmt = None, None, "json"
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise UsageError(f"choose a subcommand: {', '.join(COMMANDS)}")
        command, fmt = args.command, args.format
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr,
                            format="%(levelname)s %(name)s: %(message)s")
        cfg = load_config(args.config).with_overrides(seed=args.seed, systole_rel=args.tol_systole)
        digest = cfg.digest()
        if args.samples is not None and args.samples < 1:
            raise UsageError("--samples must be at least 1")
        results, certs = COMMANDS[command][0](Context(args, cfg))
        report = build_report(command, digest, results, certs)
        _emit(report, fmt, stdout)
        return 2 if any_indeterminate(report["certificates"]) else 0
    except Indeterminate as e:
        print(f"indeterminate: {e}", file=sys.stderr)
        certs = {"indeterminate": e.certificate} if e.certificate is not None else {}
        report = build_report(command or "", digest or "", {"indeterminate": str(e), "partial": e.report}, certs)
        _emit(report, fmt, stdout)
        return 2
    except (SystoleLabError, ValueError, KeyError, OSError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else str(e)
        print(f"error: {msg}", file=sys.stderr)
        report = build_report(command or "", digest or "", {"error": str(msg), "type": type(e).__name__})
        _emit(report, fmt, stdout)
        return 1


def main() -> None:
    sys.exit(cli())
