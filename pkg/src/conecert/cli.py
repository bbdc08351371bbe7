"""Command-line interface.

Subcommands: report, theta, support, equations, separate, demo. Exit codes:
0 on a completed analysis, 2 on parse/validation errors, 3 on solver
breakdown.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import fixtures
from .analysis import (
    AnalysisOptions,
    EmptyCutSetError,
    ModelError,
    SupportHandle,
    dmu_vertices_2d,
    enumerate_valid_equations,
    full_report,
    sigma_over_rhs,
    theta,
)
from .model import (
    Inequality,
    Problem,
    ProblemFormatError,
    Status,
    assumption2_check,
    feasible_rhs,
    load_problem,
    _plain,
)
from .separation import branches_from_set, generate_cut
from .solver import SolverOptions

EXIT_OK = 0
EXIT_FORMAT = 2
EXIT_SOLVER = 3


@dataclass
class CliConfig:
    tol: float = 1e-6
    seed: int = 0
    samples: int = 256
    json_output: bool = False
    max_iters: int = 200
    feas_tol: float = 1e-8
    gap_tol: float = 1e-8

    def analysis(self) -> AnalysisOptions:
        return AnalysisOptions(
            tol=self.tol,
            samples=self.samples,
            seed=self.seed,
            solver=SolverOptions(
                feas_tol=self.feas_tol,
                gap_tol=self.gap_tol,
                max_iters=self.max_iters,
            ),
        )


def _config_from(args) -> CliConfig:
    seed = args.seed
    if seed is None:
        seed = int(os.environ.get("CCLAB_SEED", "0"))
    cfg = CliConfig(
        tol=args.tol,
        seed=seed,
        samples=args.samples,
        json_output=args.json,
        max_iters=args.max_iters,
        feas_tol=args.feas_tol,
        gap_tol=args.gap_tol,
    )
    if cfg.tol <= 0:
        raise ProblemFormatError("--tol must be positive")
    if cfg.samples < 1:
        raise ProblemFormatError("--samples must be at least 1")
    return cfg


def _load(path: str) -> Problem:
    try:
        text = open(path, "r", encoding="utf-8").read()
    except OSError as exc:
        raise ProblemFormatError(f"cannot read {path}: {exc}") from exc
    return load_problem(text)


def _select_inequalities(problem: Problem, selector: str | None):
    if selector is None:
        if not problem.inequalities:
            raise ProblemFormatError("problem file carries no inequalities")
        return list(problem.inequalities)
    for q in problem.inequalities:
        if q.name == selector:
            return [q]
    raise ProblemFormatError(f"no inequality named {selector!r} in the problem file")


def _emit(doc, cfg: CliConfig):
    if cfg.json_output:
        print(json.dumps(_plain(doc), indent=2))
    else:
        _emit_text(doc)


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.9g}"
    if isinstance(v, np.ndarray):
        return "[" + ", ".join(_fmt(float(x)) for x in v.ravel()) + "]"
    return str(v)


def _emit_text(doc, indent: int = 0):
    pad = "  " * indent
    if isinstance(doc, dict):
        for k, v in doc.items():
            if isinstance(v, (dict, list)) and v:
                print(f"{pad}{k}:")
                _emit_text(v, indent + 1)
            else:
                print(f"{pad}{k}: {_fmt(v) if not isinstance(v, (dict, list)) else v}")
    elif isinstance(doc, list):
        for v in doc:
            if isinstance(v, (dict, list)):
                _emit_text(v, indent)
            else:
                print(f"{pad}- {_fmt(v)}")
    else:
        print(f"{pad}{_fmt(doc)}")


# ---------------------------------------------------------------------------
# subcommands


def cmd_report(args) -> int:
    cfg = _config_from(args)
    problem = _load(args.problem)
    opts = cfg.analysis()
    out = []
    for q in _select_inequalities(problem, args.inequality):
        rep = full_report(problem.dset, q, opts)
        out.append({"inequality": q.name, **rep.to_dict()})
        if not cfg.json_output:
            print(f"== {q.name or '(unnamed)'} ==")
            for e in rep.entries:
                vals = ", ".join(
                    f"{k}={_fmt(v)}" for k, v in e.values.items()
                    if not isinstance(v, (dict, list))
                )
                print(f"  {e.name:28s} {e.status.value:14s} {vals}")
            print(f"  final verdict: {rep.final_verdict}")
    if cfg.json_output:
        _emit(out, cfg)
    return EXIT_OK


def cmd_theta(args) -> int:
    cfg = _config_from(args)
    problem = _load(args.problem)
    opts = cfg.analysis()
    out = []
    for q in _select_inequalities(problem, args.inequality):
        th = theta(problem.dset, q.mu, opts)
        out.append(
            {
                "inequality": q.name,
                "theta": th.value,
                "argmin": th.argmin,
                "branches": {
                    r.label: (r.value if r.value is not None else r.status)
                    for r in th.table
                },
            }
        )
    _emit(out, cfg)
    return EXIT_OK


def cmd_support(args) -> int:
    cfg = _config_from(args)
    problem = _load(args.problem)
    opts = cfg.analysis()
    out = []
    for q in _select_inequalities(problem, args.inequality):
        handle = SupportHandle(problem.dset, q.mu, opts)
        if args.z is not None:
            z = _parse_vector(args.z, problem.dset.m, "--z")
            out.append({"inequality": q.name, "z": z, "sigma": handle.eval(z)})
        else:
            sig = sigma_over_rhs(problem.dset, handle)
            out.append(
                {
                    "inequality": q.name,
                    "inf_sigma": sig.value,
                    "argmin": sig.argmin,
                    "monotone_ok": sig.monotone_ok,
                    "table": {label: v for label, _, v in sig.table},
                }
            )
    _emit(out, cfg)
    return EXIT_OK


def cmd_equations(args) -> int:
    cfg = _config_from(args)
    problem = _load(args.problem)
    eqs = enumerate_valid_equations(problem.dset, cfg.analysis())
    _emit(
        [{"name": q.name, "mu": q.mu, "eta0": q.eta0} for q in eqs],
        cfg,
    )
    return EXIT_OK


def cmd_separate(args) -> int:
    cfg = _config_from(args)
    problem = _load(args.problem)
    xhat = _parse_vector(args.point, problem.dset.n, "--point")
    res = generate_cut(
        branches_from_set(problem.dset),
        xhat,
        normalization=args.normalization,
        tol=cfg.tol,
        solver=cfg.analysis().solver,
    )
    doc = {"found": res.found, "diagnostic": res.diagnostic}
    if res.found:
        doc.update(
            {
                "mu": res.inequality.mu,
                "eta0": res.inequality.eta0,
                "violation": res.violation,
                "verified": res.verified,
            }
        )
    _emit(doc, cfg)
    return EXIT_OK


def cmd_demo(args) -> int:
    cfg = _config_from(args)
    opts = cfg.analysis()
    params = {}
    if args.name == "cmir":
        params = {"f": args.f, "M": args.M}
    elif args.name == "ex4_3":
        params = {"M": args.M}
    fx = fixtures.builtin(args.name, **params)
    checks = []

    def check(label, ok, detail=""):
        checks.append({"check": label, "pass": bool(ok), "detail": detail})

    a2_status, _, a2_margin = assumption2_check(fx.dset, opts.solver)
    expected_a2 = fx.notes.get("assumption2")
    if expected_a2 is not None:
        check(f"assumption2 {expected_a2}", a2_status.value == expected_a2,
              f"margin={_fmt(a2_margin)}")
    if "infeasible_rhs" in fx.notes:
        recs = feasible_rhs(fx.dset, opts.solver)
        bad = [float(r.b[0]) for r in recs if r.status is Status.FAILS]
        check("infeasible rhs detected", bad == fx.notes["infeasible_rhs"],
              f"found {bad}")
    for fi in fx.inequalities:
        rep = full_report(fx.dset, fi.inequality, opts)
        if fi.expected_verdict is not None:
            check(
                f"{fi.inequality.name} verdict {fi.expected_verdict}",
                rep.final_verdict == fi.expected_verdict,
                f"got {rep.final_verdict}",
            )
        if "theta" in fi.scalars:
            th = theta(fx.dset, fi.inequality.mu, opts)
            check(
                f"{fi.inequality.name} theta",
                abs(th.value - fi.scalars["theta"]) <= cfg.tol,
                f"got {_fmt(th.value)}",
            )
        if "inf_sigma" in fi.scalars:
            sig = sigma_over_rhs(fx.dset, SupportHandle(fx.dset, fi.inequality.mu, opts))
            check(
                f"{fi.inequality.name} inf_sigma",
                abs(sig.value - fi.scalars["inf_sigma"]) <= cfg.tol,
                f"got {_fmt(sig.value)}",
            )
    if fx.notes.get("dmu_vertices"):
        verts = dmu_vertices_2d(fx.dset, fx.inequalities[0].inequality.mu, 16, opts)
        want = sorted(tuple(v) for v in fx.notes["dmu_vertices"])
        got = sorted(tuple(np.round(v, 6)) for v in verts)
        ok = len(want) == len(got) and all(
            max(abs(a - b) for a, b in zip(w, g)) <= 1e-6 for w, g in zip(want, got)
        )
        check("dmu vertices", ok, f"got {got}")

    all_pass = all(c["pass"] for c in checks)
    if cfg.json_output:
        _emit({"fixture": fx.name, "checks": checks, "all_pass": all_pass}, cfg)
    else:
        for c in checks:
            line = "PASS" if c["pass"] else "FAIL"
            detail = f"  ({c['detail']})" if c["detail"] else ""
            print(f"{line}  {c['check']}{detail}")
    return EXIT_OK if all_pass else EXIT_SOLVER


def _parse_vector(text: str, n: int, flag: str) -> np.ndarray:
    try:
        v = np.array([float(t) for t in text.replace(",", " ").split()])
    except ValueError as exc:
        raise ProblemFormatError(f"{flag}: {exc}") from exc
    if v.size != n:
        raise ProblemFormatError(f"{flag}: expected {n} numbers, got {v.size}")
    return v


# ---------------------------------------------------------------------------
# parser


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=None,
                   help="RNG seed (falls back to CCLAB_SEED, then 0)")
    p.add_argument("--samples", type=int, default=256)
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--max-iters", type=int, default=200)
    p.add_argument("--feas-tol", type=float, default=1e-8)
    p.add_argument("--gap-tol", type=float, default=1e-8)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="conecert",
        description="Certify validity, tightness, sublinearity and minimality "
        "of linear inequalities over disjunctive conic sets.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("report", help="run the full certificate ladder")
    p.add_argument("problem")
    p.add_argument("--inequality", default=None, help="restrict to one named inequality")
    _add_common(p)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("theta", help="best right-hand side per inequality")
    p.add_argument("problem")
    p.add_argument("--inequality", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_theta)

    p = sub.add_parser("support", help="support-function values over the rhs family")
    p.add_argument("problem")
    p.add_argument("--inequality", default=None)
    p.add_argument("--z", default=None, help="evaluate at this direction instead")
    _add_common(p)
    p.set_defaults(func=cmd_support)

    p = sub.add_parser("equations", help="enumerate valid equations")
    p.add_argument("problem")
    _add_common(p)
    p.set_defaults(func=cmd_equations)

    p = sub.add_parser("separate", help="generate a violated inequality for a point")
    p.add_argument("problem")
    p.add_argument("--point", required=True, help="comma-separated coordinates")
    p.add_argument("--normalization", choices=("trivial_box", "alpha_norm"),
                   default="trivial_box")
    _add_common(p)
    p.set_defaults(func=cmd_separate)

    p = sub.add_parser("demo", help="run a built-in example against its known facts")
    p.add_argument("name", choices=fixtures.names())
    p.add_argument("--f", type=float, default=0.25)
    p.add_argument("--M", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_demo)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "command", None) == "demo" and args.M is None:
        args.M = 10 if args.name == "cmir" else 5
    try:
        return args.func(args)
    except ProblemFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except (ValueError, ModelError, EmptyCutSetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except (np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"solver breakdown: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
