"""Command-line front end.

Subcommands: eval, grid, iterate, da-probe, demo-gamma, semantics.
Exit status: 0 on success (including a probe that finds nothing, which is a
valid outcome), 2 when an eval result is undefined (reason on stderr),
1 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from . import dalg, iterate, stdlib
from .config import (
    DEFAULT_CONFIG,
    MnCombine,
    MnDomain,
    SemanticsConfig,
    SolverTolerances,
)
from .evaluate import EvalContext
from .outcome import EvalOutcome
from .surface import ParseError, parse, print_term
from .term import ArityMismatch, PrVariant, TermError


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(1)


_TOL_FLAGS = {
    "tol_rel": "rel_tol",
    "tol_abs": "abs_tol",
    "tol_hmin": "h_min",
    "tol_blowup": "blow_up",
    "tol_horizon": "horizon",
    "tol_rooteps": "root_eps",
    "tol_grid": "grid_delta",
    "tol_singprobe": "sing_probe",
}

_CONFIG_KEYS = {
    "pr_default": lambda s: PrVariant(s),
    "mn_combine": lambda s: MnCombine(s),
    "mn_domain": lambda s: MnDomain(s),
    "mn_isolated_exceptions": lambda s: s.lower() in ("1", "true", "yes", "on"),
    "use_fast_paths": lambda s: s.lower() in ("1", "true", "yes", "on"),
    "memoize": lambda s: s.lower() in ("1", "true", "yes", "on"),
    "rel_tol": float,
    "abs_tol": float,
    "h_min": float,
    "blow_up": float,
    "horizon": float,
    "root_eps": float,
    "grid_delta": float,
    "sing_probe": float,
}


def load_config_file(path: str) -> dict:
    """key = value lines; # starts a comment; unknown keys are errors."""
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, _, val = line.partition("=")
            key = key.strip()
            val = val.strip()
            if key not in _CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = _CONFIG_KEYS[key](val)
    return values


def build_config(args) -> SemanticsConfig:
    values: dict = {}
    if getattr(args, "config", None):
        values.update(load_config_file(args.config))
    if getattr(args, "pr", None):
        values["pr_default"] = PrVariant(
            {"strict": "strict", "campagnolo": "campagnolo"}[args.pr]
        )
    if getattr(args, "mn_combine", None):
        values["mn_combine"] = MnCombine(args.mn_combine)
    if getattr(args, "mn_domain", None):
        values["mn_domain"] = MnDomain(args.mn_domain)
    if getattr(args, "mn_isolated", False):
        values["mn_isolated_exceptions"] = True
    if getattr(args, "no_fast_paths", False):
        values["use_fast_paths"] = False
    if getattr(args, "no_memo", False):
        values["memoize"] = False
    for flag, tol_field in _TOL_FLAGS.items():
        v = getattr(args, flag, None)
        if v is not None:
            values[tol_field] = v
    tol_kw = {k: values.pop(k) for k in list(values) if k in SolverTolerances.__dataclass_fields__}
    tol = replace(SolverTolerances(), **tol_kw) if tol_kw else SolverTolerances()
    return replace(SemanticsConfig(), tol=tol, **values)


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="key = value config file")
    p.add_argument("--pr", choices=["strict", "campagnolo"], help="recursion flavour for unmarked nodes")
    p.add_argument("--mn-combine", choices=["both", "either"], dest="mn_combine")
    p.add_argument("--mn-domain", choices=["all", "sym", "fwd", "zero"], dest="mn_domain")
    p.add_argument("--mn-isolated", action="store_true", dest="mn_isolated")
    p.add_argument("--no-fast-paths", action="store_true", dest="no_fast_paths")
    p.add_argument("--no-memo", action="store_true", dest="no_memo")
    for flag in _TOL_FLAGS:
        p.add_argument("--" + flag.replace("_", "-"), type=float, dest=flag)
    p.add_argument("--format", choices=["text", "csv", "json"], default="text")


def _floats(s: str) -> tuple:
    s = s.strip()
    if not s:
        return ()
    return tuple(float(x) for x in s.split(","))


def _print_outcome(o: EvalOutcome, fmt: str) -> int:
    if fmt == "json":
        print(o.to_json())
        return 0 if o.defined else 2
    if o.defined:
        print(" ".join(f"{v:.10f}" for v in o.values))
        if o.witness:
            print(f"note: {o.witness}", file=sys.stderr)
        return 0
    print(f"Undefined: {o.reason.value}" + (f" ({o.witness})" if o.witness else ""), file=sys.stderr)
    return 2


def cmd_eval(args) -> int:
    cfg = build_config(args)
    term = parse(args.expr)
    point = _floats(args.at) if args.at is not None else ()
    o = EvalContext(cfg).eval(term, point)
    return _print_outcome(o, args.format)


def _grid_rows(result):
    for x, o in result:
        if o.defined:
            yield x, True, ";".join(repr(v) for v in o.values)
        else:
            yield x, False, o.reason.value


def emit_plot_data(result, path: str):
    """Two-column plot-ready data; undefined points leave a blank-line gap
    so plotting tools draw holes in the graph."""
    with open(path, "w") as fh:
        for x, o in result:
            if o.defined:
                fh.write(f"{x!r} " + " ".join(repr(v) for v in o.values) + "\n")
            else:
                fh.write("\n")


def cmd_grid(args) -> int:
    cfg = build_config(args)
    term = parse(args.expr)
    fixed = _floats(args.fixed) if args.fixed else ()
    ctx = EvalContext(cfg)
    result = ctx.eval_grid(term, args.axis, args.lo, args.hi, args.n, fixed)
    if args.plot:
        emit_plot_data(result, args.plot)
    if args.format == "json":
        print(json.dumps([{"coord": x, **o.to_dict()} for x, o in result]))
    else:
        print("coord,defined,value")
        for x, ok, val in _grid_rows(result):
            print(f"{x!r},{str(ok).lower()},{val}")
    return 0


def cmd_iterate(args) -> int:
    cfg = build_config(args)
    f = parse(args.f)
    if f.inputs != f.outputs or f.inputs < 1:
        raise SystemExit(f"iterated map must be m->m, got {f.arity}")
    v = _floats(args.v)
    ctx = EvalContext(cfg)
    compiled = iterate.build_iteration(f)

    def f_native(x):
        o = ctx.eval(f, x)
        return o.values if o.defined else None

    rows = []
    for k in range(1, args.k + 1):
        o = ctx.eval(compiled, v + (k - 0.5,))
        want = iterate.iteration_oracle(f_native, v, k)
        rows.append(
            {
                "k": k,
                "compiled": list(o.values) if o.defined else o.reason.value,
                "oracle": list(want) if want is not None else "Undefined",
            }
        )
    if args.format == "json":
        print(json.dumps(rows))
    else:
        print("k,compiled,oracle")
        for r in rows:
            print(f"{r['k']},{r['compiled']},{r['oracle']}")
    return 0


def cmd_da_probe(args) -> int:
    cfg = build_config(args)
    term = parse(args.expr)
    fixed = _floats(args.fixed) if args.fixed else ()
    axis = args.axis if args.axis is not None else args.direction
    points = []
    for i in range(args.n):
        x = args.lo + (args.hi - args.lo) * i / (args.n - 1)
        p = list(fixed)
        p.insert(axis, x)
        points.append(tuple(p))
    out = dalg.find_annihilator(
        term, points, args.direction, args.order, args.degree, args.eps, cfg
    )
    report = {
        "found": out.found,
        "sigma_min": out.sigma_min,
        "n_points": out.n_points,
        "n_monomials": out.n_monomials,
    }
    if out.found:
        report["residual"] = out.candidate.residual
        report["coefficients"] = [
            {"exponents": list(e), "coeff": c}
            for e, c in zip(out.candidate.monomials, out.candidate.coeffs)
            if abs(c) > 1e-12
        ]
    print(json.dumps(report))
    return 0


def cmd_demo_gamma(args) -> int:
    cfg = build_config(args)
    xs = [
        args.x_lo + (args.x_hi - args.x_lo) * i / (args.x_n - 1)
        for i in range(args.x_n)
    ]
    rep = dalg.gamma_check_probe(
        _floats(args.R), xs, args.order, args.degree, args.eps, cfg
    )
    print(rep.to_json())
    return 0


_SEMANTICS_TEXT = """\
Choices resolved by the config (flag / config key -> effect):

  --pr, pr_default: strict | campagnolo
      strict:      the recursion integrand must be defined at every time in
                   the solution's domain; domains are open at singular ends.
      campagnolo:  countably many isolated integrand singularities are
                   tolerated; the solver extrapolates the one-sided limit and
                   accepts a crossing only when restarted runs converge.

  --mn-combine, mn_combine: both | either
      both:    the zero search is defined only when both half-lines yield a
               root (otherwise BothSidesTie).
      either:  one root suffices; the closest-to-zero rule applies only when
               both exist (ties go to the nonpositive side).

  --mn-domain, mn_domain: all | sym | fwd | zero
      all:   the body must be defined at every scanned time (checked on the
             bounded horizon only; results carry an 'approximate' note).
      sym:   a root at t requires the body defined on [-t, t].
      fwd:   a root at t requires the body defined on [0, t] (resp. [t, 0]);
             the search stops at the first undefined sample.
      zero:  no definedness requirement besides the root itself; undefined
             samples are skipped.

  --mn-isolated, mn_isolated_exceptions (not with zero):
      tolerate isolated undefined samples whose holes shrink under one
      refinement pass.

Tolerances (flag / config key, default):
  --tol-rel        rel_tol     1e-10   ODE relative tolerance
  --tol-abs        abs_tol     1e-12   ODE absolute tolerance
  --tol-hmin       h_min       1e-14   minimum step and boundary precision
  --tol-blowup     blow_up     1e12    state magnitude counted as divergence
  --tol-horizon    horizon     1e4     zero-search reach
  --tol-rooteps    root_eps    1e-10   |body| threshold at an accepted root
  --tol-grid       grid_delta  1e-2    zero-search scan spacing
  --tol-singprobe  sing_probe  1e-8    singularity crossing clearance

Evaluation modes:
  --no-fast-paths  evaluate named terms through their defining
                   constructions instead of registered closed forms
  --no-memo        disable trajectory/zero-search caching
"""


def cmd_semantics(args) -> int:
    print(_SEMANTICS_TEXT, end="")
    return 0


def make_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rr", description="evaluate and analyze recursion-language terms")
    sub = p.add_subparsers(dest="command", required=True)

    pe = sub.add_parser("eval", help="evaluate a term at a point")
    pe.add_argument("expr")
    pe.add_argument("--at", help="comma-separated coordinates (omit for nullary)")
    _add_common(pe)
    pe.set_defaults(fn=cmd_eval)

    pg = sub.add_parser("grid", help="evaluate along one coordinate")
    pg.add_argument("expr")
    pg.add_argument("--axis", type=int, default=0)
    pg.add_argument("--lo", type=float, required=True)
    pg.add_argument("--hi", type=float, required=True)
    pg.add_argument("--n", type=int, required=True)
    pg.add_argument("--fixed", help="comma-separated values of the other coordinates")
    pg.add_argument("--plot", help="write plot-ready data (blank-line gaps) to this file")
    _add_common(pg)
    pg.set_defaults(fn=cmd_grid)

    pi = sub.add_parser("iterate", help="compiled iteration vs direct oracle")
    pi.add_argument("--f", required=True, help="the iterated map (m->m term)")
    pi.add_argument("--v", required=True, help="start point, comma-separated")
    pi.add_argument("--k", type=int, required=True, help="maximum iteration count")
    _add_common(pi)
    pi.set_defaults(fn=cmd_iterate)

    pd = sub.add_parser("da-probe", help="search for an annihilating polynomial")
    pd.add_argument("expr")
    pd.add_argument("--direction", type=int, default=0)
    pd.add_argument("--order", type=int, required=True)
    pd.add_argument("--degree", type=int, required=True)
    pd.add_argument("--eps", type=float, default=1e-8)
    pd.add_argument("--axis", type=int, help="sampled coordinate (default: direction)")
    pd.add_argument("--lo", type=float, required=True)
    pd.add_argument("--hi", type=float, required=True)
    pd.add_argument("--n", type=int, required=True)
    pd.add_argument("--fixed")
    _add_common(pd)
    pd.set_defaults(fn=cmd_da_probe)

    pg2 = sub.add_parser("demo-gamma", help="multi-slice probe of the truncated gamma term")
    pg2.add_argument("--R", required=True, help="comma-separated slice values")
    pg2.add_argument("--x-lo", type=float, default=0.5, dest="x_lo")
    pg2.add_argument("--x-hi", type=float, default=3.0, dest="x_hi")
    pg2.add_argument("--x-n", type=int, default=10, dest="x_n")
    pg2.add_argument("--order", "--N", type=int, default=2)
    pg2.add_argument("--degree", "--d", type=int, default=2)
    pg2.add_argument("--eps", type=float, default=1e-8)
    _add_common(pg2)
    pg2.set_defaults(fn=cmd_demo_gamma)

    ps = sub.add_parser("semantics", help="describe the semantic variants and tolerances")
    ps.set_defaults(fn=cmd_semantics)

    return p


def run(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 1
    try:
        return args.fn(args)
    except (ParseError, TermError, ArityMismatch, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except dalg.InsufficientPoints as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
