"""Command-line entry point.

Every table is written as CSV with a leading ``#`` comment line that records
the parameters used.  Output is a pure function of the arguments, so reruns
are byte-identical.

Exit codes: 0 success, 2 validation error, 3 I/O or parse error,
4 non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from pathlib import Path

from . import __version__
from .analysis import (
    DEFAULT_POINTS,
    LOW_TRUTH,
    SHIFT_THRESHOLD,
    SensitivityRange,
    level_curves,
    low_truth_argmax,
    partisan_report,
    population_curves,
    sensitivity_grid,
)
from .data import load_observations
from .errors import DataError, FitError, ValidationError
from .fitting import fit_extreme_user_model, fit_parameters, validate_assumptions
from .model import (
    BASE_PARAMS,
    DISTRIBUTION_NAMES,
    Article,
    BeliefDistribution,
    ModelParams,
    builtin_distribution,
    distribution_moments,
    population_sharing_probability,
    sharing_probability,
)
from .optimizer import (
    DEFAULT_GRID_STEP,
    DEFAULT_REFINE_TOL,
    SWEEP_COLUMNS,
    optimize_population,
    optimize_population_fixed_truth,
    optimize_single_reader_closed_form,
    sweep_moment_space,
)

EXIT_OK, EXIT_VALIDATION, EXIT_IO, EXIT_NONCONVERGED = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


# -- output helpers ----------------------------------------------------------


def _fmt(v):
    if isinstance(v, float):
        return repr(v + 0.0)
    return str(v)


def _meta_line(command, meta):
    items = " ".join(f"{k}={_fmt(v)}" for k, v in sorted(meta.items()))
    return f"# newsshare {command} {items}".rstrip() + "\n"


def render_table(command, meta, columns, rows) -> str:
    buf = io.StringIO()
    buf.write(_meta_line(command, meta))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _emit(text, out):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _params(args) -> ModelParams:
    return ModelParams(args.fl, args.kl, args.fr, args.kr)


def _param_meta(params):
    return params.as_dict()


# -- commands ----------------------------------------------------------------


def cmd_eval(args):
    params = _params(args)
    article = Article(args.b, args.t)
    if (args.belief is None) == (args.dist is None):
        raise ValidationError("give exactly one of --belief or --dist")
    if args.dist is not None:
        p = population_sharing_probability(article, builtin_distribution(args.dist), params)
    else:
        p = sharing_probability(article, args.belief, params)
    _emit(f"{p:.6g}\n", args.out)
    return EXIT_OK


def cmd_optimize(args):
    params = _params(args)
    if (args.belief is None) == (args.dist is None):
        raise ValidationError("give exactly one of --belief or --dist")
    dist = builtin_distribution(args.dist) if args.dist else BeliefDistribution.point_mass(args.belief)
    out = {"params": _param_meta(params), "side": args.side}
    if args.t is not None:
        b, p = optimize_population_fixed_truth(dist, args.t, params, args.grid_step, args.refine_tol, args.side)
        out.update(truth=args.t, bias_star=b, probability_star=p)
    else:
        res = optimize_population(dist, params, args.grid_step, args.refine_tol, args.side)
        out.update(
            bias_star=res.bias_star,
            truth_star=res.truth_star,
            probability_star=res.probability_star,
            active_boundary=res.active_boundary,
        )
        if args.belief is not None:
            cf = optimize_single_reader_closed_form(args.belief, params)
            out["closed_form"] = {"bias_star": cf.bias_star, "truth_star": cf.truth_star, "probability_star": cf.probability_star}
    if args.dist:
        mean, var = distribution_moments(dist)
        out.update(distribution=args.dist, expectation=mean, variance=var)
    else:
        out["belief"] = args.belief
    _emit(_json(out), args.out)
    return EXIT_OK


def cmd_fit(args):
    obs = load_observations(args.data, args.justifications)
    fit = fit_extreme_user_model if args.extreme else fit_parameters
    report = fit(obs, args.side, weighted=args.weighted)
    _emit(_json(report.as_dict()), args.out)
    return EXIT_OK if report.converged else EXIT_NONCONVERGED


def cmd_validate(args):
    obs = load_observations(args.data, args.justifications)
    res = validate_assumptions(obs)
    out = {k: {"coefficient": c, "p_value": p} for k, (c, p) in res.items()}
    _emit(_json(out), args.out)
    return EXIT_OK


def cmd_sweep_levels(args):
    params = _params(args)
    value = {"b": args.b, "t": args.t, "B": args.belief}[args.fixed]
    if value is None:
        flag = {"b": "--b", "t": "--t", "B": "--belief"}[args.fixed]
        raise ValidationError(f"--fixed {args.fixed} needs a value via {flag}")
    levels = None if args.levels is None else [float(x) for x in args.levels.split(",")]
    cols, rows = level_curves(params, args.fixed, value, args.x, levels, args.points)
    meta = dict(_param_meta(params), fixed=args.fixed, value=float(value), x=cols[1], points=args.points)
    _emit(render_table("sweep-levels", meta, cols, rows), args.out)
    return EXIT_OK


def _population_tables(dist_name, side, params, points):
    dist = builtin_distribution(dist_name)
    meta = dict(_param_meta(params), dist=dist_name, side=side, points=points)
    tables = {}
    for by, suffix in (("t", "bias"), ("b", "truth")):
        cols, rows = population_curves(dist, side, params, points, by=by)
        tables[suffix] = render_table("population-curves", dict(meta, x="b" if by == "t" else "t"), cols, rows)
    return tables


def cmd_population_curves(args):
    params = _params(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = {"params": _param_meta(params), "side": args.side, "points": args.points, "tables": {}, "low_truth": {}}
    for name in _dist_list(args.dist):
        tables = _population_tables(name, args.side, params, args.points)
        for suffix, text in tables.items():
            fname = f"{name}_{args.side}_{suffix}.csv"
            (out / fname).write_text(text, encoding="utf-8")
            manifest["tables"][fname] = {"dist": name, "x_axis": "b" if suffix == "bias" else "t"}
        b, p = low_truth_argmax(builtin_distribution(name), params, args.low_truth, args.side, args.grid_step)
        manifest["low_truth"][name] = {"truth": args.low_truth, "bias_star": b, "probability_star": p}
    (out / "manifest.json").write_text(_json(manifest), encoding="utf-8")
    for name, row in manifest["low_truth"].items():
        print(f"{name}: argmax bias at t={args.low_truth:g} is {row['bias_star']:.4f}")
    return EXIT_OK


def cmd_sweep_moments(args):
    params = _params(args)
    W, rows = sweep_moment_space(params, args.weight_step, args.grid_step, args.refine_tol, truth=args.t, max_rows=args.max_rows)
    cols = [f"w_{g}" for g in range(W.shape[1])] + list(SWEEP_COLUMNS)
    body = [list(map(float, w)) + [r[c] for c in SWEEP_COLUMNS] for w, r in zip(W, rows)]
    meta = dict(_param_meta(params), weight_step=args.weight_step, grid_step=args.grid_step, refine_tol=args.refine_tol)
    if args.t is not None:
        meta["truth"] = args.t
    _emit(render_table("sweep-moments", meta, cols, body), args.out)
    return EXIT_OK


def cmd_sensitivity(args):
    base = _params(args)
    ranges = SensitivityRange(tuple(args.fl_range), tuple(args.kl_range), tuple(args.fr_range), tuple(args.kr_range))
    names = _dist_list(args.dist)
    base_argmax, rows = sensitivity_grid(
        names, ranges, base, args.low_truth, args.side, args.threshold, args.min_shifted, args.grid_step
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = {
        "base": _param_meta(base),
        "base_argmax": base_argmax,
        "threshold": args.threshold,
        "min_shifted": args.min_shifted,
        "low_truth": args.low_truth,
        "side": args.side,
        "combinations": [],
    }
    summary = []
    for idx, row in enumerate(rows):
        files = []
        for name in names:
            cols, curve = population_curves(builtin_distribution(name), args.side, row.params, args.points, by="t")
            meta = dict(_param_meta(row.params), dist=name, side=args.side, points=args.points, combination=row.label)
            fname = f"combo{idx:02d}_{row.label}_{name}.csv"
            (out / fname).write_text(render_table("sensitivity", meta, cols, curve), encoding="utf-8")
            files.append(fname)
            summary.append((idx, row.label, name, row.argmax[name], base_argmax[name], int(name in row.shifted), int(row.flagged)))
        manifest["combinations"].append(
            {"index": idx, "label": row.label, "params": _param_meta(row.params), "argmax": row.argmax,
             "shifted": list(row.shifted), "flagged": row.flagged, "tables": files}
        )
    meta = dict(_param_meta(base), threshold=args.threshold, min_shifted=args.min_shifted, low_truth=args.low_truth)
    cols = ("index", "combination", "dist", "argmax_bias", "base_argmax_bias", "shifted", "flagged")
    (out / "summary.csv").write_text(render_table("sensitivity", meta, cols, summary), encoding="utf-8")
    (out / "manifest.json").write_text(_json(manifest), encoding="utf-8")
    for row in rows:
        if row.flagged:
            print(f"flagged: {row.label} (shifted: {', '.join(row.shifted)})")
    return EXIT_OK


def cmd_partisan_report(args):
    params = ModelParams.symmetric(args.f, args.k)
    truths = [i / (args.t_steps - 1) for i in range(args.t_steps)]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rep = partisan_report(args.b, args.belief, args.q, params, truths)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    cols = ("t", "p_unimodal", "p_partisan", "abs_gap", "rel_gap")
    rows = [tuple(float(rep[c][i]) for c in cols) for i in range(len(truths))]
    meta = {"f": args.f, "k": args.k, "b": args.b, "belief": args.belief, "q": args.q}
    _emit(render_table("partisan-report", meta, cols, rows), args.out)
    return EXIT_OK


def _dist_list(text):
    if text in (None, "all"):
        return list(DISTRIBUTION_NAMES)
    names = [x.strip() for x in text.split(",") if x.strip()]
    for n in names:
        builtin_distribution(n)
    return names


# -- parser ------------------------------------------------------------------


def _add_params(p):
    g = p.add_argument_group("model parameters")
    g.add_argument("--fl", type=float, default=BASE_PARAMS.f_left, help="left-reader scale f_l")
    g.add_argument("--kl", type=float, default=BASE_PARAMS.k_left, help="left-reader rate k_l")
    g.add_argument("--fr", type=float, default=BASE_PARAMS.f_right, help="right-reader scale f_r")
    g.add_argument("--kr", type=float, default=BASE_PARAMS.k_right, help="right-reader rate k_r")


def _add_common(p):
    p.add_argument("--config", help="JSON file supplying defaults for any flag")
    p.add_argument("--out", help="output file (or directory for multi-table commands)")


def build_parser():
    parser = _Parser(prog="newsshare", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    subs = {}

    def add(name, func, help):
        p = sub.add_parser(name, help=help)
        p.set_defaults(func=func)
        _add_common(p)
        subs[name] = p
        return p

    p = add("eval", cmd_eval, "sharing probability of one article")
    _add_params(p)
    p.add_argument("--b", type=float, required=False)
    p.add_argument("--t", type=float, required=False)
    p.add_argument("--belief", type=float)
    p.add_argument("--dist", choices=DISTRIBUTION_NAMES)

    p = add("optimize", cmd_optimize, "propagation-maximizing article")
    _add_params(p)
    p.add_argument("--belief", type=float)
    p.add_argument("--dist", choices=DISTRIBUTION_NAMES)
    p.add_argument("--t", type=float, help="hold truthfulness fixed and optimize bias only")
    p.add_argument("--side", choices=("left", "right"))
    p.add_argument("--grid-step", type=float, default=DEFAULT_GRID_STEP)
    p.add_argument("--refine-tol", type=float, default=DEFAULT_REFINE_TOL)

    for name, func, help in (
        ("fit", cmd_fit, "least-squares fit of (f, k) for one reader side"),
        ("validate", cmd_validate, "slope tests of the model assumptions"),
    ):
        p = add(name, func, help)
        p.add_argument("--data", help="cell-per-row observation CSV")
        p.add_argument("--justifications", help="optional domain_id,color,fraction CSV")
        if name == "fit":
            p.add_argument("--side", choices=("left", "right"))
            p.add_argument("--extreme", action="store_true", help="fit the extreme-user effects as well")
            p.add_argument("--weighted", action="store_true", help="weight cells by exposure count")

    p = add("sweep-levels", cmd_sweep_levels, "level curves of the single-reader model")
    _add_params(p)
    p.add_argument("--fixed", choices=("b", "t", "B"))
    p.add_argument("--x", choices=("b", "t", "B"), help="swept axis")
    p.add_argument("--b", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--belief", type=float)
    p.add_argument("--levels", help="comma-separated values of the third variable")
    p.add_argument("--points", type=int, default=DEFAULT_POINTS)

    p = add("population-curves", cmd_population_curves, "population probability over the feasible half-triangle")
    _add_params(p)
    p.add_argument("--dist", default="all", help="distribution name, comma list, or 'all'")
    p.add_argument("--side", choices=("left", "right"), default="right")
    p.add_argument("--points", type=int, default=DEFAULT_POINTS)
    p.add_argument("--low-truth", type=float, default=LOW_TRUTH)
    p.add_argument("--grid-step", type=float, default=DEFAULT_GRID_STEP)

    p = add("sweep-moments", cmd_sweep_moments, "optimum over every weight composition")
    _add_params(p)
    p.add_argument("--weight-step", type=float, default=0.1)
    p.add_argument("--grid-step", type=float, default=DEFAULT_GRID_STEP)
    p.add_argument("--refine-tol", type=float, default=DEFAULT_REFINE_TOL)
    p.add_argument("--t", type=float, help="optimize bias at this fixed truthfulness")
    p.add_argument("--max-rows", type=int, default=200_000)

    rng = SensitivityRange()
    p = add("sensitivity", cmd_sensitivity, "16-combination parameter sensitivity grid")
    _add_params(p)
    p.add_argument("--dist", default="all")
    p.add_argument("--side", choices=("left", "right"), default="right")
    p.add_argument("--fl-range", type=float, nargs=2, default=list(rng.f_left), metavar=("LOW", "HIGH"))
    p.add_argument("--kl-range", type=float, nargs=2, default=list(rng.k_left), metavar=("LOW", "HIGH"))
    p.add_argument("--fr-range", type=float, nargs=2, default=list(rng.f_right), metavar=("LOW", "HIGH"))
    p.add_argument("--kr-range", type=float, nargs=2, default=list(rng.k_right), metavar=("LOW", "HIGH"))
    p.add_argument("--threshold", type=float, default=SHIFT_THRESHOLD)
    p.add_argument("--min-shifted", type=int, default=1, help="populations that must shift to flag a combination")
    p.add_argument("--low-truth", type=float, default=LOW_TRUTH)
    p.add_argument("--points", type=int, default=DEFAULT_POINTS)
    p.add_argument("--grid-step", type=float, default=DEFAULT_GRID_STEP)

    p = add("partisan-report", cmd_partisan_report, "unimodal versus split-population sharing")
    p.add_argument("--b", type=float)
    p.add_argument("--belief", type=float)
    p.add_argument("--q", type=float, default=0.5)
    p.add_argument("--f", type=float, default=BASE_PARAMS.f_left, help="common scale f_l = f_r")
    p.add_argument("--k", type=float, default=BASE_PARAMS.k_left, help="common rate k_l = k_r")
    p.add_argument("--t-steps", type=int, default=21)

    return parser, subs


_REQUIRED = {
    "eval": ("b", "t"),
    "fit": ("data", "side"),
    "validate": ("data",),
    "sweep-levels": ("fixed",),
    "population-curves": ("out",),
    "sensitivity": ("out",),
    "partisan-report": ("b", "belief"),
}


def _apply_config(parser, subs, argv):
    args = parser.parse_args(argv)
    if not args.config:
        return args
    try:
        cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"invalid JSON: {exc.msg}", line=exc.lineno, path=args.config) from None
    if not isinstance(cfg, dict):
        raise DataError("config must be a JSON object", path=args.config)
    sp = subs[args.command]
    known = {a.dest for a in sp._actions}
    defaults = {}
    for key, value in cfg.items():
        dest = key.lstrip("-").replace("-", "_")
        if dest not in known or dest in ("help", "config"):
            raise ValidationError(f"config key {key!r} is not a flag of '{args.command}'")
        defaults[dest] = value
    sp.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    parser, subs = build_parser()
    try:
        try:
            args = _apply_config(parser, subs, argv)
        except SystemExit as exc:
            # argparse usage errors, --help and --version
            return exc.code if isinstance(exc.code, int) else EXIT_VALIDATION
        missing = [k for k in _REQUIRED.get(args.command, ()) if getattr(args, k, None) is None]
        if missing:
            raise ValidationError(f"missing required option(s): {', '.join('--' + m.replace('_', '-') for m in missing)}")
        return args.func(args)
    except (ValidationError, FitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (DataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    raise SystemExit(main())
