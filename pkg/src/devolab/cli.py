"""Command-line front end: list the catalog, run experiment plans, tune CR,
and render report tables from a result store."""

import argparse
import json
import os
import sys

from . import benchmarks, core, harness, metrics
from .errors import ConfigurationError, MissingCellsError

PRESETS = {"desk": 10, "paper": 100}


def build_parser():
    p = argparse.ArgumentParser(
        prog="devolab",
        description="Differential-evolution variant laboratory",
    )
    sub = p.add_subparsers(dest="command", required=True)

    lp = sub.add_parser("list", help="show the 14 variants and 14 benchmark functions")
    lp.add_argument("--machine", action="store_true",
                    help="emit the catalog as JSON")

    rp = sub.add_parser("run", help="execute an experiment plan")
    _plan_flags(rp)
    rp.add_argument("--cr", type=float, help="fixed CR for every cell")
    rp.add_argument("--cr-map", help="JSON file mapping variant -> function -> CR")
    rp.add_argument("--jobs", type=int, default=1, help="parallel worker processes")

    tp = sub.add_parser("tune-cr", help="grid-search CR per (variant, function)")
    _plan_flags(tp)
    tp.add_argument("--grid", default="0.0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0",
                    help="comma-separated CR values to try")
    tp.add_argument("--jobs", type=int, default=1)

    pp = sub.add_parser("report", help="render tables from a result store")
    pp.add_argument("--out", default="devolab-out", help="result store directory")
    pp.add_argument("--format", choices=["csv", "markdown"], default="markdown")
    return p


def _plan_flags(sp):
    sp.add_argument("--variant", action="append",
                    help="variant name, repeatable (default: all 14)")
    sp.add_argument("--function", action="append",
                    help="function id f1..f14, repeatable (default: all 14)")
    sp.add_argument("--runs", type=int, help="independent runs per cell")
    sp.add_argument("--seed", type=int, default=0, help="base seed")
    sp.add_argument("--preset", choices=sorted(PRESETS),
                    help="desk: 10 runs per cell; paper: 100")
    sp.add_argument("--out", default="devolab-out", help="output directory")


def _resolve_seed(args):
    env = os.environ.get("DEVOLAB_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigurationError(f"DEVOLAB_SEED must be an integer, got {env!r}")
    return args.seed


def _resolve_runs(args, tuning=False):
    if args.runs is not None:
        return args.runs
    if args.preset is not None:
        return PRESETS[args.preset]
    return 50 if tuning else 100


def _parse_variants(names):
    if not names:
        return core.all_variants()
    return [core.VariantSpec.parse(n) for n in names]


def _parse_functions(ids):
    if not ids:
        return list(benchmarks.FUNCTION_IDS)
    for fn_id in ids:
        benchmarks.by_id(fn_id)
    return list(ids)


def cmd_list(args):
    fns = benchmarks.catalog()
    if args.machine:
        print(json.dumps({
            "variants": core.VARIANT_NAMES,
            "functions": [fn.describe() for fn in fns],
            "classes": benchmarks.FUNCTION_CLASSES,
        }, indent=2))
        return 0
    print(f"Variants ({len(core.VARIANT_NAMES)}):")
    for name in core.VARIANT_NAMES:
        print(f"  {name}")
    print(f"\nFunctions ({len(fns)}):")
    by_id = {fn.id: fn for fn in fns}
    for cls, members in benchmarks.FUNCTION_CLASSES.items():
        print(f"  {cls}:")
        for fn_id in members:
            fn = by_id[fn_id]
            noise = "  (noisy)" if fn.noisy else ""
            print(f"    {fn.id:<4} {fn.name:<15} [{fn.lower:g}, {fn.upper:g}]^{fn.dim}{noise}")
    return 0


def _build_plan(args):
    variants = _parse_variants(args.variant)
    functions = _parse_functions(args.function)
    cr_source, cr_value, cr_map = "tuned", None, None
    if getattr(args, "cr", None) is not None and getattr(args, "cr_map", None):
        raise ConfigurationError("--cr and --cr-map are mutually exclusive")
    if getattr(args, "cr", None) is not None:
        cr_source, cr_value = "fixed", args.cr
    elif getattr(args, "cr_map", None):
        with open(args.cr_map) as fh:
            cr_source, cr_map = "map", json.load(fh)
    return harness.ExperimentPlan(
        variants=variants,
        functions=functions,
        runs=_resolve_runs(args),
        params=core.ControlParams(),
        cr_source=cr_source,
        cr_value=cr_value,
        cr_map=cr_map,
        base_seed=_resolve_seed(args),
    )


def cmd_run(args):
    plan = _build_plan(args)
    store = harness.execute(plan, out_dir=args.out, jobs=args.jobs)
    rows = aggregate_all(store)
    harness.write_summary(rows, os.path.join(args.out, "summary.csv"))
    print(f"{len(store)} runs in {args.out} "
          f"(runs.csv, summary.csv, manifest.json)")
    return 0


def aggregate_all(store, max_fe=180000):
    rows = harness.aggregate(store, "per_cell", max_fe=max_fe, strict=False)
    rows += harness.aggregate(store, "per_function_class", max_fe=max_fe, strict=False)
    return rows


def cmd_tune_cr(args):
    variants = _parse_variants(args.variant)
    functions = _parse_functions(args.function)
    try:
        grid = [float(v) for v in args.grid.split(",") if v.strip() != ""]
    except ValueError:
        raise ConfigurationError(f"--grid must be comma-separated floats, got {args.grid!r}")
    runs = _resolve_runs(args, tuning=True)
    base_seed = _resolve_seed(args)
    params = core.ControlParams()
    os.makedirs(args.out, exist_ok=True)
    out = {}
    for spec in variants:
        out[spec.name] = {}
        for fn_id in functions:
            fn = benchmarks.by_id(fn_id)
            chosen, cells = metrics.tune_cr_detail(
                spec, fn, grid, runs, params, base_seed, jobs=args.jobs)
            detail = {cr: ci for cr, ci in cells}[chosen]
            out[spec.name][fn_id] = {
                "cr": chosen, "ci_lo": detail.lo, "ci_hi": detail.hi,
            }
            print(f"{spec.name} {fn_id}: cr={chosen} "
                  f"ci=[{detail.lo:.6g}, {detail.hi:.6g}]")
    path = os.path.join(args.out, "cr_map.json")
    with open(path, "w") as fh:
        json.dump(out, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {path}")
    return 0


def _fmt(value, places=2):
    return "" if value is None else f"{value:.{places}f}"


def _markdown_table(header, rows):
    lines = ["| " + " | ".join(header) + " |",
             "| " + " | ".join("---" for _ in header) + " |"]
    for row in rows:
        lines.append("| " + " | ".join(row) + " |")
    return "\n".join(lines)


def render_markdown(store):
    cell_rows = harness.aggregate(store, "per_cell", strict=False)
    cells = {(r["variant"], r["function_or_class"]): r for r in cell_rows}
    variants = [v for v in core.VARIANT_NAMES if any(k[0] == v for k in cells)]
    functions = [f for f in benchmarks.FUNCTION_IDS if any(k[1] == f for k in cells)]
    sections = []

    # MOV tables, one per function class
    for cls, members in benchmarks.FUNCTION_CLASSES.items():
        fns = [f for f in members if f in functions]
        if not fns:
            continue
        body = []
        for v in variants:
            body.append([v] + [_fmt(cells[(v, f)]["mov"]) if (v, f) in cells else ""
                               for f in fns])
        sections.append(f"## MOV — {cls}\n\n" + _markdown_table(["variant"] + fns, body))

    # convergence speed with per-column minima starred
    mins = {}
    for f in functions:
        vals = [cells[(v, f)]["cs_percent"] for v in variants if (v, f) in cells]
        if vals:
            mins[f] = min(vals)
    body = []
    for v in variants:
        row = [v]
        for f in functions:
            if (v, f) not in cells:
                row.append("")
                continue
            cs = cells[(v, f)]["cs_percent"]
            star = "*" if abs(cs - mins[f]) < 1e-9 else ""
            row.append(f"{cs:.2f}{star}")
        body.append(row)
    sections.append("## Convergence speed (% of budget, lowest per function starred)\n\n"
                    + _markdown_table(["variant"] + functions, body))

    # Q-measure per class, ascending, dashes for variants with no successes
    class_rows = harness.aggregate(store, "per_function_class", strict=False)
    by_class = {}
    for r in class_rows:
        by_class.setdefault(r["function_or_class"], []).append(r)
    for cls, rows in by_class.items():
        body = [[r["variant"], str(r["sum_ej"]), str(r["nc"]),
                 _fmt(r["c"]) or "−", _fmt(r["pc_percent"]), _fmt(r["qm"]) or "−"]
                for r in rows]
        sections.append(f"## Q-measure — {cls} (ascending)\n\n"
                        + _markdown_table(
                            ["variant", "SumEj", "nc", "C", "Pc", "Qm"], body))
    return "\n\n".join(sections) + "\n"


def cmd_report(args):
    store = harness.ResultStore(args.out)
    if len(store) == 0:
        raise ConfigurationError(f"no runs.csv found in {args.out}")
    if args.format == "csv":
        import io

        buf = io.StringIO()
        rows = aggregate_all(store)
        tmp = os.path.join(args.out, "summary.csv")
        harness.write_summary(rows, tmp)
        with open(tmp) as fh:
            sys.stdout.write(fh.read())
    else:
        sys.stdout.write(render_markdown(store))
    try:
        harness.aggregate(store, "per_cell")
        harness.aggregate(store, "per_function_class")
    except MissingCellsError as err:
        print(f"incomplete store: {err}", file=sys.stderr)
        return 3
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    handlers = {
        "list": cmd_list,
        "run": cmd_run,
        "tune-cr": cmd_tune_cr,
        "report": cmd_report,
    }
    try:
        return handlers[args.command](args)
    except ConfigurationError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
