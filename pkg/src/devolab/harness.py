"""Experiment orchestration: expand a plan over variant x function x runs,
execute the runs (optionally in parallel), persist them incrementally to CSV,
and aggregate records into per-cell and per-class report rows.

Reproducibility contract: each run's seed is derived from
(base_seed, variant name, function id, run index) via core.derive_seed, and
the random stream is numpy's PCG64. Results are therefore identical for any
parallelism degree and any execution order.
"""

import csv
import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field, asdict, replace

from . import benchmarks, core, metrics
from .errors import ConfigurationError, MissingCellsError

RNG_NAME = "numpy-pcg64"
SEED_SCHEME = "sha256('{base}|{variant}|{fn}|{run}') first 8 bytes little-endian"

RUNS_HEADER = ["variant", "function", "run_index", "seed", "cr",
               "final_best", "fe_used", "success"]
SUMMARY_HEADER = ["scope", "variant", "function_or_class", "mov", "cs_percent",
                  "sum_ej", "nc", "c", "pc_percent", "qm"]


@dataclass
class ExperimentPlan:
    """A full experiment: which variants on which functions, how many runs,
    under which control parameters and CR source."""

    variants: list
    functions: list
    runs: int = 100
    params: core.ControlParams = field(default_factory=core.ControlParams)
    cr_source: str = "tuned"  # "tuned" (embedded table) | "fixed" | "map"
    cr_value: float | None = None
    cr_map: dict | None = None
    base_seed: int = 0

    def resolve_cr(self, variant_name, fn_id):
        if self.cr_source == "tuned":
            return metrics.cr_lookup(variant_name, fn_id)
        if self.cr_source == "fixed":
            if self.cr_value is None:
                raise ConfigurationError("cr_source 'fixed' needs cr_value")
            return float(self.cr_value)
        if self.cr_source == "map":
            try:
                raw = self.cr_map[variant_name][fn_id]
            except (KeyError, TypeError):
                raise ConfigurationError(
                    f"cr map has no entry for ({variant_name}, {fn_id})"
                )
            # tuned-map files store {"cr": ..., "ci_lo": ..., "ci_hi": ...}
            return float(raw["cr"] if isinstance(raw, dict) else raw)
        raise ConfigurationError(f"unknown cr_source {self.cr_source!r}")

    def validate(self):
        if self.runs < 1:
            raise ConfigurationError("runs must be at least 1")
        if not self.variants or not self.functions:
            raise ConfigurationError("plan needs at least one variant and one function")
        self.params.validate()
        for fn_id in self.functions:
            benchmarks.by_id(fn_id)  # raises on unknown ids
        for v in self.variants:
            for fn_id in self.functions:
                cr = self.resolve_cr(v.name, fn_id)
                if not (0.0 <= cr <= 1.0):
                    raise ConfigurationError(
                        f"resolved CR {cr} for ({v.name}, {fn_id}) is outside [0, 1]"
                    )

    def cells(self):
        for v in self.variants:
            for fn_id in self.functions:
                yield v.name, fn_id

    def describe(self):
        p = asdict(self.params)
        p["f_range"] = list(self.params.f_range)
        return {
            "variants": [v.name for v in self.variants],
            "functions": list(self.functions),
            "runs": self.runs,
            "params": p,
            "cr_source": self.cr_source,
            "cr_value": self.cr_value,
            "cr_map": self.cr_map,
            "base_seed": self.base_seed,
            "rng": RNG_NAME,
            "seed_scheme": SEED_SCHEME,
        }

    def fingerprint(self):
        blob = json.dumps(self.describe(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


def _sort_key(key):
    variant, fn_id, run_index = key
    return (variant, int(fn_id.lstrip("f")), run_index)


class ResultStore:
    """Append-only run records keyed by (variant, function, run_index).

    With a directory, rows live in <dir>/runs.csv and survive interruption;
    without one the store is memory-only.
    """

    def __init__(self, out_dir=None):
        self.out_dir = out_dir
        self._records = {}
        self._fh = None
        if out_dir is not None:
            os.makedirs(out_dir, exist_ok=True)
            self.runs_path = os.path.join(out_dir, "runs.csv")
            self.manifest_path = os.path.join(out_dir, "manifest.json")
            if os.path.exists(self.runs_path):
                self._load()

    def _load(self):
        with open(self.runs_path, newline="") as fh:
            for row in csv.DictReader(fh):
                key = (row["variant"], row["function"], int(row["run_index"]))
                rec = core.RunRecord(
                    row["variant"], row["function"], int(row["seed"]),
                    float(row["final_best"]), int(row["fe_used"]),
                    row["success"] == "True",
                )
                self._records[key] = (float(row["cr"]), rec)

    def _writer(self):
        if self._fh is None:
            fresh = not os.path.exists(self.runs_path) or os.path.getsize(self.runs_path) == 0
            self._fh = open(self.runs_path, "a", newline="")
            self._csv = csv.writer(self._fh)
            if fresh:
                self._csv.writerow(RUNS_HEADER)
                self._fh.flush()
        return self._csv

    def append(self, run_index, cr, record):
        key = (record.variant, record.fn_id, int(run_index))
        if key in self._records:
            raise ConfigurationError(f"duplicate record for {key}")
        self._records[key] = (float(cr), record)
        if self.out_dir is not None:
            self._writer().writerow(_format_row(run_index, cr, record))
            self._fh.flush()

    def close(self):
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def finalize(self):
        """Rewrite runs.csv in canonical key order so reruns diff cleanly."""
        self.close()
        if self.out_dir is None:
            return
        with open(self.runs_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(RUNS_HEADER)
            for key in sorted(self._records, key=_sort_key):
                cr, rec = self._records[key]
                w.writerow(_format_row(key[2], cr, rec))

    def __len__(self):
        return len(self._records)

    def keys(self):
        return set(self._records)

    def items(self):
        return [(k, self._records[k]) for k in sorted(self._records, key=_sort_key)]

    def records(self):
        return [rec for _, (_, rec) in self.items()]

    def cell_records(self, variant_name, fn_id):
        return [rec for (v, f, _), (_, rec) in self.items()
                if v == variant_name and f == fn_id]

    def write_manifest(self, plan):
        with open(self.manifest_path, "w") as fh:
            json.dump({"fingerprint": plan.fingerprint(), **plan.describe()},
                      fh, indent=2, sort_keys=True)
            fh.write("\n")

    def check_manifest(self, plan):
        if not os.path.exists(self.manifest_path):
            return False
        with open(self.manifest_path) as fh:
            existing = json.load(fh)
        if existing.get("fingerprint") != plan.fingerprint():
            raise ConfigurationError(
                f"{self.out_dir} holds results for a different plan; "
                "use a fresh output directory"
            )
        return True


def _format_row(run_index, cr, rec):
    return [rec.variant, rec.fn_id, run_index, rec.seed, repr(float(cr)),
            repr(rec.final_best), rec.fe_used, rec.success]


def _run_task(args):
    variant_name, fn_id, run_index, cr, seed, params = args
    spec = core.VariantSpec.parse(variant_name)
    fn = benchmarks.by_id(fn_id)
    record = core.run(spec, fn, replace(params, cr=cr), seed)
    return run_index, cr, record


def execute(plan, out_dir=None, jobs=1, store=None):
    """Run every missing cell of the plan; returns the populated ResultStore.

    Records are appended (and flushed) as they finish, so an interrupted
    campaign keeps its completed runs and a rerun resumes where it stopped.
    """
    plan.validate()
    if store is None:
        store = ResultStore(out_dir)
    if store.out_dir is not None:
        if store.check_manifest(plan):
            pass  # resuming the same plan
        else:
            store.write_manifest(plan)

    done = store.keys()
    tasks = []
    for variant_name, fn_id in plan.cells():
        cr = plan.resolve_cr(variant_name, fn_id)
        for run_index in range(plan.runs):
            if (variant_name, fn_id, run_index) in done:
                continue
            seed = core.derive_seed(plan.base_seed, variant_name, fn_id, run_index)
            tasks.append((variant_name, fn_id, run_index, cr, seed, plan.params))

    if jobs > 1 and tasks:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_run_task, t) for t in tasks]
            for fut in as_completed(futures):
                run_index, cr, record = fut.result()
                store.append(run_index, cr, record)
    else:
        for t in tasks:
            run_index, cr, record = _run_task(t)
            store.append(run_index, cr, record)

    store.finalize()
    return store


def _present(store):
    keys = store.keys()
    variants = [v for v in core.VARIANT_NAMES if any(k[0] == v for k in keys)]
    fn_order = benchmarks.FUNCTION_IDS
    functions = [f for f in fn_order if any(k[1] == f for k in keys)]
    return variants, functions


def _cell_row(variant_name, scope_name, scope, records, max_fe):
    qm = metrics.q_measure(records)
    return {
        "scope": scope,
        "variant": variant_name,
        "function_or_class": scope_name,
        "mov": metrics.mov(records),
        "cs_percent": metrics.convergence_speed(records, max_fe),
        "sum_ej": qm.sum_ej,
        "nc": qm.nc,
        "c": qm.c,
        "pc_percent": qm.pc_percent,
        "qm": qm.qm,
    }


def aggregate(store, grouping="per_cell", max_fe=180000, strict=True):
    """Reduce a store to report rows.

    per_cell: one row per (variant, function) with MOV/Cs/Q-measure fields.
    per_function_class: pools the runs of each function class per variant and
    sorts each class block ascending by Qm (undefined Qm last). With strict,
    missing cells raise MissingCellsError; otherwise incomplete groups are
    skipped.
    """
    variants, functions = _present(store)
    if grouping == "per_cell":
        missing = [(v, f) for v in variants for f in functions
                   if not store.cell_records(v, f)]
        if missing and strict:
            raise MissingCellsError(missing)
        rows = []
        for v in variants:
            for f in functions:
                records = store.cell_records(v, f)
                if records:
                    rows.append(_cell_row(v, f, "cell", records, max_fe))
        return rows

    if grouping == "per_function_class":
        touched = [
            (cls, members)
            for cls, members in benchmarks.FUNCTION_CLASSES.items()
            if any(f in functions for f in members)
        ]
        missing = [(v, f) for v in variants for cls, members in touched
                   for f in members if not store.cell_records(v, f)]
        if missing and strict:
            raise MissingCellsError(missing)
        rows = []
        for cls, members in touched:
            block = []
            for v in variants:
                records = []
                complete = True
                for f in members:
                    cell = store.cell_records(v, f)
                    if not cell:
                        complete = False
                        break
                    records.extend(cell)
                if complete:
                    block.append(_cell_row(v, cls, "class", records, max_fe))
            block.sort(key=lambda r: (r["qm"] is None, r["qm"] if r["qm"] is not None else 0.0))
            rows.extend(block)
        return rows

    raise ConfigurationError(f"unknown grouping {grouping!r}")


def write_summary(rows, path):
    """Write report rows using the summary.csv schema (None fields stay empty)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SUMMARY_HEADER)
        for row in rows:
            w.writerow([
                row["scope"], row["variant"], row["function_or_class"],
                repr(row["mov"]), repr(row["cs_percent"]), row["sum_ej"], row["nc"],
                "" if row["c"] is None else repr(row["c"]),
                repr(row["pc_percent"]),
                "" if row["qm"] is None else repr(row["qm"]),
            ])
