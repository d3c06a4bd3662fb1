"""Measurements over sets of runs: MOV, convergence speed, Q-measure, and the
bootstrap confidence-interval machinery behind the tuned crossover rates."""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import core
from .errors import ConfigurationError


def mov(records):
    """Mean objective value: arithmetic mean of the runs' final best values."""
    if not records:
        raise ValueError("mov needs at least one run record")
    return float(np.mean([r.final_best for r in records]))


def convergence_speed(records, max_fe=180000):
    """Mean percentage of the evaluation budget consumed before termination.

    Early-stopped successful runs report their terminal evaluation count;
    runs that exhaust the budget contribute 100.
    """
    if not records:
        raise ValueError("convergence_speed needs at least one run record")
    return float(np.mean([100.0 * r.fe_used / max_fe for r in records]))


@dataclass(frozen=True)
class QmSummary:
    """Convergence-quality summary of a group of runs.

    sum_ej totals the evaluations of successful runs only; c = sum_ej/nc and
    qm = c/pc_percent are undefined (None) when no run succeeded.
    """

    sum_ej: int
    nc: int
    total_runs: int
    c: float | None
    pc_percent: float
    qm: float | None

    @property
    def defined(self):
        return self.nc > 0


def q_measure(records):
    if not records:
        raise ValueError("q_measure needs at least one run record")
    successes = [r for r in records if r.success]
    sum_ej = int(sum(r.fe_used for r in successes))
    nc = len(successes)
    total = len(records)
    pc = 100.0 * nc / total
    if nc == 0:
        return QmSummary(0, 0, total, None, 0.0, None)
    c = sum_ej / nc
    return QmSummary(sum_ej, nc, total, c, pc, c / pc)


@dataclass(frozen=True)
class ConfidenceInterval:
    lo: float
    hi: float
    level: float

    @property
    def midpoint(self):
        return 0.5 * (self.lo + self.hi)

    @property
    def width(self):
        return self.hi - self.lo


def bootstrap_ci(samples, resamples=2000, level=0.95, rng=None):
    """Percentile bootstrap CI for the sample mean."""
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        raise ValueError("bootstrap_ci needs a nonempty sample")
    if resamples < 100:
        raise ValueError("use at least 100 resamples")
    if rng is None:
        rng = np.random.default_rng()
    idx = rng.integers(0, samples.size, size=(resamples, samples.size))
    means = samples[idx].mean(axis=1)
    alpha = (1.0 - level) / 2.0
    lo, hi = np.quantile(means, [alpha, 1.0 - alpha])
    return ConfidenceInterval(float(lo), float(hi), level)


def select_cr(candidates):
    """Pick the (cr, interval) pair with the best interval.

    Ordering: smaller midpoint, then smaller width, then smaller cr.
    """
    if not candidates:
        raise ValueError("select_cr needs at least one candidate")
    best = min(candidates, key=lambda pair: (pair[1].midpoint, pair[1].width, pair[0]))
    return best[0]


def _tune_cell(args):
    variant, fn, params, cr, seeds = args
    finals = [
        core.run(variant, fn, replace(params, cr=cr), seed).final_best
        for seed in seeds
    ]
    return cr, finals


def tune_cr(variant, fn, cr_grid, runs_per_cr, params, base_seed, jobs=1,
            resamples=2000, level=0.95):
    """Grid-search CR by bootstrapping the mean final value of repeated runs.

    Every grid cell reuses the same derived seeds, so cells are compared
    under common random numbers. Returns the chosen CR; use tune_cr_detail
    for the per-cell intervals.
    """
    return tune_cr_detail(variant, fn, cr_grid, runs_per_cr, params, base_seed,
                          jobs=jobs, resamples=resamples, level=level)[0]


def tune_cr_detail(variant, fn, cr_grid, runs_per_cr, params, base_seed, jobs=1,
                   resamples=2000, level=0.95):
    """As tune_cr, but also returns the list of (cr, ConfidenceInterval)."""
    if not cr_grid:
        raise ConfigurationError("cr_grid must be nonempty")
    if runs_per_cr < 2:
        raise ConfigurationError("runs_per_cr must be at least 2")
    seeds = [core.derive_seed(base_seed, variant.name, fn.id, i)
             for i in range(runs_per_cr)]
    tasks = [(variant, fn, params, cr, seeds) for cr in cr_grid]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            cells = list(pool.map(_tune_cell, tasks))
    else:
        cells = [_tune_cell(t) for t in tasks]
    candidates = []
    for cr, finals in cells:
        ci_rng = np.random.default_rng(
            core.derive_seed(base_seed, variant.name, fn.id, f"ci/{cr}")
        )
        candidates.append((cr, bootstrap_ci(finals, resamples, level, ci_rng)))
    return select_cr(candidates), candidates


# Tuned crossover rate per (variant, function): the grid-search winners the
# experiment protocol uses when no explicit CR is supplied. Order: f1..f14.
TUNED_CR = {
    "rand/1/bin":              (0.9, 0.2, 0.9, 0.5, 0.9, 0.2, 0.8, 0.5, 0.1, 0.9, 0.1, 0.1, 0.1, 0.1),
    "rand/1/exp":              (0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.0, 0.9, 0.9, 0.9, 0.9, 0.9, 0.9),
    "best/1/bin":              (0.1, 0.1, 0.5, 0.2, 0.8, 0.1, 0.7, 0.1, 0.1, 0.1, 0.1, 0.3, 0.8, 0.1),
    "best/1/exp":              (0.9, 0.8, 0.9, 0.9, 0.8, 0.8, 0.9, 0.7, 0.9, 0.8, 0.8, 0.9, 0.8, 0.8),
    "rand/2/bin":              (0.3, 0.1, 0.9, 0.2, 0.9, 0.2, 0.9, 0.2, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1),
    "rand/2/exp":              (0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.3, 0.9, 0.9, 0.9, 0.9, 0.9, 0.9),
    "best/2/bin":              (0.1, 0.3, 0.7, 0.2, 0.6, 0.1, 0.5, 0.7, 0.1, 0.4, 0.1, 0.1, 0.1, 0.1),
    "best/2/exp":              (0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.3, 0.9, 0.9, 0.9, 0.9, 0.9, 0.9),
    "current-to-rand/1/bin":   (0.5, 0.1, 0.9, 0.2, 0.1, 0.1, 0.2, 0.4, 0.1, 0.1, 0.1, 0.2, 0.3, 0.1),
    "current-to-rand/1/exp":   (0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.3, 0.9, 0.9, 0.9, 0.9, 0.9, 0.9),
    "current-to-best/1/bin":   (0.2, 0.1, 0.9, 0.2, 0.1, 0.3, 0.2, 0.8, 0.1, 0.1, 0.2, 0.2, 0.1, 0.1),
    "current-to-best/1/exp":   (0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.1, 0.9, 0.9, 0.9, 0.9, 0.9, 0.9),
    "rand-to-best/1/bin":      (0.1, 0.1, 0.9, 0.4, 0.8, 0.4, 0.8, 0.8, 0.1, 0.9, 0.1, 0.1, 0.2, 0.1),
    "rand-to-best/1/exp":      (0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.4, 0.9, 0.9, 0.9, 0.9, 0.9, 0.9),
}


def cr_lookup(variant, fn_id):
    """Tuned CR for a (variant, function) pair from the embedded table."""
    name = variant.name if isinstance(variant, core.VariantSpec) else str(variant)
    if name not in TUNED_CR:
        raise ConfigurationError(
            f"no tuned CR for variant {name!r}; valid: {', '.join(core.VARIANT_NAMES)}"
        )
    row = TUNED_CR[name]
    try:
        pos = int(fn_id.lstrip("f")) - 1
        if not (0 <= pos < len(row)) or fn_id != f"f{pos + 1}":
            raise ValueError
    except (ValueError, AttributeError):
        raise ConfigurationError(f"no tuned CR for function {fn_id!r}; valid: f1..f14")
    return row[pos]
