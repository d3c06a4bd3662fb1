"""Differential evolution engine.

Implements the seven classical mutation strategies crossed with binomial and
exponential crossover (14 variants), one-to-one greedy selection, and the
synchronous generational loop. A single run is driven by one seeded random
stream, so a (variant, function, params, seed) tuple fixes the whole
trajectory regardless of scheduling.
"""

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

# mutation strategy -> number of distinct non-target parents it draws
STRATEGY_PARENTS = {
    "rand/1": 3,
    "best/1": 2,
    "rand/2": 5,
    "best/2": 4,
    "current-to-rand/1": 3,
    "current-to-best/1": 2,
    "rand-to-best/1": 3,
}

MUTATIONS = list(STRATEGY_PARENTS)
CROSSOVERS = ["bin", "exp"]

# canonical ordering: mutation-major, binomial before exponential
VARIANT_NAMES = [f"{m}/{c}" for m in MUTATIONS for c in CROSSOVERS]


@dataclass(frozen=True)
class VariantSpec:
    """One of the 14 variants: a mutation strategy plus a crossover scheme."""

    mutation: str
    crossover: str

    def __post_init__(self):
        if self.mutation not in STRATEGY_PARENTS:
            raise ConfigurationError(
                f"unknown mutation {self.mutation!r}; valid: {', '.join(MUTATIONS)}"
            )
        if self.crossover not in CROSSOVERS:
            raise ConfigurationError(
                f"unknown crossover {self.crossover!r}; valid: bin, exp"
            )

    @property
    def name(self):
        return f"{self.mutation}/{self.crossover}"

    @classmethod
    def parse(cls, name):
        """Parse names like "rand/1/bin" or "current-to-best/1/exp"."""
        head, sep, tail = name.rpartition("/")
        if not sep or head not in STRATEGY_PARENTS or tail not in CROSSOVERS:
            raise ConfigurationError(
                f"unknown variant {name!r}; valid names: {', '.join(VARIANT_NAMES)}"
            )
        return cls(head, tail)

    def __str__(self):
        return self.name


def all_variants():
    return [VariantSpec.parse(n) for n in VARIANT_NAMES]


@dataclass
class ControlParams:
    """Run-control parameters shared by every variant."""

    np: int = 60
    max_gen: int = 3000
    max_fe: int = 180000
    f_range: tuple = (0.3, 0.9)
    cr: float | None = None
    tolerance: float = 1e-12
    k_equals_f: bool = True

    def validate(self):
        if self.np < 5:
            raise ConfigurationError("population size must be at least 5")
        if self.max_gen < 1 or self.max_fe < self.np:
            raise ConfigurationError("max_gen and max_fe must allow at least one generation")
        lo, hi = self.f_range
        if not (0.0 < lo <= hi <= 2.0):
            raise ConfigurationError("f_range must satisfy 0 < low <= high <= 2")
        if self.cr is not None and not (0.0 <= self.cr <= 1.0):
            raise ConfigurationError("cr must lie in [0, 1]")
        if self.tolerance <= 0:
            raise ConfigurationError("tolerance must be positive")
        if not self.k_equals_f:
            raise ConfigurationError("only K = F is supported")


@dataclass
class Individual:
    genome: np.ndarray
    fitness: float


@dataclass
class Population:
    """NP genomes with cached fitnesses; best_index breaks ties by lowest index."""

    genomes: np.ndarray  # shape (NP, D)
    fitness: np.ndarray  # shape (NP,)
    generation: int = 0

    @property
    def size(self):
        return self.genomes.shape[0]

    @property
    def best_index(self):
        return int(np.argmin(self.fitness))


@dataclass(frozen=True)
class RunRecord:
    """Outcome of one seeded run."""

    variant: str
    fn_id: str
    seed: int
    final_best: float
    fe_used: int
    success: bool


def init_population(rng, fn, params):
    """Uniform random population within the function bounds, all evaluated."""
    if not (np.isfinite(fn.lower) and np.isfinite(fn.upper) and fn.lower < fn.upper):
        raise ConfigurationError(f"{fn.id} has unusable bounds [{fn.lower}, {fn.upper}]")
    genomes = rng.uniform(fn.lower, fn.upper, size=(params.np, fn.dim))
    fitness = np.array([fn.evaluate(g, rng) for g in genomes])
    return Population(genomes, fitness)


def sample_f(rng, params):
    """Draw this generation's scale factor F uniformly from f_range; K aliases it."""
    lo, hi = params.f_range
    return float(rng.uniform(lo, hi))


def distinct_indices(rng, exclude, count, pop_size):
    """Draw `count` pairwise-distinct indices from [0, pop_size), avoiding `exclude`."""
    if pop_size - len(exclude) < count:
        raise ConfigurationError(
            f"population of {pop_size} cannot supply {count} distinct indices "
            f"outside {sorted(exclude)}"
        )
    picked = []
    taken = set(exclude)
    while len(picked) < count:
        j = int(rng.integers(pop_size))
        if j in taken:
            continue
        taken.add(j)
        picked.append(j)
    return picked


def mutate(spec, pop, i, F, K, rng):
    """Build the mutant vector V for target i under the given strategy."""
    X = pop.genomes
    r = distinct_indices(rng, {i}, STRATEGY_PARENTS[spec.mutation], pop.size)
    m = spec.mutation
    if m == "rand/1":
        return X[r[0]] + F * (X[r[1]] - X[r[2]])
    if m == "best/1":
        return X[pop.best_index] + F * (X[r[0]] - X[r[1]])
    if m == "rand/2":
        return X[r[0]] + F * (X[r[1]] - X[r[2]] + X[r[3]] - X[r[4]])
    if m == "best/2":
        return X[pop.best_index] + F * (X[r[0]] - X[r[1]] + X[r[2]] - X[r[3]])
    if m == "current-to-rand/1":
        return X[i] + K * (X[r[2]] - X[i]) + F * (X[r[0]] - X[r[1]])
    if m == "current-to-best/1":
        return X[i] + K * (X[pop.best_index] - X[i]) + F * (X[r[0]] - X[r[1]])
    # rand-to-best/1
    return X[r[0]] + F * (X[pop.best_index] - X[r[0]]) + F * (X[r[1]] - X[r[2]])


def crossover_binomial(target, mutant, cr, rng):
    """Componentwise mix: take mutant where rand < CR, always at index j_rand."""
    d = target.size
    j_rand = int(rng.integers(d))
    mask = rng.random(d) < cr
    mask[j_rand] = True
    return np.where(mask, mutant, target)


def crossover_exponential(target, mutant, cr, rng):
    """Copy a contiguous (modulo D) block from the mutant.

    The block starts at a uniform index and grows while rand < CR, up to D
    components; length is always at least 1.
    """
    d = target.size
    start = int(rng.integers(d))
    draws = rng.random(d - 1)
    stops = np.nonzero(draws >= cr)[0]
    length = d if stops.size == 0 else int(stops[0]) + 1
    trial = target.copy()
    idx = (start + np.arange(length)) % d
    trial[idx] = mutant[idx]
    return trial


def select(target, trial_genome, trial_fitness):
    """One-to-one selection: the trial wins on ties (<=)."""
    if trial_fitness <= target.fitness:
        return Individual(trial_genome, trial_fitness)
    return target


def derive_seed(base_seed, variant_name, fn_id, run_index):
    """Stable per-run seed: first 8 little-endian bytes of
    sha256("{base_seed}|{variant}|{fn}|{run_index}")."""
    key = f"{base_seed}|{variant_name}|{fn_id}|{run_index}".encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "little")


def run(spec, fn, params, seed):
    """Evolve one population to tolerance or budget exhaustion.

    Per generation: one shared F, then for each target mutate, cross over,
    clamp to bounds, evaluate, and select synchronously against the
    generation-G parents (the best index stays frozen for the generation).
    Success is checked after each full generation.
    """
    params.validate()
    if params.cr is None:
        raise ConfigurationError("params.cr must be set before running")
    need = STRATEGY_PARENTS[spec.mutation]
    if params.np - 1 < need:
        raise ConfigurationError(
            f"{spec.name} needs {need} distinct parents besides the target; "
            f"population size {params.np} is too small"
        )

    rng = np.random.default_rng(seed)
    crossover = crossover_binomial if spec.crossover == "bin" else crossover_exponential

    pop = init_population(rng, fn, params)
    fe = params.np
    best = float(pop.fitness.min())
    success = best <= params.tolerance

    while not success and pop.generation < params.max_gen and fe < params.max_fe:
        F = sample_f(rng, params)
        K = F
        new_genomes = pop.genomes.copy()
        new_fitness = pop.fitness.copy()
        for i in range(pop.size):
            mutant = mutate(spec, pop, i, F, K, rng)
            trial = crossover(pop.genomes[i], mutant, params.cr, rng)
            np.clip(trial, fn.lower, fn.upper, out=trial)
            trial_fitness = fn.evaluate(trial, rng)
            fe += 1
            if trial_fitness <= pop.fitness[i]:
                new_genomes[i] = trial
                new_fitness[i] = trial_fitness
        pop.genomes = new_genomes
        pop.fitness = new_fitness
        pop.generation += 1
        best = min(best, float(pop.fitness.min()))
        success = best <= params.tolerance

    return RunRecord(spec.name, fn.id, int(seed), best, fe, bool(success))
