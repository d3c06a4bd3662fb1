"""Benchmark suite: 14 classical test functions in 30 dimensions.

All functions are minimization problems with optimum value 0. Each entry
carries its search bounds and modality/separability traits. Evaluators are
pure except the quartic noise function, which adds one uniform[0,1) sample
per call drawn from the caller's random stream.
"""

import numpy as np

from .errors import ConfigurationError


class PenaltyParams:
    """Arguments (a, k, m) of the boundary penalty u(x, a, k, m)."""

    def __init__(self, a=10.0, k=100.0, m=4.0):
        if a <= 0 or k <= 0 or m < 1:
            raise ConfigurationError("penalty params require a > 0, k > 0, m >= 1")
        self.a = a
        self.k = k
        self.m = m


def penalty_u(x, p=PenaltyParams()):
    """Piecewise boundary penalty: k(x-a)^m above a, k(-x-a)^m below -a, else 0.

    Accepts scalars or arrays.
    """
    x = np.asarray(x, dtype=float)
    above = np.where(x > p.a, p.k * (x - p.a) ** p.m, 0.0)
    below = np.where(x < -p.a, p.k * (-x - p.a) ** p.m, 0.0)
    out = above + below
    return float(out) if out.ndim == 0 else out


def y_transform(x):
    """Variable shift y = 1 + (x + 1)/4 used by the first penalized function."""
    return 1.0 + (np.asarray(x, dtype=float) + 1.0) / 4.0


# --- evaluators ------------------------------------------------------------

def _sphere(x, rng=None):
    return float(x @ x)


def _schwefel_2_22(x, rng=None):
    ax = np.abs(x)
    return float(np.sum(ax) + np.prod(ax))


def _schwefel_1_2(x, rng=None):
    return float(np.sum(np.cumsum(x) ** 2))


def _schwefel_2_21(x, rng=None):
    return float(np.max(np.abs(x)))


def _rosenbrock(x, rng=None):
    return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (x[:-1] - 1.0) ** 2))


def _step(x, rng=None):
    s = np.floor(x + 0.5)
    return float(s @ s)


def _step_quadratic(x, rng=None):
    # smooth variant of the step function (no floor)
    s = x + 0.5
    return float(s @ s)


def _quartic_noise(x, rng=None):
    if rng is None:
        raise ConfigurationError("f7 is noisy and needs a random stream")
    i = np.arange(1.0, x.size + 1.0)
    return float(np.sum(i * x ** 4) + rng.random())


_SCHWEFEL_OFFSET = 12569.486618164879  # shifts the 30-D minimum to ~0


def _schwefel_2_26(x, rng=None):
    return float(-np.sum(x * np.sin(np.sqrt(np.abs(x)))) + _SCHWEFEL_OFFSET)


def _rastrigin(x, rng=None):
    return float(np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x) + 10.0))


def _ackley(x, rng=None):
    n = x.size
    return float(
        -20.0 * np.exp(-0.2 * np.sqrt(np.sum(x * x) / n))
        - np.exp(np.sum(np.cos(2.0 * np.pi * x)) / n)
        + 20.0
        + np.e
    )


def _griewank(x, rng=None):
    i = np.arange(1.0, x.size + 1.0)
    return float(np.sum(x * x) / 4000.0 - np.prod(np.cos(x / np.sqrt(i))) + 1.0)


def _penalized_1(x, rng=None):
    n = x.size
    y = y_transform(x)
    core = (
        10.0 * np.sin(np.pi * y[0]) ** 2
        + np.sum((y[:-1] - 1.0) ** 2 * (1.0 + 10.0 * np.sin(np.pi * y[1:]) ** 2))
        + (y[-1] - 1.0) ** 2
    )
    return float(np.pi / n * core + np.sum(penalty_u(x)))


def _penalized_2(x, rng=None):
    core = (
        np.sin(3.0 * np.pi * x[0]) ** 2
        + np.sum((x[:-1] - 1.0) ** 2 * (1.0 + np.sin(3.0 * np.pi * x[1:]) ** 2))
        + (x[-1] - 1.0) ** 2 * (1.0 + np.sin(2.0 * np.pi * x[-1]) ** 2)
    )
    return float(0.1 * core + np.sum(penalty_u(x)))


def _bohachevsky(x, rng=None):
    a, b = x[:-1], x[1:]
    return float(
        np.sum(
            a * a
            + 2.0 * b * b
            - 0.3 * np.cos(3.0 * np.pi * a)
            - 0.4 * np.cos(4.0 * np.pi * b)
            + 0.7
        )
    )


class BenchmarkFn:
    """A benchmark function: evaluator plus bounds, dimension, and traits."""

    def __init__(self, fn_id, name, evaluator, lower, upper, modality, separable,
                 dim=30, noisy=False, optimum_value=0.0):
        self.id = fn_id
        self.name = name
        self._evaluator = evaluator
        self.lower = float(lower)
        self.upper = float(upper)
        self.modality = modality  # "unimodal" | "multimodal"
        self.separable = bool(separable)
        self.dim = int(dim)
        self.noisy = bool(noisy)
        self.optimum_value = float(optimum_value)

    def evaluate(self, x, rng=None):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ConfigurationError(
                f"{self.id} expects a vector of length {self.dim}, got shape {x.shape}"
            )
        return self._evaluator(x, rng)

    # convenience so a BenchmarkFn can be called like a plain function
    __call__ = evaluate

    @property
    def trait_class(self):
        mod = self.modality
        sep = "separable" if self.separable else "nonseparable"
        return f"{mod} {sep}"

    def describe(self):
        """Machine-readable metadata record."""
        return {
            "id": self.id,
            "name": self.name,
            "dim": self.dim,
            "lower": self.lower,
            "upper": self.upper,
            "modality": self.modality,
            "separable": self.separable,
            "noisy": self.noisy,
            "optimum_value": self.optimum_value,
        }

    def __repr__(self):
        return f"BenchmarkFn({self.id}: {self.name}, [{self.lower}, {self.upper}]^{self.dim})"


FUNCTION_IDS = [f"f{i}" for i in range(1, 15)]

# class name -> member function ids (as used by the report groupings)
FUNCTION_CLASSES = {
    "unimodal separable": ["f1", "f2", "f4", "f6", "f7"],
    "unimodal nonseparable": ["f3"],
    "multimodal separable": ["f8", "f9", "f14"],
    "multimodal nonseparable": ["f5", "f10", "f11", "f12", "f13"],
}


def catalog(quadratic_step=False):
    """Build the 14-function suite.

    quadratic_step swaps f6 for its smooth quadratic form on [-1.28, 1.28]
    instead of the default floor form on [-100, 100].
    """
    fns = [
        BenchmarkFn("f1", "sphere", _sphere, -100, 100, "unimodal", True),
        BenchmarkFn("f2", "schwefel-2.22", _schwefel_2_22, -10, 10, "unimodal", True),
        BenchmarkFn("f3", "schwefel-1.2", _schwefel_1_2, -100, 100, "unimodal", False),
        BenchmarkFn("f4", "schwefel-2.21", _schwefel_2_21, -100, 100, "unimodal", True),
        BenchmarkFn("f5", "rosenbrock", _rosenbrock, -30, 30, "multimodal", False),
        BenchmarkFn("f6", "step", _step, -100, 100, "unimodal", True)
        if not quadratic_step
        else BenchmarkFn("f6", "step-quadratic", _step_quadratic, -1.28, 1.28, "unimodal", True),
        BenchmarkFn("f7", "quartic-noise", _quartic_noise, -1.28, 1.28, "unimodal", True, noisy=True),
        BenchmarkFn("f8", "schwefel-2.26", _schwefel_2_26, -500, 500, "multimodal", True),
        BenchmarkFn("f9", "rastrigin", _rastrigin, -5.12, 5.12, "multimodal", True),
        BenchmarkFn("f10", "ackley", _ackley, -30, 30, "multimodal", False),
        BenchmarkFn("f11", "griewank", _griewank, -600, 600, "multimodal", False),
        BenchmarkFn("f12", "penalized-1", _penalized_1, -50, 50, "multimodal", False),
        BenchmarkFn("f13", "penalized-2", _penalized_2, -50, 50, "multimodal", False),
        BenchmarkFn("f14", "bohachevsky", _bohachevsky, -100, 100, "multimodal", True),
    ]
    return fns


def by_id(fn_id, quadratic_step=False):
    for fn in catalog(quadratic_step=quadratic_step):
        if fn.id == fn_id:
            return fn
    raise ConfigurationError(
        f"unknown function {fn_id!r}; valid ids: {', '.join(FUNCTION_IDS)}"
    )


def class_of(fn_id):
    for cls, members in FUNCTION_CLASSES.items():
        if fn_id in members:
            return cls
    raise ConfigurationError(f"unknown function {fn_id!r}")
