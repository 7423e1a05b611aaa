# core/distfit.py
"""Discrete degree-distribution models, maximum-likelihood fits and
pairwise loglikelihood-ratio model selection.

All four candidates live on the integers x >= xmin. The power law is
normalised with the Hurwitz zeta function; the other three are continuous
survival functions S discretised on unit intervals,

    p(x) = (S(x) - S(x + 1)) / S(xmin),

evaluated in log space.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Literal

import numpy as np
from scipy import optimize, special, stats

from core.errors import (
    ConvergenceError,
    DegenerateFitError,
    InvalidArgumentError,
    InvalidComparisonError,
)
from logs.logger import get_logger, kv

logger = get_logger(__name__)

ModelKind = Literal["exponential", "powerlaw", "lognormal", "stretched_exponential"]
KINDS: tuple[ModelKind, ...] = ("exponential", "powerlaw", "lognormal", "stretched_exponential")
PARAMETER_COUNT: dict[str, int] = {"exponential": 1, "powerlaw": 1, "lognormal": 2, "stretched_exponential": 2}

MIN_OBSERVATIONS = 10
ALPHA_BOUNDS = (1.0 + 1e-6, 50.0)
MU_BOUNDS = (-100.0, 100.0)
SIGMA_BOUNDS = (1e-3, 50.0)
BETA_BOUNDS = (0.01, 1.0)
POWERLAW_TABLE = 10_000
LOG_TAIL_CUTOFF = -37.0
MAX_TABLE = 2 ** 22
_PENALTY = 1e300
_LN2 = math.log(2.0)


def _log1mexp(a: np.ndarray) -> np.ndarray:
    """log(1 - exp(a)) for a <= 0."""
    a = np.asarray(a, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(a > -_LN2, np.log(-np.expm1(a)), np.log1p(-np.exp(a)))


# unnormalised log survival functions, log S(x)

def _log_s_exponential(x, p):
    return -p["lambda"] * x


def _log_s_powerlaw(x, p):
    return np.log(special.zeta(p["alpha"], x))


def _log_s_lognormal(x, p):
    return stats.norm.logsf((np.log(x) - p["mu"]) / p["sigma"])


def _log_s_stretched(x, p):
    return -np.power(p["lambda"] * x, p["beta"])


_LOG_SURVIVAL = {
    "exponential": _log_s_exponential,
    "powerlaw": _log_s_powerlaw,
    "lognormal": _log_s_lognormal,
    "stretched_exponential": _log_s_stretched,
}


def _log_pmf(kind: str, x: np.ndarray, p: dict[str, float], xmin: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if kind == "exponential":
            lam = p["lambda"]
            return np.log(-np.expm1(-lam)) - lam * (x - xmin)
        if kind == "powerlaw":
            return -p["alpha"] * np.log(x) - np.log(special.zeta(p["alpha"], xmin))
        if kind == "lognormal":
            mu, sigma = p["mu"], p["sigma"]
            za = (np.log(x) - mu) / sigma
            zb = (np.log(x + 1.0) - mu) / sigma
            # mass left of the median is taken from the cdf side to keep precision
            lcdf_a, lcdf_b = stats.norm.logcdf(za), stats.norm.logcdf(zb)
            lsf_a, lsf_b = stats.norm.logsf(za), stats.norm.logsf(zb)
            left = lcdf_b + _log1mexp(lcdf_a - lcdf_b)
            right = lsf_a + _log1mexp(lsf_b - lsf_a)
            norm = stats.norm.logsf((math.log(xmin) - mu) / sigma)
            return np.where(zb <= 0, left, right) - norm
        if kind == "stretched_exponential":
            lam, beta = p["lambda"], p["beta"]
            head = np.power(lam * x, beta)
            step = head * np.expm1(beta * np.log1p(1.0 / x))
            return -head + _log1mexp(-step) + (lam * xmin) ** beta
    raise InvalidArgumentError(f"unknown model kind {kind!r}")


@dataclass(frozen=True)
class _Tail:
    values: np.ndarray
    counts: np.ndarray
    xmin: int

    @classmethod
    def of(cls, degrees: np.ndarray, xmin: int) -> "_Tail":
        values, counts = np.unique(degrees[degrees >= xmin], return_counts=True)
        return cls(values.astype(np.float64), counts.astype(np.float64), int(xmin))

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    def loglikelihood(self, kind: str, params: dict[str, float]) -> float:
        ll = float(np.dot(self.counts, _log_pmf(kind, self.values, params, self.xmin)))
        return ll if math.isfinite(ll) else -math.inf


@dataclass(frozen=True)
class CandidateModel:
    kind: ModelKind
    params: dict[str, float]
    xmin: int = 1
    loglikelihood: float = math.nan
    n_tail: int = 0

    def __post_init__(self):
        p = self.params
        if self.kind not in KINDS:
            raise InvalidArgumentError(f"unknown model kind {self.kind!r}")
        if self.xmin < 1:
            raise InvalidArgumentError("xmin must be an integer >= 1")
        checks = {
            "exponential": lambda: p["lambda"] > 0,
            "powerlaw": lambda: p["alpha"] > 1,
            "lognormal": lambda: p["sigma"] > 0 and math.isfinite(p["mu"]),
            "stretched_exponential": lambda: p["lambda"] > 0 and 0 < p["beta"] <= 1,
        }
        try:
            valid = checks[self.kind]()
        except KeyError as e:
            raise InvalidArgumentError(f"{self.kind} model is missing parameter {e}") from None
        if not valid:
            raise InvalidArgumentError(f"parameters out of range for {self.kind}: {p}")

    @property
    def n_params(self) -> int:
        return PARAMETER_COUNT[self.kind]

    def log_sf(self, x) -> np.ndarray:
        """log P(X >= x | X >= xmin)."""
        x = np.asarray(x, dtype=np.float64)
        survival = _LOG_SURVIVAL[self.kind]
        with np.errstate(divide="ignore"):
            return survival(x, self.params) - survival(float(self.xmin), self.params)

    def log_pmf(self, x, support: int | None = None) -> np.ndarray:
        """Log probabilities on x >= xmin, renormalised to x >= ``support`` if given."""
        values = _log_pmf(self.kind, x, self.params, self.xmin)
        if support is not None and support > self.xmin:
            values = values - self.log_sf(float(support))
        return values

    def pmf(self, x) -> np.ndarray:
        return np.exp(self.log_pmf(x))

    def cdf(self, x) -> np.ndarray:
        return -np.expm1(self.log_sf(np.asarray(x, dtype=np.float64) + 1.0))

    def tail_mass(self, x) -> float:
        return float(np.exp(self.log_sf(float(x))))

    def loglikelihood_of(self, degrees: Iterable[int]) -> float:
        return _Tail.of(np.asarray(list(degrees), dtype=np.int64), self.xmin).loglikelihood(self.kind, self.params)

    def _table_bound(self) -> int:
        if self.kind == "powerlaw":
            return max(10 * self.xmin, POWERLAW_TABLE)
        bound = max(2 * self.xmin, 64)
        while bound < MAX_TABLE and float(self.log_sf(float(bound))) > LOG_TAIL_CUTOFF:
            bound *= 2
        return bound

    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        bound = self._table_bound()
        support = np.arange(self.xmin, bound + 1, dtype=np.float64)
        table = self.cdf(support)
        u = rng.random(size)
        at = np.searchsorted(table, u, side="right")
        draws = np.empty(size, dtype=np.int64)
        inside = at < len(support)
        draws[inside] = support[at[inside]].astype(np.int64)
        beyond = ~inside
        if np.any(beyond):
            if self.kind == "powerlaw":
                # continuous approximation for the far tail
                top = table[-1]
                v = (u[beyond] - top) / (1.0 - top)
                far = np.floor((bound + 0.5) * np.power(1.0 - v, -1.0 / (self.params["alpha"] - 1.0)) + 0.5)
                draws[beyond] = np.minimum(far, np.iinfo(np.int64).max // 2).astype(np.int64)
            else:
                draws[beyond] = bound
        return draws

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "params": dict(self.params),
            "xmin": self.xmin,
            "loglikelihood": self.loglikelihood,
            "n_tail": self.n_tail,
        }


@dataclass(frozen=True)
class Comparison:
    a: ModelKind
    b: ModelKind
    ratio: float
    p_value: float
    n: int
    sigma: float

    @property
    def normalized_ratio(self) -> float:
        if self.sigma == 0:
            return 0.0 if self.ratio == 0 else math.copysign(math.inf, self.ratio)
        return self.ratio / (self.sigma * math.sqrt(self.n))

    def significant(self, significance: float) -> bool:
        return self.p_value < significance

    @property
    def favored(self) -> ModelKind | None:
        if self.ratio > 0:
            return self.a
        if self.ratio < 0:
            return self.b
        return None

    def to_dict(self) -> dict:
        return {
            "a": self.a, "b": self.b, "ratio": self.ratio, "normalized_ratio": self.normalized_ratio,
            "p_value": self.p_value, "n": self.n,
        }


@dataclass(frozen=True)
class FitResult:
    n: int
    models: dict[str, CandidateModel]
    comparisons: tuple[Comparison, ...]
    best: ModelKind
    significance: float
    inconclusive: bool = False
    fallback: bool = False
    xmin: int = field(default=1)

    def comparison(self, a: str, b: str) -> Comparison:
        for c in self.comparisons:
            if (c.a, c.b) == (a, b):
                return c
            if (c.a, c.b) == (b, a):
                return Comparison(a, b, -c.ratio, c.p_value, c.n, c.sigma)  # type: ignore[arg-type]
        raise KeyError((a, b))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "xmin": self.xmin,
            "significance": self.significance,
            "best": self.best,
            "inconclusive": self.inconclusive,
            "fallback": self.fallback,
            "models": {kind: model.to_dict() for kind, model in self.models.items()},
            "comparisons": [
                {**c.to_dict(), "significant": c.significant(self.significance)} for c in self.comparisons
            ],
        }


# fitting

def check_degrees(degrees: Iterable[int]) -> np.ndarray:
    data = np.asarray(list(degrees), dtype=np.float64)
    if data.ndim != 1 or len(data) < MIN_OBSERVATIONS:
        raise InvalidArgumentError(f"need at least {MIN_OBSERVATIONS} observations, got {len(data)}")
    if not np.all(np.isfinite(data)) or np.any(data < 1) or np.any(data != np.floor(data)):
        raise InvalidArgumentError("degrees must be integers >= 1")
    if np.all(data == data[0]):
        raise DegenerateFitError(f"all {len(data)} observations equal {int(data[0])}")
    return data.astype(np.int64)


def _tail(data: np.ndarray, xmin: int) -> _Tail:
    tail = _Tail.of(data, xmin)
    if len(tail.values) < 2:
        raise DegenerateFitError(f"fewer than two distinct values at or above xmin={xmin}")
    return tail


def _fit_exponential(tail: _Tail) -> dict[str, float]:
    excess = float(np.dot(tail.counts, tail.values - tail.xmin)) / tail.n
    return {"lambda": math.log1p(1.0 / excess)}


def _fit_powerlaw(tail: _Tail) -> dict[str, float]:
    sum_log = float(np.dot(tail.counts, np.log(tail.values)))
    n = tail.n

    def nll(alpha: float) -> float:
        return alpha * sum_log + n * math.log(special.zeta(alpha, tail.xmin))

    result = optimize.minimize_scalar(nll, bounds=ALPHA_BOUNDS, method="bounded")
    if not result.success:
        raise ConvergenceError("power-law exponent search did not converge",
                               {"xmin": tail.xmin, "message": result.message})
    return {"alpha": float(result.x)}


def _fit_lognormal(tail: _Tail) -> dict[str, float]:
    logs = np.log(tail.values)
    mean = float(np.dot(tail.counts, logs)) / tail.n
    spread = math.sqrt(max(float(np.dot(tail.counts, (logs - mean) ** 2)) / tail.n, 0.0)) or 1.0
    spread = min(max(spread, SIGMA_BOUNDS[0]), SIGMA_BOUNDS[1])

    def nll(theta: np.ndarray) -> float:
        ll = tail.loglikelihood("lognormal", {"mu": float(theta[0]), "sigma": math.exp(theta[1])})
        return -ll if math.isfinite(ll) else _PENALTY

    result = optimize.minimize(
        nll,
        x0=np.array([mean, math.log(spread)]),
        method="L-BFGS-B",
        bounds=[MU_BOUNDS, (math.log(SIGMA_BOUNDS[0]), math.log(SIGMA_BOUNDS[1]))],
        options={"maxiter": 500},
    )
    diagnostics = {"iterations": int(result.nit), "message": str(result.message),
                   "mu": float(result.x[0]), "sigma": math.exp(result.x[1])}
    if result.status == 1 or not np.all(np.isfinite(result.x)) or result.fun >= _PENALTY:
        raise ConvergenceError("lognormal fit did not converge", diagnostics)
    if not result.success:
        logger.debug(kv("lognormal fit stopped early", **diagnostics))
    return {"mu": float(result.x[0]), "sigma": math.exp(float(result.x[1]))}


def _fit_stretched(tail: _Tail) -> dict[str, float]:
    n = tail.n

    def profile(beta: float) -> tuple[float, float]:
        """Best (log lambda, nll) for a fixed beta."""
        excess = float(np.dot(tail.counts, tail.values ** beta - tail.xmin ** beta))
        guess = (math.log(n) - math.log(excess)) / beta

        def nll(log_lam: float) -> float:
            ll = tail.loglikelihood("stretched_exponential", {"lambda": math.exp(log_lam), "beta": beta})
            return -ll if math.isfinite(ll) else _PENALTY

        inner = optimize.minimize_scalar(nll, bounds=(guess - 5.0, guess + 5.0), method="bounded")
        if not inner.success:
            raise ConvergenceError("stretched-exponential rate search did not converge",
                                   {"beta": beta, "message": inner.message})
        return float(inner.x), float(inner.fun)

    outer = optimize.minimize_scalar(lambda b: profile(b)[1], bounds=BETA_BOUNDS, method="bounded")
    if not outer.success or outer.fun >= _PENALTY:
        raise ConvergenceError("stretched-exponential shape search did not converge",
                               {"message": outer.message, "beta": float(outer.x)})
    beta = float(outer.x)
    log_lam, _ = profile(beta)
    return {"lambda": math.exp(log_lam), "beta": beta}


_FITTERS = {
    "exponential": _fit_exponential,
    "powerlaw": _fit_powerlaw,
    "lognormal": _fit_lognormal,
    "stretched_exponential": _fit_stretched,
}


def _fit_at(data: np.ndarray, kind: str, xmin: int) -> CandidateModel:
    tail = _tail(data, xmin)
    params = _FITTERS[kind](tail)
    model = CandidateModel(kind, params, xmin, tail.loglikelihood(kind, params), tail.n)  # type: ignore[arg-type]
    logger.debug(kv("fit", kind=kind, xmin=xmin, n_tail=tail.n, ll=model.loglikelihood, **params))
    return model


def _ks_distance(model: CandidateModel, tail: _Tail) -> float:
    empirical = np.cumsum(tail.counts) / tail.n
    return float(np.max(np.abs(empirical - model.cdf(tail.values))))


def select_xmin(data: np.ndarray, min_tail_fraction: float = 0.5) -> CandidateModel:
    """Power-law fit whose xmin minimises the KS distance.

    Candidate xmin values are the observed values that keep at least
    ``min_tail_fraction`` of the sample in the tail.
    """
    if not 0 < min_tail_fraction <= 1:
        raise InvalidArgumentError("min_tail_fraction must be in (0, 1]")
    values = np.unique(data)
    need = min_tail_fraction * len(data)
    best: tuple[float, CandidateModel] | None = None
    for xmin in values[:-1].tolist():
        if np.count_nonzero(data >= xmin) < need:
            break
        model = _fit_at(data, "powerlaw", int(xmin))
        distance = _ks_distance(model, _Tail.of(data, int(xmin)))
        if best is None or distance < best[0]:
            best = (distance, model)
    if best is None:
        raise DegenerateFitError("no admissible xmin for the power-law tail")
    logger.debug(kv("xmin scan", xmin=best[1].xmin, ks=best[0], candidates=len(values)))
    return best[1]


def fit_model(degrees: Iterable[int], kind: ModelKind, xmin: int | None = None,
              min_tail_fraction: float = 0.5) -> CandidateModel:
    """MLE fit of one model.

    The power law picks its own xmin by KS scan unless one is given; the other
    models default to xmin = 1.
    """
    if kind not in KINDS:
        raise InvalidArgumentError(f"unknown model kind {kind!r}; known: {KINDS}")
    data = check_degrees(degrees)
    if kind == "powerlaw" and xmin is None:
        return select_xmin(data, min_tail_fraction)
    return _fit_at(data, kind, 1 if xmin is None else int(xmin))


def _compare(data: np.ndarray, a: CandidateModel, b: CandidateModel) -> Comparison:
    support = max(a.xmin, b.xmin)
    values, counts = np.unique(data[data >= support], return_counts=True)
    if len(values) == 0:
        raise InvalidComparisonError(f"no observations at or above the common xmin {support}")
    diff = a.log_pmf(values, support) - b.log_pmf(values, support)
    if not np.all(np.isfinite(diff)):
        raise InvalidComparisonError(f"{a.kind} or {b.kind} gives zero probability to an observation")
    n = int(counts.sum())
    ratio = float(np.dot(counts, diff))
    mean = ratio / n
    sigma = math.sqrt(float(np.dot(counts, (diff - mean) ** 2)) / n)
    if sigma == 0:
        p_value = 1.0 if ratio == 0 else 0.0
    else:
        p_value = float(special.erfc(abs(ratio) / (sigma * math.sqrt(2.0 * n))))
    return Comparison(a.kind, b.kind, ratio, p_value, n, sigma)


def compare_models(degrees: Iterable[int], a: CandidateModel, b: CandidateModel) -> Comparison:
    """Vuong test on the common support; ratio > 0 favours ``a``."""
    return _compare(np.asarray(list(degrees), dtype=np.int64), a, b)


def select_best(models: dict[str, CandidateModel], comparisons: Iterable[Comparison],
                significance: float) -> tuple[str, bool, bool]:
    """(best kind, inconclusive, fallback).

    Undefeated models are those that lose no significant comparison; among
    them the fewest parameters win, then the highest loglikelihood.
    """
    comparisons = list(comparisons)
    by_ll = sorted(models, key=lambda k: (-models[k].loglikelihood, KINDS.index(k)))
    decided = [c for c in comparisons if c.significant(significance) and c.favored is not None]
    if not decided:
        return by_ll[0], True, False
    losers = {c.b if c.favored == c.a else c.a for c in decided}
    undefeated = [k for k in by_ll if k not in losers]
    if not undefeated:
        return by_ll[0], False, True
    best = min(undefeated, key=lambda k: (models[k].n_params, -models[k].loglikelihood, KINDS.index(k)))
    return best, False, False


def best_fit(degrees: Iterable[int], significance: float = 0.1, min_tail_fraction: float = 0.5) -> FitResult:
    """Fit all four models on the power law's tail and compare them pairwise."""
    if not 0 < significance < 1:
        raise InvalidArgumentError("significance must lie in (0, 1)")
    data = check_degrees(degrees)
    powerlaw = select_xmin(data, min_tail_fraction)
    models: dict[str, CandidateModel] = {}
    for kind in KINDS:
        models[kind] = powerlaw if kind == "powerlaw" else _fit_at(data, kind, powerlaw.xmin)
    comparisons = tuple(
        _compare(data, models[a], models[b]) for i, a in enumerate(KINDS) for b in KINDS[i + 1:]
    )
    best, inconclusive, fallback = select_best(models, comparisons, significance)
    if inconclusive or fallback:
        logger.warning(kv("best fit not decisive", best=best, inconclusive=inconclusive, fallback=fallback, n=len(data)))
    else:
        logger.info(kv("best fit", best=best, xmin=powerlaw.xmin, n=len(data)))
    return FitResult(
        n=len(data),
        models=models,
        comparisons=comparisons,
        best=best,  # type: ignore[arg-type]
        significance=significance,
        inconclusive=inconclusive,
        fallback=fallback,
        xmin=powerlaw.xmin,
    )
