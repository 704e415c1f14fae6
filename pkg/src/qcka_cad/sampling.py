"""Classical sampling-strategy bounds for fixed-size random subsets.

The protocol estimates an error rate on a random size-m subset of N
positions and needs the observed rate to be within delta of the rate on
the unobserved complement, except with a failure probability that decays
like ``2 exp(-delta^2 m N / (N + 2))``.  This module provides that bound,
its inverse (the delta needed for a target failure probability), and an
empirical estimator used as an oracle against the bound on small
instances.

Failure probabilities reach 1e-72 in production parameter ranges, so the
bound is also exposed in log space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, islice

import numpy as np

from .bitcore import BitString

__all__ = [
    "SamplingParams",
    "sampling_failure_log",
    "epsilon_cl_bound",
    "epsilon_cl_log_bound",
    "delta_from_epsilon",
    "empirical_sampling_failure",
]

EXHAUSTIVE_SUBSET_LIMIT = 10**6
_CHUNK = 4096


@dataclass(frozen=True)
class SamplingParams:
    """Population size N, sample size m < N/2, and deviation delta."""

    population: int
    sample_size: int
    delta: float

    def __post_init__(self):
        if self.population < 2:
            raise ValueError("population must be at least 2")
        if not 1 <= self.sample_size:
            raise ValueError("sample size must be positive")
        if 2 * self.sample_size >= self.population:
            raise ValueError("sample size must satisfy m < N/2")
        if not 0.0 < self.delta <= 1.0:
            raise ValueError("delta must lie in (0, 1]")


def sampling_failure_log(population: int, sample_size: int, delta: float) -> float:
    """Natural log of the sampling failure bound 2 exp(-delta^2 m N/(N+2)).

    Raw kernel: accepts any delta > 0, including values above 1 where the
    bound is vacuous, so it is an exact log-space inverse of
    :func:`delta_from_epsilon` everywhere.
    """
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    return math.log(2.0) - delta * delta * sample_size * population / (population + 2.0)


def epsilon_cl_log_bound(params: SamplingParams) -> float:
    """Natural log of the sampling failure bound for a parameter set."""
    return sampling_failure_log(params.population, params.sample_size, params.delta)


def epsilon_cl_bound(params: SamplingParams) -> float:
    """The sampling failure bound, clamped to 1 for reporting."""
    return min(1.0, math.exp(epsilon_cl_log_bound(params)))


def delta_from_epsilon(population: int, sample_size: int, epsilon: float) -> float:
    """Deviation delta with failure bound epsilon^2 for the given sample.

    Chosen so that ``epsilon_cl_bound`` at the returned delta equals
    epsilon^2, i.e. the square root of the failure bound equals epsilon.
    Evaluated via log(epsilon) directly, so epsilon as small as 1e-36 is
    safe.
    """
    if 2 * sample_size >= population:
        raise ValueError("sample size must satisfy m < N/2")
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    log_term = math.log(2.0) - 2.0 * math.log(epsilon)  # ln(2 / eps^2)
    return math.sqrt((population + 2.0) * log_term / (sample_size * population))


def _exhaustive_failure(bits: np.ndarray, m: int, delta: float) -> float:
    n_pop = bits.size
    rest = n_pop - m
    failures = 0
    total = 0
    gen = combinations(range(n_pop), m)
    while True:
        chunk = list(islice(gen, _CHUNK))
        if not chunk:
            break
        idx = np.asarray(chunk, dtype=np.int64)
        wt_t = bits[idx].sum(axis=1)
        wt_rest = bits.sum() - wt_t
        gap = np.abs(wt_t / m - wt_rest / rest)
        failures += int((gap > delta).sum())
        total += len(chunk)
    return failures / total


def _monte_carlo_failure(
    bits: np.ndarray, m: int, delta: float, trials: int, seed: int
) -> float:
    n_pop = bits.size
    rest = n_pop - m
    total_weight = bits.sum()
    # Fixed-size chunks with spawned substreams keep the estimate
    # deterministic while allowing chunks to be evaluated concurrently.
    streams = np.random.SeedSequence(seed).spawn(math.ceil(trials / _CHUNK))
    failures = 0
    done = 0
    for stream in streams:
        size = min(_CHUNK, trials - done)
        rng = np.random.Generator(np.random.Philox(stream))
        keys = rng.random((size, n_pop))
        # The m smallest keys per row form a uniform random m-subset.
        idx = np.argpartition(keys, m - 1, axis=1)[:, :m]
        wt_t = bits[idx].sum(axis=1)
        gap = np.abs(wt_t / m - (total_weight - wt_t) / rest)
        failures += int((gap > delta).sum())
        done += size
    return failures / trials


def empirical_sampling_failure(
    q: BitString,
    sample_size: int,
    delta: float,
    *,
    trials: int = 100_000,
    seed: int = 0,
    exhaustive_limit: int = EXHAUSTIVE_SUBSET_LIMIT,
) -> float:
    """Probability that a random size-m subset's weight gap exceeds delta.

    For a fixed word ``q`` of length N, draws uniform size-``sample_size``
    subsets t and reports how often ``|w(q_t) - w(q_{-t})| > delta``.
    Enumerates all subsets exactly when there are at most
    ``exhaustive_limit`` of them, otherwise falls back to ``trials``
    seeded Monte Carlo draws.
    """
    n_pop = len(q)
    if 2 * sample_size >= n_pop:
        raise ValueError("sample size must satisfy m < N/2")
    bits = q.to_array().astype(np.int64)
    if math.comb(n_pop, sample_size) <= exhaustive_limit:
        return _exhaustive_failure(bits, sample_size, delta)
    if trials < 1:
        raise ValueError("trials must be positive for Monte Carlo estimation")
    return _monte_carlo_failure(bits, sample_size, delta, trials, seed)
