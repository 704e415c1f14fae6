"""Monte Carlo simulation of the protocol under i.i.d. noise.

One trial simulates the classical shadow of a full protocol execution:
the X-basis test statistic over the sampled blocks, Z-basis raw keys for
the remaining blocks, and the two-bit parity sieve that accepts a block
only when every party announces the same parity.  The channel model is
i.i.d.: an X-basis flip with probability ``x_error`` per round half, and
an independent Z-basis flip with probability ``z_errors[j]`` per round
half between the reference party and party j+1.

Blocks are exchangeable under this model, so the protocol's initial
random permutation is statistically inert and omitted.  Per-party X
outcomes are never materialized either: only the announced XOR matters
and it is a Bernoulli draw with the block-error probability.

Trials use counter-based Philox streams keyed on (seed, trial index), so
any subset of trials can be reproduced independently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "NoiseModel",
    "ProtocolParams",
    "TrialOutcome",
    "FieldStats",
    "analytic_qx",
    "analytic_pa",
    "postcad_error_rates",
    "run_trial",
    "aggregate",
]


@dataclass(frozen=True)
class NoiseModel:
    """X-basis flip rate and per-party Z-basis flip rates, all in [0, 1/2]."""

    x_error: float
    z_errors: tuple

    def __post_init__(self):
        object.__setattr__(self, "z_errors", tuple(float(z) for z in self.z_errors))
        if not 0.0 <= self.x_error <= 0.5:
            raise ValueError("x_error must lie in [0, 0.5]")
        if not self.z_errors:
            raise ValueError("at least one Z-error rate is required")
        if any(not 0.0 <= z <= 0.5 for z in self.z_errors):
            raise ValueError("every z_error must lie in [0, 0.5]")


@dataclass(frozen=True)
class ProtocolParams:
    """Public protocol parameters.

    ``half_signals`` is N, half the total signal count: the protocol
    consumes 2N signals arranged as N two-round blocks.  ``test_size``
    blocks are measured in X for testing, the remaining N - test_size in
    Z for key material.
    """

    bobs: int
    half_signals: int
    test_size: int
    epsilon: float
    seed: int = 0

    def __post_init__(self):
        if self.bobs < 1:
            raise ValueError("need at least one non-reference party")
        if self.test_size < 1:
            raise ValueError("test size must be positive")
        if 2 * self.test_size >= self.half_signals:
            raise ValueError("test size must satisfy m < N/2")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0, 1)")

    @property
    def key_blocks(self) -> int:
        """Number of key blocks n = N - m."""
        return self.half_signals - self.test_size

    @property
    def total_signals(self) -> int:
        return 2 * self.half_signals


@dataclass(frozen=True)
class TrialOutcome:
    """Statistics of one simulated execution.

    ``postcad_error`` holds each party's disagreement rate with the
    reference party on the kept bits; it is NaN when no block survived
    the sieve, as is ``keys_equal_fraction``.
    """

    qx_observed: float
    accepted: int
    rejected: int
    postcad_error: tuple
    keys_equal_fraction: float


def analytic_qx(x_error: float) -> float:
    """Expected X-basis block error rate 2Q(1-Q) for per-half flip rate Q."""
    if not 0.0 <= x_error <= 0.5:
        raise ValueError("x_error must lie in [0, 0.5]")
    return 2.0 * x_error * (1.0 - x_error)


def analytic_pa(z_errors) -> float:
    """Expected sieve acceptance probability: prod_j (QZ_j^2 + (1-QZ_j)^2)."""
    z_errors = tuple(z_errors)
    if not z_errors:
        raise ValueError("at least one Z-error rate is required")
    out = 1.0
    for z in z_errors:
        out *= z * z + (1.0 - z) * (1.0 - z)
    return out


def postcad_error_rates(z_errors, formula: str = "conservative") -> tuple:
    """Per-party kept-bit error rates after the sieve.

    ``"independent"`` is the exact conditional rate under this module's
    i.i.d. noise model, QZ_j^2 / (QZ_j^2 + (1-QZ_j)^2): conditioning on
    party j's own parity match only, since the other parties' noise is
    independent of party j's bits.  ``"conservative"`` divides by the
    full acceptance probability instead, QZ_j^2 / p_a, which is larger
    whenever there are two or more parties with noise; the published
    evaluation uses this variant.  The two coincide for a single party.
    """
    z_errors = tuple(z_errors)
    if formula == "conservative":
        pa = analytic_pa(z_errors)
        return tuple(z * z / pa for z in z_errors)
    if formula == "independent":
        return tuple(z * z / (z * z + (1.0 - z) * (1.0 - z)) for z in z_errors)
    raise ValueError(f"unknown post-sieve error formula {formula!r}")


def _trial_generator(seed: int, trial_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(trial_index,))
    return np.random.Generator(np.random.Philox(ss))


def run_trial(params: ProtocolParams, noise: NoiseModel, trial_index: int = 0) -> TrialOutcome:
    """Simulate one execution and return its sifted-key statistics.

    Error correction and privacy amplification are accounting-only in the
    key-rate analysis and are not executed here.
    """
    if len(noise.z_errors) != params.bobs:
        raise ValueError(
            f"noise model has {len(noise.z_errors)} Z rates for {params.bobs} parties"
        )
    rng = _trial_generator(params.seed, trial_index)
    m, n, q = params.test_size, params.key_blocks, noise.x_error

    # Test blocks: the announced statistic is the XOR of the two halves'
    # X-parity errors, a single Bernoulli per half.
    err_left = rng.random(m) < q
    err_right = rng.random(m) < q
    qx_observed = float(np.mean(err_left ^ err_right))

    # Key blocks: reference party's raw bits, then each party's bits as
    # reference XOR an independent flip per half.
    ref_left = rng.integers(0, 2, size=n, dtype=np.uint8)
    ref_right = rng.integers(0, 2, size=n, dtype=np.uint8)
    ref_parity = ref_left ^ ref_right

    accept = np.ones(n, dtype=bool)
    party_left = []
    for z in noise.z_errors:
        flip_left = (rng.random(n) < z).astype(np.uint8)
        flip_right = (rng.random(n) < z).astype(np.uint8)
        left = ref_left ^ flip_left
        right = ref_right ^ flip_right
        party_left.append(left)
        accept &= (left ^ right) == ref_parity

    n_a = int(accept.sum())
    if n_a == 0:
        postcad = (math.nan,) * params.bobs
        keys_equal = math.nan
    else:
        kept_ref = ref_left[accept]
        disagree = [left[accept] != kept_ref for left in party_left]
        postcad = tuple(float(np.mean(d)) for d in disagree)
        all_equal = ~np.logical_or.reduce(disagree)
        keys_equal = float(np.mean(all_equal))

    return TrialOutcome(
        qx_observed=qx_observed,
        accepted=n_a,
        rejected=n - n_a,
        postcad_error=postcad,
        keys_equal_fraction=keys_equal,
    )


@dataclass(frozen=True)
class FieldStats:
    """Mean, sample standard deviation, and standard error of one field."""

    mean: float
    std: float | None
    stderr: float | None


def aggregate(outcomes) -> dict:
    """Field-wise statistics over a sequence of trial outcomes.

    Returns a dict keyed by field name ("qx_observed", "accepted",
    "rejected", "postcad_error_1".., "keys_equal_fraction"); std and
    stderr are None for a single trial.
    """
    outcomes = list(outcomes)
    if not outcomes:
        raise ValueError("no trials to aggregate")
    bobs = len(outcomes[0].postcad_error)
    columns = {
        "qx_observed": [t.qx_observed for t in outcomes],
        "accepted": [float(t.accepted) for t in outcomes],
        "rejected": [float(t.rejected) for t in outcomes],
    }
    for j in range(bobs):
        columns[f"postcad_error_{j + 1}"] = [t.postcad_error[j] for t in outcomes]
    columns["keys_equal_fraction"] = [t.keys_equal_fraction for t in outcomes]

    stats = {}
    count = len(outcomes)
    for name, values in columns.items():
        arr = np.asarray(values, dtype=float)
        mean = float(arr.mean())
        if count > 1:
            std = float(arr.std(ddof=1))
            stderr = std / math.sqrt(count)
        else:
            std = stderr = None
        stats[name] = FieldStats(mean=mean, std=std, stderr=stderr)
    return stats
