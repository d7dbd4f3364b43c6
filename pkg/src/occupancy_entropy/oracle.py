"""Independent reference implementations for validating the analytic
paths at small scale.

Everything here is exact rational arithmetic end to end (so the oracle
cannot share failure modes with the log-domain float code it checks) and
deliberately slow: caps keep it honest about its small-instance scope.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .combinatorics import CapExceededError, OccupancyVector
from .distributions import DEFAULT_SEED, OccupancyDistribution, sample

__all__ = [
    "ExactRational",
    "exact_multinomial_coeff",
    "brute_force_mvhg",
    "brute_force_partial_trace",
    "mc_entropy_estimate",
]

# Arbitrary-precision reduced rationals with positive denominator: exactly
# the stdlib Fraction contract.
ExactRational = Fraction

DEFAULT_URN_CAP = 10
DEFAULT_MICROSTATE_CAP = 10**6


def exact_multinomial_coeff(counts) -> int:
    """Big-integer multinomial coefficient; 0 if any entry is negative."""
    cs = [int(c) for c in counts]
    if any(c < 0 for c in cs):
        return 0
    out = math.factorial(sum(cs))
    for c in cs:
        out //= math.factorial(c)
    return out


def brute_force_mvhg(
    urn: OccupancyVector, N: int, urn_cap: int = DEFAULT_URN_CAP
) -> dict[OccupancyVector, Fraction]:
    """Exact occupancy probabilities of N draws without replacement.

    Walks the sequential draw tree (probability of a color at each step is
    its remaining count over the remaining total), merging branches that
    share a tally. No binomial coefficients anywhere.
    """
    if urn.total > urn_cap:
        raise CapExceededError(f"urn of {urn.total} exceeds oracle cap {urn_cap}")
    if not 0 <= N <= urn.total:
        raise ValueError(f"draw count {N} outside [0, {urn.total}]")
    num_colors = urn.num_colors
    states: dict[tuple[int, ...], Fraction] = {(0,) * num_colors: Fraction(1)}
    for step in range(N):
        remaining_total = urn.total - step
        nxt: dict[tuple[int, ...], Fraction] = {}
        for tally, prob in states.items():
            for c in range(num_colors):
                avail = urn[c] - tally[c]
                if avail <= 0:
                    continue
                new_tally = tally[:c] + (tally[c] + 1,) + tally[c + 1 :]
                contrib = prob * Fraction(avail, remaining_total)
                nxt[new_tally] = nxt.get(new_tally, Fraction(0)) + contrib
        states = nxt
    return {OccupancyVector(t): p for t, p in states.items()}


@lru_cache(maxsize=64)
def _prefix_tally_tables(
    urn_counts: tuple[int, ...], cap: int
) -> tuple[int, tuple[dict, ...]]:
    """Enumerate every microstate (ordered color string) with the given
    occupancy and tabulate, for each prefix length, how many microstates
    share each prefix tally. Returns (microstate count, per-length tables).
    """
    total = sum(urn_counts)
    num_colors = len(urn_counts)
    tables: list[dict[tuple[int, ...], int]] = [dict() for _ in range(total + 1)]
    remaining = list(urn_counts)
    path: list[int] = []
    leaves = 0

    def descend(depth: int) -> None:
        nonlocal leaves
        if depth == total:
            leaves += 1
            if leaves > cap:
                raise CapExceededError(
                    f"more than {cap} microstates share occupancy {urn_counts}"
                )
            tally = [0] * num_colors
            for d, color in enumerate(path):
                tally[color] += 1
                key = tuple(tally)
                tables[d + 1][key] = tables[d + 1].get(key, 0) + 1
            return
        for c in range(num_colors):
            if remaining[c] == 0:
                continue
            remaining[c] -= 1
            path.append(c)
            descend(depth + 1)
            path.pop()
            remaining[c] += 1

    descend(0)
    tables[0] = {(0,) * num_colors: leaves}
    return leaves, tuple(tables)


def brute_force_partial_trace(
    urn: OccupancyVector, N: int, microstate_cap: int = DEFAULT_MICROSTATE_CAP
) -> dict[OccupancyVector, Fraction]:
    """Trace the environment out of the uniform microstate ensemble.

    All microstates compatible with the universe occupancy are enumerated
    with equal weight, and the induced distribution of the occupancy of
    the first N particles is returned exactly.
    """
    if not 0 <= N <= urn.total:
        raise ValueError(f"system size {N} outside [0, {urn.total}]")
    total_microstates, tables = _prefix_tally_tables(urn.counts, microstate_cap)
    return {
        OccupancyVector(t): Fraction(count, total_microstates)
        for t, count in tables[N].items()
    }


def mc_entropy_estimate(
    d: OccupancyDistribution, samples: int, seed: int = DEFAULT_SEED
) -> tuple[float, float]:
    """Plug-in entropy estimate -mean(log pmf) with jackknife standard
    error; seed-reproducible bit for bit."""
    if samples < 2:
        raise ValueError("need at least 2 samples")
    draws = sample(d, samples, seed=seed)
    vals = np.array([-d.log_pmf(x.counts) for x in draws], dtype=np.float64)
    estimate = float(vals.mean())
    # leave-one-out means of the plug-in estimator
    loo = (vals.sum() - vals) / (samples - 1)
    se = math.sqrt((samples - 1) / samples * float(((loo - loo.mean()) ** 2).sum()))
    return estimate, se
