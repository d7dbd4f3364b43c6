"""Occupancy-number distributions: urn draws, their multinomial limit,
and the split-box mixture.

Probability evaluation is done in the log domain and exponentiated at the
boundary; the individual multiplicities in the urn ratio overflow floats
long before the ratio itself becomes extreme.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np
from scipy.special import gammaln

from .combinatorics import (
    CapExceededError,
    OccupancyVector,
    log_factorial,
    log_multinomial_coeff,
    occupancy_count,
    support_matrix,
)

__all__ = [
    "OneParticleDistribution",
    "MultinomialDist",
    "MvhgDist",
    "SzilardSplitDist",
    "multinomial_pmf",
    "mvhg_pmf",
    "marginal",
    "sample",
    "tv_distance",
    "convergence_scan",
    "DEFAULT_SEED",
]

# Fixed default seed for every sampling entry point (never time-based).
DEFAULT_SEED = 42

_PROVENANCES = ("model", "empirical", "user")
_PROB_SUM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class OneParticleDistribution:
    """Probability simplex over the single-particle states ("colors").

    ``provenance`` records where the numbers came from: "model" for
    physics-derived spectra, "empirical" for relative frequencies u_c/U of
    a measured urn (kept in ``empirical_urn``), "user" for everything else.
    Zero-probability colors stay in the support so color indexing survives
    spectrum truncation.
    """

    probs: np.ndarray
    provenance: str = "user"
    empirical_urn: OccupancyVector | None = None

    def __post_init__(self) -> None:
        p = np.asarray(self.probs, dtype=np.float64).copy()
        if p.ndim != 1 or p.size == 0:
            raise ValueError("probs must be a non-empty 1-D sequence")
        if np.any(p < 0):
            raise ValueError("probabilities must be non-negative")
        if abs(float(p.sum()) - 1.0) > _PROB_SUM_TOL:
            raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
        if self.provenance not in _PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @classmethod
    def from_weights(
        cls, weights: Sequence[float], provenance: str = "user"
    ) -> "OneParticleDistribution":
        w = np.asarray(weights, dtype=np.float64)
        if np.any(w < 0) or w.sum() <= 0:
            raise ValueError("weights must be non-negative with positive sum")
        return cls(w / w.sum(), provenance=provenance)

    @classmethod
    def empirical_from_urn(cls, urn: OccupancyVector) -> "OneParticleDistribution":
        if urn.total == 0:
            raise ValueError("empirical distribution needs a non-empty urn")
        p = np.asarray(urn.counts, dtype=np.float64) / urn.total
        return cls(p, provenance="empirical", empirical_urn=urn)

    @property
    def num_colors(self) -> int:
        return int(self.probs.size)

    def __len__(self) -> int:
        return self.num_colors

    def entropy(self) -> float:
        """Shannon entropy in nats, with 0*log(0) := 0."""
        p = self.probs[self.probs > 0]
        return float(-(p * np.log(p)).sum())


def _check_length(n: Sequence[int], num_colors: int) -> None:
    if len(n) != num_colors:
        raise ValueError(f"occupancy vector has {len(n)} colors, expected {num_colors}")


@dataclass(frozen=True, eq=False)
class MultinomialDist:
    """Occupancy distribution of N draws with replacement (canonical limit)."""

    N: int
    p: OneParticleDistribution

    def __post_init__(self) -> None:
        if self.N < 0:
            raise ValueError("N must be non-negative")

    @property
    def num_colors(self) -> int:
        return self.p.num_colors

    def log_pmf(self, n: Sequence[int]) -> float:
        _check_length(n, self.num_colors)
        counts = [int(c) for c in n]
        if any(c < 0 for c in counts) or sum(counts) != self.N:
            return float("-inf")
        acc = log_factorial(self.N)
        for c, prob in zip(counts, self.p.probs):
            if c == 0:
                continue
            if prob == 0.0:
                return float("-inf")
            acc += c * math.log(prob) - log_factorial(c)
        return acc

    def pmf(self, n: Sequence[int]) -> float:
        lp = self.log_pmf(n)
        return math.exp(lp) if lp > float("-inf") else 0.0

    def log_pmf_batch(self, counts: np.ndarray) -> np.ndarray:
        """Log-pmf over rows of an occupancy matrix (rows must sum to N)."""
        counts = np.asarray(counts)
        p = self.p.probs
        logp = np.where(p > 0, np.log(np.where(p > 0, p, 1.0)), 0.0)
        out = gammaln(self.N + 1.0) - gammaln(counts + 1.0).sum(axis=1)
        out = out + counts @ logp
        bad = (counts[:, p == 0.0] > 0).any(axis=1) | (counts.sum(axis=1) != self.N)
        out[bad] = -np.inf
        return out


@dataclass(frozen=True, eq=False)
class MvhgDist:
    """Occupancy distribution of N draws without replacement from an urn.

    This is exactly the diagonal weight pattern obtained by tracing the
    environment out of a pure occupancy eigenstate of the whole universe.
    """

    urn: OccupancyVector
    draw_count: int

    def __post_init__(self) -> None:
        if not 0 <= self.draw_count <= self.urn.total:
            raise ValueError(
                f"draw count {self.draw_count} outside [0, {self.urn.total}]"
            )

    @property
    def N(self) -> int:
        return self.draw_count

    @property
    def num_colors(self) -> int:
        return self.urn.num_colors

    def log_pmf(self, n: Sequence[int]) -> float:
        _check_length(n, self.num_colors)
        counts = [int(c) for c in n]
        if sum(counts) != self.draw_count:
            return float("-inf")
        w_sys = log_multinomial_coeff(counts)
        w_env = log_multinomial_coeff([u - c for u, c in zip(self.urn, counts)])
        if w_sys.impossible or w_env.impossible:
            return float("-inf")
        return w_sys.value + w_env.value - log_multinomial_coeff(self.urn.counts).value

    def pmf(self, n: Sequence[int]) -> float:
        lp = self.log_pmf(n)
        return math.exp(lp) if lp > float("-inf") else 0.0

    def log_pmf_batch(self, counts: np.ndarray) -> np.ndarray:
        counts = np.asarray(counts)
        u = np.asarray(self.urn.counts)
        U, N = self.urn.total, self.draw_count
        # product of per-color binomials over the total binomial
        with np.errstate(invalid="ignore"):
            num = (
                gammaln(u + 1.0)
                - gammaln(counts + 1.0)
                - gammaln(u - counts + 1.0)
            ).sum(axis=1)
        den = gammaln(U + 1.0) - gammaln(N + 1.0) - gammaln(U - N + 1.0)
        out = num - den
        bad = (
            (counts > u).any(axis=1)
            | (counts < 0).any(axis=1)
            | (counts.sum(axis=1) != N)
        )
        out[bad] = -np.inf
        return out


@dataclass(frozen=True, eq=False)
class SzilardSplitDist:
    """Joint occupancy of the two halves of a box after a piston insertion.

    The number of particles landing in the left part is binomial in the
    volume fraction; conditional on that split each side is multinomial in
    its own one-particle distribution. Support vectors concatenate the left
    colors followed by the right colors.
    """

    N: int
    volume_fraction: float
    left_dist: OneParticleDistribution
    right_dist: OneParticleDistribution

    def __post_init__(self) -> None:
        if self.N < 0:
            raise ValueError("N must be non-negative")
        if not 0.0 < self.volume_fraction < 1.0:
            raise ValueError("volume fraction must lie strictly between 0 and 1")

    @property
    def num_colors(self) -> int:
        return self.left_dist.num_colors + self.right_dist.num_colors

    def split_probabilities(self) -> np.ndarray:
        """Binomial law of the left-side particle count b over 0..N."""
        return _binomial_pmf(self.N, self.volume_fraction)

    def log_pmf(self, n: Sequence[int]) -> float:
        _check_length(n, self.num_colors)
        counts = [int(c) for c in n]
        if any(c < 0 for c in counts) or sum(counts) != self.N:
            return float("-inf")
        k = self.left_dist.num_colors
        left, right = counts[:k], counts[k:]
        b = sum(left)
        log_pb = _log_binomial_pmf_scalar(self.N, self.volume_fraction, b)
        if log_pb == float("-inf"):
            return float("-inf")
        lp_left = MultinomialDist(b, self.left_dist).log_pmf(left)
        lp_right = MultinomialDist(self.N - b, self.right_dist).log_pmf(right)
        return log_pb + lp_left + lp_right

    def pmf(self, n: Sequence[int]) -> float:
        lp = self.log_pmf(n)
        return math.exp(lp) if lp > float("-inf") else 0.0

    def log_pmf_batch(self, counts: np.ndarray) -> np.ndarray:
        counts = np.asarray(counts)
        return np.array([self.log_pmf(row) for row in counts], dtype=np.float64)


OccupancyDistribution = Union[MultinomialDist, MvhgDist, SzilardSplitDist]


def multinomial_pmf(d: MultinomialDist, n: Sequence[int]) -> float:
    """P(n) for N draws with replacement; 0 off the sum(n)=N shell."""
    return d.pmf(n)


def mvhg_pmf(d: MvhgDist, n: Sequence[int]) -> float:
    """P(n) for N draws without replacement; 0 wherever a count is
    negative, exceeds its urn entry, or the total is off-shell."""
    return d.pmf(n)


def _binomial_pmf(N: int, p: float) -> np.ndarray:
    k = np.arange(N + 1)
    if p == 0.0:
        out = np.zeros(N + 1)
        out[0] = 1.0
        return out
    if p == 1.0:
        out = np.zeros(N + 1)
        out[N] = 1.0
        return out
    logc = gammaln(N + 1.0) - gammaln(k + 1.0) - gammaln(N - k + 1.0)
    return np.exp(logc + k * math.log(p) + (N - k) * math.log1p(-p))


def _log_binomial_pmf_scalar(N: int, p: float, k: int) -> float:
    if not 0 <= k <= N:
        return float("-inf")
    if p == 0.0:
        return 0.0 if k == 0 else float("-inf")
    if p == 1.0:
        return 0.0 if k == N else float("-inf")
    logc = log_factorial(N) - log_factorial(k) - log_factorial(N - k)
    return logc + k * math.log(p) + (N - k) * math.log1p(-p)


def _hypergeometric_pmf(U: int, u_c: int, N: int) -> np.ndarray:
    """PMF of one color's count under N draws without replacement."""
    k = np.arange(N + 1)
    lo, hi = max(0, N - (U - u_c)), min(N, u_c)
    out = np.zeros(N + 1)
    kk = k[lo : hi + 1]
    log_p = (
        gammaln(u_c + 1.0)
        - gammaln(kk + 1.0)
        - gammaln(u_c - kk + 1.0)
        + gammaln(U - u_c + 1.0)
        - gammaln(N - kk + 1.0)
        - gammaln(U - u_c - (N - kk) + 1.0)
        - (gammaln(U + 1.0) - gammaln(N + 1.0) - gammaln(U - N + 1.0))
    )
    out[lo : hi + 1] = np.exp(log_p)
    return out


def marginal(d: MultinomialDist | MvhgDist, color: int) -> np.ndarray:
    """Per-color count distribution over {0..N}, as an array indexed by k.

    Binomial for draws with replacement, univariate hypergeometric for
    draws without; either way it sums to 1 within 1e-12.
    """
    if not 0 <= color < d.num_colors:
        raise IndexError(f"color {color} out of range for {d.num_colors} colors")
    if isinstance(d, MultinomialDist):
        return _binomial_pmf(d.N, float(d.p.probs[color]))
    if isinstance(d, MvhgDist):
        return _hypergeometric_pmf(d.urn.total, d.urn[color], d.draw_count)
    raise TypeError(f"no closed-form marginal for {type(d).__name__}")


# --- sampling ---------------------------------------------------------------
#
# All samplers draw from numpy's PCG64 generator seeded explicitly, and use
# fixed documented algorithms (categorical inversion with replacement,
# sequential urn depletion without), so a (distribution, count, seed) triple
# reproduces bit-identically on any platform. Parallel use should derive the
# worker seed as seed + worker_index and partition `count`.

_CHUNK_DRAWS = 4_000_000


def _sample_multinomial_counts(
    rng: np.random.Generator, probs: np.ndarray, draws: int, count: int
) -> np.ndarray:
    num_colors = probs.size
    out = np.zeros((count, num_colors), dtype=np.int64)
    if draws == 0 or count == 0:
        return out
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    rows_per_chunk = max(1, _CHUNK_DRAWS // draws)
    for start in range(0, count, rows_per_chunk):
        m = min(rows_per_chunk, count - start)
        u = rng.random((m, draws))
        idx = np.searchsorted(cdf, u, side="right")
        flat = (idx + (np.arange(m) * num_colors)[:, None]).ravel()
        out[start : start + m] = np.bincount(
            flat, minlength=m * num_colors
        ).reshape(m, num_colors)
    return out


def _sample_mvhg_counts(
    rng: np.random.Generator, urn: OccupancyVector, draws: int, count: int
) -> np.ndarray:
    num_colors = urn.num_colors
    out = np.zeros((count, num_colors), dtype=np.int64)
    if draws == 0 or count == 0:
        return out
    base = list(urn.counts)
    rows_per_chunk = max(1, _CHUNK_DRAWS // draws)
    for start in range(0, count, rows_per_chunk):
        uniforms = rng.random((min(rows_per_chunk, count - start), draws))
        for s, row in enumerate(uniforms):
            rem = base.copy()
            left = urn.total
            tally = out[start + s]
            for t in range(draws):
                r = row[t] * left
                acc = 0
                for c in range(num_colors):
                    acc += rem[c]
                    if r < acc:
                        break
                tally[c] += 1
                rem[c] -= 1
                left -= 1
    return out


def sample(
    d: OccupancyDistribution, count: int, seed: int = DEFAULT_SEED
) -> list[OccupancyVector]:
    """Draw `count` occupancy vectors; deterministic for a given seed."""
    if count < 0:
        raise ValueError("count must be non-negative")
    rng = np.random.default_rng(seed)
    if isinstance(d, MultinomialDist):
        counts = _sample_multinomial_counts(rng, d.p.probs, d.N, count)
    elif isinstance(d, MvhgDist):
        counts = _sample_mvhg_counts(rng, d.urn, d.draw_count, count)
    elif isinstance(d, SzilardSplitDist):
        b_cdf = np.cumsum(d.split_probabilities())
        b_cdf[-1] = 1.0
        bs = np.searchsorted(b_cdf, rng.random(count), side="right")
        k = d.left_dist.num_colors
        counts = np.zeros((count, d.num_colors), dtype=np.int64)
        for s in range(count):
            b = int(bs[s])
            counts[s, :k] = _sample_multinomial_counts(rng, d.left_dist.probs, b, 1)
            counts[s, k:] = _sample_multinomial_counts(
                rng, d.right_dist.probs, d.N - b, 1
            )
    else:
        raise TypeError(f"cannot sample from {type(d).__name__}")
    return [OccupancyVector(tuple(int(c) for c in row)) for row in counts]


# --- distances and convergence ----------------------------------------------

DEFAULT_TV_CAP = 10**6


def tv_distance(
    d1: OccupancyDistribution, d2: OccupancyDistribution, cap: int = DEFAULT_TV_CAP
) -> float:
    """Total variation distance between two occupancy distributions
    sharing a color space and particle number."""
    if d1.num_colors != d2.num_colors:
        raise ValueError("distributions live on different color spaces")
    if d1.N != d2.N:
        raise ValueError("distributions have different particle numbers")
    if occupancy_count(d1.N, d1.num_colors) > cap:
        raise CapExceededError(
            "support too large to enumerate for an exact TV distance; "
            "use Monte Carlo estimation instead"
        )
    counts = support_matrix(d1.N, d1.num_colors, cap=cap)
    p1 = np.exp(d1.log_pmf_batch(counts))
    p2 = np.exp(d2.log_pmf_batch(counts))
    return float(0.5 * np.abs(p1 - p2).sum())


def convergence_scan(
    base_urn: OccupancyVector,
    N: int,
    scales: Iterable[int],
    cap: int = DEFAULT_TV_CAP,
) -> list[tuple[int, float]]:
    """TV distance between the scaled-urn draw and its multinomial limit.

    Scaling the urn by integers keeps the empirical color fractions fixed,
    so the rows trace the approach to the with-replacement limit at
    constant one-particle distribution.
    """
    limit = MultinomialDist(N, OneParticleDistribution.empirical_from_urn(base_urn))
    rows: list[tuple[int, float]] = []
    for k in scales:
        if k < 1:
            raise ValueError("scales must be positive integers")
        urn = base_urn.scaled(int(k))
        if urn.total < N:
            raise ValueError(
                f"scaled urn holds {urn.total} particles, fewer than N={N}"
            )
        rows.append((urn.total, tv_distance(MvhgDist(urn, N), limit, cap=cap)))
    return rows
