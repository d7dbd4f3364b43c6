"""Diagonal bosonic density operators and the information-theoretic
bookkeeping built on them: environment tracing, the Bayesian marginal
identity, the Holevo bound, empirical information, and measurement
ledgers.

Every operator handled here is diagonal in the occupancy-number basis, so
it is stored as a weight map and its von Neumann entropy is the Shannon
entropy of the weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .combinatorics import (
    CapExceededError,
    OccupancyVector,
    occupancy_count,
    support_matrix,
)
from .distributions import (
    DEFAULT_SEED,
    MultinomialDist,
    MvhgDist,
    OneParticleDistribution,
    sample,
)
from .entropy import multinomial_entropy, mvhg_entropy

__all__ = [
    "BosonicDensityOperator",
    "HolevoEstimate",
    "LedgerStep",
    "MeasurementLedger",
    "trace_out_environment",
    "bayesian_marginal_check",
    "holevo_chi",
    "empirical_information",
    "measurement_ledger",
]

_WEIGHT_SUM_TOL = 1e-10
DEFAULT_EXACT_CAP = 10**6


@dataclass(frozen=True, eq=False)
class BosonicDensityOperator:
    """Mixed state of N bosons, diagonal in the occupancy basis."""

    weights: Mapping[OccupancyVector, float]
    N: int
    source: str

    def __post_init__(self) -> None:
        total = 0.0
        for key, w in self.weights.items():
            if key.total != self.N:
                raise ValueError(
                    f"weight key {key.counts} has {key.total} particles, expected {self.N}"
                )
            if w < 0:
                raise ValueError("weights must be non-negative")
            total += w
        if abs(total - 1.0) > _WEIGHT_SUM_TOL:
            raise ValueError(f"weights sum to {total!r}, not 1")
        object.__setattr__(self, "weights", dict(self.weights))

    def entropy(self) -> float:
        """Von Neumann entropy = Shannon entropy of the diagonal weights."""
        return -sum(w * math.log(w) for w in self.weights.values() if w > 0) + 0.0

    @classmethod
    def canonical(
        cls, N: int, p: OneParticleDistribution, cap: int = DEFAULT_EXACT_CAP
    ) -> "BosonicDensityOperator":
        d = MultinomialDist(N, p)
        return cls(_weights_from(d, cap), N, "canonical")

    @classmethod
    def empirical(cls, urn: OccupancyVector, N: int, cap: int = DEFAULT_EXACT_CAP):
        d = MultinomialDist(N, OneParticleDistribution.empirical_from_urn(urn))
        return cls(_weights_from(d, cap), N, "empirical")

    @classmethod
    def bayesian_marginal(
        cls,
        U: int,
        N: int,
        p: OneParticleDistribution,
        cap: int = DEFAULT_EXACT_CAP,
    ) -> "BosonicDensityOperator":
        """Mixture over multinomially distributed universes of the traced
        operators; analytically this is again the canonical operator."""
        prior = MultinomialDist(U, p)
        weights: dict[OccupancyVector, float] = {}
        for urn_row in support_matrix(U, p.num_colors, cap=cap):
            urn = OccupancyVector(tuple(int(x) for x in urn_row))
            pu = prior.pmf(urn.counts)
            if pu == 0.0:
                continue
            for key, w in _weights_from(MvhgDist(urn, N), cap).items():
                weights[key] = weights.get(key, 0.0) + pu * w
        return cls(weights, N, "bayesian_marginal")


def _weights_from(d, cap: int) -> dict[OccupancyVector, float]:
    counts = support_matrix(d.N, d.num_colors, cap=cap)
    logp = d.log_pmf_batch(counts)
    out: dict[OccupancyVector, float] = {}
    for row, lp in zip(counts, logp):
        if lp > -np.inf:
            out[OccupancyVector(tuple(int(x) for x in row))] = math.exp(lp)
    return out


def trace_out_environment(
    universe: OccupancyVector, N: int, cap: int = DEFAULT_EXACT_CAP
) -> BosonicDensityOperator:
    """Reduce a pure occupancy eigenstate of U bosons to the mixed state of
    an N-boson subsystem; the weights are the without-replacement draw
    probabilities."""
    d = MvhgDist(universe, N)  # validates 0 <= N <= U
    op = BosonicDensityOperator(_weights_from(d, cap), N, "traced_from_universe")
    return op


def bayesian_marginal_check(
    U: int,
    N: int,
    p: OneParticleDistribution,
    cap: int = DEFAULT_EXACT_CAP,
) -> float:
    """Max absolute gap between the prior-averaged traced weights and the
    direct N-particle multinomial weights (analytically zero)."""
    if occupancy_count(U, p.num_colors) * occupancy_count(N, p.num_colors) > cap:
        raise CapExceededError("urn/system support product exceeds cap")
    system = MultinomialDist(N, p)
    system_support = support_matrix(N, p.num_colors, cap=cap)
    urn_support = support_matrix(U, p.num_colors, cap=cap)
    # same batch evaluation path for prior and direct term, so the U == N
    # case (identity likelihood) cancels exactly, not just to rounding
    prior_probs = np.exp(MultinomialDist(U, p).log_pmf_batch(urn_support))
    mixed = np.zeros(system_support.shape[0])
    for urn_row, pu in zip(urn_support, prior_probs):
        if pu == 0.0:
            continue
        urn = OccupancyVector(tuple(int(x) for x in urn_row))
        likelihood = np.exp(MvhgDist(urn, N).log_pmf_batch(system_support))
        mixed += pu * likelihood
    direct = np.exp(system.log_pmf_batch(system_support))
    return float(np.abs(mixed - direct).max())


@dataclass(frozen=True)
class HolevoEstimate:
    chi: float
    standard_error: float | None
    mode: str


def holevo_chi(
    U: int,
    N: int,
    p: OneParticleDistribution,
    mode: str = "exact",
    mc_samples: int = 10_000,
    seed: int = DEFAULT_SEED,
    cap: int = DEFAULT_EXACT_CAP,
) -> HolevoEstimate:
    """Upper bound on the information any measurement on the system can
    extract about the universe outcome:
    chi = S(canonical) - E_prior{ S(traced) } >= 0.

    Exact mode enumerates the universe occupancies; Monte Carlo mode
    samples them from the prior and only estimates the conditional term
    (the unconditional entropy is analytic either way), reporting the
    standard error of the estimate.
    """
    if N > U:
        raise ValueError("system cannot hold more particles than the universe")
    s_system = multinomial_entropy(MultinomialDist(N, p)).total
    if mode == "exact":
        if occupancy_count(U, p.num_colors) > cap:
            raise CapExceededError(
                "universe support exceeds cap; use monte_carlo mode"
            )
        prior = MultinomialDist(U, p)
        expected = 0.0
        for urn_row in support_matrix(U, p.num_colors, cap=cap):
            pu = prior.pmf(urn_row)
            if pu == 0.0:
                continue
            urn = OccupancyVector(tuple(int(x) for x in urn_row))
            expected += pu * mvhg_entropy(MvhgDist(urn, N)).total
        return HolevoEstimate(s_system - expected, None, "exact")
    if mode == "monte_carlo":
        if mc_samples < 2:
            raise ValueError("monte_carlo mode needs at least 2 samples")
        urns = sample(MultinomialDist(U, p), mc_samples, seed=seed)
        vals = np.array(
            [mvhg_entropy(MvhgDist(u, N)).total for u in urns], dtype=np.float64
        )
        se = float(vals.std(ddof=1) / math.sqrt(mc_samples))
        return HolevoEstimate(s_system - float(vals.mean()), se, "monte_carlo")
    raise ValueError(f"unknown mode {mode!r}")


def empirical_information(universe: OccupancyVector, N: int) -> float:
    """Entropy surplus of the empirical multinomial model over the actual
    without-replacement distribution; non-negative because the multinomial
    maximizes entropy at fixed one-particle distribution."""
    if N == 0:
        return 0.0
    if N > universe.total:
        raise ValueError("system cannot hold more particles than the universe")
    model = MultinomialDist(N, OneParticleDistribution.empirical_from_urn(universe))
    return multinomial_entropy(model).total - mvhg_entropy(MvhgDist(universe, N)).total


# --- measurement ledgers -----------------------------------------------------

_START_KINDS = ("bayesian", "empirical", "agnostic")
_STEP_OPS = ("pvm_on_universe", "povm_empirical_model", "pvm_on_system", "separate_system")
_NEGATIVE_INFO_TOL = -1e-12


@dataclass(frozen=True)
class LedgerStep:
    """One measurement row; None marks a genuinely undefined entropy or
    information value (agnostic experimenter), on which arithmetic is
    impossible by construction."""

    label: str
    pre_entropy: float | None
    post_entropy: float | None
    information_gained: float | None


@dataclass(frozen=True)
class MeasurementLedger:
    steps: tuple[LedgerStep, ...]

    def __post_init__(self) -> None:
        for s in self.steps:
            if (
                s.information_gained is not None
                and s.pre_entropy is not None
                and s.post_entropy is not None
            ):
                if abs(s.information_gained - (s.pre_entropy - s.post_entropy)) > 1e-12:
                    raise ValueError(f"inconsistent ledger row {s!r}")
            if s.information_gained is not None and s.information_gained < _NEGATIVE_INFO_TOL:
                raise ValueError(f"negative information in ledger row {s!r}")

    @property
    def total_information(self) -> float | None:
        """Sum of gains, or None as soon as any row is undefined."""
        total = 0.0
        for s in self.steps:
            if s.information_gained is None:
                return None
            total += s.information_gained
        return total


def _require_keys(obj: dict, required: set, optional: set, what: str) -> None:
    keys = set(obj)
    if not required <= keys:
        raise ValueError(f"{what} missing fields {sorted(required - keys)}")
    unknown = keys - required - optional
    if unknown:
        raise ValueError(f"{what} has unknown fields {sorted(unknown)}")


def measurement_ledger(start: dict, steps: Sequence[dict]) -> MeasurementLedger:
    """Run a measurement scenario and account for every entropy collapse.

    ``start`` is one of
      {"kind": "bayesian",  "N": int, "probs": [...]}
      {"kind": "empirical", "N": int, "urn": [...]}
      {"kind": "agnostic",  "N": int}
    and each step one of
      {"op": "pvm_on_universe", "urn": [...]}
      {"op": "povm_empirical_model", "urn": [...]}   (agnostic start only)
      {"op": "pvm_on_system"}
      {"op": "separate_system"}                      (zero-gain annotation)

    A projective measurement of the system always posts entropy zero and
    ends the scenario. Under an agnostic start the first gain is undefined
    (None), never a sentinel number.
    """
    _require_keys(start, {"kind"}, {"N", "probs", "urn"}, "scenario start")
    kind = start["kind"]
    if kind not in _START_KINDS:
        raise ValueError(f"unknown scenario kind {kind!r}")
    declared_urn: OccupancyVector | None = None
    if kind == "bayesian":
        _require_keys(start, {"kind", "N", "probs"}, set(), "bayesian start")
        N = int(start["N"])
        p = OneParticleDistribution(np.asarray(start["probs"], dtype=np.float64))
        current: float | None = multinomial_entropy(MultinomialDist(N, p)).total
    elif kind == "empirical":
        _require_keys(start, {"kind", "N", "urn"}, set(), "empirical start")
        N = int(start["N"])
        declared_urn = OccupancyVector(tuple(int(x) for x in start["urn"]))
        model = MultinomialDist(
            N, OneParticleDistribution.empirical_from_urn(declared_urn)
        )
        current = multinomial_entropy(model).total
    else:
        _require_keys(start, {"kind", "N"}, set(), "agnostic start")
        N = int(start["N"])
        current = None

    rows: list[LedgerStep] = []
    universe_measured = False
    collapsed = False
    for raw in steps:
        _require_keys(raw, {"op"}, {"urn"}, "scenario step")
        op = raw["op"]
        if op not in _STEP_OPS:
            raise ValueError(f"unknown step op {op!r}")
        if collapsed:
            raise ValueError("scenario continues after the system was collapsed")
        if op == "separate_system":
            rows.append(LedgerStep("separate_system", current, current,
                                   0.0 if current is not None else None))
            continue
        if op == "pvm_on_universe":
            if universe_measured:
                raise ValueError("universe already measured in this scenario")
            urn = OccupancyVector(tuple(int(x) for x in raw["urn"]))
            if declared_urn is not None and urn != declared_urn:
                raise ValueError(
                    "empirical model was built from a different universe outcome"
                )
            post = mvhg_entropy(MvhgDist(urn, N)).total
            gain = current - post if current is not None else None
            rows.append(LedgerStep("pvm_on_universe", current, post, gain))
            current = post
            universe_measured = True
            continue
        if op == "povm_empirical_model":
            if kind != "agnostic" or universe_measured or rows:
                raise ValueError(
                    "povm_empirical_model is only valid as the first step of "
                    "an agnostic scenario"
                )
            urn = OccupancyVector(tuple(int(x) for x in raw["urn"]))
            pre = multinomial_entropy(
                MultinomialDist(N, OneParticleDistribution.empirical_from_urn(urn))
            ).total
            post = mvhg_entropy(MvhgDist(urn, N)).total
            rows.append(LedgerStep("povm_empirical_model", pre, post, pre - post))
            current = post
            universe_measured = True
            continue
        # pvm_on_system
        gain = current if current is not None else None
        rows.append(LedgerStep("pvm_on_system", current, 0.0, gain))
        current = 0.0
        collapsed = True
    return MeasurementLedger(tuple(rows))
