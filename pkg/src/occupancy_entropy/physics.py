"""Particle-in-a-box spectra, truncated Boltzmann one-particle
distributions, exact ideal-gas entropy against its closed-form
approximation, and the piston-insertion entropy ledger.

Internal energies are SI joules; entropies from this module are reported
in kB units (numerically identical to nats).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .combinatorics import CapExceededError
from .constants import BOLTZMANN_KB, LN2, PLANCK_H
from .distributions import (
    MultinomialDist,
    OneParticleDistribution,
    SzilardSplitDist,
)
from .entropy import (
    EntropyReport,
    entropy_by_enumeration,
    multinomial_entropy,
    sackur_tetrode,
)

__all__ = [
    "BoxModel",
    "SpectrumTruncation",
    "BoxSpectrum",
    "GasEntropyResult",
    "SzilardResult",
    "box_spectrum",
    "boltzmann_distribution",
    "ideal_gas_entropy",
    "szilard_insertion",
    "szilard_split_pmf",
]


@dataclass(frozen=True)
class BoxModel:
    """Ideal-gas particle in a hard-walled cubic (or 1-D) box."""

    mass: float               # kg
    temperature: float        # K
    side_length: float        # m
    dimensions: int = 3

    def __post_init__(self) -> None:
        if self.mass <= 0 or self.temperature <= 0 or self.side_length <= 0:
            raise ValueError("mass, temperature and side length must be positive")
        if self.dimensions not in (1, 3):
            raise ValueError("dimensions must be 1 or 3")

    @property
    def energy_unit(self) -> float:
        """h^2 / (8 m L^2): the energy of quantum number 1 on one axis."""
        return PLANCK_H**2 / (8.0 * self.mass * self.side_length**2)

    def with_side(self, side_length: float) -> "BoxModel":
        return BoxModel(self.mass, self.temperature, side_length, self.dimensions)


@dataclass(frozen=True)
class SpectrumTruncation:
    """Stopping rule for the infinite box spectrum.

    Enumeration stops once the complementary Gaussian integral bounds the
    omitted Boltzmann weight below ``relative_tail_bound`` of the retained
    partition sum.
    """

    relative_tail_bound: float = 1e-14
    max_states: int = 4_000_000

    def __post_init__(self) -> None:
        if not 0.0 < self.relative_tail_bound < 1.0:
            raise ValueError("relative tail bound must lie in (0, 1)")
        if self.max_states < 1:
            raise ValueError("max_states must be positive")


DEFAULT_TRUNCATION = SpectrumTruncation()


@dataclass(frozen=True, eq=False)
class BoxSpectrum:
    """Box eigenstates in non-decreasing energy order.

    Quantum numbers start at 1 per axis; permutation-degenerate 3-D levels
    stay distinct colors (ties broken by quantum numbers).
    """

    quantum_numbers: np.ndarray   # (n_states, dims) ints
    energies: np.ndarray          # joules
    tail_bound_achieved: float    # omitted Boltzmann weight / retained Z

    def __len__(self) -> int:
        return int(self.energies.size)

    def __getitem__(self, i: int) -> tuple[tuple[int, ...], float]:
        return tuple(int(q) for q in self.quantum_numbers[i]), float(self.energies[i])

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]


def _axis_cutoff(alpha: float, trunc: SpectrumTruncation, axes: int) -> tuple[int, float]:
    """Smallest per-axis cutoff whose omitted weight bound meets the target.

    Per axis, sum_{k>c} exp(-alpha k^2) < integral_c^inf exp(-alpha x^2) dx
    <= exp(-alpha c^2) / (2 alpha c). For 3 axes the kept cube [1,c]^3 omits
    (z+t)^3 - z^3 of the full weight, with z the retained per-axis sum and
    t the per-axis tail bound. Everything is scaled by the ground-state
    weight so deep-cold spectra do not underflow.
    """
    z = 0.0
    c = 0
    while True:
        c += 1
        w = math.exp(-alpha * (c * c - 1.0))
        z += w
        tail = w / (2.0 * alpha * c)
        if axes == 1:
            achieved = tail / z
        else:
            achieved = ((z + tail) ** 3 - z**3) / z**3
        if achieved <= trunc.relative_tail_bound:
            return c, achieved
        if c**axes > trunc.max_states:
            raise CapExceededError(
                f"spectrum needs more than {trunc.max_states} states to reach "
                f"relative tail bound {trunc.relative_tail_bound:g} "
                f"(achieved {achieved:.3g} at cutoff {c}); raise max_states or "
                "loosen the bound"
            )


def box_spectrum(
    model: BoxModel, truncation: SpectrumTruncation = DEFAULT_TRUNCATION
) -> BoxSpectrum:
    """Enumerate box eigenstates until the Boltzmann tail is negligible."""
    alpha = model.energy_unit / (BOLTZMANN_KB * model.temperature)
    cutoff, achieved = _axis_cutoff(alpha, truncation, model.dimensions)
    if cutoff**model.dimensions > truncation.max_states:
        raise CapExceededError(
            f"{cutoff**model.dimensions} states exceed max_states="
            f"{truncation.max_states}"
        )
    if model.dimensions == 1:
        qn = np.arange(1, cutoff + 1, dtype=np.int64)[:, None]
        energies = model.energy_unit * (qn[:, 0].astype(np.float64) ** 2)
        return BoxSpectrum(qn, energies, achieved)
    axis = np.arange(1, cutoff + 1, dtype=np.int64)
    cx, cy, cz = np.meshgrid(axis, axis, axis, indexing="ij")
    qn = np.column_stack([cx.ravel(), cy.ravel(), cz.ravel()])
    sq = (qn.astype(np.float64) ** 2).sum(axis=1)
    order = np.lexsort((qn[:, 2], qn[:, 1], qn[:, 0], sq))
    qn = qn[order]
    energies = model.energy_unit * sq[order]
    return BoxSpectrum(qn, energies, achieved)


def _probs_and_partition(
    spec: BoxSpectrum, model: BoxModel
) -> tuple[OneParticleDistribution, float]:
    # weights are taken relative to the ground state so that deep-cold
    # spectra keep well-defined probabilities; only the reported absolute
    # partition sum may underflow to zero there
    kT = BOLTZMANN_KB * model.temperature
    scaled = np.exp(-(spec.energies - spec.energies[0]) / kT)
    norm = float(scaled.sum())
    dist = OneParticleDistribution(scaled / norm, provenance="model")
    partition = norm * math.exp(-spec.energies[0] / kT)
    return dist, partition


def boltzmann_distribution(
    model: BoxModel, truncation: SpectrumTruncation = DEFAULT_TRUNCATION
) -> tuple[OneParticleDistribution, float]:
    """Truncated one-particle Boltzmann distribution and its partition sum."""
    spec = box_spectrum(model, truncation)
    return _probs_and_partition(spec, model)


@dataclass(frozen=True, eq=False)
class GasEntropyResult:
    exact: EntropyReport           # kB units
    sackur_tetrode: float          # kB units
    relative_gap: float
    partition_function: float
    states_retained: int
    tail_bound_achieved: float


def ideal_gas_entropy(
    model: BoxModel,
    N: int,
    truncation: SpectrumTruncation = DEFAULT_TRUNCATION,
    budget: int = 10**9,
) -> GasEntropyResult:
    """Exact occupancy entropy of N ideal-gas bosons next to the
    closed-form approximation.

    The exact path stays non-negative everywhere, including in the regime
    where the approximation has already gone negative.
    """
    if model.dimensions != 3:
        raise ValueError("ideal gas entropy requires a 3-D box model")
    if N < 1:
        raise ValueError("N must be at least 1")
    spec = box_spectrum(model, truncation)
    if len(spec) * (min(N, 1000) + 1) > budget:
        raise CapExceededError(
            f"{len(spec)} states x {N} particles exceeds the summation "
            "budget; lower N or loosen the truncation"
        )
    dist, partition = _probs_and_partition(spec, model)
    exact = multinomial_entropy(MultinomialDist(N, dist)).in_unit("kB")
    approx = sackur_tetrode(N, model.mass, model.temperature, model.side_length)
    gap = abs(exact.total - approx) / exact.total if exact.total > 0 else math.inf
    return GasEntropyResult(
        exact=exact,
        sackur_tetrode=approx,
        relative_gap=gap,
        partition_function=partition,
        states_retained=len(spec),
        tail_bound_achieved=spec.tail_bound_achieved,
    )


@dataclass(frozen=True, eq=False)
class SzilardResult:
    s_before: float            # kB units
    s_half_box: float          # one-particle entropy of the half-size box
    s_after: float
    delta: float
    partition_full: float
    partition_half: float
    states_full: int
    states_half: int
    tail_bound_achieved: float  # worse of the two spectra


def szilard_insertion(
    model: BoxModel,
    N: int = 1,
    truncation: SpectrumTruncation = DEFAULT_TRUNCATION,
    cap: int = 10**6,
) -> SzilardResult:
    """Entropy before and after inserting a piston at the box midpoint.

    For a single particle the post-insertion entropy is exactly ln 2 (the
    equiprobable side choice) plus the half-box one-particle entropy. For
    N > 1 the joint split distribution is enumerated under ``cap``.
    """
    if model.dimensions != 1:
        raise ValueError("piston insertion is modelled for 1-D boxes only")
    if N < 1:
        raise ValueError("N must be at least 1")
    half = model.with_side(model.side_length / 2.0)
    spec_full = box_spectrum(model, truncation)
    spec_half = box_spectrum(half, truncation)
    p_full, z_full = _probs_and_partition(spec_full, model)
    p_half, z_half = _probs_and_partition(spec_half, half)
    s_half = p_half.entropy()
    if N == 1:
        s_before = p_full.entropy()
        s_after = LN2 + s_half
    else:
        s_before = multinomial_entropy(MultinomialDist(N, p_full)).total
        split = SzilardSplitDist(N, 0.5, p_half, p_half)
        s_after = entropy_by_enumeration(split, cap=cap)
    return SzilardResult(
        s_before=s_before,
        s_half_box=s_half,
        s_after=s_after,
        delta=s_before - s_after,
        partition_full=z_full,
        partition_half=z_half,
        states_full=len(spec_full),
        states_half=len(spec_half),
        tail_bound_achieved=max(
            spec_full.tail_bound_achieved, spec_half.tail_bound_achieved
        ),
    )


def szilard_split_pmf(
    N: int,
    fraction: float,
    left_dist: OneParticleDistribution,
    right_dist: OneParticleDistribution,
) -> SzilardSplitDist:
    """Joint occupancy distribution over both sub-boxes after insertion."""
    return SzilardSplitDist(N, fraction, left_dist, right_dist)
