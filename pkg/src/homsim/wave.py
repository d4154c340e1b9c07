"""Classical coherence-optics evaluation of the beam-splitter and MZI setups.

Intensities are in units of I_0 = |E_0|**2 with E_0 = 1. The normalized
coincidence of two output intensities is

    R = I_1 * I_2 / ((I_1 + I_2) / 2)**2

which equals cos(theta)**2 for the two-input beam splitter and does not
depend on the overall scale of the transfer matrix.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .numerics import (
    BasisSign,
    Convention,
    ElementMatrix,
    FieldVector,
    apply,
    bs_matrix,
    compose,
    intensities,
    phase_matrix,
    phasor,
)

TWO_PI = 2.0 * math.pi
BLOCK_SIZE = 1 << 16
SCENARIOS = ("hom", "mzi")


class UndefinedCoincidenceError(ValueError):
    """Raised when both output intensities vanish."""


class UnknownScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class RelativePhase:
    """Inter-photon phase ``theta`` and MZI path phase ``zeta``, reduced to [0, 2pi)."""

    theta: float | None = None
    zeta: float | None = None

    def __post_init__(self):
        for name in ("theta", "zeta"):
            val = getattr(self, name)
            if val is None:
                continue
            if not math.isfinite(val):
                raise ValueError(f"{name} must be finite")
            red = math.fmod(val, TWO_PI)
            if red < 0:
                red += TWO_PI
            if red >= TWO_PI:
                red = 0.0
            object.__setattr__(self, name, red)


@dataclass(frozen=True)
class CoincidenceStat:
    r_value: float

    def __post_init__(self):
        if not self.r_value >= 0.0:
            raise ValueError(f"coincidence must be non-negative, got {self.r_value}")

    def __float__(self):
        return self.r_value


@dataclass(frozen=True)
class UniformTheta:
    """Random phase drawn uniformly on [0, 2pi)."""


@dataclass(frozen=True)
class FixedTheta:
    value: float


PhaseDistribution = Union[UniformTheta, FixedTheta]


@dataclass(frozen=True)
class EnsembleStats:
    n_samples: int
    mean_intensity: tuple
    mean_r: float
    var_r: float
    seed: int

    @property
    def stderr_r(self) -> float:
        return math.sqrt(self.var_r / self.n_samples)


def hom_input(theta: float) -> FieldVector:
    return FieldVector([1.0, phasor(theta)], ("a", "b"))


def hom_outputs(theta: float, sign: BasisSign = BasisSign.PLUS,
                conv: Convention = Convention.UNITARY) -> tuple[float, float]:
    """Output intensities ``(I_c, I_d)`` of a balanced BS fed by ``[E_0, E_0 e^{i theta}]``.

    Under the unitary convention this is ``(1 - s sin(theta), 1 + s sin(theta))``
    for basis sign ``s``.
    """
    out = apply(bs_matrix(sign, conv), hom_input(theta), ("c", "d"))
    return intensities(out)


def coincidence_normalized(i1: float, i2: float) -> CoincidenceStat:
    total = i1 + i2
    if not total > 0.0:
        raise UndefinedCoincidenceError("coincidence undefined for zero total intensity")
    mean = total / 2.0
    return CoincidenceStat((i1 * i2) / (mean * mean))


def mzi_transfer(zeta: float, conv: Convention = Convention.UNITARY) -> ElementMatrix:
    bs = bs_matrix(BasisSign.PLUS, conv)
    return compose([bs, phase_matrix("d", zeta, conv), bs])


def mzi_fringe(zeta_grid: Sequence[float]) -> list[tuple[float, float, float]]:
    """``(zeta, I_e, I_f)`` for a single input ``[E_0, 0]`` on port a."""
    grid = list(zeta_grid)
    if not grid:
        raise ValueError("zeta grid must be non-empty")
    src = FieldVector([1.0, 0.0], ("a", "b"))
    rows = []
    for z in grid:
        i_e, i_f = intensities(apply(mzi_transfer(z), src, ("e", "f")))
        rows.append((z, i_e, i_f))
    return rows


# --- Monte Carlo -----------------------------------------------------------

def _block_amplitudes(scenario: str, phases: np.ndarray) -> np.ndarray:
    """Output amplitudes, shape (2, n), for a vector of phases."""
    bs = bs_matrix(BasisSign.PLUS).entries
    if scenario == "hom":
        inp = np.vstack([np.ones_like(phases, dtype=complex), phasor(phases)])
        return bs @ inp
    # mzi: [1, 0] -> BS -> exp(i zeta) on d -> BS
    mid = bs @ np.array([[1.0 + 0j], [0.0]])
    mid = np.vstack([np.repeat(mid[0], phases.size), mid[1] * phasor(phases)])
    return bs @ mid


def _block_stats(scenario, dist, seed, block, count):
    if isinstance(dist, FixedTheta):
        phases = np.full(count, float(dist.value))
    else:
        ss = np.random.SeedSequence(entropy=seed, spawn_key=(block,))
        phases = np.random.default_rng(ss).uniform(0.0, TWO_PI, count)
    amps = _block_amplitudes(scenario, phases)
    inten = np.abs(amps) ** 2
    total = inten[0] + inten[1]
    if np.any(total <= 0.0):
        raise UndefinedCoincidenceError("sample with zero total intensity")
    half = total / 2.0
    r = inten[0] * inten[1] / (half * half)
    mean_r = float(np.mean(r))
    m2 = float(np.sum((r - mean_r) ** 2))
    return count, inten.mean(axis=1), mean_r, m2


def _merge(a, b):
    # Chan et al. pairwise update of count, means and M2
    na, mean_i_a, mean_a, m2a = a
    nb, mean_i_b, mean_b, m2b = b
    n = na + nb
    delta = mean_b - mean_a
    mean = mean_a + delta * nb / n
    m2 = m2a + m2b + delta * delta * na * nb / n
    mean_i = mean_i_a + (mean_i_b - mean_i_a) * nb / n
    return n, mean_i, mean, m2


def ensemble_average(scenario: str, dist: PhaseDistribution, n: int, seed: int,
                     workers: int = 1) -> EnsembleStats:
    """Average intensities and coincidence over random or fixed phases.

    ``scenario`` is ``"hom"`` (phase is theta between the two inputs) or
    ``"mzi"`` (phase is the internal path phase zeta). ``<R>`` is the mean
    of per-sample coincidences, not R of the mean intensities.

    Samples are drawn in fixed blocks of ``BLOCK_SIZE``; block ``k`` uses
    its own stream spawned from ``seed``. Blocks are merged in index order,
    so the result is bit-identical for any ``workers``.
    """
    scenario = scenario.lower()
    if scenario not in SCENARIOS:
        raise UnknownScenarioError(f"unknown scenario {scenario!r}; expected one of {SCENARIOS}")
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    if not isinstance(dist, (UniformTheta, FixedTheta)):
        raise TypeError(f"unsupported phase distribution {dist!r}")

    counts = [BLOCK_SIZE] * (n // BLOCK_SIZE)
    if n % BLOCK_SIZE:
        counts.append(n % BLOCK_SIZE)
    jobs = [(scenario, dist, seed, k, c) for k, c in enumerate(counts)]
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda j: _block_stats(*j), jobs))
    else:
        parts = [_block_stats(*j) for j in jobs]

    acc = parts[0]
    for p in parts[1:]:
        acc = _merge(acc, p)
    total, mean_i, mean_r, m2 = acc
    return EnsembleStats(
        n_samples=total,
        mean_intensity=(float(mean_i[0]), float(mean_i[1])),
        mean_r=mean_r,
        var_r=m2 / total,
        seed=seed,
    )
