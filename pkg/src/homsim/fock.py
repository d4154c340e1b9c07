"""Two-mode occupation-number states and linear-optics transforms on them.

A state is a sparse map ``(n_first, n_second) -> amplitude``. Beam splitters
act by substituting the input creation operators,

    a^dag -> (c^dag + s*i d^dag) / sqrt(2)
    b^dag -> (s*i c^dag + d^dag) / sqrt(2)

with ``s`` the basis sign, and expanding the resulting polynomial.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .numerics import BasisSign, global_phase_distance, phasor

DEFAULT_CUTOFF = 4
PRUNE_TOL = 1e-14


class CutoffError(ValueError):
    pass


@dataclass(frozen=True)
class FockState:
    amplitudes: Mapping[tuple, complex]
    cutoff: int = DEFAULT_CUTOFF

    def __post_init__(self):
        amps = {}
        for key, amp in dict(self.amplitudes).items():
            n1, n2 = (int(k) for k in key)
            if n1 < 0 or n2 < 0:
                raise ValueError(f"negative occupation {key}")
            if n1 + n2 > self.cutoff:
                raise CutoffError(f"occupation {key} exceeds cutoff {self.cutoff}")
            amp = complex(amp)
            if not (math.isfinite(amp.real) and math.isfinite(amp.imag)):
                raise ValueError("non-finite amplitude")
            amps[(n1, n2)] = amps.get((n1, n2), 0j) + amp
        amps = {k: a for k, a in amps.items() if abs(a) > PRUNE_TOL}
        norm = math.sqrt(sum(abs(a) ** 2 for a in amps.values()))
        if norm == 0.0:
            raise ValueError("state has zero norm")
        if norm != 1.0:
            amps = {k: a / norm for k, a in amps.items()}
        object.__setattr__(self, "amplitudes", MappingProxyType(dict(sorted(amps.items()))))

    @classmethod
    def basis(cls, n1: int, n2: int, cutoff: int = DEFAULT_CUTOFF) -> "FockState":
        return cls({(n1, n2): 1.0}, cutoff)

    def amplitude(self, n1: int, n2: int) -> complex:
        return self.amplitudes.get((n1, n2), 0j)

    def prob(self, n1: int, n2: int) -> float:
        return abs(self.amplitude(n1, n2)) ** 2

    @property
    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.amplitudes.values()))

    def photon_numbers(self) -> set:
        return {n1 + n2 for n1, n2 in self.amplitudes}

    def mean_occupation(self) -> tuple[float, float]:
        m1 = sum(n1 * abs(a) ** 2 for (n1, _), a in self.amplitudes.items())
        m2 = sum(n2 * abs(a) ** 2 for (_, n2), a in self.amplitudes.items())
        return m1, m2

    def mean_product(self) -> float:
        """``<n_first * n_second>``."""
        return sum(n1 * n2 * abs(a) ** 2 for (n1, n2), a in self.amplitudes.items())

    def vector(self, keys) -> np.ndarray:
        return np.array([self.amplitude(*k) for k in keys], dtype=complex)

    def distance_up_to_global_phase(self, other: "FockState") -> float:
        keys = sorted(set(self.amplitudes) | set(other.amplitudes))
        return global_phase_distance(self.vector(keys), other.vector(keys))


def _power_terms(coeff_first: complex, coeff_second: complex, n: int):
    """Expand ``(coeff_first*x + coeff_second*y)**n`` into ``{(p, q): c}``."""
    return {
        (k, n - k): math.comb(n, k) * coeff_first ** k * coeff_second ** (n - k)
        for k in range(n + 1)
    }


def bs_transform(state: FockState, sign: BasisSign = BasisSign.PLUS) -> FockState:
    si = 1j * sign.s
    out: dict = {}
    for (n, m), amp in state.amplitudes.items():
        # |n, m> = a^n b^m / sqrt(n! m!) |0, 0>
        pa = _power_terms(1.0, si, n)
        pb = _power_terms(si, 1.0, m)
        pref = amp / math.sqrt(math.factorial(n) * math.factorial(m)) / 2.0 ** ((n + m) / 2)
        for (p1, q1), c1 in pa.items():
            for (p2, q2), c2 in pb.items():
                p, q = p1 + p2, q1 + q2
                # c^p d^q |0, 0> = sqrt(p! q!) |p, q>
                val = pref * c1 * c2 * math.sqrt(math.factorial(p) * math.factorial(q))
                out[(p, q)] = out.get((p, q), 0j) + val
    return FockState(out, state.cutoff)


def phase_transform(state: FockState, port, phi: float) -> FockState:
    """Multiply each term by ``exp(i n phi)``, ``n`` the occupation of ``port``.

    ``port`` is 0/1 or ``"first"``/``"second"``.
    """
    idx = {"first": 0, "second": 1, 0: 0, 1: 1}.get(port)
    if idx is None:
        raise ValueError(f"unknown mode {port!r}")
    return FockState(
        {k: a * phasor(k[idx] * phi) for k, a in state.amplitudes.items()},
        state.cutoff,
    )


def coincidence_prob(state: FockState) -> float:
    return state.prob(1, 1)


def bunching_probs(state: FockState) -> tuple[float, float]:
    return state.prob(2, 0), state.prob(0, 2)


def single_photon_mzi(zeta: float, sign: BasisSign = BasisSign.PLUS) -> tuple[float, float]:
    """Detection probabilities ``(P_e, P_f)`` for one photon entering port a."""
    st = bs_transform(FockState.basis(1, 0), sign)
    st = phase_transform(st, "second", zeta)
    st = bs_transform(st, sign)
    return st.prob(1, 0), st.prob(0, 1)


def subspace_matrix(n_photons: int, sign: BasisSign = BasisSign.PLUS) -> np.ndarray:
    """Matrix of ``bs_transform`` on the fixed-photon-number subspace.

    Basis order is ``(n, 0), (n-1, 1), ..., (0, n)``.
    """
    keys = [(n_photons - k, k) for k in range(n_photons + 1)]
    cols = []
    for k in keys:
        out = bs_transform(FockState.basis(*k, cutoff=max(DEFAULT_CUTOFF, n_photons)), sign)
        cols.append(out.vector(keys))
    return np.array(cols).T
