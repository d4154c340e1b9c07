"""Two-port complex field primitives and optical element constructors.

Every transfer matrix carries a :class:`Convention` tag. ``UNITARY`` scales
balanced beam splitters by 1/sqrt(2) so intensity is conserved;
``PAPER_LITERAL`` keeps the bare ``[[1, +-i], [+-i, 1]]`` entries and is only
meant for cross-checking printed amplitudes.

Port ordering is fixed: the first entry of a vector is always the
alphabetically lower port (a, c, e, ...).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Convention",
    "BasisSign",
    "ElementMatrix",
    "FieldVector",
    "ConventionMismatchError",
    "phasor",
    "bs_matrix",
    "phase_matrix",
    "compose",
    "apply",
    "intensities",
    "identity",
    "global_phase_distance",
    "equal_up_to_global_phase",
    "PORT_INDEX",
]

INV_SQRT2 = 1.0 / math.sqrt(2.0)
GLOBAL_PHASE_TOL = 1e-10
UNITARITY_TOL = 1e-12

# index of a port inside its two-port layer (a/b, c/d, e/f, ...)
PORT_INDEX = {chr(ord("a") + k): k % 2 for k in range(26)}


class ConventionMismatchError(ValueError):
    pass


class Convention(enum.Enum):
    UNITARY = "unitary"
    PAPER_LITERAL = "paper_literal"


class BasisSign(enum.Enum):
    """Phase basis of a balanced beam splitter, +pi/2 or -pi/2."""

    PLUS = 1
    MINUS = -1

    def __neg__(self) -> "BasisSign":
        return BasisSign.MINUS if self is BasisSign.PLUS else BasisSign.PLUS

    @property
    def s(self) -> int:
        return self.value

    @property
    def phi_bs(self) -> float:
        return self.value * math.pi / 2

    @property
    def symbol(self) -> str:
        return "+" if self is BasisSign.PLUS else "-"

    @classmethod
    def from_symbol(cls, text: str) -> "BasisSign":
        if text == "+":
            return cls.PLUS
        if text == "-":
            return cls.MINUS
        raise ValueError(f"unknown sign {text!r}")


def phasor(phi):
    """Return ``exp(1j*phi)``, exact at integer multiples of pi/2.

    ``np.exp(1j*pi/2)`` leaves a 6e-17 real part behind, which keeps
    coincidence values at quadrature from being exactly zero. Angles within
    a few ulps of a quarter turn are snapped to the exact unit value.
    """
    arr = np.asarray(phi, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("phase must be finite")
    quarter = arr / (math.pi / 2)
    k = np.rint(quarter)
    snap = np.abs(quarter - k) <= 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(k))
    exact = np.array([1.0, 1.0j, -1.0, -1.0j])[np.mod(k, 4).astype(int)]
    out = np.where(snap, exact, np.exp(1j * arr))
    if np.ndim(phi) == 0:
        return complex(out)
    return out


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=complex)
    if not np.all(np.isfinite(a)):
        raise ValueError("non-finite amplitude")
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class FieldVector:
    """Complex amplitudes on an ordered port pair, in units of sqrt(I_0)."""

    amps: np.ndarray
    ports: tuple = ("a", "b")

    def __post_init__(self):
        amps = _frozen(self.amps)
        if amps.shape != (2,):
            raise ValueError(f"expected two port amplitudes, got shape {amps.shape}")
        object.__setattr__(self, "amps", amps)
        object.__setattr__(self, "ports", tuple(self.ports))

    def __getitem__(self, i):
        return complex(self.amps[i])

    def __eq__(self, other):
        if not isinstance(other, FieldVector):
            return NotImplemented
        return self.ports == other.ports and np.array_equal(self.amps, other.amps)

    def __add__(self, other: "FieldVector") -> "FieldVector":
        return FieldVector(self.amps + other.amps, self.ports)

    def __rmul__(self, scalar) -> "FieldVector":
        return FieldVector(complex(scalar) * self.amps, self.ports)

    @property
    def total_intensity(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))


@dataclass(frozen=True, eq=False)
class ElementMatrix:
    """2x2 transfer matrix tagged with its scaling convention.

    ``non_unitary`` marks matrices built by mixing beam-splitter matrices;
    those are reported as-is and never renormalized.
    """

    entries: np.ndarray
    convention: Convention = Convention.UNITARY
    non_unitary: bool = False

    def __post_init__(self):
        entries = _frozen(self.entries)
        if entries.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {entries.shape}")
        object.__setattr__(self, "entries", entries)

    def __eq__(self, other):
        if not isinstance(other, ElementMatrix):
            return NotImplemented
        return (
            self.convention is other.convention
            and self.non_unitary == other.non_unitary
            and np.array_equal(self.entries, other.entries)
        )

    def __matmul__(self, other: "ElementMatrix") -> "ElementMatrix":
        return compose([self, other])

    def is_unitary(self, tol: float = UNITARITY_TOL) -> bool:
        m = self.entries
        return bool(np.max(np.abs(m.conj().T @ m - np.eye(2))) < tol)

    def operator_norm(self) -> float:
        return float(np.linalg.norm(self.entries, 2))


def identity(conv: Convention = Convention.UNITARY) -> ElementMatrix:
    return ElementMatrix(np.eye(2), conv)


def bs_matrix(sign: BasisSign, conv: Convention = Convention.UNITARY) -> ElementMatrix:
    """Balanced beam splitter ``[[1, s*i], [s*i, 1]]``, scaled by 1/sqrt(2) when unitary."""
    si = 1j * sign.s
    m = np.array([[1.0, si], [si, 1.0]], dtype=complex)
    if conv is Convention.UNITARY:
        m = INV_SQRT2 * m
    return ElementMatrix(m, conv)


def phase_matrix(port: str, phi: float, conv: Convention = Convention.UNITARY) -> ElementMatrix:
    """Diagonal phase shifter putting ``exp(i*phi)`` on ``port``.

    ``port`` is a port label (only its position within the layer matters) or
    the layer index 0/1. The matrix is unitary under both conventions; the
    tag only exists so it composes with beam splitters of either kind.
    """
    if not math.isfinite(phi):
        raise ValueError(f"phase must be finite, got {phi!r}")
    idx = port if isinstance(port, int) else PORT_INDEX.get(port)
    if idx not in (0, 1):
        raise ValueError(f"unknown port {port!r}")
    diag = [1.0 + 0j, 1.0 + 0j]
    diag[idx] = phasor(phi)
    return ElementMatrix(np.diag(diag), conv)


def compose(mats: Sequence[ElementMatrix]) -> ElementMatrix:
    """Operator product ``mats[0] @ mats[1] @ ... @ mats[-1]``.

    The rightmost matrix acts first, as in written operator notation, so a
    Mach-Zehnder is ``compose([bs2, phase, bs1])``.
    """
    mats = list(mats)
    if not mats:
        raise ValueError("compose needs at least one matrix")
    conv = mats[0].convention
    for m in mats[1:]:
        if m.convention is not conv:
            raise ConventionMismatchError(
                f"cannot compose {conv.value} with {m.convention.value} matrices"
            )
    out = mats[-1].entries
    for m in reversed(mats[:-1]):
        out = m.entries @ out
    return ElementMatrix(out, conv, any(m.non_unitary for m in mats))


def apply(m: ElementMatrix, v: FieldVector, ports: Iterable[str] | None = None) -> FieldVector:
    out_ports = tuple(ports) if ports is not None else v.ports
    return FieldVector(m.entries @ v.amps, out_ports)


def intensities(v: FieldVector) -> tuple[float, float]:
    """Per-port intensity ``|amp|**2`` in units of I_0."""
    i1, i2 = np.abs(v.amps) ** 2
    return float(i1), float(i2)


def global_phase_distance(a, b) -> float:
    """``min over |lam| = 1 of ||a - lam*b||`` (Frobenius / Euclidean norm)."""
    a = np.asarray(getattr(a, "entries", getattr(a, "amps", a)), dtype=complex).ravel()
    b = np.asarray(getattr(b, "entries", getattr(b, "amps", b)), dtype=complex).ravel()
    if a.shape != b.shape:
        raise ValueError("shape mismatch")
    overlap = np.vdot(b, a)
    lam = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    # direct residual; the expanded |a|^2 + |b|^2 - 2|<b,a>| form cancels badly
    return float(np.linalg.norm(a - lam * b))


def equal_up_to_global_phase(a, b, tol: float = GLOBAL_PHASE_TOL) -> bool:
    return global_phase_distance(a, b) < tol
