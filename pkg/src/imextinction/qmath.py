"""Small numeric core: 2x2 polarization density matrices and entropy helpers."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

ATOL = 1e-9
_STATE_TOL = 1e-12

_SQRT_HALF = math.sqrt(0.5)
_KETS = {
    "H": np.array([1.0, 0.0], dtype=complex),
    "V": np.array([0.0, 1.0], dtype=complex),
    "PLUS": np.array([_SQRT_HALF, _SQRT_HALF], dtype=complex),
    "MINUS": np.array([_SQRT_HALF, -_SQRT_HALF], dtype=complex),
}


def check_probability(x: float, name: str = "probability") -> float:
    x = float(x)
    if not (0.0 <= x <= 1.0):
        raise DomainError(f"{name} must lie in [0, 1], got {x!r}")
    return x


@dataclass(frozen=True, eq=False)
class PolarizationDensityMatrix:
    """A single-photon polarization state in the {|H>, |V>} basis.

    Construction validates hermiticity, unit trace and positivity at 1e-12.
    """

    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.shape != (2, 2) or not np.all(np.isfinite(m)):
            raise DomainError(f"density matrix must be a finite 2x2 array, got {m!r}")
        if np.max(np.abs(m - m.conj().T)) > _STATE_TOL:
            raise DomainError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > _STATE_TOL:
            raise DomainError(f"density matrix trace {np.trace(m).real!r} != 1")
        if np.min(np.linalg.eigvalsh(m)) < -_STATE_TOL:
            raise DomainError("density matrix has a negative eigenvalue")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @classmethod
    def pure(cls, label: str) -> PolarizationDensityMatrix:
        """One of the four BB84 states: ``H``, ``V``, ``PLUS`` or ``MINUS``."""
        ket = _KETS[label.upper()]
        return cls(np.outer(ket, ket.conj()))

    @classmethod
    def maximally_mixed(cls) -> PolarizationDensityMatrix:
        return cls(0.5 * np.eye(2, dtype=complex))

    def __getitem__(self, idx):
        return self.entries[idx]

    def purity(self) -> float:
        return float(np.real(np.trace(self.entries @ self.entries)))

    def expectation(self, label: str) -> float:
        """Population <psi|rho|psi> for one of the BB84 kets."""
        ket = _KETS[label.upper()]
        return float(np.real(ket.conj() @ self.entries @ ket))

    def allclose(self, other: PolarizationDensityMatrix, atol: float = ATOL) -> bool:
        return bool(np.allclose(self.entries, other.entries, rtol=0.0, atol=atol))

    def __repr__(self) -> str:
        return f"PolarizationDensityMatrix({self.entries.tolist()!r})"


def binary_entropy(x: float) -> float:
    """Shannon entropy H(x) in bits, with H(0) = H(1) = 0."""
    x = check_probability(x, "entropy argument")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def trace_distance(a: PolarizationDensityMatrix, b: PolarizationDensityMatrix) -> float:
    """Half the trace norm of ``a - b``."""
    eig = np.linalg.eigvalsh(a.entries - b.entries)
    return 0.5 * float(np.sum(np.abs(eig)))


def mix(a: PolarizationDensityMatrix, b: PolarizationDensityMatrix, w: float) -> PolarizationDensityMatrix:
    """Convex combination ``w*a + (1-w)*b``."""
    w = check_probability(w, "mixing weight")
    return PolarizationDensityMatrix(w * a.entries + (1.0 - w) * b.entries)
