"""Signal-state model for a finite intensity-modulator extinction ratio.

An IM that leaks a fraction 1/r of the blocked power turns each prepared
BB84 state into a mixture of the ideal state and white noise,

    rho_signal = (r-1)/(r+3) rho_ideal + 4/(r+3) I/2,

which lifts the observed QBER by an affine map with floor p = 2/(r+3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, NoiseFloorError
from .qmath import ATOL, PolarizationDensityMatrix, check_probability, mix

R_MAX = 1e12


@dataclass(frozen=True)
class ExtinctionModel:
    """Linear extinction ratio r = I_on / I_off and the weights derived from it.

    ``r`` is clipped to ``R_MAX`` so the perfect-IM limit stays finite.
    """

    r: float

    def __post_init__(self):
        r = float(self.r)
        if math.isnan(r) or r <= 1.0:
            raise DomainError(f"extinction ratio must exceed 1, got {r!r}")
        object.__setattr__(self, "r", min(r, R_MAX))

    @classmethod
    def perfect(cls) -> ExtinctionModel:
        return cls(R_MAX)

    @property
    def r_db(self) -> float:
        return 10.0 * math.log10(self.r)

    @property
    def p(self) -> float:
        """Noise floor of the observed QBER."""
        return 2.0 / (self.r + 3.0)

    @property
    def w_ideal(self) -> float:
        """Weight of the ideal state, equal to 1 - 2p without the cancellation."""
        return (self.r - 1.0) / (self.r + 3.0)

    @property
    def w_noise(self) -> float:
        return 4.0 / (self.r + 3.0)

    @property
    def p_on(self) -> float:
        # Lossless "on" state; only the ratio P_on/P_off enters the model.
        return 1.0

    @property
    def p_off(self) -> float:
        return 1.0 / self.r


def extinction_from_db(r_db: float) -> ExtinctionModel:
    """Build the model from a power extinction ratio in dB."""
    r_db = float(r_db)
    if not r_db > 0.0:
        raise DomainError(f"extinction ratio in dB must be positive, got {r_db!r}")
    return ExtinctionModel(10.0 ** (r_db / 10.0))


def extinction_from_ratio(r: float) -> ExtinctionModel:
    return ExtinctionModel(r)


@dataclass(frozen=True)
class PulseParams:
    """Coherent amplitudes entering the coupler.

    ``alpha`` is the amplitude of the pulse passed by the "on" IM and
    ``beta`` that of each leaked pulse. ``alpha == beta`` is allowed as the
    fully-leaky limit r = 1.
    """

    mu: float
    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0.0 and self.alpha >= self.beta >= 0.0):
            raise DomainError(
                f"pulse amplitudes need alpha >= beta >= 0 and alpha > 0, "
                f"got alpha={self.alpha!r}, beta={self.beta!r}"
            )

    @classmethod
    def from_extinction(cls, em: ExtinctionModel, mu: float) -> PulseParams:
        if not mu > 0.0:
            raise DomainError(f"mu must be positive, got {mu!r}")
        return cls(mu=mu, alpha=math.sqrt(em.p_on) * mu / 2.0, beta=math.sqrt(em.p_off) * mu / 2.0)

    @property
    def r(self) -> float:
        if self.beta == 0.0:
            return math.inf
        return self.alpha**2 / self.beta**2

    def extinction(self) -> ExtinctionModel:
        return ExtinctionModel(min(self.r, R_MAX))


def signal_state(ideal: PolarizationDensityMatrix, em: ExtinctionModel) -> PolarizationDensityMatrix:
    """Mix a pure BB84 state with white noise at the IM's leak weight."""
    if abs(ideal.purity() - 1.0) > ATOL:
        raise DomainError(f"ideal state must be pure, purity = {ideal.purity():.12g}")
    return mix(ideal, PolarizationDensityMatrix.maximally_mixed(), em.w_ideal)


def modified_qber(e1: float, em: ExtinctionModel) -> float:
    """Observed QBER e1' = (1-2p) e1 + p for an underlying single-photon QBER e1."""
    e1 = check_probability(e1, "e1")
    if e1 > 0.5:
        raise DomainError(f"e1 must not exceed 1/2, got {e1!r}")
    return em.w_ideal * e1 + em.p


def invert_qber(e1_prime: float, em: ExtinctionModel) -> float:
    """Underlying QBER (e1' - p)/(1 - 2p); rejects values under the noise floor."""
    e1_prime = check_probability(e1_prime, "e1'")
    if e1_prime > 0.5:
        raise DomainError(f"e1' must not exceed 1/2, got {e1_prime!r}")
    p = em.p
    if e1_prime < p - ATOL:
        raise NoiseFloorError(e1_prime, p)
    return min(0.5, max(0.0, (e1_prime - p) / em.w_ideal))


def equivalent_switch(em: ExtinctionModel) -> dict[str, float]:
    """Routing probabilities of the equivalent optical switch (ideal vs noise)."""
    return {"ideal": em.w_ideal, "noise": em.w_noise}


__all__ = [
    "R_MAX",
    "ExtinctionModel",
    "PulseParams",
    "extinction_from_db",
    "extinction_from_ratio",
    "signal_state",
    "modified_qber",
    "invert_qber",
    "equivalent_switch",
]
