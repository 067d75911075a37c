"""Secret key rates: GLLP single-photon BB84 and asymptotic decoy-state BB84.

Each rate comes in two flavours. The baseline charges every observed error
to Eve. The modified one recognises that the white-noise fraction injected
by a leaky intensity modulator carries no information to Eve, so privacy
amplification only needs to cover the ideal-state fraction (1 - 2p) and its
error rate (e - p)/(1 - 2p).

Rates are per sifted bit (single photon) or per signal pulse (decoy) and
are returned signed; clamping to zero is left to the reporting layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NoiseFloorError
from .qmath import ATOL, binary_entropy, check_probability
from .state_model import ExtinctionModel, invert_qber

DEFAULT_F_EC = 1.22


@dataclass(frozen=True)
class ChannelProfile:
    """Fiber link and detector parameters for the decoy-state rate.

    ``f_ec`` is either a constant error-correction inefficiency or a table
    of ``(E_mu, f)`` pairs interpolated linearly (clamped at the ends).
    """

    y0: float
    eta_bob: float
    alpha_fiber: float
    e_detect: float
    mu: float
    e0: float = 0.5
    q: float = 0.5
    f_ec: float | tuple[tuple[float, float], ...] = DEFAULT_F_EC

    def __post_init__(self):
        for name in ("y0", "eta_bob", "e_detect", "e0", "q"):
            check_probability(getattr(self, name), name)
        if self.e_detect > 0.5:
            raise DomainError(f"e_detect must not exceed 1/2, got {self.e_detect!r}")
        if not self.alpha_fiber >= 0.0:
            raise DomainError(f"alpha_fiber must be non-negative, got {self.alpha_fiber!r}")
        if not self.mu > 0.0:
            raise DomainError(f"mu must be positive, got {self.mu!r}")
        if isinstance(self.f_ec, (int, float)):
            object.__setattr__(self, "f_ec", float(self.f_ec))
            if not self.f_ec >= 1.0:
                raise DomainError(f"f_ec must be >= 1, got {self.f_ec!r}")
        else:
            table = tuple(sorted((float(e), float(f)) for e, f in self.f_ec))
            if not table or any(f < 1.0 for _, f in table):
                raise DomainError("f_ec table must be non-empty with every f >= 1")
            object.__setattr__(self, "f_ec", table)

    def ec_efficiency(self, e_mu: float) -> float:
        if isinstance(self.f_ec, float):
            return self.f_ec
        xs, ys = zip(*self.f_ec)
        return float(np.interp(e_mu, xs, ys))


@dataclass(frozen=True)
class DecoyObservables:
    eta: float
    q_mu: float
    e_mu: float
    y1: float
    q1: float
    e1_upper: float
    e1_mod: float
    y0: float = 0.0


def _check_qber(e: float, name: str) -> float:
    e = check_probability(e, name)
    if e > 0.5:
        raise DomainError(f"{name} must not exceed 1/2, got {e!r}")
    return e


def gllp_rate(e1: float) -> float:
    """1 - 2 H(e1): error correction and privacy amplification each cost H(e1)."""
    e1 = _check_qber(e1, "e1")
    return 1.0 - 2.0 * binary_entropy(e1)


def modified_single_photon_rate(e1_prime: float, em: ExtinctionModel) -> float:
    """1 - H(e') - (1-2p) H((e'-p)/(1-2p)) at observed QBER e'."""
    e1_prime = _check_qber(e1_prime, "e1'")
    e1 = invert_qber(e1_prime, em)
    return 1.0 - binary_entropy(e1_prime) - em.w_ideal * binary_entropy(e1)


def eta_of_distance(profile: ChannelProfile, distance_km: float) -> float:
    """Overall transmittance eta_bob * 10^(-alpha L / 10)."""
    if not distance_km >= 0.0:
        raise DomainError(f"distance must be non-negative, got {distance_km!r}")
    return profile.eta_bob * 10.0 ** (-profile.alpha_fiber * distance_km / 10.0)


def _ratio(num: float, den: float) -> float:
    # No clicks at all: treat the error rate as zero; every rate term then vanishes.
    return num / den if den > 0.0 else 0.0


def decoy_observables(profile: ChannelProfile, em: ExtinctionModel, distance_km: float) -> DecoyObservables:
    """Gain, QBER and single-photon bounds under the standard fiber yield model.

    Y_i = Y0 + 1 - (1 - eta)^i, so that Q_mu = Y0 + 1 - exp(-eta mu).
    """
    p = em.p
    if profile.e_detect < p - ATOL:
        raise NoiseFloorError(profile.e_detect, p, "e_detect")
    eta = eta_of_distance(profile, distance_km)
    y0, mu, ed, e0 = profile.y0, profile.mu, profile.e_detect, profile.e0

    signal_clicks = -math.expm1(-eta * mu)
    q_mu = y0 + signal_clicks
    e_mu = _ratio(e0 * y0 + ed * signal_clicks, q_mu)
    y1 = y0 + eta
    q1 = y1 * mu * math.exp(-mu)
    e1_upper = _ratio(e0 * y0 + ed * eta, y0 + eta)
    ed_ideal = max(0.0, (ed - p) / em.w_ideal)
    e1_mod = _ratio(y0 / 2.0 + ed_ideal * eta, y0 + eta)
    return DecoyObservables(
        eta=eta, q_mu=q_mu, e_mu=e_mu, y1=y1, q1=q1, e1_upper=e1_upper, e1_mod=e1_mod, y0=y0
    )


def truncated_gain_check(profile: ChannelProfile, distance_km: float, i_max: int) -> tuple[float, float]:
    """Q_mu and E_mu from the photon-number sums cut at ``i_max`` photons."""
    if i_max < 10:
        raise DomainError(f"i_max must be >= 10, got {i_max}")
    eta = eta_of_distance(profile, distance_km)
    y0, mu, ed, e0 = profile.y0, profile.mu, profile.e_detect, profile.e0
    q_sum = 0.0
    qe_sum = 0.0
    for i in range(i_max + 1):
        poisson = math.exp(-mu + i * math.log(mu) - math.lgamma(i + 1))
        clicks = -math.expm1(i * math.log1p(-eta)) if eta < 1.0 else float(i > 0)
        y_i = y0 + clicks
        q_sum += y_i * poisson
        # Q_i e_i = Poisson_i (e0 Y0 + e_detect (1 - (1-eta)^i)); avoids 0/0 when Y_i = 0.
        qe_sum += poisson * (e0 * y0 + ed * clicks)
    return q_sum, _ratio(qe_sum, q_sum)


def decoy_rate(obs: DecoyObservables, profile: ChannelProfile) -> float:
    """q {-Q_mu f(E_mu) H(E_mu) + Q1 [1 - H(e1_U)]}."""
    leak = obs.q_mu * profile.ec_efficiency(obs.e_mu) * binary_entropy(obs.e_mu)
    return profile.q * (-leak + obs.q1 * (1.0 - binary_entropy(obs.e1_upper)))


def privacy_fraction(obs: DecoyObservables, em: ExtinctionModel) -> float:
    """(Y0 + (1-2p) eta)/(Y0 + eta): share of single-photon clicks Eve can touch."""
    den = obs.y0 + obs.eta
    if den == 0.0:
        return em.w_ideal
    return (obs.y0 + em.w_ideal * obs.eta) / den


def decoy_rate_modified(obs: DecoyObservables, profile: ChannelProfile, em: ExtinctionModel) -> float:
    """q {-Q_mu f(E_mu) H(E_mu) + Q1 [1 - frac * H(e1_d)]}."""
    if profile.e_detect < em.p - ATOL:
        raise NoiseFloorError(profile.e_detect, em.p, "e_detect")
    leak = obs.q_mu * profile.ec_efficiency(obs.e_mu) * binary_entropy(obs.e_mu)
    pa = privacy_fraction(obs, em) * binary_entropy(obs.e1_mod)
    return profile.q * (-leak + obs.q1 * (1.0 - pa))


def rates_at_distance(profile: ChannelProfile, em: ExtinctionModel, distance_km: float) -> tuple[float, float]:
    """(baseline, modified) decoy rates per pulse at one distance."""
    obs = decoy_observables(profile, em, distance_km)
    return decoy_rate(obs, profile), decoy_rate_modified(obs, profile, em)
