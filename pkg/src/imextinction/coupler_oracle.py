"""Brute-force check of the 4x1 coupler's single-photon output.

Four phase-randomized coherent pulses (one passed by its IM, three leaked)
are combined pairwise on polarizing beam splitters into paths A and B, then
interfered on a 50/50 beam splitter. Only output path C is kept and projected
onto one photon.

Two routes compute the same single-photon state for a fixed phase tuple:

* the coherent shortcut: linear optics maps coherent inputs to a coherent
  output, so path C is |h>|v> with known amplitudes;
* a truncated Fock expansion that applies the beam splitter as a mode
  substitution term by term, traces out path D and keeps n_C = 1.

The pair of leaked pulses on path B enters through phase factors whose form
depends on ``Convention``:

* ``STRICT``: (e^{i tc} +/- e^{i td}) / 2, which is not unit modulus;
* ``PAPER``: two independent unit-modulus phases e^{i tc'}, e^{i td'}.

All amplitudes are written in the *encoding frame*: the rectilinear basis for
H/V and the diagonal basis for +/-, with the passed pulse on the first mode
for H and PLUS and on the second for V and MINUS. States are rotated back
to the {|H>, |V>} basis on output.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CutoffTooSmallError, DomainError
from .qmath import PolarizationDensityMatrix, mix, trace_distance
from .state_model import PulseParams

TAIL_BOUND = 1e-12
DEFAULT_GRID = 8
DEFAULT_CUTOFF = 8

_HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / math.sqrt(2.0)


class Convention(str, enum.Enum):
    STRICT = "strict"
    PAPER = "paper"


class EncodedState(str, enum.Enum):
    H = "H"
    V = "V"
    PLUS = "PLUS"
    MINUS = "MINUS"

    @property
    def diagonal(self) -> bool:
        return self in (EncodedState.PLUS, EncodedState.MINUS)

    @property
    def on_first_mode(self) -> bool:
        return self in (EncodedState.H, EncodedState.PLUS)

    @property
    def orthogonal(self) -> EncodedState:
        return {
            EncodedState.H: EncodedState.V,
            EncodedState.V: EncodedState.H,
            EncodedState.PLUS: EncodedState.MINUS,
            EncodedState.MINUS: EncodedState.PLUS,
        }[self]


@dataclass(frozen=True)
class CouplerScenario:
    pulse: PulseParams
    phase_grid_points: int = DEFAULT_GRID
    fock_cutoff: int = DEFAULT_CUTOFF
    convention: Convention = Convention.PAPER
    encoded_state: EncodedState = EncodedState.H

    def __post_init__(self):
        if self.phase_grid_points < 4:
            raise DomainError(f"phase_grid_points must be >= 4, got {self.phase_grid_points}")
        if self.fock_cutoff < 1:
            raise DomainError(f"fock_cutoff must be positive, got {self.fock_cutoff}")
        object.__setattr__(self, "convention", Convention(self.convention))
        object.__setattr__(self, "encoded_state", EncodedState(self.encoded_state))

    @property
    def total_mean_photons(self) -> float:
        """alpha^2 + 3 beta^2, the mean photon number entering the coupler."""
        return self.pulse.alpha**2 + 3.0 * self.pulse.beta**2

    def tail_probability(self, cutoff: int | None = None) -> float:
        n = self.fock_cutoff if cutoff is None else cutoff
        s = self.total_mean_photons
        return math.exp(-s + n * math.log(s) - math.lgamma(n + 1)) if s > 0 else 0.0


@dataclass(frozen=True)
class TwoModeAmplitude:
    """Coherent amplitudes on the two polarization modes of one path.

    With ``diagonal`` set, ``h`` and ``v`` are the |+> and |-> amplitudes.
    """

    h: complex
    v: complex
    diagonal: bool = False

    def __post_init__(self):
        if not (np.isfinite(self.h) and np.isfinite(self.v)):
            raise DomainError("amplitudes must be finite")


@dataclass(frozen=True, eq=False)
class TruncatedFockState:
    """Two-mode Fock amplitudes c[n1, n2], zero outside n1 + n2 <= cutoff."""

    coefficients: np.ndarray

    def __post_init__(self):
        if self.norm() > 1.0 + 1e-9:
            raise DomainError(f"truncated state norm {self.norm()!r} exceeds 1")

    @property
    def cutoff(self) -> int:
        return self.coefficients.shape[0] - 1

    def norm(self) -> float:
        return float(np.sum(np.abs(self.coefficients) ** 2))

    @classmethod
    def coherent(cls, amp1: complex, amp2: complex, cutoff: int) -> TruncatedFockState:
        n = np.arange(cutoff + 1)
        log_fact = np.array([math.lgamma(k + 1) for k in n])
        c = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
        pref = math.exp(-(abs(amp1) ** 2 + abs(amp2) ** 2) / 2.0)
        for n1 in n:
            for n2 in range(cutoff + 1 - n1):
                c[n1, n2] = (
                    pref * amp1**n1 * amp2**n2 * math.exp(-0.5 * (log_fact[n1] + log_fact[n2]))
                )
        return cls(c)


@dataclass(frozen=True)
class DiscrepancyReport:
    convention: str
    r: float
    mu: float
    cutoff: int
    grid: int
    ideal_weight_fit: float
    ideal_weight_paper: float
    noise_weight_fit: float
    noise_weight_paper: float
    trace_distance: float
    weight: float
    max_coherence: float

    CSV_COLUMNS = (
        "convention",
        "r",
        "mu",
        "cutoff",
        "grid",
        "ideal_weight_fit",
        "ideal_weight_paper",
        "noise_weight_fit",
        "noise_weight_paper",
        "trace_distance",
    )

    def csv_row(self) -> list[str]:
        row = []
        for name in self.CSV_COLUMNS:
            val = getattr(self, name)
            row.append(f"{val:.12g}" if isinstance(val, float) else str(val))
        return row


def reports_to_csv(reports: list[DiscrepancyReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(DiscrepancyReport.CSV_COLUMNS)
    for rep in reports:
        w.writerow(rep.csv_row())
    return buf.getvalue()


def _path_amplitudes(scenario: CouplerScenario, ta, tb, tc, td):
    """Input amplitudes (A1, A2, B1, B2) in the encoding frame.

    Works elementwise on scalars or arrays of phases.
    """
    alpha, beta = scenario.pulse.alpha, scenario.pulse.beta
    on, off = (alpha, beta) if scenario.encoded_state.on_first_mode else (beta, alpha)
    a1 = np.exp(1j * ta) * on
    a2 = np.exp(1j * tb) * off
    if scenario.convention is Convention.STRICT:
        ec, ed = np.exp(1j * tc), np.exp(1j * td)
        phi_c = (ec + ed) / 2.0
        phi_d = (ec - ed) / 2.0
    else:
        phi_c = np.exp(1j * tc)
        phi_d = np.exp(1j * td)
    return a1, a2, beta * phi_c, beta * phi_d


def _output_amplitudes(scenario: CouplerScenario, ta, tb, tc, td):
    a1, a2, b1, b2 = _path_amplitudes(scenario, ta, tb, tc, td)
    root2 = math.sqrt(2.0)
    return (a1 + b1) / root2, (a2 + b2) / root2


def _to_rectilinear(m: np.ndarray, diagonal: bool) -> np.ndarray:
    if not diagonal:
        return m
    return _HADAMARD @ m @ _HADAMARD.conj().T


def _normalized_state(m: np.ndarray, diagonal: bool) -> PolarizationDensityMatrix:
    m = _to_rectilinear(m, diagonal)
    m = m / np.trace(m).real
    # Clean the rounding-level anti-Hermitian part left by the average.
    return PolarizationDensityMatrix(0.5 * (m + m.conj().T))


def propagate_coherent(scenario: CouplerScenario, phases) -> TwoModeAmplitude:
    """Coherent amplitude on output path C for one phase tuple (ta, tb, tc, td)."""
    ta, tb, tc, td = (float(x) for x in phases)
    h, v = _output_amplitudes(scenario, ta, tb, tc, td)
    return TwoModeAmplitude(complex(h), complex(v), scenario.encoded_state.diagonal)


def single_photon_component(amp: TwoModeAmplitude) -> tuple[float, PolarizationDensityMatrix | None]:
    """Probability and state of the one-photon sector of the coherent state |h>|v>.

    Returns ``(0.0, None)`` for the vacuum, whose one-photon state is undefined.
    """
    h, v = complex(amp.h), complex(amp.v)
    s = abs(h) ** 2 + abs(v) ** 2
    if s == 0.0:
        return 0.0, None
    m = np.array(
        [[abs(h) ** 2, h * v.conjugate()], [h.conjugate() * v, abs(v) ** 2]], dtype=complex
    )
    return math.exp(-s) * s, _normalized_state(m, amp.diagonal)


def phase_grid(points: int) -> np.ndarray:
    return 2.0 * math.pi * np.arange(points) / points


def phase_averaged_state(scenario: CouplerScenario) -> tuple[PolarizationDensityMatrix, float]:
    """Average weight * state over a uniform grid in all four phases.

    Returns the normalized averaged state and the mean one-photon probability.
    """
    g = phase_grid(scenario.phase_grid_points)
    ta, tb, tc, td = np.meshgrid(g, g, g, g, indexing="ij")
    h, v = _output_amplitudes(scenario, ta.ravel(), tb.ravel(), tc.ravel(), td.ravel())
    damp = np.exp(-(np.abs(h) ** 2 + np.abs(v) ** 2))
    m = np.empty((2, 2), dtype=complex)
    m[0, 0] = np.mean(damp * np.abs(h) ** 2)
    m[1, 1] = np.mean(damp * np.abs(v) ** 2)
    m[0, 1] = np.mean(damp * h * v.conj())
    m[1, 0] = m[0, 1].conjugate()
    weight = float(np.trace(m).real)
    if weight == 0.0:
        raise DomainError("no single-photon output: all amplitudes vanish")
    return _normalized_state(m, scenario.encoded_state.diagonal), weight


@lru_cache(maxsize=8)
def beam_splitter_transfer(cutoff: int) -> np.ndarray:
    """Amplitudes T[na, nb, nc, nd] of |na, nb> -> |nc, nd> for a 50/50 splitter.

    Obtained by expanding (a^+)^na (b^+)^nb with a^+ -> (c^+ + d^+)/sqrt2 and
    b^+ -> (c^+ - d^+)/sqrt2. Inputs are limited to ``cutoff`` photons per mode.
    """
    nmax = 2 * cutoff
    t = np.zeros((cutoff + 1, cutoff + 1, nmax + 1, nmax + 1))
    lf = [math.lgamma(k + 1) for k in range(nmax + 1)]
    for na in range(cutoff + 1):
        for nb in range(cutoff + 1):
            scale = 2.0 ** (-(na + nb) / 2.0) * math.exp(-0.5 * (lf[na] + lf[nb]))
            for k in range(na + 1):
                for l in range(nb + 1):
                    nc, nd = k + l, na + nb - k - l
                    sign = -1.0 if (nb - l) % 2 else 1.0
                    t[na, nb, nc, nd] += (
                        scale * sign * math.comb(na, k) * math.comb(nb, l)
                        * math.exp(0.5 * (lf[nc] + lf[nd]))
                    )
    return t


def check_cutoff(scenario: CouplerScenario) -> None:
    tail = scenario.tail_probability()
    if tail >= TAIL_BOUND:
        raise CutoffTooSmallError(
            f"fock_cutoff={scenario.fock_cutoff} leaves tail probability {tail:.3g} "
            f">= {TAIL_BOUND:g} for mean photon number {scenario.total_mean_photons:.6g}"
        )


def fock_brute_force(scenario: CouplerScenario, phases) -> tuple[float, PolarizationDensityMatrix | None]:
    """Single-photon output of path C from an explicit truncated Fock calculation."""
    check_cutoff(scenario)
    n = scenario.fock_cutoff
    ta, tb, tc, td = (float(x) for x in phases)
    a1, a2, b1, b2 = (complex(x) for x in _path_amplitudes(scenario, ta, tb, tc, td))
    path_a = TruncatedFockState.coherent(a1, a2, n)
    path_b = TruncatedFockState.coherent(b1, b2, n)
    # psi_in[a1, a2, b1, b2]; splitter acts on (A1, B1) and (A2, B2).
    psi_in = np.einsum("pq,rs->pqrs", path_a.coefficients, path_b.coefficients)
    t = beam_splitter_transfer(n)[:, :, :2, :]
    out = np.einsum("pqrs,prxy,qszw->xyzw", psi_in, t, t, optimize=True)
    psi_10 = out[1, :, 0, :]
    psi_01 = out[0, :, 1, :]
    m = np.array(
        [
            [np.sum(np.abs(psi_10) ** 2), np.sum(psi_10 * psi_01.conj())],
            [np.sum(psi_01 * psi_10.conj()), np.sum(np.abs(psi_01) ** 2)],
        ],
        dtype=complex,
    )
    weight = float(np.trace(m).real)
    if weight == 0.0:
        return 0.0, None
    return weight, _normalized_state(m, scenario.encoded_state.diagonal)


def oracle_agreement(scenario: CouplerScenario, phase_tuples) -> tuple[float, float]:
    """Worst trace distance and relative weight gap between the two routes."""
    worst_td = 0.0
    worst_rel = 0.0
    for phases in phase_tuples:
        w_c, s_c = single_photon_component(propagate_coherent(scenario, phases))
        w_f, s_f = fock_brute_force(scenario, phases)
        if s_c is None or s_f is None:
            if (s_c is None) != (s_f is None):
                return math.inf, math.inf
            continue
        worst_td = max(worst_td, trace_distance(s_c, s_f))
        worst_rel = max(worst_rel, abs(w_f - w_c) / w_c)
    return worst_td, worst_rel


def closed_form_weights(r: float) -> tuple[float, float]:
    """(ideal, noise) weights (r-1)/(r+3) and 4/(r+3); r may be infinite."""
    if math.isinf(r):
        return 1.0, 0.0
    return (r - 1.0) / (r + 3.0), 4.0 / (r + 3.0)


def compare_to_closed_form(scenario: CouplerScenario) -> DiscrepancyReport:
    check_cutoff(scenario)
    state, weight = phase_averaged_state(scenario)
    label = scenario.encoded_state
    pop = state.expectation(label.value)
    pop_perp = state.expectation(label.orthogonal.value)
    noise_fit = 2.0 * pop_perp
    ideal_fit = pop - pop_perp

    r = scenario.pulse.r
    ideal_paper, noise_paper = closed_form_weights(r)
    predicted = mix(
        PolarizationDensityMatrix.pure(label.value),
        PolarizationDensityMatrix.maximally_mixed(),
        ideal_paper,
    )
    frame = _HADAMARD if label.diagonal else np.eye(2)
    local = frame.conj().T @ state.entries @ frame
    return DiscrepancyReport(
        convention=scenario.convention.value,
        r=r,
        mu=scenario.pulse.mu,
        cutoff=scenario.fock_cutoff,
        grid=scenario.phase_grid_points,
        ideal_weight_fit=ideal_fit,
        ideal_weight_paper=ideal_paper,
        noise_weight_fit=noise_fit,
        noise_weight_paper=noise_paper,
        trace_distance=trace_distance(state, predicted),
        weight=weight,
        max_coherence=float(abs(local[0, 1])),
    )


__all__ = [
    "Convention",
    "EncodedState",
    "CouplerScenario",
    "TwoModeAmplitude",
    "TruncatedFockState",
    "DiscrepancyReport",
    "reports_to_csv",
    "propagate_coherent",
    "single_photon_component",
    "phase_averaged_state",
    "phase_grid",
    "beam_splitter_transfer",
    "fock_brute_force",
    "oracle_agreement",
    "check_cutoff",
    "closed_form_weights",
    "compare_to_closed_form",
]
