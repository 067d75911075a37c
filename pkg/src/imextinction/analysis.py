"""Rate sweeps, threshold and max-distance root finding, channel comparison."""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import DomainError, NoiseFloorError, NoRootError, NotPositiveAtOriginError
from .keyrate import (
    ChannelProfile,
    gllp_rate,
    modified_single_photon_rate,
    rates_at_distance,
)
from .state_model import ExtinctionModel

QBER_SCAN_STEP = 1e-3
QBER_TOL = 1e-8
DISTANCE_SCAN_STEP = 1.0
DISTANCE_TOL = 0.01
MAX_SCAN_KM = 5000.0


class SweepVariable(str, enum.Enum):
    QBER = "qber"
    DISTANCE = "distance"


@dataclass(frozen=True)
class SweepSpec:
    variable: SweepVariable
    start: float
    stop: float
    step: float
    em: ExtinctionModel
    profile: ChannelProfile | None = None

    def __post_init__(self):
        object.__setattr__(self, "variable", SweepVariable(self.variable))
        if not self.start < self.stop:
            raise DomainError(f"sweep start {self.start!r} must be below stop {self.stop!r}")
        if not self.step > 0.0:
            raise DomainError(f"sweep step must be positive, got {self.step!r}")
        if self.variable is SweepVariable.DISTANCE and self.profile is None:
            raise DomainError("distance sweeps need a channel profile")

    def grid(self) -> list[float]:
        """start, start+step, ... up to stop; stop is appended if the step overshoots it."""
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9))
        # min() guards against start + k*step rounding past stop.
        xs = [min(self.start + k * self.step, self.stop) for k in range(n + 1)]
        if self.stop - xs[-1] > 1e-9 * self.step:
            xs.append(self.stop)
        return xs


@dataclass(frozen=True)
class RatePoint:
    x: float
    rate_baseline: float
    rate_modified: float


def sweep(spec: SweepSpec) -> list[RatePoint]:
    """Baseline and modified rates at each grid point, in grid order."""
    points = []
    if spec.variable is SweepVariable.QBER:
        if spec.start < spec.em.p:
            raise NoiseFloorError(spec.start, spec.em.p, "sweep start QBER")
        if spec.stop > 0.5:
            raise DomainError(f"QBER sweep must stop at or below 1/2, got {spec.stop!r}")
        for x in spec.grid():
            points.append(RatePoint(x, gllp_rate(x), modified_single_photon_rate(x, spec.em)))
    else:
        for x in spec.grid():
            base, mod = rates_at_distance(spec.profile, spec.em, x)
            points.append(RatePoint(x, base, mod))
    return points


def bisect_root(f: Callable[[float], float], lo: float, hi: float, tol: float) -> float:
    """Root of ``f`` in [lo, hi] given f(lo) > 0 >= f(hi); bracket shrunk below ``tol``."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def scan_for_root(
    f: Callable[[float], float],
    start: float,
    stop: float,
    step: float,
    tol: float,
) -> float:
    """First downward zero crossing of ``f`` on [start, stop], refined by bisection."""
    if not f(start) > 0.0:
        raise NoRootError(f"rate is not positive at the bracket start {start:.12g}")
    prev = start
    k = 1
    while prev < stop:
        x = min(start + k * step, stop)
        if not f(x) > 0.0:
            return bisect_root(f, prev, x, tol)
        prev = x
        k += 1
    raise NoRootError(f"rate stays positive on [{start:.12g}, {stop:.12g}]")


def max_tolerable_qber(em: ExtinctionModel, scan_step: float = QBER_SCAN_STEP) -> tuple[float, float]:
    """(modified, baseline) observed QBER at which the single-photon rate hits zero."""
    baseline = scan_for_root(gllp_rate, 0.0, 0.5, scan_step, QBER_TOL)
    lo = em.p
    if 0.5 - lo <= QBER_TOL:
        raise NoRootError(
            f"noise floor p = {lo:.12g} leaves no resolvable QBER range below 1/2"
        )
    modified = scan_for_root(
        lambda e: modified_single_photon_rate(e, em), lo, 0.5, scan_step, QBER_TOL
    )
    return modified, baseline


def max_distance(
    profile: ChannelProfile,
    em: ExtinctionModel,
    scan_step: float = DISTANCE_SCAN_STEP,
) -> tuple[float, float]:
    """(modified_km, baseline_km) where the decoy rates cross zero."""
    base0, mod0 = rates_at_distance(profile, em, 0.0)
    if not (base0 > 0.0 and mod0 > 0.0):
        raise NotPositiveAtOriginError(
            f"key rate at 0 km is not positive (baseline {base0:.6g}, modified {mod0:.6g})"
        )
    baseline = scan_for_root(
        lambda d: rates_at_distance(profile, em, d)[0], 0.0, MAX_SCAN_KM, scan_step, DISTANCE_TOL
    )
    modified = scan_for_root(
        lambda d: rates_at_distance(profile, em, d)[1], 0.0, MAX_SCAN_KM, scan_step, DISTANCE_TOL
    )
    return modified, baseline


@dataclass(frozen=True)
class ComparisonRow:
    channel: str
    rate_baseline: float
    rate_modified: float
    uplift: float
    error: str | None = None


def channel_comparison(
    profiles: Sequence[tuple[str, ChannelProfile, float]],
    em: ExtinctionModel,
) -> list[ComparisonRow]:
    """Baseline vs modified rate per named channel, each at its own distance.

    A channel that fails (e.g. e_detect under the noise floor) yields a row
    with NaN values and the error message instead of aborting the table.
    """
    rows = []
    for name, profile, distance_km in profiles:
        try:
            base, mod = rates_at_distance(profile, em, distance_km)
        except DomainError as exc:
            rows.append(ComparisonRow(name, math.nan, math.nan, math.nan, str(exc)))
            continue
        uplift = mod / base - 1.0 if base > 0.0 else math.nan
        rows.append(ComparisonRow(name, base, mod, uplift))
    return rows


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _clamped(x: float) -> str:
    return _fmt(max(0.0, x)) if not math.isnan(x) else "nan"


def points_to_csv(points: Sequence[RatePoint]) -> str:
    """CSV with header ``x,rate_baseline,rate_modified``; negative rates shown as 0."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "rate_baseline", "rate_modified"])
    for pt in points:
        w.writerow([_fmt(pt.x), _clamped(pt.rate_baseline), _clamped(pt.rate_modified)])
    return buf.getvalue()


def comparison_to_csv(rows: Sequence[ComparisonRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["channel", "rate_baseline", "rate_modified", "uplift"])
    for row in rows:
        if row.error is not None:
            w.writerow([row.channel, "nan", "nan", f"error: {row.error}"])
        else:
            w.writerow([row.channel, _clamped(row.rate_baseline), _clamped(row.rate_modified), _fmt(row.uplift)])
    return buf.getvalue()
