"""Command-line front end.

Exit codes: 0 success, 2 usage or malformed profile, 3 domain error
(noise floor, no root, cutoff too small), 4 I/O error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from .analysis import (
    ComparisonRow,
    SweepSpec,
    SweepVariable,
    channel_comparison,
    comparison_to_csv,
    max_distance,
    max_tolerable_qber,
    points_to_csv,
    sweep,
)
from .coupler_oracle import (
    DEFAULT_CUTOFF,
    DEFAULT_GRID,
    Convention,
    CouplerScenario,
    EncodedState,
    compare_to_closed_form,
    reports_to_csv,
)
from .errors import DomainError
from .keyrate import ChannelProfile
from .state_model import ExtinctionModel, PulseParams, extinction_from_db

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_IO = 4

DEFAULT_R_DB = 27.0
PROFILE_SUFFIX = ".profile"

REQUIRED_KEYS = ("y0", "eta_bob", "alpha_db_per_km", "e_detect", "e0", "mu", "q", "f_ec")
OPTIONAL_KEYS = ("r_db", "distance_km")


class ProfileError(ValueError):
    pass


def _parse_f_ec(text: str):
    if ":" not in text:
        return float(text)
    pairs = []
    for item in text.split(","):
        e, f = item.split(":")
        pairs.append((float(e), float(f)))
    return tuple(pairs)


def read_profile_file(path: str | Path) -> dict:
    """Parse a ``key = value`` profile file into a dict of floats.

    ``f_ec`` may be a number or a table ``E1:f1, E2:f2, ...``. Blank lines
    and ``#`` comments are ignored.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ProfileError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in REQUIRED_KEYS and key not in OPTIONAL_KEYS:
            raise ProfileError(f"{path}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ProfileError(f"{path}:{lineno}: duplicate key {key!r}")
        try:
            values[key] = _parse_f_ec(val) if key == "f_ec" else float(val)
        except ValueError:
            raise ProfileError(f"{path}:{lineno}: bad value for {key!r}: {val!r}") from None
    missing = [k for k in REQUIRED_KEYS if k not in values]
    if missing:
        raise ProfileError(f"{path}: missing required key(s): {', '.join(missing)}")
    return values


def profile_from_values(values: dict) -> ChannelProfile:
    return ChannelProfile(
        y0=values["y0"],
        eta_bob=values["eta_bob"],
        alpha_fiber=values["alpha_db_per_km"],
        e_detect=values["e_detect"],
        e0=values["e0"],
        mu=values["mu"],
        q=values["q"],
        f_ec=values["f_ec"],
    )


def _extinction(args, file_values: dict | None = None) -> ExtinctionModel:
    # Precedence: --r-db, then --r, then the profile's r_db, then 27 dB.
    if getattr(args, "r_db", None) is not None:
        return extinction_from_db(args.r_db)
    if getattr(args, "r", None) is not None:
        return ExtinctionModel(args.r)
    if file_values and "r_db" in file_values:
        return extinction_from_db(file_values["r_db"])
    return extinction_from_db(DEFAULT_R_DB)


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _cmd_threshold(args) -> None:
    em = _extinction(args)
    modified, baseline = max_tolerable_qber(em)
    sys.stdout.write(
        f"r={_fmt(em.r)}\np={_fmt(em.p)}\n"
        f"max_qber_baseline={_fmt(baseline)}\nmax_qber_modified={_fmt(modified)}\n"
    )


def _cmd_sweep_qber(args) -> None:
    em = _extinction(args)
    spec = SweepSpec(SweepVariable.QBER, args.start, args.stop, args.step, em)
    _emit(points_to_csv(sweep(spec)), args.out)


def _cmd_sweep_distance(args) -> None:
    values = read_profile_file(args.profile)
    em = _extinction(args, values)
    spec = SweepSpec(
        SweepVariable.DISTANCE, args.start, args.stop, args.step, em, profile_from_values(values)
    )
    _emit(points_to_csv(sweep(spec)), args.out)


def _cmd_max_distance(args) -> None:
    values = read_profile_file(args.profile)
    em = _extinction(args, values)
    modified, baseline = max_distance(profile_from_values(values), em)
    sys.stdout.write(
        f"r={_fmt(em.r)}\nmax_distance_baseline_km={_fmt(baseline)}\n"
        f"max_distance_modified_km={_fmt(modified)}\ngap_km={_fmt(modified - baseline)}\n"
    )


def _cmd_verify_coupler(args) -> None:
    em = _extinction(args)
    pulse = PulseParams.from_extinction(em, args.mu)
    modes = [Convention.STRICT, Convention.PAPER] if args.mode == "both" else [Convention(args.mode)]
    reports = [
        compare_to_closed_form(
            CouplerScenario(
                pulse,
                phase_grid_points=args.grid,
                fock_cutoff=args.cutoff,
                convention=conv,
                encoded_state=EncodedState(args.state),
            )
        )
        for conv in modes
    ]
    _emit(reports_to_csv(reports), args.out)


def _cmd_compare(args) -> None:
    directory = Path(args.profiles)
    if not directory.is_dir():
        raise FileNotFoundError(f"profile directory not found: {directory}")
    files = sorted(directory.glob(f"*{PROFILE_SUFFIX}"))
    if not files:
        raise FileNotFoundError(f"no *{PROFILE_SUFFIX} files in {directory}")
    loaded = [(path, read_profile_file(path)) for path in files]
    em = _extinction(args, loaded[0][1])
    rows = []
    for path, values in loaded:
        if _extinction(args, values).r != em.r:
            raise ProfileError(f"{path}: r_db differs from other channels; pass --r-db to override")
        distance = args.distance if args.distance is not None else values.get("distance_km", 0.0)
        try:
            profile = profile_from_values(values)
        except DomainError as exc:
            rows.append(ComparisonRow(path.stem, math.nan, math.nan, math.nan, str(exc)))
            continue
        rows.extend(channel_comparison([(path.stem, profile, distance)], em))
    for row in rows:
        if row.error is not None:
            print(f"warning: channel {row.channel}: {row.error}", file=sys.stderr)
    _emit(comparison_to_csv(rows), args.out)


def _add_extinction(p: argparse.ArgumentParser, required: bool) -> None:
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--r-db", type=float, help="IM extinction ratio in dB (power, 10 log10 r)")
    g.add_argument("--r", type=float, help="IM extinction ratio as a linear power ratio")


def _add_range(p: argparse.ArgumentParser) -> None:
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--step", type=float, required=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="imextinction",
        description="BB84 key rates with a finite intensity-modulator extinction ratio.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "threshold",
        help="maximum tolerable single-photon QBER",
        description=(
            "Zero crossings of R = 1 - 2H(e) and of "
            "R' = 1 - H(e') - (1-2p) H((e'-p)/(1-2p)), p = 2/(r+3)."
        ),
    )
    _add_extinction(p, required=True)
    p.set_defaults(func=_cmd_threshold)

    p = sub.add_parser(
        "sweep-qber",
        help="single-photon key rate versus observed QBER (CSV)",
        description=(
            "Tabulates R = 1 - 2H(e) and R' = 1 - H(e') - (1-2p) H((e'-p)/(1-2p)) "
            "over observed QBER e'. The start must not lie below the noise floor p = 2/(r+3)."
        ),
    )
    _add_extinction(p, required=True)
    _add_range(p)
    p.add_argument("--out", required=True, help="output CSV path, or - for stdout")
    p.set_defaults(func=_cmd_sweep_qber)

    p = sub.add_parser(
        "sweep-distance",
        help="decoy-state key rate versus fiber distance (CSV)",
        description=(
            "Tabulates R_d = q{-Q f(E) H(E) + Q1 [1 - H(e1_U)]} and "
            "R_d' = q{-Q f(E) H(E) + Q1 [1 - (Y0 + (1-2p) eta)/(Y0 + eta) H(e1_d)]} "
            "over distance in km. Flags override the profile's r_db."
        ),
    )
    p.add_argument("--profile", required=True)
    _add_extinction(p, required=False)
    _add_range(p)
    p.add_argument("--out", required=True, help="output CSV path, or - for stdout")
    p.set_defaults(func=_cmd_sweep_distance)

    p = sub.add_parser(
        "max-distance",
        help="distance where the decoy-state key rates reach zero",
        description=(
            "Zero crossings in distance of R_d = q{-Q f(E) H(E) + Q1 [1 - H(e1_U)]} and "
            "R_d' = q{-Q f(E) H(E) + Q1 [1 - (Y0 + (1-2p) eta)/(Y0 + eta) H(e1_d)]}."
        ),
    )
    p.add_argument("--profile", required=True)
    _add_extinction(p, required=False)
    p.set_defaults(func=_cmd_max_distance)

    p = sub.add_parser(
        "verify-coupler",
        help="phase-averaged coupler output versus the mixture closed form (CSV)",
        description=(
            "Averages the one-photon output of the 4x1 coupler over random phases and "
            "compares it with rho = (r-1)/(r+3) rho_ideal + 4/(r+3) I/2."
        ),
    )
    _add_extinction(p, required=True)
    p.add_argument("--mu", type=float, required=True, help="source amplitude mu")
    p.add_argument("--mode", choices=["strict", "paper", "both"], default="both")
    p.add_argument("--cutoff", type=int, default=DEFAULT_CUTOFF)
    p.add_argument("--grid", type=int, default=DEFAULT_GRID)
    p.add_argument("--state", choices=[s.value for s in EncodedState], default="H")
    p.add_argument("--out", default=None, help="output CSV path (default stdout)")
    p.set_defaults(func=_cmd_verify_coupler)

    p = sub.add_parser(
        "compare",
        help="baseline vs modified decoy rate per channel (CSV)",
        description=(
            "Evaluates R_d and R_d' for every *.profile file in a directory and reports "
            "the relative uplift R_d'/R_d - 1. Each channel is evaluated at its "
            "distance_km key (default 0) unless --distance is given."
        ),
    )
    p.add_argument("--profiles", required=True, help="directory of *.profile files")
    p.add_argument("--out", required=True, help="output CSV path, or - for stdout")
    p.add_argument("--distance", type=float, default=None)
    _add_extinction(p, required=False)
    p.set_defaults(func=_cmd_compare)

    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except ProfileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def main() -> None:
    sys.exit(run())


__all__ = ["run", "main", "build_parser", "read_profile_file", "profile_from_values", "ProfileError"]
