"""Command-line front end.

Subcommands emit CSV (default) or JSON tables with a commented metadata
header echoing every input, in mode-frequency units unless --raw-units is
given. Identical invocations produce byte-identical files.

Exit codes: 0 success, 1 validation error, 2 numerical failure (norm drift,
truncation leakage, no extractable frequency).
"""

import argparse
import math
import sys

import numpy as np

from .dressed import (
    SIGMA_COLS,
    BandDecomposition,
    band_energy,
    band_eigenstate,
    default_band_nmax,
    free_energy,
)
from .dynamics import (
    IntegratorConfig,
    TimeGrid,
    propagate_amplitudes,
    propagate_full,
)
from .errors import (
    FrequencyExtractionError,
    NormDriftError,
    TruncationLeakageError,
    ValidationError,
)
from .fock import (
    SpinFockVector,
    displaced_matrix_element,
    displacement,
    guard_for,
)
from .model import BandLabel, ModelParams, TruncationConfig
from .rabi import TransitionSpec, rabi_frequency, rwa_pair_evolution
from .serialize import TableDoc, format_value, timeseries_columns

__all__ = ["main"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def _add_physics_flags(p):
    p.add_argument("--omega", type=float, default=1.0, help="mode frequency (default 1.0)")
    p.add_argument("--delta", type=float, default=0.1, help="level splitting (default 0.1)")
    p.add_argument("--g", type=float, default=0.5, help="coupling strength (default 0.5)")


def _add_output_flags(p, default_output):
    p.add_argument("--format", choices=("csv", "json"), default="csv",
                   help="output format (default csv)")
    p.add_argument("--output", default=default_output,
                   help=f"output path (default {default_output})")
    p.add_argument("--raw-units", action="store_true",
                   help="emit raw energies/times instead of units of omega")


def _add_numerics_flags(p):
    p.add_argument("--nmax", type=int, default=None,
                   help="Fock truncation (default: sized automatically)")
    p.add_argument("--guard", type=int, default=None,
                   help="buffer levels at the truncation edge (default: automatic)")
    p.add_argument("--rel-tol", type=float, default=1e-10,
                   help="integrator relative tolerance (default 1e-10)")
    p.add_argument("--tmax", type=float, default=None,
                   help="evolution time span (raw units)")
    p.add_argument("--samples", type=int, default=801,
                   help="number of grid samples (default 801)")


def _params(args) -> ModelParams:
    return ModelParams(omega=args.omega, delta=args.delta, g=args.g)


def _truncation(args, params, n_top) -> TruncationConfig:
    shift = params.g / params.omega
    guard = args.guard if args.guard is not None else guard_for(shift, n_top)
    n_max = args.nmax if args.nmax is not None else n_top + guard
    if n_max < n_top + guard:
        raise ValidationError(
            f"nmax {n_max} too small for support {n_top} with guard {guard}"
        )
    return TruncationConfig(n_max=n_max, guard=guard)


def _echo_config(doc: TableDoc, args, params, keys):
    doc.meta("omega", params.omega).meta("delta", params.delta).meta("g", params.g)
    for key in keys:
        doc.meta(key.replace("_", "-"), getattr(args, key))
    doc.meta("units", "raw" if args.raw_units else "omega")
    return doc


def _energy_scale(args) -> float:
    return 1.0 if args.raw_units else 1.0 / args.omega


def _time_scale(args) -> float:
    return 1.0 if args.raw_units else args.omega


def _parse_band(text) -> BandLabel:
    try:
        n_str, sigma_str = text.split(",")
        return BandLabel(int(n_str), int(sigma_str)).validate()
    except (ValueError, TypeError) as exc:
        raise ValidationError(
            f"band label must look like 'n,sigma' with sigma +-1, got {text!r}"
        ) from exc


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_spectrum(args) -> int:
    params = _params(args)
    n_max = args.nmax if args.nmax is not None else 30
    if n_max < 0:
        raise ValidationError("--nmax must be >= 0")
    doc = TableDoc("spectrum")
    _echo_config(doc, args, params, ())
    doc.meta("nmax", n_max)
    scale = _energy_scale(args)
    doc.set_columns(["n", "sigma", "band_energy", "free_energy"])
    for n in range(n_max + 1):
        for sigma in (-1, 1):
            doc.add_row([
                n,
                sigma,
                band_energy(BandLabel(n, sigma), params) * scale,
                free_energy(n, params) * scale,
            ])
    doc.write(args.output, args.format)
    return 0


def _sweep_points(args):
    if args.sweep == "g":
        if args.points < 1:
            raise ValidationError("--points must be >= 1")
        return [
            ("g", float(v))
            for v in np.linspace(args.g_start, args.g_stop, args.points)
        ]
    step = args.n_step
    if step < 1:
        raise ValidationError("--n-step must be >= 1")
    return [("n", n) for n in range(args.n_start, args.n_stop + 1, step)]


def cmd_rabi_sweep(args) -> int:
    params = _params(args)
    diffs = sorted(set(int(d) for d in args.diffs.split(",")))
    if any(d < 0 for d in diffs):
        raise ValidationError("--diffs entries must be >= 0")
    doc = TableDoc("rabi_sweep")
    _echo_config(doc, args, params, ())
    doc.meta("sweep_variable", args.sweep)
    doc.meta("diffs", args.diffs)
    doc.meta("n", args.n).meta("g_start", args.g_start)
    doc.meta("g_stop", args.g_stop).meta("points", args.points)
    doc.meta("n_start", args.n_start).meta("n_stop", args.n_stop)
    doc.meta("n_step", args.n_step)
    scale = _energy_scale(args)
    doc.set_columns([
        "sweep_value", "n", "m", "sigma_from", "sigma_to", "kind", "diff",
        "frequency", "asymptotic", "rel_deviation", "detuning",
        "bessel_order", "bessel_argument",
    ])
    for kind, value in _sweep_points(args):
        if kind == "g":
            point_params = ModelParams(args.omega, args.delta, value)
            n = args.n
        else:
            point_params = params
            n = value
        for diff in diffs:
            sigma_to = -1 if diff % 2 else 1
            spec = TransitionSpec(BandLabel(n, 1), BandLabel(n + diff, sigma_to))
            res = rabi_frequency(spec, point_params)
            rel_dev = (
                abs(res.frequency - res.asymptotic) / res.asymptotic
                if res.asymptotic > 0.0
                else math.nan
            )
            doc.add_row([
                float(value) if kind == "g" else int(value),
                spec.from_label.n, spec.to_label.n,
                spec.from_label.sigma, spec.to_label.sigma,
                spec.kind, spec.diff,
                res.frequency * scale, res.asymptotic * scale, rel_dev,
                res.detuning * scale, res.bessel_order, res.bessel_argument,
            ])
    doc.write(args.output, args.format)
    return 0


def _initial_state(args, params, trunc):
    if args.initial == "vacuum_g":
        return SpinFockVector.vacuum_g(trunc), "vacuum_g"
    if args.initial == "band":
        label = _parse_band(args.initial_band)
        return band_eigenstate(label, params, trunc), f"band {args.initial_band}"
    with open(args.initial_file, "r", encoding="utf-8") as fh:
        state = SpinFockVector.from_json(fh.read())
    if state.trunc != trunc:
        raise ValidationError(
            f"state file truncation {state.trunc} != requested {trunc}"
        )
    return state, f"file {args.initial_file}"


def cmd_evolve(args) -> int:
    params = _params(args)
    band_labels = tuple(_parse_band(t) for t in (args.track_band or ()))
    support = max(
        [default_band_nmax(params)] + [lbl.n for lbl in band_labels]
        + ([_parse_band(args.initial_band).n] if args.initial == "band" else [])
    )
    trunc = _truncation(args, params, support)
    state0, initial_desc = _initial_state(args, params, trunc)
    tmax = args.tmax if args.tmax is not None else 50.0 / params.omega
    grid = TimeGrid(0.0, tmax, args.samples)
    series = propagate_full(
        state0, grid, params,
        cfg=IntegratorConfig(rel_tol=args.rel_tol, abs_tol=args.rel_tol * 1e-2),
        band_tracks=band_labels,
        keep_states=False,
    )
    doc = TableDoc("evolve")
    _echo_config(doc, args, params, ("samples", "rel_tol"))
    doc.meta("initial", initial_desc).meta("tmax", tmax)
    doc.meta("nmax", trunc.n_max).meta("guard", trunc.guard)
    doc.meta("norm_drift", series.norm_drift())
    names, rows = timeseries_columns(series, time_scale=_time_scale(args))
    doc.set_columns(names)
    for row in rows:
        doc.add_row(row)
    doc.write(args.output, args.format)
    return 0


def cmd_compare(args) -> int:
    params = _params(args)
    from_label = _parse_band(args.from_band)
    to_label = _parse_band(args.to_band)
    spec = TransitionSpec(from_label, to_label)
    if not spec.allowed():
        raise ValidationError(
            f"transition {args.from_band} -> {args.to_band} is parity-forbidden: "
            f"{spec.kind} needs {'odd' if spec.kind == 'interband' else 'even'} "
            f"photon difference, got {spec.diff}"
        )
    res = rabi_frequency(spec, params)
    if res.frequency <= 0.0:
        raise ValidationError("transition frequency is zero; nothing to compare")
    n_top = max(from_label.n, to_label.n, default_band_nmax(params))
    trunc = _truncation(args, params, n_top)
    tmax = args.tmax if args.tmax is not None else 8.0 * math.pi / res.frequency
    grid = TimeGrid(0.0, tmax, args.samples)
    cfg = IntegratorConfig(rel_tol=args.rel_tol, abs_tol=args.rel_tol * 1e-2)

    times = grid.times()
    rwa_from = np.empty(grid.samples)
    rwa_to = np.empty(grid.samples)
    for i, t in enumerate(times):
        a, b = rwa_pair_evolution(spec, 1.0, 0.0, float(t), params)
        rwa_from[i] = abs(a) ** 2
        rwa_to[i] = abs(b) ** 2

    coeffs0 = np.zeros((trunc.n_max + 1, 2), dtype=complex)
    coeffs0[from_label.n, SIGMA_COLS[from_label.sigma]] = 1.0
    amp_series = propagate_amplitudes(
        BandDecomposition(coeffs0), grid, params,
        n_max=trunc.n_max, cfg=cfg, band_tracks=(from_label, to_label),
    )
    state0 = band_eigenstate(from_label, params, trunc)
    full_series = propagate_full(
        state0, grid, params, cfg=cfg,
        band_tracks=(from_label, to_label), keep_states=False,
    )

    def tname(label):
        return f"band_{label.n}_{'p' if label.sigma > 0 else 'm'}"

    amp_from = amp_series.track(tname(from_label))
    amp_to = amp_series.track(tname(to_label))
    full_from = full_series.track(tname(from_label))
    full_to = full_series.track(tname(to_label))

    dev_full_rwa = float(
        max(np.abs(full_from - rwa_from).max(), np.abs(full_to - rwa_to).max())
    )
    dev_amp_rwa = float(
        max(np.abs(amp_from - rwa_from).max(), np.abs(amp_to - rwa_to).max())
    )
    dev_full_amp = float(
        max(np.abs(full_from - amp_from).max(), np.abs(full_to - amp_to).max())
    )

    scale = _energy_scale(args)
    doc = TableDoc("compare")
    _echo_config(doc, args, params, ("samples", "rel_tol"))
    doc.meta("from", args.from_band).meta("to", args.to_band)
    doc.meta("kind", spec.kind).meta("tmax", tmax)
    doc.meta("nmax", trunc.n_max).meta("guard", trunc.guard)
    doc.meta("rabi_frequency", res.frequency * scale)
    doc.meta("detuning", res.detuning * scale)
    doc.meta("detuning_over_R", abs(res.detuning) / res.frequency)
    doc.meta("max_dev_full_vs_rwa", dev_full_rwa)
    doc.meta("max_dev_amplitudes_vs_rwa", dev_amp_rwa)
    doc.meta("max_dev_full_vs_amplitudes", dev_full_amp)
    doc.meta("norm_drift_full", full_series.norm_drift())
    doc.meta("norm_drift_amplitudes", amp_series.norm_drift())
    tscale = _time_scale(args)
    doc.set_columns([
        "t", "rwa_pop_from", "rwa_pop_to", "amp_pop_from", "amp_pop_to",
        "full_pop_from", "full_pop_to",
    ])
    for i, t in enumerate(times):
        doc.add_row([
            float(t * tscale),
            float(rwa_from[i]), float(rwa_to[i]),
            float(amp_from[i]), float(amp_to[i]),
            float(full_from[i]), float(full_to[i]),
        ])
    doc.write(args.output, args.format)
    print(f"rabi_frequency: {format_value(res.frequency * scale)}")
    print(f"detuning_over_R: {format_value(abs(res.detuning) / res.frequency)}")
    print(f"max_dev_full_vs_rwa: {format_value(dev_full_rwa)}")
    print(f"max_dev_amplitudes_vs_rwa: {format_value(dev_amp_rwa)}")
    print(f"max_dev_full_vs_amplitudes: {format_value(dev_full_amp)}")
    return 0


def cmd_matrix_element(args) -> int:
    m, n, theta = args.m, args.n, args.theta
    closed = displaced_matrix_element(m, n, theta)
    n_top = max(m, n)
    guard = args.guard if args.guard is not None else guard_for(theta, n_top)
    n_max = args.nmax if args.nmax is not None else n_top + guard
    trunc = TruncationConfig(n_max=n_max, guard=guard)
    oracle = float(displacement(trunc, theta)[m, n])
    print(f"closed_form: {format_value(closed)}")
    print(f"matrix_exponential: {format_value(oracle)}")
    print(f"abs_difference: {format_value(abs(closed - oracle))}")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(
        prog="qrabi",
        description=(
            "Two-level atom coupled to a quantized mode beyond the RWA: "
            "band spectra, Rabi-frequency sweeps with Bessel asymptotics, "
            "exact evolutions and analytic-vs-numeric comparisons."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="dressed band energies vs photon index")
    _add_physics_flags(p)
    p.add_argument("--nmax", type=int, default=30,
                   help="largest photon index tabulated (default 30)")
    _add_output_flags(p, "qrabi_spectrum.csv")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("rabi-sweep",
                       help="exact Rabi frequencies vs coupling or photon number")
    _add_physics_flags(p)
    p.add_argument("--sweep", choices=("g", "n"), required=True)
    p.add_argument("--n", type=int, default=100,
                   help="smaller photon index when sweeping g (default 100)")
    p.add_argument("--g-start", type=float, default=0.0)
    p.add_argument("--g-stop", type=float, default=1.0)
    p.add_argument("--points", type=int, default=101,
                   help="grid size for the g sweep (default 101)")
    p.add_argument("--n-start", type=int, default=1)
    p.add_argument("--n-stop", type=int, default=100)
    p.add_argument("--n-step", type=int, default=1)
    p.add_argument("--diffs", default="0,1,2",
                   help="comma list of photon-number differences (default 0,1,2)")
    _add_output_flags(p, "qrabi_rabi_sweep.csv")
    p.set_defaults(func=cmd_rabi_sweep)

    p = sub.add_parser("evolve", help="full Schroedinger evolution, CSV time series")
    _add_physics_flags(p)
    _add_numerics_flags(p)
    p.add_argument("--initial", choices=("vacuum_g", "band", "file"),
                   default="vacuum_g", help="initial state (default vacuum_g)")
    p.add_argument("--initial-band", default="0,-1",
                   help="band label 'n,sigma' when --initial band (default 0,-1)")
    p.add_argument("--initial-file", default=None,
                   help="JSON state file when --initial file")
    p.add_argument("--track-band", action="append", default=None,
                   metavar="N,SIGMA", help="record this band population (repeatable)")
    _add_output_flags(p, "qrabi_evolve.csv")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("compare",
                       help="RWA pair solution vs band equations vs full evolution")
    _add_physics_flags(p)
    _add_numerics_flags(p)
    p.add_argument("--from-band", required=True, metavar="N,SIGMA")
    p.add_argument("--to-band", required=True, metavar="N,SIGMA")
    _add_output_flags(p, "qrabi_compare.csv")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("matrix-element",
                       help="closed-form vs matrix-exponential displacement element")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--nmax", type=int, default=None)
    p.add_argument("--guard", type=int, default=None)
    p.set_defaults(func=cmd_matrix_element)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NormDriftError, TruncationLeakageError, FrequencyExtractionError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
