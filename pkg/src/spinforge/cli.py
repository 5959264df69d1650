"""Command-line front end.

Subcommands: spectrum, gate, invariant-scan, noise-sweep, design-cphase,
sweep-cz-time.  All outputs are plain CSV/JSON files written atomically;
every command is deterministic given the parameter file, seed and flags.
Exit codes: 0 success, 2 configuration error, 3 unknown design tag,
4 domain error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .cphase import design_cphase, gate_time_amplitude_sweep
from .designs import design_registry, score_cphase_design, simulate_design
from .envelopes import catalog, square_envelope, DriveSpec
from .errors import SpinforgeError
from .gates import local_invariants
from .model import adiabatic_energies, block_resonances
from .noise import sweep, write_sweep_csv
from .params import TWO_PI, DeviceParams, default_params
from .propagator import DEFAULT_STEP, DrivePropagator, step_halving_difference

INVARIANT_TARGETS = {"cnot": (0.0, 0.0, 1.0), "sqrt_cnot": (0.5, 0.0, 2.0)}
CROSSING_TOL = 0.02

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_UNKNOWN_TAG = 3
EXIT_DOMAIN = 4


class UnknownTagError(Exception):
    pass


def _atomic_write(path, text: str) -> None:
    tmp = str(path) + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _emit(args, filename: str, text: str) -> None:
    if args.out == "-":
        sys.stdout.write(text)
        return
    os.makedirs(args.out, exist_ok=True)
    _atomic_write(os.path.join(args.out, filename), text)


def _step_seconds(args) -> float:
    if args.step_ps <= 0:
        raise ValueError("--step-ps must be positive")
    return args.step_ps * 1e-12


def _envelope_csv(entry, n_points: int) -> str:
    ts, vals = entry.envelope.sample(n_points)
    lines = [f"# tag: {entry.tag}", "t_ns,amplitude_MHz"]
    lines += [f"{t * 1e9:.9g},{v / TWO_PI / 1e6:.9g}" for t, v in zip(ts, vals)]
    return "\n".join(lines) + "\n"


def _parse_theta(token: str) -> float:
    """Accept plain radians or 'pi'-expressions like pi/16 or 3*pi/4."""
    t = token.strip().lower()
    if "pi" in t:
        val = eval(t, {"__builtins__": {}}, {"pi": math.pi})  # noqa: S307
        return float(val)
    return float(t)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_spectrum(args, params: DeviceParams) -> int:
    j_on = params.j if args.j is None else args.j * TWO_PI * 1e6
    e_off = adiabatic_energies(params, 0.0)
    e_on = adiabatic_energies(params, j_on)
    labels = ("uu", "du", "ud", "dd")
    lines = ["state,energy_j_off_MHz,energy_j_on_MHz"]
    for lab, a, b in zip(labels, e_off, e_on):
        lines.append(f"{lab},{a / TWO_PI / 1e6:.9g},{b / TWO_PI / 1e6:.9g}")
    _emit(args, "spectrum.csv", "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_gate(args, params: DeviceParams) -> int:
    reg = design_registry(params)
    if args.tag not in reg:
        raise UnknownTagError(args.tag)
    step = _step_seconds(args)
    _, report = simulate_design(args.tag, params, step=step,
                                optimize_locals=args.optimize_locals)
    payload = json.loads(report.to_json())
    if args.convergence:
        diff = step_halving_difference(params, reg[args.tag].drive, step=step)
        payload["step_halving_max_norm"] = diff
    _emit(args, f"gate_{args.tag}.json", json.dumps(payload, indent=2) + "\n")
    if args.envelope_csv:
        entries = {e.tag: e for e in catalog(params)}
        pulse_tag = {"sq_two_piece": "sq_sqrt_cnot", "c": "c",
                     "cz_two_piece": "cphase_beta"}.get(args.tag, args.tag)
        _emit(args, f"envelope_{pulse_tag}.csv",
              _envelope_csv(entries[pulse_tag], args.grid_points))
    return EXIT_OK


def cmd_invariant_scan(args, params: DeviceParams) -> int:
    if args.dt_ns <= 0:
        raise ValueError("--dt-ns must be positive")
    omega1, _ = block_resonances(params)
    env = square_envelope(args.amplitude_mhz * TWO_PI * 1e6, args.t_max_ns * 1e-9)
    drive = DriveSpec(omega=omega1, phi=params.phi, envelope=env)
    prop = DrivePropagator(params, drive, step=_step_seconds(args))
    times, snaps = prop.snapshots(every_ns=args.dt_ns)

    rows = [(0.0, 1.0, 0.0, 3.0)]  # identity at t = 0
    for t, u in zip(times, snaps):
        g = local_invariants(u)
        rows.append((t * 1e9, g.g1, g.g2, g.g3))
    lines = ["t_ns,g1,g2,g3"]
    lines += [f"{r[0]:.9g},{r[1]:.12g},{r[2]:.12g},{r[3]:.12g}" for r in rows]
    _emit(args, "invariant_scan.csv", "\n".join(lines) + "\n")

    arr = np.array(rows)
    crossings = {}
    for name, target in INVARIANT_TARGETS.items():
        dist = np.max(np.abs(arr[:, 1:] - np.array(target)), axis=1)
        k = int(np.argmin(dist))
        crossings[name] = dict(t_ns=float(arr[k, 0]), distance=float(dist[k]),
                               within_tolerance=bool(dist[k] < CROSSING_TOL))
    _emit(args, "invariant_crossings.json", json.dumps(crossings, indent=2) + "\n")
    return EXIT_OK


def cmd_noise_sweep(args, params: DeviceParams) -> int:
    if args.out == "-":
        raise ValueError("noise-sweep writes multiple files; --out must be a directory")
    reg = design_registry(params)
    tags = [t.strip() for t in args.tags.split(",") if t.strip()]
    for tag in tags:
        if tag not in reg:
            raise UnknownTagError(tag)
    if args.grid_khz:
        grid = TWO_PI * 1e3 * np.array([float(x) for x in args.grid_khz.split(",")])
    else:
        grid = None
    step = _step_seconds(args)
    os.makedirs(args.out, exist_ok=True)
    for tag in tags:
        results = sweep(reg[tag], params, sigma_grid=grid,
                        n_samples=args.n_samples, seed=args.seed, step=step,
                        j_mode=args.j_noise_mode)
        meta = dict(design=tag, seed=args.seed, step_ps=args.step_ps,
                    n_samples=args.n_samples, j_noise_mode=args.j_noise_mode,
                    code_version=__version__)
        write_sweep_csv(results, os.path.join(args.out, f"noise_{tag}.csv"),
                        metadata=meta)
    return EXIT_OK


def cmd_design_cphase(args, params: DeviceParams) -> int:
    thetas = [_parse_theta(t) for t in args.theta_list.split(",") if t.strip()]
    step = _step_seconds(args)
    designs = []
    table = ["theta_rad,tau_ns,peak_MHz,infidelity,conditional_phase_rad"]
    for theta in thetas:
        d = design_cphase(theta, params, n=args.n)
        score = score_cphase_design(d, params, step=step)
        designs.append(dict(theta=d.theta, n=d.n, m=d.m, alpha=d.alpha,
                            branch=d.branch, r=d.r, tau_ns=d.tau * 1e9,
                            carrier_GHz=d.drive.omega / TWO_PI / 1e9,
                            peak_MHz=score["peak_MHz"],
                            fidelity=score["fidelity"],
                            conditional_phase=score["conditional_phase"]))
        table.append(f"{theta:.9g},{score['tau_ns']:.9g},{score['peak_MHz']:.9g},"
                     f"{1.0 - score['fidelity']:.6g},{score['conditional_phase']:.9g}")
    _emit(args, "cphase_designs.json", json.dumps(designs, indent=2) + "\n")
    if args.out != "-":
        _emit(args, "cphase_table.csv", "\n".join(table) + "\n")
    return EXIT_OK


def cmd_sweep_cz_time(args, params: DeviceParams) -> int:
    r_values = [int(x) for x in args.r_values.split(",") if x.strip()]
    points = gate_time_amplitude_sweep(math.pi, params, r_values,
                                       step=_step_seconds(args))
    lines = ["r,tau_ns,peak_MHz,infidelity"]
    for p in points:
        if "skipped" in p:
            lines.append(f"{p['r']},,,# skipped: {p['skipped']}")
        else:
            lines.append(f"{p['r']},{p['tau_ns']:.9g},{p['peak_MHz']:.9g},"
                         f"{p['infidelity']:.6g}")
    _emit(args, "cz_time_sweep.csv", "\n".join(lines) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser / entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="spinforge",
        description="Design and simulate entangling gates for exchange-coupled "
                    "spin qubits in a silicon double quantum dot.")
    p.add_argument("--params", default=None,
                   help="JSON device parameter file (MHz cyclic units, phase rad); "
                        "defaults to the built-in reference device")
    p.add_argument("--out", default=".",
                   help="output directory, or '-' for stdout (single-file commands)")
    p.add_argument("--seed", type=int, default=0, help="Monte Carlo seed")
    p.add_argument("--step-ps", type=float, default=DEFAULT_STEP * 1e12,
                   help="integrator substep in picoseconds")
    p.add_argument("--format", choices=("csv", "json"), default="csv",
                   help="preferred stdout payload format (file outputs are fixed)")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="undriven eigenenergies, exchange off/on")
    sp.add_argument("--j", type=float, default=None,
                    help="override the exchange-on value (cyclic MHz)")
    sp.set_defaults(func=cmd_spectrum)

    gp = sub.add_parser("gate", help="simulate a named design end to end")
    gp.add_argument("tag", help="design tag, e.g. a, b, c, sq_cnot, cz_alpha")
    gp.add_argument("--optimize-locals", action="store_true",
                    help="fit the outer local corrections numerically")
    gp.add_argument("--convergence", action="store_true",
                    help="include the step-halving report")
    gp.add_argument("--envelope-csv", action="store_true",
                    help="also write the pulse envelope as CSV")
    gp.add_argument("--grid-points", type=int, default=2000,
                    help="envelope CSV sample count")
    gp.set_defaults(func=cmd_gate)

    ip = sub.add_parser("invariant-scan",
                        help="local invariants of the square-pulse evolution vs time")
    ip.add_argument("--t-max-ns", type=float, default=30.0)
    ip.add_argument("--dt-ns", type=float, default=0.05)
    ip.add_argument("--amplitude-mhz", type=float, default=9.85,
                    help="square drive amplitude (cyclic MHz)")
    ip.set_defaults(func=cmd_invariant_scan)

    npn = sub.add_parser("noise-sweep", help="quasistatic-noise Monte Carlo sweeps")
    npn.add_argument("--tags", required=True,
                     help="comma-separated design tags")
    npn.add_argument("--grid-khz", default="",
                     help="comma-separated noise strengths (cyclic kHz); "
                          "default 12 log-spaced points, 10 kHz to 1 MHz")
    npn.add_argument("--n-samples", type=int, default=500)
    npn.add_argument("--j-noise-mode", choices=("everywhere", "diagonal_only"),
                     default="everywhere",
                     help="diagnostic: restrict the exchange offset to the "
                          "diagonal detuning terms")
    npn.set_defaults(func=cmd_noise_sweep)

    cp = sub.add_parser("design-cphase",
                        help="design and score conditional-phase gates")
    cp.add_argument("--theta-list", required=True,
                    help="comma-separated target angles, e.g. 'pi/16,pi/8,pi'")
    cp.add_argument("--n", type=float, default=3.0, help="sech window count")
    cp.set_defaults(func=cmd_design_cphase)

    zp = sub.add_parser("sweep-cz-time",
                        help="conditional-phase gate time / amplitude trade-off")
    zp.add_argument("--r-values", default="1,2,3",
                    help="comma-separated window indices")
    zp.set_defaults(func=cmd_sweep_cz_time)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        params = DeviceParams.load(args.params) if args.params else default_params()
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"spinforge: cannot load parameters: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args, params)
    except UnknownTagError as exc:
        print(f"spinforge: unknown design tag {exc}", file=sys.stderr)
        return EXIT_UNKNOWN_TAG
    except (SpinforgeError, ValueError, KeyError) as exc:
        print(f"spinforge: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
