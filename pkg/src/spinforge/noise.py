"""Quasistatic charge-noise Monte Carlo.

Each sample shifts the exchange coupling and the two exchange-induced
Zeeman shifts by independent zero-mean normal draws of common standard
deviation, re-simulates the gate with the *nominal* drive and local
corrections (the controller does not know the noise), and scores against
the target.  Draw streams are derived per (seed, grid-point, sample), so
results are bit-identical regardless of execution order or thread count.
"""
from __future__ import annotations

import dataclasses
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .designs import GateDesign, assemble, design_registry
from .errors import SampleRejectedError
from .gates import fidelity, target_gates
from .model import hamiltonian_coefficients
from .params import TWO_PI, DeviceParams
from .propagator import DEFAULT_ORDER, DEFAULT_STEP, DrivePropagator

RNG_SCHEME = "numpy PCG64, SeedSequence(seed, spawn_key=(point_index, sample_index))"
MAX_REDRAWS = 1000


@dataclass(frozen=True)
class NoiseSample:
    """Angular-frequency offsets applied to (j, ez1, delta_ez1)."""

    d_j: float
    d_ez1: float
    d_delta_ez1: float


@dataclass(frozen=True)
class SweepResult:
    """Monte Carlo average at one noise strength."""

    tag: str
    sigma_delta: float       # rad/s
    mean_infidelity: float
    stderr: float
    n_samples: int
    rejected_samples: int


def sample_rng(seed: int, point_index: int, sample_index: int) -> np.random.Generator:
    """Dedicated generator for one (grid point, sample) pair."""
    ss = np.random.SeedSequence(seed, spawn_key=(point_index, sample_index))
    return np.random.default_rng(ss)


def draw_sample(sigma_delta: float, rng: np.random.Generator) -> NoiseSample:
    """Three independent N(0, sigma_delta) offsets (rad/s)."""
    if sigma_delta < 0.0:
        raise ValueError("sigma_delta must be >= 0")
    if sigma_delta == 0.0:
        return NoiseSample(0.0, 0.0, 0.0)
    d = rng.normal(0.0, sigma_delta, size=3)
    return NoiseSample(d_j=float(d[0]), d_ez1=float(d[1]), d_delta_ez1=float(d[2]))


def perturb(params: DeviceParams, s: NoiseSample) -> DeviceParams:
    """Parameters with (j, ez1, delta_ez1) shifted; everything else intact.

    Raises :class:`SampleRejectedError` when the shifted exchange is not
    positive; callers redraw and count the rejection.
    """
    j = params.j + s.d_j
    if j <= 0.0:
        raise SampleRejectedError(f"perturbed exchange j = {j:.3e} <= 0")
    return dataclasses.replace(params, j=j, ez1=params.ez1 + s.d_ez1,
                               delta_ez1=params.delta_ez1 + s.d_delta_ez1)


def _diagonal_only_coefficients(params: DeviceParams, s: NoiseSample):
    # diagnostic variant: the exchange offset enters only the -+ j/2
    # diagonal terms, not the drive corrections or the j^2 piece
    nominal = dataclasses.replace(params, ez1=params.ez1 + s.d_ez1,
                                  delta_ez1=params.delta_ez1 + s.d_delta_ez1)
    g, diag = hamiltonian_coefficients(nominal)
    shift = 0.5 * s.d_j
    return g, diag + np.array([0.0, -shift, -shift, 0.0])


def _draw_valid(params, sigma_delta, rng, j_mode):
    rejected = 0
    for _ in range(MAX_REDRAWS):
        s = draw_sample(sigma_delta, rng)
        try:
            if j_mode == "everywhere":
                g, diag = hamiltonian_coefficients(perturb(params, s))
            elif j_mode == "diagonal_only":
                if params.j + s.d_j <= 0.0:
                    raise SampleRejectedError("perturbed exchange <= 0")
                g, diag = _diagonal_only_coefficients(params, s)
            else:
                raise ValueError(f"unknown j_mode {j_mode!r}")
            return g, diag, rejected
        except SampleRejectedError:
            rejected += 1
    raise RuntimeError(f"rejected {MAX_REDRAWS} consecutive samples; "
                       "sigma_delta is unphysically large")


def _threads() -> int:
    env = os.environ.get("SPINFORGE_THREADS", "")
    if env.strip():
        return max(1, int(env))
    return 1


def average_infidelity(design: GateDesign | str, params: DeviceParams,
                       sigma_delta: float, n_samples: int = 500,
                       seed: int = 0, step: float = DEFAULT_STEP,
                       order: int = DEFAULT_ORDER, point_index: int = 0,
                       j_mode: str = "everywhere") -> SweepResult:
    """Mean infidelity of a design under quasistatic noise.

    One drive propagator grid is pre-sampled and shared by all samples;
    each sample re-evolves with its perturbed exchange coefficients and is
    dressed with the nominal local corrections.  Propagation failures are
    fatal (they indicate integrator misuse), only unphysical draws
    (j <= 0) are redrawn and counted.
    """
    if isinstance(design, str):
        design = design_registry(params)[design]
    prop = DrivePropagator(params, design.drive, step=step, order=order)
    target = target_gates()[design.target]

    coeffs = []
    rejected = 0
    for i in range(n_samples):
        rng = sample_rng(seed, point_index, i)
        g, diag, rej = _draw_valid(params, sigma_delta, rng, j_mode)
        coeffs.append((g, diag))
        rejected += rej

    def run_one(pair):
        g, diag = pair
        u = prop.unitary_from_coefficients(g, diag)
        return 1.0 - fidelity(assemble(design, u), target)

    n_threads = _threads()
    if n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            infs = np.fromiter(pool.map(run_one, coeffs), dtype=float,
                               count=n_samples)
    else:
        infs = np.fromiter((run_one(c) for c in coeffs), dtype=float,
                           count=n_samples)

    return SweepResult(
        tag=design.tag,
        sigma_delta=sigma_delta,
        mean_infidelity=float(infs.mean()),
        stderr=float(infs.std(ddof=0) / math.sqrt(n_samples)),
        n_samples=n_samples,
        rejected_samples=rejected,
    )


def default_grid() -> np.ndarray:
    """Twelve log-spaced noise strengths, 10 kHz to 1 MHz (rad/s)."""
    return TWO_PI * np.logspace(np.log10(10e3), np.log10(1e6), 12)


def sweep(design: GateDesign | str, params: DeviceParams, sigma_grid=None,
          n_samples: int = 500, seed: int = 0, step: float = DEFAULT_STEP,
          order: int = DEFAULT_ORDER, j_mode: str = "everywhere") -> list[SweepResult]:
    """One :func:`average_infidelity` per grid point.

    Sub-streams derive from (seed, point index, sample index), so any
    subset of points can be recomputed independently and reproduce the full
    sweep's values bit for bit.
    """
    if isinstance(design, str):
        design = design_registry(params)[design]
    if sigma_grid is None:
        sigma_grid = default_grid()
    return [
        average_infidelity(design, params, float(sig), n_samples=n_samples,
                           seed=seed, step=step, order=order,
                           point_index=k, j_mode=j_mode)
        for k, sig in enumerate(sigma_grid)
    ]


def write_sweep_csv(results: list[SweepResult], path, metadata: dict | None = None):
    """CSV of a sweep plus a JSON sidecar recording how it was produced."""
    lines = ["sigma_delta_kHz,mean_infidelity,stderr,n_samples,rejected_samples"]
    for r in results:
        lines.append(f"{r.sigma_delta / TWO_PI / 1e3:.9g},{r.mean_infidelity:.12g},"
                     f"{r.stderr:.12g},{r.n_samples},{r.rejected_samples}")
    _atomic_write(path, "\n".join(lines) + "\n")
    side = dict(metadata or {})
    side.setdefault("rng", RNG_SCHEME)
    side["numpy_version"] = np.__version__
    side["python_version"] = sys.version.split()[0]
    _atomic_write(str(path) + ".meta.json", json.dumps(side, indent=2) + "\n")


def _atomic_write(path, text: str):
    tmp = str(path) + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)
