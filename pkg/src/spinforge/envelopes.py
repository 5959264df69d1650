"""Pulse envelope families and the catalog of named gate designs.

Three envelope constructions are provided:

* reverse-engineered envelopes derived from the polynomial phase-function
  ansatz (:class:`ChiSpec` + :func:`chi_envelope`),
* hyperbolic-secant pulses (:func:`sech_envelope`),
* flat-top square pulses (:func:`square_envelope`).

Amplitudes are the physical drive field on the dots (rad/s); the
two-level drive strength is a quarter of that, so the peak Rabi frequency
of a pulse is half its peak amplitude.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad, simpson
from scipy.optimize import brentq

from .errors import ConstraintViolationError, SingularityError
from .params import TWO_PI, DeviceParams, default_params

CHI_GRID_POINTS = 10_000
AREA_RTOL = 1e-9
PEAK_GRID_POINTS = 40_001

# Named phase-ansatz parameter pairs (amplitude, duration * j).  The first
# two flip the target spin conditionally in one shot; the third is the
# half-rotation used as the building block of the composite sequence.
CHI_CATALOG = {
    "a": (139.2947, 5.54498),
    "b": (61.4617, 15.38016),
    "c": (75.95269, 5.67638),
}

SQUARE_CNOT_AMPLITUDE = TWO_PI * 9.85e6   # rad/s
SQUARE_CNOT_DURATION = 26.445e-9          # s
SQUARE_SQRT_CNOT_DURATION = 12.8e-9       # s


@dataclass(frozen=True)
class ChiSpec:
    """Parameters of the polynomial phase ansatz.

    chi(t) = a (t/tau)^4 (1 - t/tau)^4 + pi/4 on the window [0, tau].
    ``delta`` is the detuning splitting of the spectator block (equal to the
    exchange coupling in this system).  Any spec must keep
    |dchi/dt| <= |delta|/2 everywhere, checked on a dense grid at
    construction time.
    """

    a: float
    tau: float
    delta: float

    def __post_init__(self):
        if self.tau <= 0.0:
            raise ValueError("tau must be positive")
        if self.delta == 0.0:
            raise ValueError("delta must be nonzero")
        ts = np.linspace(0.0, self.tau, CHI_GRID_POINTS)
        _, chid, _ = chi_ansatz(ts, self, _validate=False)
        if np.max(np.abs(chid)) > 0.5 * abs(self.delta):
            raise ConstraintViolationError(
                f"max |dchi/dt| = {np.max(np.abs(chid)):.4e} exceeds "
                f"|delta|/2 = {0.5 * abs(self.delta):.4e}")


def chi_ansatz(t, spec: ChiSpec, _validate: bool = True):
    """Phase function chi(t) and its first two time derivatives.

    Closed-form differentiation of the polynomial ansatz; no finite
    differences (the drive formula divides by a radical that vanishes at
    the window edges, where only the analytic limits are stable).
    Accepts scalar or array ``t`` inside [0, tau].
    """
    t = np.asarray(t, dtype=float)
    if _validate and (np.any(t < -1e-15) or np.any(t > spec.tau * (1 + 1e-12))):
        raise ValueError("t outside the pulse window [0, tau]")
    s = t / spec.tau
    one = 1.0 - s
    c = spec.a * s**4 * one**4 + 0.25 * math.pi
    cd = 4.0 * spec.a / spec.tau * s**3 * one**3 * (1.0 - 2.0 * s)
    cdd = (4.0 * spec.a / spec.tau**2 * s**2 * one**2
           * (3.0 * (1.0 - 2.0 * s) ** 2 - 2.0 * s * one))
    return c, cd, cdd


def two_level_drive(t, spec: ChiSpec):
    """Drive strength Omega(t) that realizes the phase function ``spec``.

    Omega = chi_dd / (2 k) - k cot(2 chi) with k = sqrt(delta^2/4 - chi_d^2).
    Raises :class:`ConstraintViolationError` where the radical argument is
    not positive and :class:`SingularityError` at interior cot poles; the
    pole at the window edges is removable (chi_d = chi_dd = 0 and
    cot(pi/2) = 0 there) and needs no special casing.
    """
    c, cd, cdd = chi_ansatz(t, spec)
    k2 = 0.25 * spec.delta**2 - cd**2
    if np.any(k2 <= 0.0):
        raise ConstraintViolationError(
            "delta^2/4 - chi_dot^2 <= 0 inside the window")
    k = np.sqrt(k2)
    s2 = np.sin(2.0 * c)
    if np.any(np.abs(s2) < 1e-12):
        raise SingularityError("cot(2 chi) pole inside the pulse window")
    return cdd / (2.0 * k) - k * np.cos(2.0 * c) / s2


@dataclass(frozen=True)
class Envelope:
    """A real pulse amplitude B(t) on [0, duration] (rad/s).

    ``kind`` records the construction: "square", "sech", "chi_derived" or
    "tabulated".  ``amplitude_fn`` must accept numpy arrays.
    """

    kind: str
    duration: float
    amplitude_fn: Callable[[np.ndarray], np.ndarray]
    grid: tuple | None = None  # (t, value) samples for tabulated envelopes

    def __call__(self, t):
        return self.amplitude_fn(np.asarray(t, dtype=float))

    def sample(self, n: int = 2000) -> tuple[np.ndarray, np.ndarray]:
        ts = np.linspace(0.0, self.duration, n)
        return ts, self(ts)

    def peak(self, n: int = PEAK_GRID_POINTS) -> float:
        """Max |amplitude|, located by dense sampling."""
        _, v = self.sample(n)
        return float(np.max(np.abs(v)))


@dataclass(frozen=True)
class DriveSpec:
    """Carrier frequency/phase plus an envelope: everything the
    time-dependent Hamiltonian needs during a gate window."""

    omega: float
    phi: float
    envelope: Envelope

    @property
    def duration(self) -> float:
        return self.envelope.duration


def square_envelope(amplitude: float, duration: float) -> Envelope:
    """Constant envelope of the given amplitude and duration."""
    if amplitude < 0.0:
        raise ValueError("amplitude must be >= 0")
    if duration <= 0.0:
        raise ValueError("duration must be positive")

    def fn(t):
        return np.full_like(np.asarray(t, dtype=float), amplitude)

    return Envelope(kind="square", duration=duration, amplitude_fn=fn)


def sech_envelope(sigma: float, n: float) -> Envelope:
    """Hyperbolic-secant pulse 4 sigma sech(sigma t - n pi / 2).

    Duration is n pi / sigma, so the peak 4 sigma sits at the midpoint and
    the tails are cut at a depth sech(n pi / 2).
    """
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    if n <= 0.0:
        raise ValueError("n must be positive")
    duration = n * math.pi / sigma

    def fn(t):
        return 4.0 * sigma / np.cosh(sigma * np.asarray(t, float) - 0.5 * n * math.pi)

    return Envelope(kind="sech", duration=duration, amplitude_fn=fn)


def chi_envelope(spec: ChiSpec) -> Envelope:
    """Physical drive envelope 4 Omega(t) of a phase-ansatz design."""

    def fn(t):
        return 4.0 * two_level_drive(t, spec)

    return Envelope(kind="chi_derived", duration=spec.tau, amplitude_fn=fn)


def tabulated_envelope(ts: np.ndarray, values: np.ndarray) -> Envelope:
    """Envelope linearly interpolated through (ts, values) samples."""
    ts = np.asarray(ts, dtype=float)
    values = np.asarray(values, dtype=float)
    if ts.ndim != 1 or ts.shape != values.shape or ts.size < 2:
        raise ValueError("need matching 1-d sample arrays with >= 2 points")
    if ts[0] != 0.0 or np.any(np.diff(ts) <= 0):
        raise ValueError("sample times must start at 0 and increase")

    def fn(t):
        return np.interp(np.asarray(t, float), ts, values)

    return Envelope(kind="tabulated", duration=float(ts[-1]), amplitude_fn=fn,
                    grid=(ts, values))


def pulse_area(env: Envelope) -> float:
    """Time integral of the envelope over its window (dimensionless).

    Adaptive quadrature at relative tolerance 1e-9; tabulated envelopes
    integrate by composite Simpson on their own grid.
    """
    if env.kind == "tabulated":
        ts, vs = env.grid
        if not np.all(np.isfinite(vs)):
            raise ValueError("envelope samples are not finite")
        return float(simpson(vs, x=ts))
    val, _ = quad(lambda t: float(env(t)), 0.0, env.duration,
                  epsabs=0.0, epsrel=AREA_RTOL, limit=400)
    if not math.isfinite(val):
        raise ValueError("envelope integral is not finite")
    return val


def sech_area_closed_form(sigma: float, n: float) -> float:
    """Exact area of :func:`sech_envelope` via the gudermannian,
    8 (arctan(e^{n pi/2}) - arctan(e^{-n pi/2}))."""
    x = 0.5 * n * math.pi
    return 8.0 * (math.atan(math.exp(x)) - math.atan(math.exp(-x)))


def solve_amplitude_for_area(tau: float, delta: float, target_area: float,
                             bracket: tuple[float, float] = (1.0, 250.0)) -> float:
    """Solve the ansatz amplitude whose envelope integrates to ``target_area``.

    Root-find over ``a`` at fixed (tau, delta).  Useful for re-deriving
    design points; the catalog itself stores the published (a, tau) pairs
    rather than re-solved ones.
    """

    def f(a):
        return pulse_area(chi_envelope(ChiSpec(a=a, tau=tau, delta=delta))) - target_area

    return float(brentq(f, *bracket, xtol=1e-12, rtol=1e-14))


@dataclass(frozen=True)
class PulseCatalogEntry:
    """A named, fully parametrized drive: envelope plus carrier."""

    tag: str
    envelope: Envelope
    carrier: float
    notes: str = ""


def chi_spec_for(tag: str, params: DeviceParams | None = None) -> ChiSpec:
    """ChiSpec of a named phase-ansatz design ("a", "b" or "c")."""
    if tag not in CHI_CATALOG:
        raise KeyError(f"unknown chi design {tag!r}")
    params = params or default_params()
    a, tau_j = CHI_CATALOG[tag]
    return ChiSpec(a=a, tau=tau_j / params.j, delta=params.j)


def catalog(params: DeviceParams | None = None) -> list[PulseCatalogEntry]:
    """All named pulse designs with their carriers.

    The conditional-flip designs (a, b, c and both square pulses) drive the
    first block resonance; the conditional-phase designs (cz_alpha,
    cphase_beta) are detuned above it by the designed alpha times the
    exchange coupling.
    """
    from .cphase import design_cphase  # deferred: cphase builds on envelopes

    params = params or default_params()
    from .model import block_resonances
    omega1, _ = block_resonances(params)

    entries = [
        PulseCatalogEntry(
            tag=t,
            envelope=chi_envelope(chi_spec_for(t, params)),
            carrier=omega1,
            notes=f"phase-ansatz design {t}",
        )
        for t in ("a", "b", "c")
    ]
    entries.append(PulseCatalogEntry(
        tag="sq_cnot",
        envelope=square_envelope(SQUARE_CNOT_AMPLITUDE, SQUARE_CNOT_DURATION),
        carrier=omega1,
        notes="single square pulse, conditional flip",
    ))
    entries.append(PulseCatalogEntry(
        tag="sq_sqrt_cnot",
        envelope=square_envelope(SQUARE_CNOT_AMPLITUDE, SQUARE_SQRT_CNOT_DURATION),
        carrier=omega1,
        notes="single square pulse, half conditional flip",
    ))
    for tag, theta in (("cz_alpha", math.pi), ("cphase_beta", 0.5 * math.pi)):
        d = design_cphase(theta, params)
        entries.append(PulseCatalogEntry(
            tag=tag,
            envelope=d.drive.envelope,
            carrier=d.drive.omega,
            notes=f"sech conditional-phase design, theta = {theta:.6f} rad",
        ))
    tags = [e.tag for e in entries]
    assert len(tags) == len(set(tags))
    return entries
