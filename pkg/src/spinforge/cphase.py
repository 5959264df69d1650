"""Design algebra for sech-pulse conditional-phase gates.

A sech drive detuned from both block resonances imprints a phase on each
2x2 block; the difference is the conditional phase.  With m = sigma / j and
alpha = (omega - omega1) / j the designed phase satisfies

    theta / 2 = -2 arctan(m / alpha) + 2 arctan(m / (alpha + 1)) + n pi / (2 m)

(the second block sits one exchange quantum below the first, so its
normalized detuning is alpha + 1).  Solving for alpha yields four branches
with limited real-validity windows in m; the standard design picks the
"(2, +)" branch just inside its window.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .envelopes import DriveSpec, sech_envelope
from .model import block_resonances
from .params import DeviceParams

EDGE_FACTOR = 0.9999   # fractional backoff from the window edge; exactly at
                       # the edge the branch detuning diverges
WINDOW_SCAN_POINTS = 4000
WINDOW_BISECT_TOL = 1e-12


def theta_from_alpha(m: float, alpha: float, n: float) -> float:
    """Raw (unwrapped) conditional phase of a sech design.

    The physical phase is defined modulo 2 pi; the returned value includes
    the n pi / m winding so that branch solutions can be inverted exactly.
    """
    if m <= 0.0:
        raise ValueError("m must be positive")
    if alpha == 0.0 or alpha == -1.0:
        raise ValueError("alpha in {0, -1} sits on a block resonance")
    return 2.0 * (-2.0 * math.atan(m / alpha)
                  + 2.0 * math.atan(m / (alpha + 1.0))
                  + 0.5 * n * math.pi / m)


def wrap_angle(x: float) -> float:
    """Wrap to (-pi, pi]."""
    w = math.remainder(x, 2.0 * math.pi)
    return w if w != -math.pi else math.pi


@dataclass(frozen=True)
class AlphaBranches:
    """The four branch solutions for the normalized detuning.

    Branches whose discriminant is negative are reported as ``None`` rather
    than raised, since windows legitimately close as m varies.
    """

    b1_plus: Optional[float]
    b1_minus: Optional[float]
    b2_plus: Optional[float]
    b2_minus: Optional[float]

    def get(self, branch: str) -> Optional[float]:
        return {"1+": self.b1_plus, "1-": self.b1_minus,
                "2+": self.b2_plus, "2-": self.b2_minus}[branch]


def _discriminant(m: float, n: float, theta: float, family: int) -> float:
    arg = 0.25 * (n * math.pi / m - theta)
    if family == 1:
        return 1.0 - 4.0 * m * m + 4.0 * m / math.tan(arg)
    return 1.0 - 4.0 * m * m - 4.0 * m * math.tan(arg)


def alpha_solutions(m: float, n: float, theta: float) -> AlphaBranches:
    """All four detuning branches alpha_{+-}^{(1,2)} at the given (m, n, theta).

    alpha = (-1 +- sqrt(D_family)) / 2 with D_1 = 1 - 4 m^2 + 4 m cot(...)
    and D_2 = 1 - 4 m^2 - 4 m tan(...), the trigonometric argument being
    (n pi / m - theta) / 4.
    """
    if m <= 0.0:
        raise ValueError("m must be positive")
    out = {}
    for family in (1, 2):
        d = _discriminant(m, n, theta, family)
        if d >= 0.0:
            root = math.sqrt(d)
            out[f"{family}+"] = 0.5 * (-1.0 + root)
            out[f"{family}-"] = 0.5 * (-1.0 - root)
        else:
            out[f"{family}+"] = None
            out[f"{family}-"] = None
    return AlphaBranches(b1_plus=out["1+"], b1_minus=out["1-"],
                         b2_plus=out["2+"], b2_minus=out["2-"])


def validity_window(n: float, theta: float, r: int, family: int) -> tuple[float, float]:
    """Real-solution window (m_low, m_high) of a branch family.

    m_high is n pi / (4 pi r + theta) for family 1 and
    n pi / (2 pi + 4 pi r + theta) for family 2 (a trigonometric pole).
    m_low is the discriminant root closest below m_high, located by a
    downward grid scan for the first sign change followed by bisection.
    Raises ValueError when no root exists in the scanned range.
    """
    if r < 1:
        raise ValueError("r must be a positive integer")
    if family not in (1, 2):
        raise ValueError("family must be 1 or 2")
    if family == 1:
        m_high = n * math.pi / (4.0 * math.pi * r + theta)
    else:
        m_high = n * math.pi / (2.0 * math.pi + 4.0 * math.pi * r + theta)

    hi = m_high * (1.0 - 1e-9)
    lo_limit = m_high / 10.0
    grid = np.linspace(hi, lo_limit, WINDOW_SCAN_POINTS)
    f_hi = _discriminant(grid[0], n, theta, family)
    if f_hi <= 0.0:
        raise ValueError("empty window: discriminant not positive at the edge")
    a, b = None, None
    for k in range(1, len(grid)):
        f = _discriminant(grid[k], n, theta, family)
        if f <= 0.0:
            a, b = grid[k], grid[k - 1]  # root bracketed in [a, b]
            break
    if a is None:
        raise ValueError("empty window: no discriminant root above m_high/10")
    while b - a > WINDOW_BISECT_TOL * m_high:
        mid = 0.5 * (a + b)
        if _discriminant(mid, n, theta, family) <= 0.0:
            a = mid
        else:
            b = mid
    return 0.5 * (a + b), m_high


@dataclass(frozen=True)
class CphaseDesign:
    """A fully specified sech conditional-phase drive."""

    theta: float
    n: float
    m: float
    alpha: float
    branch: str
    r: int
    drive: DriveSpec
    tau: float

    def __post_init__(self):
        resid = wrap_angle(theta_from_alpha(self.m, self.alpha, self.n) - self.theta)
        if abs(resid) > 1e-9:
            raise ValueError(f"inconsistent design: phase residual {resid:.2e}")


def design_cphase(theta: float, params: DeviceParams, n: float = 3.0,
                  r: int = 1, edge_factor: float = EDGE_FACTOR) -> CphaseDesign:
    """Standard conditional-phase design for a target angle in (0, pi].

    Places m just inside the r-th window of the "(2, +)" branch
    (m = edge_factor * m_high), which for n = 3, r = 1 gives
    m = 0.9999 * 3 pi / (6 pi + theta).  The drive is the sech envelope
    4 sigma sech(sigma t - n pi / 2) with sigma = m j, carrier
    omega1 + alpha j and duration n pi / sigma.
    """
    if not 0.0 < theta <= math.pi:
        raise ValueError("theta must lie in (0, pi]")
    if not 0.0 < edge_factor < 1.0:
        raise ValueError("edge_factor must lie in (0, 1)")
    m_high = n * math.pi / (2.0 * math.pi + 4.0 * math.pi * r + theta)
    m = edge_factor * m_high
    alpha = alpha_solutions(m, n, theta).get("2+")
    if alpha is None:
        raise ValueError(f"branch 2+ is complex at m = {m}")
    sigma = m * params.j
    omega1, _ = block_resonances(params)
    env = sech_envelope(sigma, n)
    drive = DriveSpec(omega=omega1 + alpha * params.j, phi=params.phi, envelope=env)
    return CphaseDesign(theta=theta, n=n, m=m, alpha=alpha, branch="2+", r=r,
                        drive=drive, tau=env.duration)


def general_two_block_phase(sigma: float, delta1: float, delta2: float,
                            n: float) -> float:
    """Conditional phase for two decoupled blocks with arbitrary detunings.

    theta / 2 = -2 arctan(sigma/delta1) + 2 arctan(sigma/delta2)
    - (delta1 - delta2) tau / 2 with tau = n pi / sigma.  Reduces to
    :func:`theta_from_alpha` when delta2 = delta1 + j and both are measured
    in units of j.
    """
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    if delta1 == 0.0 or delta2 == 0.0:
        raise ValueError("block detunings must be nonzero")
    tau = n * math.pi / sigma
    return 2.0 * (-2.0 * math.atan(sigma / delta1)
                  + 2.0 * math.atan(sigma / delta2)
                  - 0.5 * (delta1 - delta2) * tau)


def gate_time_amplitude_sweep(theta: float, params: DeviceParams,
                              r_values, step: float = None,
                              edge_factor: float = EDGE_FACTOR) -> list[dict]:
    """Trade-off curve between gate time and peak amplitude.

    For each window index r the design point sits just inside the
    "(2, +)" window, so tau = n pi / (m j) grows while the peak 4 m j
    shrinks; their product is exactly 4 n pi.  Each design is simulated end
    to end and scored against the pure conditional-phase target.  Windows
    that fail to open are skipped with a note.
    """
    from .designs import score_cphase_design  # deferred: designs builds on this

    out = []
    for r in r_values:
        try:
            design = design_cphase(theta, params, r=int(r), edge_factor=edge_factor)
        except ValueError as exc:
            out.append(dict(r=int(r), skipped=str(exc)))
            continue
        kwargs = {} if step is None else {"step": step}
        report = score_cphase_design(design, params, **kwargs)
        out.append(dict(r=int(r), tau_ns=design.tau * 1e9,
                        peak_MHz=design.drive.envelope.peak() / (2e6 * math.pi),
                        infidelity=1.0 - report["fidelity"],
                        conditional_phase=report["conditional_phase"]))
    return sorted((o for o in out), key=lambda o: o.get("tau_ns", math.inf))
