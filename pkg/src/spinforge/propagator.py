"""Time-ordered integration of the driven dynamics, plus the closed-form
two-level solutions used as independent oracles.

Two integration paths exist and are tested against each other:

* :func:`evolve` takes an arbitrary Hamiltonian callable and loops in
  Python.  It is dimension-agnostic (2x2 oracles run through it) and
  checks every sample for Hermiticity and finiteness.
* :class:`DrivePropagator` pre-samples the structured drive Hamiltonian on
  the step grid and runs the compiled kernel; this is the path every gate
  simulation and noise study uses.

Both default to a fourth-order commutator-free exponential integrator on
Gauss-Legendre nodes (two exponentials per step).  The second-order
exponential midpoint rule is available via ``order=2`` but does not reach
the package's step-halving tolerance at the default step; see the README.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from . import _kernels
from .envelopes import ChiSpec, DriveSpec, chi_ansatz
from .errors import ConstraintViolationError
from .model import hamiltonian_coefficients
from .params import DeviceParams

DEFAULT_STEP = 0.25e-12  # s; >= 200 steps per period of the fastest phase
DEFAULT_ORDER = 4
UNITARITY_PROJECT_THRESHOLD = 1e-10

_GL = _kernels.GL_OFFSET
_NODE_OFFSETS = {2: (0.5,), 4: (0.5 - _GL, 0.5 + _GL)}
_CF4_WEIGHTS = ((_kernels.CF4_P, _kernels.CF4_Q), (_kernels.CF4_Q, _kernels.CF4_P))


@dataclass(frozen=True)
class Unitary2:
    """2x2 unitary with its post-integration unitarity residual."""

    entries: np.ndarray
    drift: float = 0.0


@dataclass(frozen=True)
class Unitary4:
    """4x4 unitary in the {uu, du, ud, dd} basis.

    ``drift`` is the max-norm deviation of U^dag U from identity before any
    re-unitarization was applied.
    """

    entries: np.ndarray
    basis: tuple = ("uu", "du", "ud", "dd")
    drift: float = 0.0


def unitarity_error(u: np.ndarray) -> float:
    u = np.asarray(u)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def polar_project(u: np.ndarray) -> np.ndarray:
    """Nearest unitary in Frobenius norm (polar factor via SVD)."""
    w, _, vh = np.linalg.svd(u)
    return w @ vh


def _wrap(u: np.ndarray, drift: float):
    if u.shape == (4, 4):
        return Unitary4(entries=u, drift=drift)
    return Unitary2(entries=u, drift=drift)


def _expm_small(a: np.ndarray) -> np.ndarray:
    """Matrix exponential by scaling-and-squaring on a Taylor core.

    Meant for skew-Hermitian step generators; squarings only engage when a
    caller hands in an unusually large step.
    """
    norm = np.linalg.norm(a, np.inf)
    squarings = max(0, int(math.ceil(math.log2(norm / 0.05))) if norm > 0.05 else 0)
    x = a / (2 ** squarings)
    e = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for k in range(1, 9):
        term = term @ x / k
        e = e + term
    for _ in range(squarings):
        e = e @ e
    return e


def evolve(h, t0: float, t1: float, step: float, order: int = DEFAULT_ORDER):
    """Propagator of i dU/dt = H(t) U over [t0, t1] from a callable ``h``.

    The interval is split into uniform substeps no longer than ``step`` and
    the exponential product rule of the requested order (2 = midpoint,
    4 = commutator-free Gauss) is accumulated left-to-right.  Every sampled
    H must be Hermitian and finite.  If the accumulated unitarity drift
    exceeds 1e-10 the result is polar-projected; the raw drift is reported
    on the returned object.
    """
    if t1 <= t0:
        raise ValueError("t1 must exceed t0")
    if step <= 0.0:
        raise ValueError("step must be positive")
    if order not in (2, 4):
        raise ValueError("order must be 2 or 4")
    n = max(1, int(round((t1 - t0) / step)))
    dt = (t1 - t0) / n
    u = None
    for i in range(n):
        t_base = t0 + i * dt
        hs = [_check_sample(h(t_base + off * dt)) for off in _NODE_OFFSETS[order]]
        if u is None:
            u = np.eye(hs[0].shape[0], dtype=complex)
        if order == 2:
            u = _expm_small(-1j * dt * hs[0]) @ u
        else:
            for w0, w1 in _CF4_WEIGHTS:
                u = _expm_small(-1j * dt * (w0 * hs[0] + w1 * hs[1])) @ u
    drift = unitarity_error(u)
    if drift > UNITARITY_PROJECT_THRESHOLD:
        u = polar_project(u)
    return _wrap(u, drift)


def _check_sample(h) -> np.ndarray:
    m = np.asarray(getattr(h, "entries", h), dtype=complex)
    if not np.all(np.isfinite(m)):
        raise ValueError("Hamiltonian sample has non-finite entries")
    scale = max(np.max(np.abs(m)), 1.0)
    if np.max(np.abs(m - m.conj().T)) > 1e-9 * scale:
        raise ValueError("Hamiltonian sample is not Hermitian")
    return m


class DrivePropagator:
    """Pre-sampled time grid of one drive, reusable across noise draws.

    The envelope, carrier and frame phases are evaluated once on the
    integrator's node grid; :meth:`unitary` then only needs the
    exchange-dependent scalars, which is what quasistatic noise perturbs.
    Frame fields (``bz_ext``, ``delta_ez``, ``bz_l0``, the static
    transverse fields and the carrier) are part of the grid and must be
    identical between the construction parameters and any perturbed set.
    """

    def __init__(self, params: DeviceParams, drive: DriveSpec,
                 step: float = DEFAULT_STEP, order: int = DEFAULT_ORDER):
        if step <= 0.0:
            raise ValueError("step must be positive")
        if order not in (2, 4):
            raise ValueError("order must be 2 or 4")
        self.params = params
        self.drive = drive
        self.order = order
        duration = drive.envelope.duration
        self.n_steps = max(1, int(round(duration / step)))
        self.dt = duration / self.n_steps
        offs = np.array(_NODE_OFFSETS[order])
        ts = (np.arange(self.n_steps)[:, None] + offs[None, :]) * self.dt
        env = drive.envelope(ts)
        if not np.all(np.isfinite(env)):
            raise ValueError("envelope produced non-finite samples")
        carrier = np.cos(drive.omega * ts + drive.phi)
        self._byl = params.by_l0 + env * carrier
        self._byr = params.by_r0 + env * carrier
        self._e1 = np.exp(-0.5j * (params.delta_ez - 2.0 * params.ez) * ts)
        self._e2 = np.exp(0.5j * (params.delta_ez + 2.0 * params.ez) * ts)

    def _check_frame(self, params: DeviceParams) -> None:
        for name in ("bz_ext", "delta_ez", "bz_l0", "by_l0", "by_r0", "phi"):
            if getattr(params, name) != getattr(self.params, name):
                raise ValueError(
                    f"{name} differs from the sampled grid; quasistatic noise "
                    "perturbs only j, ez1 and delta_ez1")

    def unitary_from_coefficients(self, g: float, diag: np.ndarray) -> np.ndarray:
        return _kernels.evolve_nodes(self.dt, self._byl, self._byr,
                                     self._e1, self._e2, g,
                                     np.asarray(diag, float), self.order)

    def unitary(self, params: DeviceParams | None = None) -> np.ndarray:
        """4x4 propagator over the drive window, optionally under perturbed
        exchange/Zeeman-shift parameters."""
        p = params or self.params
        if params is not None:
            self._check_frame(p)
        g, diag = hamiltonian_coefficients(p)
        return self.unitary_from_coefficients(g, diag)

    def snapshots(self, every_ns: float = 0.05,
                  params: DeviceParams | None = None):
        """(times, unitaries) sampled every ``every_ns`` nanoseconds."""
        p = params or self.params
        if params is not None:
            self._check_frame(p)
        g, diag = hamiltonian_coefficients(p)
        every = max(1, int(round(every_ns * 1e-9 / self.dt)))
        snaps, idx = _kernels.evolve_nodes_snapshots(
            self.dt, self._byl, self._byr, self._e1, self._e2, g,
            np.asarray(diag, float), self.order, every)
        return idx * self.dt, snaps


def evolve_drive(params: DeviceParams, drive: DriveSpec,
                 step: float = DEFAULT_STEP, order: int = DEFAULT_ORDER) -> Unitary4:
    """One-shot structured-drive propagation (see :class:`DrivePropagator`).

    Applies the same drift bookkeeping as :func:`evolve`: the result is
    polar-projected if the raw unitarity error exceeds 1e-10.
    """
    u = DrivePropagator(params, drive, step=step, order=order).unitary()
    drift = unitarity_error(u)
    if drift > UNITARITY_PROJECT_THRESHOLD:
        u = polar_project(u)
    return Unitary4(entries=u, drift=drift)


def step_halving_difference(params: DeviceParams, drive: DriveSpec,
                            step: float = DEFAULT_STEP,
                            order: int = DEFAULT_ORDER) -> float:
    """Max-norm change of the propagator when the step is halved.

    The convergence contract of the default integrator is that this stays
    below 1e-8 at the default step for every catalog drive.
    """
    u1 = evolve_drive(params, drive, step=step, order=order).entries
    u2 = evolve_drive(params, drive, step=0.5 * step, order=order).entries
    return float(np.max(np.abs(u1 - u2)))


# ---------------------------------------------------------------------------
# closed-form two-level solutions (oracles)
# ---------------------------------------------------------------------------

_ROT_Y_QUARTER = np.array([[1.0, -1.0], [1.0, 1.0]]) / math.sqrt(2.0)  # e^{-i pi sy/4}


def two_level_analytic(spec: ChiSpec, t: float) -> Unitary2:
    """Exact evolution of H = diag(-delta/2, delta/2) + Omega(t) sigma_x.

    For the drive Omega(t) generated by ``spec`` (see
    :func:`spinforge.envelopes.two_level_drive`) the propagator is

        e^{-i pi sy / 4} [[cos(chi) e^{i psi-},  sin(chi) e^{-i psi+}],
                          [-sin(chi) e^{i psi+}, cos(chi) e^{-i psi-}]]

    with psi+- = integral_0^t sqrt(delta^2/4 - chi_d^2) csc(2 chi) dt'
    +- arcsin(2 chi_d / delta) / 2.  Valid whenever the spec satisfies the
    |chi_d| <= |delta|/2 constraint (enforced at construction).
    """
    if t < 0.0 or t > spec.tau * (1 + 1e-12):
        raise ValueError("t outside the pulse window")

    def integrand(tt):
        c, cd, _ = chi_ansatz(tt, spec)
        k2 = 0.25 * spec.delta**2 - cd**2
        if k2 <= 0.0:
            raise ConstraintViolationError("|chi_dot| reached |delta|/2")
        return math.sqrt(k2) / math.sin(2.0 * c)

    base, _ = quad(integrand, 0.0, t, epsabs=1e-14, epsrel=1e-12, limit=800)
    c, cd, _ = chi_ansatz(t, spec)
    half_beta = 0.5 * math.asin(np.clip(2.0 * cd / spec.delta, -1.0, 1.0))
    psi_p = base + half_beta
    psi_m = base - half_beta
    v = np.array([
        [math.cos(c) * np.exp(1j * psi_m), math.sin(c) * np.exp(-1j * psi_p)],
        [-math.sin(c) * np.exp(1j * psi_p), math.cos(c) * np.exp(-1j * psi_m)],
    ])
    u = _ROT_Y_QUARTER @ v
    return Unitary2(entries=u, drift=unitarity_error(u))


def sech_phase(sigma: float, delta: float, n: float) -> float:
    """Phase imprinted on a detuned two-level system by a sech pulse.

    For H = diag(-delta/2, delta/2) + sigma sech(sigma t - n pi/2) sigma_x
    over one window tau = n pi / sigma the evolution is diagonal up to
    exponentially small tails, U = diag(e^{-i theta}, e^{i theta}) with

        theta = -2 arctan(sigma / delta) - delta tau / 2.
    """
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    if n <= 0.0:
        raise ValueError("n must be positive")
    if delta == 0.0:
        raise ValueError("delta must be nonzero")
    tau = n * math.pi / sigma
    return -2.0 * math.atan(sigma / delta) - 0.5 * delta * tau
