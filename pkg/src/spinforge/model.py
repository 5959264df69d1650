"""Hamiltonians of the driven two-spin system.

Builds every matrix form used by the simulators, in the two-qubit product
basis {uu, du, ud, dd} (left spin is the first arrow and the
fastest-varying index, so two-qubit operators compose as
right-factor (x) left-factor).

The gate simulations run in the interaction picture defined by the static
Hamiltonian at zero exchange; :func:`interaction_hamiltonian` is that frame's
generator with the full cosine carrier retained (no rotating-wave
approximation).  :func:`rotating_frame_hamiltonian` applies the RWA and is
used for design reasoning only, never for scoring a gate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .params import DeviceParams

BASIS = ("uu", "du", "ud", "dd")

HERMITICITY_RTOL = 1e-12


@dataclass(frozen=True)
class Hamiltonian4:
    """A 4x4 Hermitian matrix in the {uu, du, ud, dd} basis (rad/s)."""

    entries: np.ndarray
    basis: tuple = BASIS

    def __post_init__(self):
        h = np.asarray(self.entries, dtype=complex)
        if h.shape != (4, 4):
            raise ValueError(f"expected 4x4 matrix, got {h.shape}")
        scale = max(np.max(np.abs(h)), 1.0)
        if np.max(np.abs(h - h.conj().T)) > HERMITICITY_RTOL * scale:
            raise ValueError("matrix is not Hermitian")
        object.__setattr__(self, "entries", h)


@dataclass(frozen=True)
class BlockPair:
    """The two 2x2 diagonal blocks of the RWA Hamiltonian.

    ``s1`` spans {uu, du} and ``s2`` spans {ud, dd}; ``omega1``/``omega2``
    are the corresponding block resonance frequencies.  The blocks are
    exactly the diagonal 2x2 sub-blocks of :func:`rotating_frame_hamiltonian`
    with the cross-block couplings dropped.
    """

    s1: np.ndarray
    s2: np.ndarray
    omega1: float
    omega2: float


def _j_shifts(params: DeviceParams, j: float) -> tuple[float, float]:
    # ez1/delta_ez1 switch on with the exchange; no interpolation in j.
    if j > 0.0:
        return params.ez1, params.delta_ez1
    return 0.0, 0.0


def static_hamiltonian(params: DeviceParams, j: float) -> Hamiltonian4:
    """Undriven Hamiltonian at exchange coupling ``j``.

    Diagonal Zeeman terms plus the exchange block that couples the
    antiparallel states:

        [[ez + ez1,  0,          0,          0       ],
         [0,         (dz - j)/2, j/2,        0       ],
         [0,         j/2,        (-dz - j)/2, 0      ],
         [0,         0,          0,          -ez - ez1]]

    with dz = delta_ez + delta_ez1.  ``j`` may be zero (shifts vanish too);
    negative values are rejected.
    """
    if j < 0.0:
        raise ValueError(f"exchange coupling must be >= 0, got {j}")
    ez1, dez1 = _j_shifts(params, j)
    dz = params.delta_ez + dez1
    h = np.zeros((4, 4), dtype=complex)
    h[0, 0] = params.ez + ez1
    h[1, 1] = 0.5 * (dz - j)
    h[2, 2] = 0.5 * (-dz - j)
    h[3, 3] = -params.ez - ez1
    h[1, 2] = h[2, 1] = 0.5 * j
    return Hamiltonian4(h)


def adiabatic_energies(params: DeviceParams, j: float) -> np.ndarray:
    """Instantaneous eigenenergies at exchange ``j``, ordered
    (uu, hybridized du, hybridized ud, dd).

    The antiparallel pair hybridizes under the exchange; its energies are
    (-j +- sqrt((delta_ez + delta_ez1)^2 + j^2)) / 2.
    """
    if j < 0.0:
        raise ValueError(f"exchange coupling must be >= 0, got {j}")
    ez1, dez1 = _j_shifts(params, j)
    dz = params.delta_ez + dez1
    rad = math.hypot(dz, j)
    return np.array([
        params.ez + ez1,
        0.5 * (-j + rad),
        0.5 * (-j - rad),
        -params.ez - ez1,
    ])


def interaction_hamiltonian(params: DeviceParams, drive, t: float) -> Hamiltonian4:
    """Full driven Hamiltonian in the interaction picture of the j = 0 frame.

    ``drive`` provides the carrier frequency/phase and the pulse envelope
    (see :class:`spinforge.envelopes.DriveSpec`); the same envelope drives
    both dots.  The transverse fields keep their full carrier,
    b_yq(t) = by_q0 + env(t) * cos(omega t + phi); nothing is rotating-wave
    averaged.  The diagonal is time independent:

        (ez1, (delta_ez1 - j - j^2/(2 dz))/2 + j^2/(2 dz) ... )

    explicitly: diag = (ez1, (delta_ez1 - j + j^2/(2 dz))/2,
    -(delta_ez1 + j + j^2/(2 dz))/2, -ez1) with dz = delta_ez + delta_ez1,
    and the off-diagonal couplings carry interaction-picture phases
    exp(-+ i (delta_ez -+ 2 ez) t / 2).
    """
    dur = drive.envelope.duration
    if t < -1e-15 or t > dur * (1 + 1e-12) + 1e-15:
        raise ValueError(f"t = {t} outside the drive window [0, {dur}]")
    env = float(drive.envelope(t))
    cos_c = math.cos(drive.omega * t + drive.phi)
    byl = params.by_l0 + env * cos_c
    byr = params.by_r0 + env * cos_c
    g, diag = hamiltonian_coefficients(params)
    e1 = np.exp(-0.5j * (params.delta_ez - 2.0 * params.ez) * t)
    e2 = np.exp(0.5j * (params.delta_ez + 2.0 * params.ez) * t)

    h = np.zeros((4, 4), dtype=complex)
    h[0, 0], h[1, 1], h[2, 2], h[3, 3] = diag
    # products b_yL * (1 +- g b_yR/b_yL) expanded so a vanishing field never
    # divides by zero
    h[0, 1] = -0.5j * (byl + g * byr) * e1
    h[0, 2] = -0.5j * (byr - g * byl) * e2
    h[1, 3] = -0.5j * (byr + g * byl) * e2
    h[2, 3] = -0.5j * (byl - g * byr) * e1
    h[1, 0] = np.conj(h[0, 1])
    h[2, 0] = np.conj(h[0, 2])
    h[3, 1] = np.conj(h[1, 3])
    h[3, 2] = np.conj(h[2, 3])
    return Hamiltonian4(h)


def hamiltonian_coefficients(params: DeviceParams) -> tuple[float, np.ndarray]:
    """Exchange-dependent scalars of the interaction-picture Hamiltonian.

    Returns ``(g, diag)`` where ``g = j / (2 (delta_ez + delta_ez1))`` is the
    cross-dot drive correction and ``diag`` is the time-independent diagonal.
    Noise studies rebuild these from perturbed parameters while the carrier
    phases (which depend only on ez and delta_ez) stay nominal.
    """
    dz = params.delta_ez + params.delta_ez1
    j = params.j
    g = j / (2.0 * dz)
    jj = j * j / (2.0 * dz)
    diag = np.array([
        params.ez1,
        0.5 * (params.delta_ez1 - j + jj),
        -0.5 * (params.delta_ez1 + j + jj),
        -params.ez1,
    ])
    return g, diag


def block_resonances(params: DeviceParams) -> tuple[float, float]:
    """Resonance frequencies (omega1, omega2) of the two RWA blocks.

    omega1 = ez + ez1 - (dz - j + j^2/(2 dz))/2 drives the {uu, du}
    transition, omega2 the {ud, dd} one; their difference is exactly j.
    """
    dz = params.delta_ez + params.delta_ez1
    j = params.j
    jj = j * j / (2.0 * dz)
    base = params.ez + params.ez1
    omega1 = base - 0.5 * (dz - j + jj)
    omega2 = base - 0.5 * (dz + j + jj)
    return omega1, omega2


def rotating_frame_hamiltonian(params: DeviceParams, envelope_value: float,
                               omega: float) -> Hamiltonian4:
    """RWA Hamiltonian in the frame rotating at the carrier ``omega``.

    Valid only for carrier phase phi = 3*pi/2, which is where the
    rotating-wave average of the cosine drive produces the real symmetric
    couplings env * delta_pm / 4 used here.  ``envelope_value`` is the
    instantaneous drive amplitude (both dots driven equally).  Design
    reasoning only; gate scoring always uses the full
    :func:`interaction_hamiltonian`.
    """
    if not math.isclose(params.phi, 3.0 * math.pi / 2.0, rel_tol=0, abs_tol=1e-12):
        raise ValueError("the RWA form is derived for phi = 3*pi/2")
    dz = params.delta_ez + params.delta_ez1
    j = params.j
    jj = j * j / (2.0 * dz)
    g = j / (2.0 * dz)  # equal drive amplitudes: delta_pm = 1 +- g
    b = envelope_value
    h = np.zeros((4, 4), dtype=complex)
    h[0, 0] = params.ez + params.ez1 - omega
    h[1, 1] = 0.5 * (dz - j + jj)
    h[2, 2] = -0.5 * (dz + j + jj)
    h[3, 3] = omega - params.ez - params.ez1
    h[0, 1] = h[1, 0] = 0.25 * b * (1.0 + g)
    h[0, 2] = h[2, 0] = 0.25 * b * (1.0 - g)
    h[1, 3] = h[3, 1] = 0.25 * b * (1.0 + g)
    h[2, 3] = h[3, 2] = 0.25 * b * (1.0 - g)
    return Hamiltonian4(h)


def reduced_blocks(params: DeviceParams, envelope_value: float, omega: float,
                   leading_order: bool = False) -> BlockPair:
    """Decoupled 2x2 blocks of the RWA Hamiltonian.

    Drops the weak cross-block couplings of
    :func:`rotating_frame_hamiltonian` and returns the {uu, du} and
    {ud, dd} blocks.  With ``leading_order=True`` the drive corrections
    delta_pm are replaced by 1, which is the form the analytic pulse
    designs are derived from.
    """
    h = rotating_frame_hamiltonian(params, envelope_value, omega).entries
    s1 = h[:2, :2].copy()
    s2 = h[2:, 2:].copy()
    if leading_order:
        s1[0, 1] = s1[1, 0] = 0.25 * envelope_value
        s2[0, 1] = s2[1, 0] = 0.25 * envelope_value
    omega1, omega2 = block_resonances(params)
    return BlockPair(s1=s1, s2=s2, omega1=omega1, omega2=omega2)
