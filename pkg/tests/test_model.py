import math

import numpy as np
import pytest

from spinforge.envelopes import DriveSpec, square_envelope, sech_envelope
from spinforge.model import (adiabatic_energies, block_resonances,
                             interaction_hamiltonian, reduced_blocks,
                             rotating_frame_hamiltonian, static_hamiltonian)
from spinforge.params import TWO_PI, default_params

MHZ = TWO_PI * 1e6
GHZ = TWO_PI * 1e9


def test_static_hamiltonian_zero_exchange(params):
    h = static_hamiltonian(params, 0.0).entries
    expected = np.diag([params.ez, 0.5 * params.delta_ez,
                        -0.5 * params.delta_ez, -params.ez])
    np.testing.assert_allclose(h, expected, atol=1e-30)


def test_static_hamiltonian_exchange_block(params):
    h = static_hamiltonian(params, params.j).entries
    assert h[1, 2] == pytest.approx(0.5 * params.j, rel=1e-15)
    assert h[2, 1] == pytest.approx(0.5 * params.j, rel=1e-15)
    assert h[0, 1] == 0.0
    np.testing.assert_allclose(h, h.conj().T, atol=0.0)


def test_static_hamiltonian_rejects_negative_exchange(params):
    with pytest.raises(ValueError):
        static_hamiltonian(params, -1.0)


def test_adiabatic_energies_zero_exchange(params):
    e = adiabatic_energies(params, 0.0)
    np.testing.assert_allclose(
        e, [params.ez, 0.5 * params.delta_ez, -0.5 * params.delta_ez,
            -params.ez], rtol=1e-15)


def test_adiabatic_energy_hybridized_level(params):
    e = adiabatic_energies(params, params.j)
    # closed form at the reference operating point
    assert e[1] / MHZ == pytest.approx(74.25875935358931, rel=1e-12)


@pytest.mark.parametrize("j_mhz", [0.0, 1.0, 19.7, 80.0])
def test_adiabatic_energies_match_eigenvalues(params, j_mhz):
    j = j_mhz * MHZ
    e = np.sort(adiabatic_energies(params, j))
    ev = np.sort(np.linalg.eigvalsh(static_hamiltonian(params, j).entries))
    np.testing.assert_allclose(e, ev, rtol=1e-10)


def test_exchange_lowers_antiparallel_levels_by_half_j(params):
    # pure exchange effect, with the pulsed Zeeman shifts turned off
    bare = params.replace(ez1=0.0, delta_ez1=0.0)
    e_on = adiabatic_energies(bare, bare.j)
    e_off = adiabatic_energies(bare, 0.0)
    shift = e_on[1] - e_off[1]
    assert shift == pytest.approx(-0.5 * bare.j, rel=0.05)


def _drive(params, amplitude=0.0, duration=50e-9, omega=None):
    omega = block_resonances(params)[0] if omega is None else omega
    return DriveSpec(omega=omega, phi=params.phi,
                     envelope=square_envelope(amplitude, duration))


def test_interaction_hamiltonian_decoupled_limit(params):
    p0 = params.replace(by_l0=0.0, by_r0=0.0)
    h = interaction_hamiltonian(p0, _drive(p0), 7e-9).entries
    dz = p0.delta_ez + p0.delta_ez1
    jj = p0.j ** 2 / (2 * dz)
    expected = np.diag([p0.ez1, 0.5 * (p0.delta_ez1 - p0.j + jj),
                        -0.5 * (p0.delta_ez1 + p0.j + jj), -p0.ez1])
    np.testing.assert_allclose(h, expected, atol=1e-20)


def test_interaction_hamiltonian_carrier_phase_kills_drive_at_t0(params):
    # cos(3*pi/2) = 0: at t = 0 only the static transverse fields couple
    big = _drive(params, amplitude=TWO_PI * 30e6)
    h0 = interaction_hamiltonian(params, big, 0.0).entries
    h0_static = interaction_hamiltonian(params, _drive(params, 0.0), 0.0).entries
    np.testing.assert_allclose(h0, h0_static, atol=1e-6)


def test_interaction_hamiltonian_coupling_magnitude(params):
    drive = _drive(params, amplitude=TWO_PI * 20e6)
    t = 13.7e-9
    env = drive.envelope(t)
    byl = params.by_l0 + env * math.cos(drive.omega * t + drive.phi)
    byr = params.by_r0 + env * math.cos(drive.omega * t + drive.phi)
    g = params.j / (2 * (params.delta_ez + params.delta_ez1))
    h = interaction_hamiltonian(params, drive, t).entries
    assert abs(h[0, 1]) == pytest.approx(abs(byl + g * byr) / 2, rel=1e-12)
    assert abs(h[0, 2]) == pytest.approx(abs(byr - g * byl) / 2, rel=1e-12)


def test_interaction_hamiltonian_is_hermitian_with_static_diagonal(params):
    drive = _drive(params, amplitude=TWO_PI * 25e6)
    d0 = np.diag(interaction_hamiltonian(params, drive, 0.0).entries)
    for t in np.linspace(0.0, drive.duration, 17):
        h = interaction_hamiltonian(params, drive, float(t)).entries
        np.testing.assert_allclose(h, h.conj().T, atol=1e-12 * np.max(np.abs(h)))
        np.testing.assert_allclose(np.diag(h), d0, atol=0.0)


def test_interaction_hamiltonian_window(params):
    with pytest.raises(ValueError):
        interaction_hamiltonian(params, _drive(params), 51e-9)


def test_block_resonances_values(params):
    omega1, omega2 = block_resonances(params)
    assert omega1 / GHZ == pytest.approx(18.348969235603974, rel=1e-13)
    assert omega1 - omega2 == pytest.approx(params.j, rel=1e-13)


def test_block_resonance_weak_exchange_limit(params):
    tiny = params.replace(j=1.0, ez1=0.0, delta_ez1=0.0)  # 1 rad/s exchange
    omega1, _ = block_resonances(tiny)
    assert omega1 == pytest.approx(tiny.ez - 0.5 * tiny.delta_ez, rel=1e-12)


def test_rotating_frame_diagonal_and_phase_guard(params):
    omega = params.ez + params.ez1
    h = rotating_frame_hamiltonian(params, 0.0, omega).entries
    assert h[0, 0] == pytest.approx(0.0, abs=1e-6)
    with pytest.raises(ValueError):
        rotating_frame_hamiltonian(params.replace(phi=0.0), 0.0, omega)


def test_rotating_frame_equal_amplitude_corrections(params):
    b = TWO_PI * 10e6
    h = rotating_frame_hamiltonian(params, b, block_resonances(params)[0]).entries
    g = params.j / (2 * (params.delta_ez + params.delta_ez1))
    assert h[0, 1] == pytest.approx(0.25 * b * (1 + g), rel=1e-12)
    assert h[2, 3] == pytest.approx(0.25 * b * (1 - g), rel=1e-12)


def test_reduced_blocks_leading_order_matches_design_form(params):
    """Dropping the cross-block couplings and the drive corrections leaves
    a resonant block plus a detuned block shifted by a block-constant."""
    b = TWO_PI * 10e6
    omega1, _ = block_resonances(params)
    blocks = reduced_blocks(params, b, omega1, leading_order=True)

    s1 = blocks.s1 - np.trace(blocks.s1) / 2 * np.eye(2)
    np.testing.assert_allclose(s1, 0.25 * b * np.array([[0, 1], [1, 0]]),
                               atol=1e-3)

    s2 = blocks.s2 - np.trace(blocks.s2) / 2 * np.eye(2)
    expected = np.array([[-0.5 * params.j, 0.25 * b],
                         [0.25 * b, 0.5 * params.j]])
    np.testing.assert_allclose(s2, expected, atol=1e-3)
    assert blocks.omega1 - blocks.omega2 == pytest.approx(params.j, rel=1e-13)
