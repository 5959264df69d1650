import math

import numpy as np
import pytest

from spinforge.envelopes import ChiSpec, DriveSpec, chi_envelope, chi_spec_for
from spinforge.errors import ConstraintViolationError
from spinforge.model import block_resonances, interaction_hamiltonian
from spinforge.params import TWO_PI
from spinforge.propagator import (DEFAULT_STEP, DrivePropagator, Unitary4,
                                  evolve, evolve_drive, sech_phase,
                                  step_halving_difference, two_level_analytic,
                                  unitarity_error)

SX = np.array([[0, 1], [1, 0]], dtype=complex)


def test_evolve_zero_hamiltonian_is_identity():
    u = evolve(lambda t: np.zeros((4, 4)), 0.0, 1e-9, 1e-11)
    np.testing.assert_allclose(u.entries, np.eye(4), atol=1e-14)
    assert isinstance(u, Unitary4)


def test_evolve_constant_diagonal():
    d = np.array([1.5e9, 0.7e9, -0.2e9, -2.0e9])
    t1 = 3e-9
    u = evolve(lambda t: np.diag(d), 0.0, t1, 1e-12)
    np.testing.assert_allclose(u.entries, np.diag(np.exp(-1j * d * t1)),
                               atol=1e-9)


def test_evolve_commuting_drive_closed_form(params):
    """A pure sigma_x drive integrates to exp(-i * area * sigma_x / 4)."""
    env = chi_envelope(chi_spec_for("a", params))

    def h(t):
        return 0.25 * float(env(t)) * SX

    u = evolve(h, 0.0, env.duration, 2e-12)
    from spinforge.envelopes import pulse_area
    area = pulse_area(env)
    expected = (math.cos(area / 4) * np.eye(2) - 1j * math.sin(area / 4) * SX)
    np.testing.assert_allclose(u.entries, expected, atol=1e-6)


def test_evolve_input_validation():
    with pytest.raises(ValueError, match="Hermitian"):
        evolve(lambda t: np.array([[0.0, 1.0], [0.0, 0.0]]), 0.0, 1e-9, 1e-10)
    with pytest.raises(ValueError, match="finite"):
        evolve(lambda t: np.array([[np.nan, 0.0], [0.0, 0.0]]), 0.0, 1e-9, 1e-10)
    with pytest.raises(ValueError):
        evolve(lambda t: np.eye(2), 1e-9, 0.0, 1e-10)


def test_fast_path_matches_generic_evolve(params):
    """The compiled structured kernel and the callable-based integrator are
    the same quadrature; over a short window they agree to round-off."""
    omega1, _ = block_resonances(params)
    env = chi_envelope(chi_spec_for("a", params))
    drive = DriveSpec(omega=omega1, phi=params.phi, envelope=env)
    t1 = 0.5e-9
    clipped = DriveSpec(omega=omega1, phi=params.phi,
                        envelope=env.__class__(kind=env.kind, duration=t1,
                                               amplitude_fn=env.amplitude_fn))
    u_fast = DrivePropagator(params, clipped, step=DEFAULT_STEP).unitary()
    u_gen = evolve(lambda t: interaction_hamiltonian(params, drive, t),
                   0.0, t1, DEFAULT_STEP)
    np.testing.assert_allclose(u_fast, u_gen.entries, atol=5e-12)


def test_drive_propagator_unitarity_and_halving(params, registry):
    drive = registry["a"].drive
    u = evolve_drive(params, drive)
    assert u.drift < 1e-9
    assert unitarity_error(u.entries) < 1e-9
    assert step_halving_difference(params, drive) < 1e-8


def test_midpoint_rule_is_second_order(params, registry):
    """Halving the step shrinks the midpoint-rule change by about 4x."""
    drive = registry["sq_cnot"].drive
    d1 = step_halving_difference(params, drive, step=4e-12, order=2)
    d2 = step_halving_difference(params, drive, step=2e-12, order=2)
    assert 2.5 < d1 / d2 < 6.0


def test_square_drive_invariants_near_conditional_flip(params, registry):
    from spinforge.gates import local_invariants
    u = evolve_drive(params, registry["sq_cnot"].drive).entries
    g = local_invariants(u)
    assert abs(g.g1) < 1e-3 and abs(g.g2) < 1e-3 and abs(g.g3 - 1.0) < 1e-3


def test_frame_fields_must_match_grid(params, registry):
    prop = DrivePropagator(params, registry["a"].drive, step=2e-12)
    with pytest.raises(ValueError, match="quasistatic"):
        prop.unitary(params.replace(delta_ez=params.delta_ez * 1.01))
    # exchange-sector fields may differ
    prop.unitary(params.replace(j=params.j * 1.01))


# ---------------------------------------------------------------------------
# closed-form two-level solutions
# ---------------------------------------------------------------------------

def _two_level_h(spec):
    from spinforge.envelopes import two_level_drive

    def h(t):
        om = float(two_level_drive(t, spec))
        return np.array([[-0.5 * spec.delta, om], [om, 0.5 * spec.delta]],
                        dtype=complex)

    return h


def test_two_level_analytic_identity_at_t0(params):
    spec = chi_spec_for("b", params)
    u = two_level_analytic(spec, 0.0)
    np.testing.assert_allclose(u.entries, np.eye(2), atol=1e-14)


def test_two_level_analytic_is_z_like_at_pulse_end(params):
    # cyclic phase function: the block returns to itself up to z phases
    spec = chi_spec_for("b", params)
    u = np.abs(two_level_analytic(spec, spec.tau).entries)
    np.testing.assert_allclose(u, np.eye(2), atol=1e-9)


def test_two_level_analytic_matches_numeric_integration(params):
    rng = np.random.default_rng(7)
    checked = 0
    while checked < 20:
        a = rng.uniform(-150.0, 150.0)
        tau = rng.uniform(30e-9, 120e-9)
        delta = rng.uniform(0.5, 2.0) * params.j * rng.choice([-1.0, 1.0])
        try:
            spec = ChiSpec(a=a, tau=tau, delta=delta)
        except ConstraintViolationError:
            continue
        t_probe = rng.uniform(0.3, 1.0) * tau
        ua = two_level_analytic(spec, t_probe).entries
        un = evolve(_two_level_h(spec), 0.0, t_probe, tau / 20_000).entries
        assert np.max(np.abs(ua - un)) < 1e-7
        checked += 1


def test_sech_phase_closed_form_values():
    sigma = TWO_PI * 10e6
    assert sech_phase(sigma, sigma, 1.0) == pytest.approx(-math.pi, rel=1e-12)
    # far-detuned limit: pure detuning phase -delta * tau / 2
    delta = TWO_PI * 500e6
    n = 3.0
    tau = n * math.pi / sigma
    assert sech_phase(sigma, delta, n) == pytest.approx(
        -2 * math.atan(sigma / delta) - 0.5 * delta * tau, rel=1e-15)
    with pytest.raises(ValueError):
        sech_phase(sigma, 0.0, 3.0)


def _wrap(x):
    return math.remainder(x, 2 * math.pi)


def test_sech_phase_matches_numeric_evolution(params):
    sigma = 0.42853 * params.j
    delta = params.j
    n = 3.0
    tau = n * math.pi / sigma

    def h(t):
        om = sigma / math.cosh(sigma * t - 0.5 * n * math.pi)
        return np.array([[-0.5 * delta, om], [om, 0.5 * delta]], dtype=complex)

    u = evolve(h, 0.0, tau, tau / 200_000).entries
    theta_num = 0.5 * (np.angle(u[1, 1]) - np.angle(u[0, 0]))
    theta = sech_phase(sigma, delta, n)
    assert abs(_wrap(theta_num - theta)) < 1e-4
