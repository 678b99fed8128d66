"""Quasistatic noise: sampling, sensitivities, Monte Carlo sweeps."""

import numpy as np
import pytest

from dqdgates.device import extract_effective_model, shifted_model
from dqdgates.noise import (FIG4_SIGMA_RATIO, NoiseError, NoiseSample,
                            NoiseSpec, cr_errors, iswap_errors,
                            loglog_slope, monte_carlo_sweep, noise_grid,
                            sample_noise, sensitivity)
from dqdgates.sequences import (Correction, Scheme, SequenceKind,
                                build_sequence)


def test_noise_spec_linkage():
    spec = NoiseSpec.linked(0.1)
    assert spec.sigma_t == pytest.approx(0.1 * FIG4_SIGMA_RATIO)
    assert FIG4_SIGMA_RATIO == pytest.approx(1 / 200)
    with pytest.raises(NoiseError):
        NoiseSpec(-0.1, 0.0)


def test_sample_noise_is_seed_deterministic():
    spec = NoiseSpec(0.05, 0.001)
    a = sample_noise(spec, seed=7, n=50)
    b = sample_noise(spec, seed=7, n=50)
    c = sample_noise(spec, seed=8, n=50)
    assert a == b
    assert a != c


def test_sample_noise_statistics():
    spec = NoiseSpec(0.05, 0.001)
    draws = sample_noise(spec, seed=0, n=4000)
    eps = np.array([s.delta_epsilon for s in draws])
    tc = np.array([s.delta_t_c for s in draws])
    assert abs(eps.std() - 0.05) < 0.003
    assert abs(tc.std() - 0.001) < 6e-5
    assert abs(eps.mean()) < 0.003


def test_noise_grid_matches_default_axis():
    grid = noise_grid()
    assert grid[0] == pytest.approx(0.01)
    assert grid[-1] == pytest.approx(1.0)
    assert len(grid) == 9
    np.testing.assert_allclose(np.diff(np.log(grid)),
                               np.diff(np.log(grid))[0])


def test_sensitivity_exact_on_polynomial(small_params):
    """Richardson central differences are exact for smooth quantities."""
    got = sensitivity(lambda p: p.t_c[0] ** 2 + 3 * p.t_c[1], small_params)
    expected = 2 * small_params.t_c[0] + 3
    assert got == pytest.approx(expected, rel=1e-8)


def test_sensitivity_richardson_stability(small_params):
    """Result stable to 3 significant digits under step halving."""
    def quantity(p):
        return extract_effective_model(p, (), warn_residual=False).omega_2

    s1 = sensitivity(quantity, small_params, rel_step=1e-4)
    s2 = sensitivity(quantity, small_params, rel_step=5e-5)
    assert s1 == pytest.approx(s2, rel=1e-3)


def test_sensitivity_rejects_unknown_parameter(small_params):
    with pytest.raises(NoiseError):
        sensitivity(lambda p: 0.0, small_params, parameter="omega_r")


def test_cr_errors_sign_convention(small_params):
    """delta_J_tilde in the reduced Hamiltonian is a coupling decrease,
    the negative of the exact model shift."""
    from dqdgates.device import DrivePulse, drive_amplitude_for
    m0 = extract_effective_model(small_params, (), warn_residual=False)
    amp = drive_amplitude_for(small_params, 1, m0.omega_2, 0.015)
    drive = DrivePulse(dot=1, amplitude=amp, frequency=m0.omega_2)
    sample = NoiseSample((0.0, 0.0), (5e-4, -5e-4))
    shift = shifted_model(small_params, [drive], sample)
    err = cr_errors(shift)
    assert err.delta_J_tilde == pytest.approx(-shift.delta_J_tilde)
    assert err.delta_eta == pytest.approx(shift.delta_eta)
    assert err.delta_omega2 == pytest.approx(shift.delta_omega_2)
    assert err.delta_chi == pytest.approx(shift.delta_chi)


def test_iswap_errors_mapping(small_params):
    sample = NoiseSample((0.0, 0.0), (5e-4, -5e-4))
    shift = shifted_model(small_params, [], sample)
    err = iswap_errors(shift)
    assert err.delta_omega_1 == pytest.approx(shift.delta_omega_1)
    assert err.delta_omega_2 == pytest.approx(shift.delta_omega_2)
    assert err.delta_J == pytest.approx(shift.delta_J)
    assert err.delta_omega_minus == pytest.approx(
        shift.delta_omega_1 - shift.delta_omega_2)


def test_monte_carlo_seed_deterministic(resonant_params):
    seqs = [build_sequence(
        SequenceKind(Scheme.ISWAP, Correction.UNCORRECTED), np.pi)]
    spec = NoiseSpec.linked(0.05)
    a = monte_carlo_sweep(seqs, spec, resonant_params, n=40, seed=5)
    b = monte_carlo_sweep(seqs, spec, resonant_params, n=40, seed=5)
    assert a[0].mean_infidelity == b[0].mean_infidelity
    assert a[0].stderr == b[0].stderr


def test_monte_carlo_threads_agree_with_serial(resonant_params):
    seqs = [build_sequence(
        SequenceKind(Scheme.ISWAP, Correction.UNCORRECTED), np.pi)]
    spec = NoiseSpec.linked(0.05)
    serial = monte_carlo_sweep(seqs, spec, resonant_params, n=40, seed=5)
    threaded = monte_carlo_sweep(seqs, spec, resonant_params, n=40, seed=5,
                                 threads=4)
    assert serial[0].mean_infidelity \
        == pytest.approx(threaded[0].mean_infidelity, rel=1e-12)


def test_monte_carlo_rejects_out_of_regime_samples(resonant_params):
    seqs = [build_sequence(
        SequenceKind(Scheme.ISWAP, Correction.UNCORRECTED), np.pi)]
    # gigantic tunnel-coupling noise pushes some draws past 2 t_c = omega_z
    spec = NoiseSpec(sigma_epsilon=0.0, sigma_t=0.4)
    res = monte_carlo_sweep(seqs, spec, resonant_params, n=60, seed=0)[0]
    assert res.rejected > 0
    assert res.n + res.rejected == 60


def test_loglog_slope_recovers_power_law():
    x = np.geomspace(0.01, 1.0, 7)
    assert loglog_slope(x, 3.2 * x**2.5) == pytest.approx(2.5)
