"""Device model: dressed dots, Schrieffer-Wolff reduction, solvers."""

import warnings

import numpy as np
import pytest

from dqdgates.device import (DeviceError, DeviceParams,
                             DispersiveRegimeWarning, DrivePulse,
                             apply_noise, diagonalize_dqd, dqd_hamiltonian,
                             dressed_frame, drive_amplitude_for,
                             extract_effective_model, schrieffer_wolff,
                             zeeman_for_splitting)
from dqdgates.noise import NoiseSample


def _with(params, **kw):
    base = dict(omega_r=params.omega_r, epsilon=params.epsilon,
                t_c=params.t_c, omega_z=params.omega_z, g_ac=params.g_ac,
                g_x=params.g_x, n_fock=params.n_fock)
    base.update(kw)
    return DeviceParams(**base)


def test_params_reject_closed_orbital_gap(small_params):
    with pytest.raises(DeviceError):
        _with(small_params, t_c=(2.0, 3.5))   # 2 t_c < omega_z


def test_params_reject_tiny_fock(small_params):
    with pytest.raises(DeviceError):
        _with(small_params, n_fock=1)


def test_dispersive_warning_for_strong_coupling(small_params):
    with pytest.warns(DispersiveRegimeWarning):
        p = _with(small_params, g_ac=(0.4, 0.4))
        extract_effective_model(p, (), warn_residual=False)


def test_diagonalize_dqd_is_exact(small_params):
    for dot in (1, 2):
        h = dqd_hamiltonian(small_params, dot)
        d = diagonalize_dqd(small_params, dot)
        recon = d.basis_transform @ np.diag(d.energies) \
            @ d.basis_transform.conj().T
        np.testing.assert_allclose(recon, h, atol=1e-12)
        assert d.omega_sigma > 0 and d.omega_tau > d.omega_sigma


def test_dressed_labels_continuous_in_detuning(small_params):
    """Adiabatic labeling: smooth dressed frequencies along an eps sweep."""
    freqs = []
    for eps in np.linspace(0.0, 0.5, 11):
        p = _with(small_params, epsilon=(eps, 0.0))
        freqs.append(diagonalize_dqd(p, 1).omega_sigma)
    steps = np.abs(np.diff(freqs))
    assert steps.max() < 5e-3


def test_schrieffer_wolff_residual_scales_quadratically(small_params):
    """Block-decoupling residual is O(g^2) in the removed coupling."""
    frame = dressed_frame(small_params)
    h0 = np.diag(frame.energies)
    from dqdgates.device import _sw_block_pieces
    v, _ = _sw_block_pieces(frame)
    residuals = []
    gs = np.array([1e-3, 2e-3, 4e-3, 8e-3])   # 1..8 MHz coupling scale
    scale = np.max(np.abs(v))
    for g in gs:
        _, _, res = schrieffer_wolff(h0, v * (g / scale), frame.block)
        residuals.append(res)
    slope = np.polyfit(np.log(gs), np.log(residuals), 1)[0]
    assert abs(slope - 2.0) < 0.1


def test_uncoupled_dots_have_zero_exchange(small_params):
    p = _with(small_params, g_ac=(0.0, 0.0))
    m = extract_effective_model(p, (), warn_residual=False)
    assert abs(m.J) < 1e-12
    for dot in (1, 2):
        d = diagonalize_dqd(p, dot)
        target = (m.omega_1, m.omega_2)[dot - 1]
        assert abs(target - d.omega_sigma) < 1e-9


def test_dot_swap_symmetry(small_params):
    m = extract_effective_model(small_params, (), warn_residual=False)
    swapped = _with(small_params,
                    omega_z=small_params.omega_z[::-1],
                    t_c=small_params.t_c[::-1])
    ms = extract_effective_model(swapped, (), warn_residual=False)
    assert abs(m.omega_1 - ms.omega_2) < 1e-10
    assert abs(m.omega_2 - ms.omega_1) < 1e-10
    assert abs(m.J - ms.J) < 1e-12


def test_drive_amplitude_solver_roundtrip(small_params):
    m0 = extract_effective_model(small_params, (), warn_residual=False)
    target = 0.015
    amp = drive_amplitude_for(small_params, 1, m0.omega_2, target)
    drive = DrivePulse(dot=1, amplitude=amp, frequency=m0.omega_2)
    m = extract_effective_model(small_params, (drive,),
                                warn_residual=False)
    assert abs(m.Omega_x_1 - target) < 1e-9
    assert 0 < m.J_tilde < m.J


def test_zeeman_solver_roundtrip(small_params):
    target = 5.93
    wz = zeeman_for_splitting(small_params, 2, target, effective=True)
    p = _with(small_params,
              omega_z=(small_params.omega_z[0], wz))
    m = extract_effective_model(p, (), warn_residual=False)
    assert abs(m.omega_2 - target) < 1e-9


def test_apply_noise_shifts_and_validates(small_params):
    sample = NoiseSample((0.01, -0.02), (1e-4, -2e-4))
    p = apply_noise(small_params, sample)
    np.testing.assert_allclose(p.epsilon, (0.01, -0.02))
    np.testing.assert_allclose(p.t_c, (3.5001, 3.4998))
    huge = NoiseSample((0.0, 0.0), (-1.0, 0.0))
    with pytest.raises(DeviceError):
        apply_noise(small_params, huge)


def test_shifted_model_zero_sample_is_exactly_nominal(small_params):
    from dqdgates.device import shifted_model
    shift = shifted_model(small_params, [], NoiseSample.zero())
    assert shift.delta_omega_1 == 0.0
    assert shift.delta_omega_2 == 0.0
    assert shift.delta_J == 0.0


def test_epsilon_enters_quadratically(small_params):
    """At eps = 0 the detuning is a sweet spot: the splitting shift is
    even in delta_epsilon to high accuracy."""
    from dqdgates.device import shifted_model
    up = shifted_model(small_params, [],
                       NoiseSample((0.05, 0.0), (0.0, 0.0)))
    dn = shifted_model(small_params, [],
                       NoiseSample((-0.05, 0.0), (0.0, 0.0)))
    assert up.delta_omega_1 != 0.0
    assert abs(up.delta_omega_1 - dn.delta_omega_1) \
        < 1e-6 * abs(up.delta_omega_1)
