"""Shared fixtures: reference devices and reduced models."""

import warnings

import numpy as np
import pytest

from dqdgates.device import (DeviceParams, DriveProjection, EffectiveModel,
                             zeeman_for_splitting)


@pytest.fixture(scope="session")
def fig1_params() -> DeviceParams:
    """The headline CR working point (all frequencies in GHz)."""
    return DeviceParams(
        omega_r=6.0, epsilon=(0.0, 0.0), t_c=(3.5, 3.5),
        omega_z=(5.96, 5.94), g_ac=(0.04, 0.04), g_x=(0.2, 0.2),
        n_fock=10,
    )


@pytest.fixture(scope="session")
def small_params() -> DeviceParams:
    """Same working point with a small Fock cutoff, for cheap sweeps."""
    return DeviceParams(
        omega_r=6.0, epsilon=(0.0, 0.0), t_c=(3.5, 3.5),
        omega_z=(5.96, 5.94), g_ac=(0.04, 0.04), g_x=(0.2, 0.2),
        n_fock=3,
    )


@pytest.fixture(scope="session")
def resonant_params() -> DeviceParams:
    """Symmetric device tuned so both effective splittings are equal."""
    base = DeviceParams(
        omega_r=6.0, epsilon=(0.0, 0.0), t_c=(3.5, 3.5),
        omega_z=(5.95, 5.95), g_ac=(0.04, 0.04), g_x=(0.2, 0.2),
        n_fock=3,
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        wz1 = zeeman_for_splitting(base, 1, 5.95, effective=True)
        wz2 = zeeman_for_splitting(base, 2, 5.95, effective=True)
        return DeviceParams(
            omega_r=6.0, epsilon=(0.0, 0.0), t_c=(3.5, 3.5),
            omega_z=(wz1, wz2), g_ac=(0.04, 0.04), g_x=(0.2, 0.2),
            n_fock=3,
        )


def make_cr_model(omega_1=5.925, omega_2=5.906, j=0.75e-3,
                  omega_x=0.015) -> EffectiveModel:
    """Hand-built reduced CR model with the drive on resonance with
    qubit 2 (numbers close to the headline working point)."""
    drive = DriveProjection(dot=1, frequency=omega_2, Omega_x=omega_x,
                            Omega_z=0.0, amplitude=omega_x)
    return EffectiveModel(omega_1=omega_1, omega_2=omega_2, J=j,
                          drives=(drive,))


def make_iswap_model(omega=5.95, j=1.35e-3) -> EffectiveModel:
    """Hand-built resonant reduced model (no drive)."""
    return EffectiveModel(omega_1=omega, omega_2=omega, J=j)


@pytest.fixture(scope="session")
def cr_model() -> EffectiveModel:
    return make_cr_model()


@pytest.fixture(scope="session")
def iswap_model() -> EffectiveModel:
    return make_iswap_model()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
