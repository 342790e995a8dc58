# tests/test_modes.py
from __future__ import annotations

import math

import numpy as np
import pytest

from su11sim.errors import ConfigurationError, InputError
from su11sim.models import ModeFamily
from su11sim.services.modes import gram_matrix, hermite_mode, hermite_modes, spectral_profile


def _sign_changes(psi: np.ndarray) -> int:
    significant = psi[np.abs(psi) > 1e-8 * np.max(np.abs(psi))]
    return int(np.count_nonzero(np.diff(np.sign(significant)) != 0))


def test_fundamental_is_normalized_gaussian():
    family = ModeFamily(kind="temporal", scale=50.0)
    t = np.linspace(-400.0, 400.0, 2001)
    expected = math.pi ** -0.25 / math.sqrt(50.0) * np.exp(-(t**2) / (2.0 * 50.0**2))
    np.testing.assert_allclose(hermite_mode(family, 0, t), expected, rtol=1e-12, atol=1e-15)


def test_first_order_is_odd_with_zero_at_origin():
    family = ModeFamily(kind="spatial", scale=1.0)
    x = np.linspace(-8.0, 8.0, 1601)
    psi = hermite_mode(family, 1, x)
    np.testing.assert_allclose(psi, -psi[::-1], atol=1e-15)
    assert psi[800] == pytest.approx(0.0, abs=1e-15)
    assert _sign_changes(psi) == 1


def test_tenth_order_sign_changes_and_norm():
    family = ModeFamily(kind="spatial", scale=2.0)
    x = np.linspace(-30.0, 30.0, 6001)
    psi = hermite_mode(family, 10, x)
    assert _sign_changes(psi) == 10
    assert np.sum(psi**2) * (x[1] - x[0]) == pytest.approx(1.0, abs=1e-6)


def test_gram_matrix_is_identity():
    family = ModeFamily(kind="temporal", scale=1.0)
    x = np.linspace(-16.0, 16.0, 4001)
    modes = hermite_modes(family, range(21), x)
    gram = gram_matrix(modes, x[1] - x[0])
    assert np.max(np.abs(gram - np.eye(21))) < 1e-6


def test_orders_are_returned_in_requested_order():
    family = ModeFamily(kind="temporal", scale=1.0)
    x = np.linspace(-12.0, 12.0, 801)
    rows = hermite_modes(family, [5, 0, 3], x)
    np.testing.assert_allclose(rows[1], hermite_mode(family, 0, x))
    np.testing.assert_allclose(rows[0], hermite_mode(family, 5, x))


def test_hermite_functions_are_fourier_eigenfunctions():
    n = 1024
    dx = math.sqrt(2.0 * math.pi / n)
    x = (np.arange(n) - n // 2) * dx
    family = ModeFamily(kind="temporal", scale=1.0)
    modes = hermite_modes(family, range(21), x)
    for m, psi in enumerate(modes):
        transformed = dx / math.sqrt(2.0 * math.pi) * np.fft.fftshift(np.fft.fft(np.fft.ifftshift(psi)))
        expected = (-1j) ** m * psi
        err = math.sqrt(np.sum(np.abs(transformed - expected) ** 2) * dx)
        assert err < 1e-3, f"order {m}: L2 error {err:.2e}"


def test_high_orders_stay_finite_and_normalized():
    family = ModeFamily(kind="temporal", scale=1.0, max_order=1000)
    x = np.linspace(-100.0, 100.0, 20001)
    psi = hermite_mode(family, 1000, x)
    assert np.all(np.isfinite(psi))
    assert np.sum(psi**2) * (x[1] - x[0]) == pytest.approx(1.0, abs=1e-6)


def test_spectral_profile_of_fundamental():
    family = ModeFamily(kind="temporal", scale=20.0)
    w = np.linspace(-0.5, 0.5, 1001)
    expected = np.exp(-(w**2) * 20.0**2) * 20.0 / math.sqrt(math.pi)
    np.testing.assert_allclose(spectral_profile(family, 0, w), expected, rtol=1e-10, atol=1e-14)


def test_order_above_max_order_rejected():
    family = ModeFamily(kind="temporal", scale=1.0, max_order=5)
    with pytest.raises(ConfigurationError, match="max_order"):
        hermite_mode(family, 6, np.linspace(-20.0, 20.0, 401))


def test_narrow_grid_rejected():
    family = ModeFamily(kind="temporal", scale=1.0)
    # order 10 needs half-span >= 2 * sqrt(21) ~ 9.17
    with pytest.raises(ConfigurationError, match="too narrow"):
        hermite_mode(family, 10, np.linspace(-8.0, 8.0, 401))


def test_one_sided_grid_rejected():
    family = ModeFamily(kind="temporal", scale=1.0, max_order=10)
    with pytest.raises(ConfigurationError, match="too narrow"):
        hermite_mode(family, 10, np.linspace(0.0, 20.0, 2001))
    with pytest.raises(ConfigurationError, match="too narrow"):
        hermite_mode(family, 10, np.linspace(-20.0, 5.0, 2001))


def test_negative_order_rejected():
    family = ModeFamily(kind="temporal", scale=1.0)
    with pytest.raises(InputError):
        hermite_mode(family, -1, np.linspace(-8.0, 8.0, 401))
