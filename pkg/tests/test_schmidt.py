# tests/test_schmidt.py
from __future__ import annotations

import math

import numpy as np
import pytest

from su11sim.errors import ConfigurationError, InputError
from su11sim.models import KernelGrid, TpaKernel
from su11sim.services.schmidt import (
    amplify,
    analytic_spectrum,
    auto_grid,
    build_tpa_kernel,
    effective_mode_number,
    fit_geometric_law,
    geometric_ratio,
    mean_photon_numbers,
    reconstruct_kernel,
    renormalize_weights,
    resolve_spectrum,
    schmidt_decompose,
    schmidt_mode_width,
    schmidt_number,
)


@pytest.fixture(scope="module")
def ratio_four():
    grid = auto_grid(1.0, 4.0, 512)
    kernel = build_tpa_kernel(1.0, 4.0, grid)
    return kernel, schmidt_decompose(kernel)


# =========================================================
# Kernel
# =========================================================
def test_kernel_is_normalized_under_grid_measure(ratio_four):
    kernel, _ = ratio_four
    dx = kernel.grid_step
    assert np.sum(np.abs(kernel.amplitude) ** 2) * dx * dx == pytest.approx(1.0, abs=1e-12)


def test_zero_width_rejected():
    with pytest.raises(ConfigurationError):
        build_tpa_kernel(0.0, 1.0, KernelGrid(10.0, 128))


def test_narrow_grid_rejected():
    with pytest.raises(ConfigurationError, match="grid edge"):
        build_tpa_kernel(1.0, 4.0, KernelGrid(half_span=6.0, points=128))


def test_too_few_points_rejected():
    with pytest.raises(ConfigurationError, match="64"):
        build_tpa_kernel(1.0, 1.0, KernelGrid(half_span=10.0, points=32))


# =========================================================
# Decomposition
# =========================================================
def test_separable_kernel_has_single_mode():
    kernel = build_tpa_kernel(1.0, 1.0, auto_grid(1.0, 1.0, 256))
    spectrum = schmidt_decompose(kernel)
    assert spectrum.eigenvalues[0] == pytest.approx(1.0, abs=1e-9)
    assert np.all(spectrum.eigenvalues[1:] < 1e-9)


def test_rank_one_kernel_recovers_factors():
    x = np.linspace(-10.0, 10.0, 200)
    dx = x[1] - x[0]
    g = np.exp(-((x - 1.0) ** 2))
    h = np.exp(-((x + 2.0) ** 2) / 3.0)
    g = g / math.sqrt(np.sum(g**2) * dx)
    h = h / math.sqrt(np.sum(h**2) * dx)
    kernel = TpaKernel(axis=x, amplitude=np.outer(g, h), pump_width=1.0, phase_matching_width=1.0)

    spectrum = schmidt_decompose(kernel)
    assert len(spectrum) == 1
    assert spectrum.eigenvalues[0] == pytest.approx(1.0)
    np.testing.assert_allclose(spectrum.modes_s[0].real, g, atol=1e-10)
    np.testing.assert_allclose(spectrum.modes_i[0].real, h, atol=1e-10)


def test_eigenvalues_sum_to_one_and_are_ordered(ratio_four):
    _, spectrum = ratio_four
    lam = spectrum.eigenvalues
    assert lam.sum() == pytest.approx(1.0, abs=1e-9)
    assert np.all(np.diff(lam) <= 0)


def test_modes_are_orthonormal(ratio_four):
    _, spectrum = ratio_four
    modes = spectrum.modes_s[:12]
    gram = (modes.conj() @ modes.T) * spectrum.grid_step
    assert np.max(np.abs(gram - np.eye(12))) < 1e-6


def test_reconstruction_round_trip(ratio_four):
    kernel, spectrum = ratio_four
    err = np.linalg.norm(reconstruct_kernel(spectrum) - kernel.amplitude)
    assert err < 1e-8


def test_schmidt_number_ratio_four(ratio_four):
    _, spectrum = ratio_four
    assert schmidt_number(1.0, 4.0) == pytest.approx(2.125)
    assert spectrum.schmidt_number == pytest.approx(2.125, abs=1e-3)


def test_geometric_law(ratio_four):
    _, spectrum = ratio_four
    mu, r2 = fit_geometric_law(spectrum, n_max=10)
    assert r2 > 0.999
    assert mu == pytest.approx(geometric_ratio(1.0, 4.0), rel=1e-3)
    assert geometric_ratio(1.0, 4.0) == pytest.approx(0.36)


def test_fundamental_mode_matches_analytic_gaussian(ratio_four):
    _, spectrum = ratio_four
    x = spectrum.axis
    s = schmidt_mode_width(1.0, 4.0)
    expected = math.pi ** -0.25 / math.sqrt(s) * np.exp(-(x**2) / (2.0 * s * s))
    u0 = spectrum.modes_s[0]
    err = math.sqrt(np.sum(np.abs(u0 - expected) ** 2) * spectrum.grid_step)
    assert err < 1e-3


def test_grid_refinement_is_stable(ratio_four):
    _, coarse = ratio_four
    fine = schmidt_decompose(build_tpa_kernel(1.0, 4.0, auto_grid(1.0, 4.0, 1024)))
    assert np.max(np.abs(coarse.eigenvalues[:6] - fine.eigenvalues[:6])) < 1e-4


def test_decompose_rejects_bad_kernels():
    x = np.linspace(-1.0, 1.0, 4)
    with pytest.raises(InputError, match="square"):
        schmidt_decompose(TpaKernel(axis=x, amplitude=np.ones((4, 3)), pump_width=1.0, phase_matching_width=1.0))
    bad = np.ones((4, 4))
    bad[0, 0] = np.nan
    with pytest.raises(InputError, match="non-finite"):
        schmidt_decompose(TpaKernel(axis=x, amplitude=bad, pump_width=1.0, phase_matching_width=1.0))


def test_analytic_spectrum_matches_numeric(ratio_four):
    _, numeric = ratio_four
    mu = geometric_ratio(1.0, 4.0)
    expected = (1.0 - mu) * mu ** np.arange(6)
    np.testing.assert_allclose(numeric.eigenvalues[:6], expected, atol=1e-6)

    # four orders fit inside the numeric grid; compare modes up to sign
    analytic = analytic_spectrum(1.0, 4.0, 4, numeric.axis)
    for k in range(4):
        overlap = abs(np.sum(analytic.modes_s[k].conj() * numeric.modes_s[k]) * numeric.grid_step)
        assert overlap == pytest.approx(1.0, abs=1e-6)


def test_analytic_spectrum_is_geometric():
    x = np.linspace(-40.0, 40.0, 2001)
    spectrum = analytic_spectrum(1.0, 4.0, 50, x)
    assert spectrum.method == "analytic"
    assert spectrum.eigenvalues.sum() == pytest.approx(1.0, abs=1e-12)
    ratios = spectrum.eigenvalues[1:] / spectrum.eigenvalues[:-1]
    np.testing.assert_allclose(ratios, 0.36, rtol=1e-12)
    # anti-correlated kernel: idler modes alternate in sign
    np.testing.assert_allclose(spectrum.modes_i[3], -spectrum.modes_s[3])
    np.testing.assert_allclose(spectrum.modes_i[2], spectrum.modes_s[2])


def test_resolve_spectrum_falls_back_to_closed_form():
    # 6 ps pump against a 3 mm BBO phase-matching width: K ~ 600
    spectrum = resolve_spectrum(1.18e-4, 0.142, points=512, n_modes=200, kind="temporal")
    assert spectrum.method == "analytic"
    assert len(spectrum) == 200
    assert spectrum.eigenvalues.sum() == pytest.approx(1.0, abs=1e-9)


# =========================================================
# Gain
# =========================================================
def test_zero_gain_gives_no_photons():
    assert np.all(mean_photon_numbers([0.6, 0.4], 0.0) == 0.0)


def test_single_mode_photon_number():
    assert mean_photon_numbers([1.0], 1.0)[0] == pytest.approx(1.3811, abs=1e-4)
    assert amplify([1.0], 1.0).total_photons == pytest.approx(math.sinh(1.0) ** 2)


def test_negative_gain_rejected():
    with pytest.raises(InputError):
        mean_photon_numbers([1.0], -0.5)
    with pytest.raises(InputError):
        renormalize_weights([1.0], -0.5)


def test_zero_gain_weights_equal_eigenvalues():
    lam = np.array([0.64, 0.2304, 0.1296])
    np.testing.assert_array_equal(renormalize_weights(lam, 0.0), lam)


def test_symmetric_eigenvalues_stay_symmetric():
    np.testing.assert_allclose(renormalize_weights([0.5, 0.5], 7.0), [0.5, 0.5])


def test_weights_concentrate_at_high_gain():
    weights = renormalize_weights([0.8, 0.2], 5.0)
    expected = math.sinh(math.sqrt(0.8) * 5.0) ** 2
    expected /= expected + math.sinh(math.sqrt(0.2) * 5.0) ** 2
    assert weights[0] == pytest.approx(expected, rel=1e-12)
    assert weights[0] == pytest.approx(0.98896, abs=1e-5)


def test_geometric_spectrum_fundamental_gains_weight():
    mu = 0.36
    lam = (1.0 - mu) * mu ** np.arange(60)
    lam /= lam.sum()
    weights = renormalize_weights(lam, 10.0)
    assert weights[0] > lam[0]
    assert weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.diff(weights) <= 0)


def test_large_gain_does_not_overflow():
    weights = renormalize_weights([0.7, 0.2, 0.1], 2000.0)
    assert np.all(np.isfinite(weights))
    assert weights[0] == pytest.approx(1.0)


def test_empty_eigenvalues_rejected():
    with pytest.raises(InputError):
        renormalize_weights([], 1.0)


def test_effective_mode_number():
    assert effective_mode_number([1.0, 0.0, 0.0]) == pytest.approx(1.0)
    assert effective_mode_number(np.full(8, 1.0 / 8.0)) == pytest.approx(8.0)
    mu = 0.36
    lam = (1.0 - mu) * mu ** np.arange(200)
    assert effective_mode_number(lam / lam.sum()) == pytest.approx((1.0 + mu) / (1.0 - mu), rel=1e-9)
    with pytest.raises(InputError):
        effective_mode_number([0.5, 0.2])


def test_gain_concentration_is_monotone():
    rng = np.random.default_rng(20240611)
    gains = np.arange(21)
    for _ in range(100):
        size = int(rng.integers(2, 40))
        lam = np.sort(rng.dirichlet(np.ones(size)))[::-1]
        if lam[0] - lam[1] < 1e-3:
            lam[0] += 1e-3
            lam /= lam.sum()
        k = [effective_mode_number(renormalize_weights(lam, g)) for g in gains]
        assert np.all(np.diff(k) <= 1e-9), k
