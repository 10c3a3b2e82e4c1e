import math
import warnings

import numpy as np
import pytest
from scipy.linalg import expm

from chordwalk.core.config import settings
from chordwalk.core.errors import ConvergenceError, DomainError
from chordwalk.services.graph import build_cycle, build_graph, laplacian
from chordwalk.services.linalg import (
    Spectrum,
    _round_robin,
    check_time_step,
    eig_symmetric,
    evolve_hermitian,
    evolve_rk4,
    propagate,
    rk4_step_matrix,
    series_from_states,
)


def _random_symmetric(n, seed=3):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n))
    return (a + a.T) / 2.0


@pytest.mark.parametrize("n", [2, 5, 8, 13])
def test_round_robin_visits_each_pair_once(n):
    seen = []
    for p, q in _round_robin(n):
        assert len(set(p) | set(q)) == 2 * len(p)
        seen.extend(zip(p.tolist(), q.tolist()))
    assert sorted(seen) == [(i, j) for i in range(n) for j in range(i + 1, n)]


@pytest.mark.parametrize("n", [1, 4, 9, 20])
def test_jacobi_matches_reference(n):
    h = _random_symmetric(n)
    spec = eig_symmetric(h)
    assert np.allclose(spec.eigenvalues, np.linalg.eigvalsh(h), atol=1e-10)
    assert np.max(spec.residuals(h)) < 1e-9
    assert spec.orthogonality_error() < 1e-12


@pytest.mark.parametrize("n", range(5, 65))
def test_jacobi_cycle_spectrum(n):
    spec = eig_symmetric(laplacian(build_cycle(n)))
    expected = np.sort(2.0 - 2.0 * np.cos(2.0 * np.pi * np.arange(n) / n))
    assert np.allclose(spec.eigenvalues, expected, atol=1e-12)
    assert spec.eigenvalues[0] == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("n, m", [(6, 4), (11, 4), (12, 3), (12, 5), (20, 7), (100, 21)])
def test_jacobi_converges_on_chord_laplacians(n, m):
    h = laplacian(build_graph(n, m))
    spec = eig_symmetric(h)
    assert np.allclose(spec.eigenvalues, np.linalg.eigvalsh(h), atol=1e-10)
    assert np.max(spec.residuals(h)) < 1e-9
    assert spec.orthogonality_error() < 1e-12


def test_jacobi_subnormal_off_diagonal_is_quiet():
    h = np.array([
        [0.0, 1e-320, 1.0],
        [1e-320, 2.0, 0.5],
        [1.0, 0.5, 3.0],
    ])
    with warnings.catch_warnings():
        warnings.simplefilter("error", RuntimeWarning)
        spec = eig_symmetric(h)
    assert np.allclose(spec.eigenvalues, np.linalg.eigvalsh(h), atol=1e-12)


def test_jacobi_ascending_and_read_only():
    spec = eig_symmetric(laplacian(build_graph(15, 6)))
    assert np.all(np.diff(spec.eigenvalues) >= 0.0)
    with pytest.raises(ValueError):
        spec.eigenvalues[0] = 1.0
    with pytest.raises(ValueError):
        spec.eigenvectors[0, 0] = 1.0


def test_jacobi_rejects_bad_input():
    with pytest.raises(DomainError):
        eig_symmetric(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(DomainError):
        eig_symmetric(np.ones((2, 3)))


def test_jacobi_sweep_cap(monkeypatch):
    monkeypatch.setattr(settings, "JACOBI_MAX_SWEEPS", 0)
    with pytest.raises(ConvergenceError):
        eig_symmetric(_random_symmetric(6))


def test_spectrum_rejects_unknown_source():
    with pytest.raises(DomainError):
        Spectrum(eigenvalues=[0.0], eigenvectors=[[1.0]], source="guess")


def test_hermitian_evolution_matches_matrix_exponential():
    h = laplacian(build_graph(10, 4))
    spec = eig_symmetric(h)
    series = evolve_hermitian(spec, 3, [0.0, 0.7, 4.2])
    for row, t in zip(series.probabilities, series.times):
        psi = expm(-1j * h * t)[:, 2]
        assert np.allclose(row, np.abs(psi) ** 2, atol=1e-12)
    assert np.allclose(series.norms, 1.0, atol=1e-12)
    assert series.return_probability[0] == pytest.approx(1.0)


def test_hermitian_evolution_rejects_bad_start():
    spec = eig_symmetric(laplacian(build_graph(10, 4)))
    with pytest.raises(DomainError):
        evolve_hermitian(spec, 11, [0.0])


def test_rk4_step_matrix_is_taylor_polynomial():
    h = laplacian(build_graph(8, 3)).astype(complex)
    dt = 0.01
    a = -1j * h * dt
    taylor = np.eye(8) + a + a @ a / 2 + a @ a @ a / 6 + a @ a @ a @ a / 24
    assert np.allclose(rk4_step_matrix(h, dt), taylor, atol=1e-13)


def test_rk4_agrees_with_spectral_sum():
    h = laplacian(build_graph(12, 5))
    states = evolve_rk4(h, 1, t_max=5.0, dt=0.001, sample_every=0.5)
    exact = evolve_hermitian(eig_symmetric(h), 1, [s.time for s in states])
    series = series_from_states(1, states)
    assert len(states) == 11
    assert np.allclose(series.probabilities, exact.probabilities, atol=1e-8)
    assert np.allclose(series.norms, 1.0, atol=1e-9)


def test_rk4_matches_spectral_sum_from_node_eleven():
    h = laplacian(build_graph(100, 21))
    states = evolve_rk4(h, 11, t_max=10.0, dt=0.002, sample_every=2.5)
    exact = evolve_hermitian(eig_symmetric(h), 11, [s.time for s in states])
    series = series_from_states(11, states)
    assert series.times[-1] == pytest.approx(10.0)
    assert np.allclose(series.probabilities, exact.probabilities, atol=1e-7)


def test_rk4_norm_decays_with_absorption():
    h = laplacian(build_graph(10, 4)).astype(complex)
    h[0, 0] -= 1j
    norms = [s.norm for s in evolve_rk4(h, 1, t_max=3.0, sample_every=0.25)]
    assert norms[0] == pytest.approx(1.0)
    assert all(b <= a + 1e-12 for a, b in zip(norms, norms[1:]))
    assert norms[-1] < 0.9


def test_time_step_stability_guard():
    h = laplacian(build_graph(10, 4))
    assert check_time_step(h, 0.01) == 0.01
    with pytest.raises(DomainError):
        check_time_step(h, 0.05)
    with pytest.raises(DomainError):
        check_time_step(h, 0.0)


def test_propagate_sampling_and_block_start_states():
    h = laplacian(build_graph(9, 4)).astype(complex)
    psi0 = np.eye(9, dtype=complex)[:, :3]
    samples = list(propagate(h, psi0, t_max=2.0, sample_every=0.5, method="expm"))
    assert [t for t, _ in samples] == pytest.approx([0.0, 0.5, 1.0, 1.5, 2.0])
    assert samples[0][1].shape == (9, 3)
    assert np.allclose(samples[-1][1], expm(-2j * h)[:, :3], atol=1e-10)


def test_propagate_methods_agree():
    h = laplacian(build_graph(9, 4)).astype(complex)
    psi0 = np.zeros(9, dtype=complex)
    psi0[4] = 1.0
    rk4 = [psi for _, psi in propagate(h, psi0, t_max=3.0, dt=0.001, sample_every=1.0, method="rk4")]
    exact = [psi for _, psi in propagate(h, psi0, t_max=3.0, sample_every=1.0, method="expm")]
    for a, b in zip(rk4, exact):
        assert np.allclose(a, b, atol=1e-8)


def test_propagate_unknown_method():
    with pytest.raises(DomainError):
        next(propagate(np.eye(3), np.ones(3), 1.0, method="euler"))
