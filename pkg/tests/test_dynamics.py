import numpy as np
import pytest

from chordwalk.core.errors import DomainError
from chordwalk.services.dynamics import (
    centre_limit,
    decay_exponent,
    limiting_approximation,
    limiting_distribution,
    limiting_matrix,
    localization_lower_bound,
    return_probability_envelope,
    time_averaged_probabilities,
    transition_probabilities,
)
from chordwalk.services.graph import build_cycle, build_graph, symmetry_axis_nodes
from chordwalk.services.linalg import Spectrum
from chordwalk.services.spectral import Z0, graph_spectrum, largest_eigenstate

G = build_graph(100, 21)


@pytest.fixture(scope="module")
def spec():
    return graph_spectrum(G, "dense")


@pytest.fixture(scope="module")
def cycle_spec():
    return graph_spectrum(build_cycle(100), "dense")


def test_probabilities_are_conserved(spec):
    times = np.linspace(0.0, 50.0, 201)
    for j in (1, 11, 31, 41, 61):
        series = transition_probabilities(spec, j, times)
        assert np.max(np.abs(series.norms - 1.0)) < 1e-9
        assert series.return_probability[0] == pytest.approx(1.0)


def test_centre_node_does_not_see_the_chord(spec, cycle_spec):
    times = np.linspace(0.0, 50.0, 501)
    chord = transition_probabilities(spec, 11, times).return_probability
    cycle = transition_probabilities(cycle_spec, 11, times).return_probability
    assert np.max(np.abs(chord - cycle)) < 1e-8


def test_return_probability_decays_like_inverse_time(spec):
    series = transition_probabilities(spec, 61, np.linspace(0.0, 20.0, 2001))
    assert -1.15 <= decay_exponent(series, (1.0, 20.0)) <= -0.85


def test_envelope_window_must_hold_points(spec):
    series = transition_probabilities(spec, 61, np.linspace(0.0, 5.0, 51))
    times, values = return_probability_envelope(series, (1.0, 5.0))
    assert np.all((times >= 1.0) & (times <= 5.0))
    assert len(times) == len(values)
    with pytest.raises(DomainError):
        return_probability_envelope(series, (10.0, 20.0))


@pytest.mark.parametrize("j", [1, 11, 31, 41])
def test_limiting_distribution_is_mirror_symmetric(spec, j):
    chi = limiting_distribution(spec, j)
    assert chi.symmetry_error(G) < 1e-8
    assert chi.total == pytest.approx(1.0, abs=1e-8)
    assert np.all(chi.values >= -1e-15)


def test_chord_ends_dominate(spec):
    chi = limiting_distribution(spec, 1)
    top_two = set(np.argsort(chi.values)[-2:] + 1)
    assert top_two == {1, 21}


def test_centre_limit(spec):
    assert centre_limit(100) == pytest.approx(0.0198)
    assert centre_limit(101) == pytest.approx(201 / 101 ** 2)
    chi = limiting_distribution(spec, 11)
    assert chi.at(11) == pytest.approx(centre_limit(100), abs=1e-8)
    assert chi.at(61) == pytest.approx(centre_limit(100), abs=1e-8)


def test_limiting_matrix_is_symmetric_and_stochastic(spec):
    chi = limiting_matrix(spec)
    assert np.allclose(chi, chi.T, atol=1e-12)
    assert np.allclose(chi.sum(axis=0), 1.0, atol=1e-8)
    assert chi[:, 30] == pytest.approx(limiting_distribution(spec, 31).values, abs=1e-12)


def test_time_average_converges_to_limit():
    small = graph_spectrum(build_graph(12, 5), "dense")
    averaged = time_averaged_probabilities(small, 2, t_max=20000.0, step=0.37)
    assert np.max(np.abs(averaged - limiting_distribution(small, 2).values)) < 5e-3
    with pytest.raises(DomainError):
        time_averaged_probabilities(small, 2, t_max=10.0, step=0.0)


@pytest.fixture(scope="module")
def wide_spec():
    return graph_spectrum(build_graph(200, 50), "dense")


def test_localization_near_chord_end(wide_spec):
    chi = limiting_distribution(wide_spec, 1)
    assert 0.115 <= chi.at(1) <= 0.135


@pytest.mark.parametrize("j, k", [(1, 1), (1, 2), (50, 50)])
def test_limit_stays_above_lower_bound(wide_spec, j, k):
    chi = limiting_matrix(wide_spec)
    assert chi[k - 1, j - 1] >= localization_lower_bound(200, 50, j, k) - 1e-3


@pytest.mark.parametrize("m, limit", [(3, 9 / 64), (5, None), (10, 0.125)])
def test_return_limit_settles_as_size_grows(m, limit):
    # the band adds O(1/N) on top of the end-state weight |v_1|^4
    excess = []
    for n in (50, 100, 200):
        spec = graph_spectrum(build_graph(n, m), "dense")
        chi = limiting_distribution(spec, 1).at(1)
        excess.append(chi - spec.eigenvectors[0, -1] ** 4)
        last = chi
    assert excess[0] > excess[1] > excess[2] > 0.0
    assert excess[2] < 0.01
    if limit is not None:
        assert last == pytest.approx(limit, abs=0.01)


def test_analytic_approximation(spec):
    state = largest_eigenstate(100, 21)
    chi = limiting_distribution(spec, 1)
    approx = np.array([limiting_approximation(100, 21, 1, k, state) for k in range(1, 101)])
    assert np.max(np.abs(approx - chi.values)) < 0.02


def test_analytic_approximation_on_axis():
    state = largest_eigenstate(100, 21)
    for j, k in [(11, 11), (11, 61), (61, 61)]:
        value = limiting_approximation(100, 21, j, k, state)
        assert value == pytest.approx(centre_limit(100), abs=1e-4)
    assert symmetry_axis_nodes(G) == [11, 61]


def test_localization_lower_bound():
    assert localization_lower_bound(100, 21, 1, 1) == pytest.approx(0.125)
    assert localization_lower_bound(100, 21, 2, 1) == pytest.approx(0.125 * abs(Z0) ** -2)
    assert localization_lower_bound(100, 21, 1, 21) == pytest.approx(0.125)


@pytest.mark.parametrize("which", ["chord", "cycle"])
def test_eigenvector_signs_do_not_matter(spec, cycle_spec, which):
    base = spec if which == "chord" else cycle_spec
    signs = np.where(np.random.default_rng(5).random(base.size) < 0.5, -1.0, 1.0)
    flipped = Spectrum(base.eigenvalues, base.eigenvectors * signs, source=base.source)
    times = np.linspace(0.0, 30.0, 61)
    for j in (1, 11, 61):
        a = transition_probabilities(base, j, times).probabilities
        b = transition_probabilities(flipped, j, times).probabilities
        assert np.allclose(a, b, atol=1e-12)
        assert np.all(np.isreal(a))
        assert np.all((a >= -1e-12) & (a <= 1.0 + 1e-12))
    assert np.allclose(limiting_matrix(base), limiting_matrix(flipped), atol=1e-12)


def test_bad_start_node(spec):
    with pytest.raises(DomainError):
        limiting_distribution(spec, 0)
