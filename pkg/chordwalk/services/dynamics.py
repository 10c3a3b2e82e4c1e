"""
Dynamics Service
────────────────
Transition probabilities π_{k,j}(t) = |<k|exp(-iHt)|j>|², their long-time
averages χ_{k,j}, and the analytic pieces used to explain them: the
sine-ratio approximation built from the localized state and the degenerate
cycle pairs, and the localization lower bound (1/8)|z0|^{-2(d_j + d_k)}.

Usage:
    from chordwalk.services.dynamics import transition_probabilities, limiting_distribution
    series = transition_probabilities(spec, 11, np.linspace(0, 50, 501))
    chi = limiting_distribution(spec, 1)
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from chordwalk.core.config import settings
from chordwalk.core.errors import DomainError
from chordwalk.services.graph import GraphSpec, mirror_node, shortest_chord_distance
from chordwalk.services.linalg import EvolutionSeries, Spectrum, evolve_hermitian, hermitian_amplitudes
from chordwalk.services.spectral import AnalyticEigenstate, Z0

logger = logging.getLogger(__name__)

SINE_RATIO_GUARD = 1e-12
AVERAGE_CHUNK = 2048


# ── TRANSITION PROBABILITIES ──────────────────────────────────────────────────

def transition_probabilities(spec: Spectrum, j: int, times) -> EvolutionSeries:
    return evolve_hermitian(spec, j, times)


def return_probability_envelope(series: EvolutionSeries, window: tuple[float, float]) -> tuple[np.ndarray, np.ndarray]:
    """Local maxima of π_{j,j}(t) inside the window (plateaus count as maxima)."""
    t1, t2 = window
    times = np.asarray(series.times)
    values = np.asarray(series.return_probability)
    inside = np.nonzero((times >= t1) & (times <= t2))[0]
    if inside.size == 0:
        raise DomainError(f"window [{t1}, {t2}] contains no grid points")

    peaks = [
        i for i in inside
        if 0 < i < len(values) - 1 and values[i] >= values[i - 1] and values[i] >= values[i + 1]
    ]
    if len(peaks) < 2:
        peaks = list(inside)
    return times[peaks], values[peaks]


def decay_exponent(series: EvolutionSeries, window: tuple[float, float]) -> float:
    """Least-squares slope of log π_{j,j} against log t over the envelope maxima."""
    times, values = return_probability_envelope(series, window)
    keep = (times > 0) & (values > 0)
    if np.count_nonzero(keep) < 2:
        raise DomainError(f"need two positive envelope points in window {window}")
    slope, _ = np.polyfit(np.log(times[keep]), np.log(values[keep]), 1)
    return float(slope)


# ── LIMITING DISTRIBUTION ─────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class LimitingDistribution:
    start: int
    values: np.ndarray              # values[k - 1] = χ_{k,start}
    tolerance: float
    groups: int

    @property
    def total(self) -> float:
        return float(np.sum(self.values))

    def at(self, k: int) -> float:
        return float(self.values[k - 1])

    def symmetry_error(self, g: GraphSpec) -> float:
        """max_k |χ_k - χ_{mirror(k)}| under the reflection swapping 1 and m."""
        mirrored = np.array([self.values[mirror_node(g, k) - 1] for k in range(1, g.n + 1)])
        return float(np.max(np.abs(self.values - mirrored)))


def _degenerate_groups(eigenvalues: np.ndarray, tolerance: float) -> list[np.ndarray]:
    breaks = np.nonzero(np.diff(eigenvalues) > tolerance)[0] + 1
    return np.split(np.arange(len(eigenvalues)), breaks)


def _default_tolerance(spec: Spectrum) -> float:
    return settings.DEGENERACY_TOLERANCE * max(spec.spectral_range, 1.0)


def limiting_matrix(spec: Spectrum, degeneracy_tol: Optional[float] = None) -> np.ndarray:
    """χ as an N×N matrix: Σ over degenerate groups of (P_g ∘ P_g), P_g the group projector."""
    tol = _default_tolerance(spec) if degeneracy_tol is None else degeneracy_tol
    v = spec.eigenvectors
    chi = np.zeros((spec.size, spec.size))
    for group in _degenerate_groups(spec.eigenvalues, tol):
        block = v[:, group]
        projector = block @ block.T
        chi += projector * projector
    return chi


def limiting_distribution(spec: Spectrum, j: int, degeneracy_tol: Optional[float] = None) -> LimitingDistribution:
    if not 1 <= j <= spec.size:
        raise DomainError(f"start node {j} outside [1, {spec.size}]")
    tol = _default_tolerance(spec) if degeneracy_tol is None else degeneracy_tol
    if tol <= 0.0:
        raise DomainError(f"degeneracy tolerance must be positive, got {tol}")

    v = spec.eigenvectors
    groups = _degenerate_groups(spec.eigenvalues, tol)
    values = np.zeros(spec.size)
    for group in groups:
        overlap = v[:, group] @ v[j - 1, group]
        values += overlap * overlap
    logger.debug(f"[Dynamics] χ for start {j}: {len(groups)} eigenvalue groups (tol {tol:.2e})")
    return LimitingDistribution(start=j, values=values, tolerance=tol, groups=len(groups))


def time_averaged_probabilities(spec: Spectrum, j: int, t_max: float, step: float) -> np.ndarray:
    """Brute-force mean of π_{·,j}(t) on t = 0, step, ..., t_max."""
    if step <= 0.0 or t_max <= 0.0:
        raise DomainError("time average needs positive t_max and step")
    times = np.arange(0.0, t_max + 0.5 * step, step)
    total = np.zeros(spec.size)
    for lo in range(0, len(times), AVERAGE_CHUNK):
        chunk = times[lo:lo + AVERAGE_CHUNK]
        total += np.sum(np.abs(hermitian_amplitudes(spec, j, chunk)) ** 2, axis=0)
    return total / len(times)


# ── ANALYTIC APPROXIMATIONS ───────────────────────────────────────────────────

def _sine_ratio(n: int, parity: int, d: int) -> float:
    """sin(2πd(1 - λ/N)) / sin(2πd/N), with the removable singularity set to N - λ."""
    denominator = math.sin(2.0 * math.pi * d / n)
    if abs(denominator) < SINE_RATIO_GUARD:
        return float(n - parity)
    return math.sin(2.0 * math.pi * d * (1.0 - parity / n)) / denominator


def limiting_approximation(n: int, m: int, j: int, k: int, largest_state: AnalyticEigenstate) -> float:
    g = GraphSpec(n, m)
    g.check_node(j)
    g.check_node(k)
    parity = g.parity
    localized = largest_state.component(j) ** 2 * largest_state.component(k) ** 2
    band = _sine_ratio(n, parity, j - k) + _sine_ratio(n, parity, j + k - m - 1)
    return localized + 1.0 / n - 1.0 / n ** 2 + band / (2.0 * n ** 2)


def centre_limit(n: int) -> float:
    """χ between symmetry-axis nodes, diagonal or not: (2N - 1 - λ)/N²."""
    parity = 1 if n % 2 == 0 else 0
    return (2 * n - 1 - parity) / n ** 2


def localization_lower_bound(n: int, m: int, j: int, k: int) -> float:
    g = GraphSpec(n, m)
    d = shortest_chord_distance(g, j) + shortest_chord_distance(g, k)
    return 0.125 * abs(Z0) ** (-2 * d)
