"""
Verify Service
──────────────
The invariant suite behind `chordwalk verify`: the two spectrum solvers
agree, the Chebyshev identities hold, χ is mirror symmetric and conserved,
the largest eigenstate reaches its large-N limit, and the trapping plateau
matches the dark-state count.

Checks never raise for a numerical miss; a library error inside a check is
caught and reported as a failure so the summary always completes.

Usage:
    from chordwalk.services.verify import run_checks
    results = run_checks(quick=True)
    all(r.passed for r in results)
"""

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from chordwalk.core.config import settings
from chordwalk.core.errors import ChordWalkError
from chordwalk.services.chebyshev import IDENTITY_TAGS, verify_identity
from chordwalk.services.dynamics import limiting_distribution, transition_probabilities
from chordwalk.services.graph import MIN_CHORD, build_graph
from chordwalk.services.spectral import (
    LOCALIZED_PEAK,
    graph_spectrum,
    largest_eigenstate,
    largest_eigenvalue_asymptotic,
    spectrum_difference,
)
from chordwalk.services.trapping import TrapConfig, plateau_prediction, survival_probability

logger = logging.getLogger(__name__)

IDENTITY_SEED = 20240611
IDENTITY_POINTS = 200
IDENTITY_MAX_ORDER = 40


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def _chords(n: int) -> list[int]:
    return sorted({m for m in (MIN_CHORD, n // 3, n // 2) if MIN_CHORD <= m <= n - 1})


# ── CHECKS ────────────────────────────────────────────────────────────────────

def check_solver_agreement(sizes: list[int]) -> CheckResult:
    worst, where = 0.0, ""
    for n in sizes:
        for m in _chords(n):
            g = build_graph(n, m)
            delta = spectrum_difference(graph_spectrum(g, "chebyshev"), graph_spectrum(g, "dense"))
            if delta >= worst:
                worst, where = delta, g.label()
    return CheckResult("solver agreement", worst < 1e-7, f"max |ΔE| = {worst:.2e} at {where}")


def check_identities(points: int = IDENTITY_POINTS) -> CheckResult:
    rng = np.random.default_rng(IDENTITY_SEED)
    worst, where = 0.0, ""
    for _ in range(points):
        x = float(rng.uniform(-2.0, 2.0))
        n, m = (int(k) for k in rng.integers(0, IDENTITY_MAX_ORDER + 1, size=2))
        for tag in IDENTITY_TAGS:
            residual = verify_identity(tag, x, n, m, relative=True)
            if residual >= worst:
                worst, where = residual, f"{tag} at x={x:.4f}, n={n}, m={m}"
    return CheckResult("chebyshev identities", worst < 1e-8, f"max relative residual {worst:.2e} ({where})")


def check_symmetry_and_conservation(n: int, m: int) -> CheckResult:
    g = build_graph(n, m)
    spec = graph_spectrum(g, "dense")
    times = np.linspace(0.0, 50.0, 101)
    sym, chi_sum, norm = 0.0, 0.0, 0.0
    for j in (1, 11, 31, 41):
        if j > n:
            continue
        chi = limiting_distribution(spec, j)
        sym = max(sym, chi.symmetry_error(g))
        chi_sum = max(chi_sum, abs(chi.total - 1.0))
        norm = max(norm, float(np.max(np.abs(transition_probabilities(spec, j, times).norms - 1.0))))
    passed = sym < 1e-8 and chi_sum < 1e-8 and norm < 1e-9
    return CheckResult(
        f"symmetry and conservation {g.label()}",
        passed,
        f"mirror {sym:.1e}, |Σχ-1| {chi_sum:.1e}, |Σπ-1| {norm:.1e}",
    )


def check_localization(n: int, m: int) -> CheckResult:
    state = largest_eigenstate(n, m)
    e_gap = abs(state.energy - largest_eigenvalue_asymptotic())
    peak_gap = max(abs(abs(state.component(1)) - LOCALIZED_PEAK), abs(abs(state.component(m)) - LOCALIZED_PEAK))
    return CheckResult(
        f"localized state G({n},{m})",
        e_gap < 1e-3 and peak_gap < 2e-3,
        f"E_max {state.energy:.6f} (off by {e_gap:.1e}), chord-end amplitude off by {peak_gap:.1e}",
    )


def check_plateau(n: int, m: int, t_max: float, sample_every: float) -> CheckResult:
    result = survival_probability(
        TrapConfig(graph=build_graph(n, m), gamma=1.0),
        t_max=t_max,
        sample_every=sample_every,
        method="expm",
    )
    expected = plateau_prediction(n, m)
    if expected > 0:
        error = abs(result.plateau - expected) / expected
        passed = error < 0.1
    else:
        error = result.plateau
        passed = error < 0.02
    return CheckResult(
        f"trap plateau G({n},{m})",
        passed,
        f"plateau {result.plateau:.5f} vs {expected:.5f} (off by {error:.1e})",
    )


# ── SUITE ─────────────────────────────────────────────────────────────────────

def _plan(quick: bool) -> list[tuple[str, Callable[[], CheckResult]]]:
    if quick:
        return [
            ("solver agreement", lambda: check_solver_agreement(settings.VERIFY_QUICK_SIZES)),
            ("chebyshev identities", lambda: check_identities(IDENTITY_POINTS // 4)),
            ("symmetry", lambda: check_symmetry_and_conservation(20, 7)),
            ("localization", lambda: check_localization(100, 50)),
            ("plateau", lambda: check_plateau(20, 6, t_max=2000.0, sample_every=5.0)),
        ]
    plan = [
        ("solver agreement", lambda: check_solver_agreement(settings.VERIFY_SIZES)),
        ("chebyshev identities", check_identities),
        ("symmetry", lambda: check_symmetry_and_conservation(100, 21)),
        ("localization", lambda: check_localization(200, 100)),
    ]
    for m in settings.TRAP_PLATEAU_M:
        plan.append((f"plateau m={m}", lambda m=m: check_plateau(100, m, t_max=20000.0, sample_every=10.0)))
    return plan


def run_checks(quick: bool = False) -> list[CheckResult]:
    results = []
    for name, check in _plan(quick):
        try:
            result = check()
        except ChordWalkError as exc:
            result = CheckResult(name, False, f"{type(exc).__name__}: {exc}")
        level = logging.INFO if result.passed else logging.WARNING
        logger.log(level, f"[Verify] {result.name}: {'ok' if result.passed else 'FAILED'}")
        results.append(result)
    return results
