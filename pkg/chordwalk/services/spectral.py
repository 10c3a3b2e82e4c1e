"""
Spectral Service
────────────────
Exact Laplacian spectrum of G(N, m) from the Chebyshev determinant equation

    F(x) = 1 + U_{N-m}(x) + U_{m-2}(x) - U_{N-1}(x) - T_N(x) = 0,   E = 2 - 2x

and its factorised form (T_N(x) - 1)·Θ(N, m, x) = F(x)·G(x). Cycle roots
(T_N = 1) are written down analytically. The remaining roots on (-1, 1) are
those of F / (1 - T_N), a sum of simple poles at the cycle roots the chord
couples to; it is monotone between poles, so each gap is one bracket. The
isolated root below x = -1 that carries the largest eigenvalue is bracketed
on x = -cosh s.

Also here: eigenvectors rebuilt from a root, the localized state of the
largest eigenvalue, and first-order degenerate perturbation theory around the
bare cycle.

Usage:
    from chordwalk.services.spectral import solve_spectrum_chebyshev, largest_eigenstate
    spec = solve_spectrum_chebyshev(100, 21)
    state = largest_eigenstate(100, 50)
"""

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from chordwalk.core.config import settings
from chordwalk.core.errors import DegenerateBasisError, DomainError, RootCountError
from chordwalk.services.chebyshev import ChebTable, cheb_t, cheb_table, cheb_u_closed, z_of
from chordwalk.services.graph import GraphSpec, build_graph, laplacian, shortest_chord_distance
from chordwalk.services.linalg import Spectrum, eig_symmetric

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)
Z0 = -1.0 - SQRT2                     # z at the asymptotic largest root x0 = -√2
LOCALIZED_PEAK = 2.0 ** -0.75         # |x'_1| = |x'_m| in the same limit

CYCLE_ROOT = "cycle-root"
THETA_ROOT = "theta-root"


# ── DETERMINANT EQUATION ──────────────────────────────────────────────────────

@dataclass(frozen=True)
class DeterminantEq:
    n: int
    m: int

    def table(self, x) -> ChebTable:
        return cheb_table(self.n + 1, x)

    def value(self, x):
        t = self.table(x)
        n, m = self.n, self.m
        return 1.0 + t.u(n - m) + t.u(m - 2) - t.u(n - 1) - t.t(n)

    def scale(self, x) -> float:
        """Magnitude of the largest term in F; residuals are judged against it."""
        t = self.table(x)
        n, m = self.n, self.m
        return float(max(1.0, abs(t.t(n)), abs(t.u(n - 1)), abs(t.u(n - m)), abs(t.u(m - 2))))

    def cycle_factor(self, x):
        return self.table(x).t(self.n) - 1.0

    def theta(self, x):
        """Θ(N, m, x) = 2U²_{m-2} - 2[T_N + U_{N-1} - 1]U_{m-2} - [T_N + 2U_{N-1} - 1]."""
        t = self.table(x)
        tn, un1, um2 = t.t(self.n), t.u(self.n - 1), t.u(self.m - 2)
        return 2.0 * um2 * um2 - 2.0 * (tn + un1 - 1.0) * um2 - (tn + 2.0 * un1 - 1.0)

    def split(self, x):
        """(L, R) with F = L - R and (T_N - 1)Θ = L² - R²."""
        t = self.table(x)
        tn, un1, um2 = t.t(self.n), t.u(self.n - 1), t.u(self.m - 2)
        left = un1 * t.t(self.m - 1)
        right = um2 * (tn - 1.0) + tn + un1 - 1.0
        return left, right

    def companion(self, x):
        """G = L + R, whose zeros are the spurious roots of Θ."""
        left, right = self.split(x)
        return left + right

    @cached_property
    def poles(self) -> tuple[np.ndarray, np.ndarray]:
        """
        Angles θ_k of the cycle roots the chord couples to, ascending, with
        their weights (2/N)[1 - T_{m-1}(cos θ_k)]. Uncoupled roots, those with
        k(m-1) ≡ 0 mod N, keep their full multiplicity and carry no pole.
        """
        n, m = self.n, self.m
        k = np.arange(1, (n - 1) // 2 + 1)
        coupled = (k * (m - 1)) % n != 0
        angles = 2.0 * np.pi * k[coupled] / n
        weights = (2.0 / n) * (1.0 - cheb_t(m - 1, np.cos(angles)))
        if n % 2 == 0 and m % 2 == 0:
            # non-degenerate alternating state: (1/N)[1 - T_{m-1}(-1)]² = 2/N
            angles = np.append(angles, np.pi)
            weights = np.append(weights, 2.0 / n)
        return angles, weights

    def secular(self, theta):
        """
        F(x) / (1 - T_N(x)) at x = cos θ, written as 1 + Σ_k w_k / (x - cos θ_k).
        Strictly monotone between neighbouring poles, so each gap holds one root.
        """
        angles, weights = self.poles
        th = np.asarray(theta, dtype=float)[..., None]
        gaps = -2.0 * np.sin((th + angles) / 2.0) * np.sin((th - angles) / 2.0)
        return 1.0 + np.sum(weights / gaps, axis=-1)

    def raw_coefficients(self, x) -> tuple[float, float, float, float]:
        """c1..c4 of the two linear conditions on (x_{m-1}, x_m), before simplification."""
        t = self.table(x)
        n, m = self.n, self.m
        a = (2 * x + 1) * t.u(m - 2) - t.u(m - 3)
        b = t.u(m - 4) - (2 * x + 1) * t.u(m - 3) - 1.0
        c1 = t.u(n - m) * a - t.u(n - m - 1) * t.u(m - 2)
        c2 = t.u(n - m) * b + t.u(n - m - 1) * t.u(m - 3) - 1.0
        c3 = t.u(n - m - 1) * a - t.u(n - m - 2) * t.u(m - 2) + t.u(m - 2) + 1.0
        c4 = t.u(n - m - 1) * b + t.u(n - m - 2) * t.u(m - 3) - t.u(m - 3) - (2 * x + 1)
        return c1, c2, c3, c4

    def coefficients(self, x) -> tuple[float, float, float]:
        """Simplified (c1, c2, c2') used for eigenvector reconstruction."""
        t = self.table(x)
        n, m = self.n, self.m
        c1 = t.u(n - 1) + t.u(n - m) * t.u(m - 2)
        c2 = -t.u(n - 2) - t.u(n - m) * t.u(m - 3) - t.u(n - m) - 1.0
        c2p = t.u(n - m - 1) + t.u(n - m) * t.u(m - 1) + t.u(m - 1) + t.u(m - 2) - t.u(n - 1)
        return c1, c2, c2p

    def chord_ratio(self, x) -> float:
        """x_1 / x_m for an eigenvector at root x: +1 on cycle roots, -1 on Θ roots."""
        t = self.table(x)
        n, m = self.n, self.m
        c1 = t.u(n - 1) + t.u(n - m) * t.u(m - 2)
        return (t.u(n - m) + t.u(n - m) * t.u(m - 2) + t.u(m - 2)) / c1


def determinant_value(n: int, m: int, x: float) -> float:
    build_graph(n, m)
    return float(DeterminantEq(n, m).value(x))


def determinant_consistency(n: int, m: int, x: float) -> float:
    """|c1c4 - c2c3 - 2F| relative to the size of the products."""
    eq = DeterminantEq(n, m)
    c1, c2, c3, c4 = eq.raw_coefficients(x)
    scale = max(1.0, abs(c1 * c4), abs(c2 * c3))
    return abs(c1 * c4 - c2 * c3 - 2.0 * eq.value(x)) / scale


def factorization_residual(n: int, m: int, x: float) -> float:
    """min(|T_N - 1|, |Θ|) / max(1, |T_N|): zero at every eigenvalue root."""
    eq = DeterminantEq(n, m)
    tn = float(eq.table(x).t(n))
    return min(abs(tn - 1.0), abs(float(eq.theta(x)))) / max(1.0, abs(tn))


# ── ROOT FINDING ──────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Root:
    x: float
    branch: str
    multiplicity: int = 1


def _cycle_roots(n: int, m: int) -> list[Root]:
    roots = [Root(x=1.0, branch=CYCLE_ROOT)]
    for k in range(1, (n - 1) // 2 + 1):
        double = (k * (m - 1)) % n == 0
        roots.append(Root(x=math.cos(2 * math.pi * k / n), branch=CYCLE_ROOT, multiplicity=2 if double else 1))
    # alternating cycle state survives the chord only when nodes 1 and m share parity
    if n % 2 == 0 and m % 2 == 1:
        roots.append(Root(x=-1.0, branch=CYCLE_ROOT))
    return roots


def _bracket_roots(func, grid: np.ndarray, values: np.ndarray) -> list[float]:
    found = [float(g) for g, v in zip(grid, values) if v == 0.0]
    signs = np.sign(values)
    for i in np.nonzero(signs[:-1] * signs[1:] < 0)[0]:
        found.append(brentq(func, grid[i], grid[i + 1], xtol=settings.ROOT_XTOL, rtol=4 * np.finfo(float).eps))
    return found


def _theta_roots(eq: DeterminantEq) -> list[Root]:
    """One root of F strictly inside each gap between neighbouring poles on (-1, 1)."""
    angles, _ = eq.poles
    secular = lambda th: float(eq.secular(th))

    roots: list[Root] = []
    for lo, hi in zip(angles[:-1], angles[1:]):
        pad = settings.ROOT_POLE_OFFSET * (hi - lo)
        a, b = lo + pad, hi - pad
        if secular(a) * secular(b) > 0.0:
            logger.warning(f"[Spectral] G({eq.n},{eq.m}): no sign change between θ={lo:.12f} and θ={hi:.12f}")
            continue
        th = brentq(secular, a, b, xtol=settings.ROOT_XTOL, rtol=4 * np.finfo(float).eps)
        roots.append(Root(x=math.cos(th), branch=THETA_ROOT))
    return roots


def _outer_roots(eq: DeterminantEq) -> list[Root]:
    """Roots with x < -1, on x = -cosh s, s ∈ (0, acosh 2]."""
    n = eq.n
    count = settings.ROOT_GRID_FACTOR * n
    s_max = math.acosh(2.0)
    grid = s_max * (np.arange(count) + 1.0) / count

    def scaled(s):
        x = -np.cosh(s)
        table = cheb_table(n + 1, x, method="closed")
        f = 1.0 + table.u(n - eq.m) + table.u(eq.m - 2) - table.u(n - 1) - table.t(n)
        return f / np.abs(table.t(n))

    values = scaled(grid)
    return [
        Root(x=-math.cosh(s), branch=THETA_ROOT)
        for s in _bracket_roots(lambda s: float(scaled(s)), grid, values)
    ]


def find_roots(n: int, m: int) -> list[Root]:
    """All roots of F in x, descending (so ascending in E), with multiplicities."""
    build_graph(n, m)
    eq = DeterminantEq(n, m)
    cycle = _cycle_roots(n, m)
    theta = _theta_roots(eq)
    outer = _outer_roots(eq)
    roots = sorted(cycle + theta + outer, key=lambda r: -r.x)

    for a, b in zip(roots, roots[1:]):
        if a.x - b.x < settings.ROOT_PAIRING_TOLERANCE:
            logger.warning(f"[Spectral] G({n},{m}): roots {a.x:.15f} ({a.branch}) and {b.x:.15f} ({b.branch}) nearly coincide")

    found = sum(r.multiplicity for r in roots)
    if found != n:
        raise RootCountError(
            expected=n,
            found=found,
            detail=f"{len(cycle)} cycle, {len(theta)} theta, {len(outer)} outer for G({n},{m})",
        )
    logger.debug(f"[Spectral] G({n},{m}): {len(cycle)} cycle, {len(theta)} theta, {len(outer)} outer roots")
    return roots


def largest_root(n: int, m: int) -> float:
    build_graph(n, m)
    outer = _outer_roots(DeterminantEq(n, m))
    if not outer:
        raise DomainError(f"no root below x=-1 for G({n},{m})")
    return min(r.x for r in outer)


def largest_eigenvalue(n: int, m: int) -> float:
    return 2.0 - 2.0 * largest_root(n, m)


def largest_eigenvalue_asymptotic() -> float:
    return 2.0 + 2.0 * SQRT2


# ── EIGENSTATES ───────────────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class AnalyticEigenstate:
    n: int
    m: int
    x: float
    components: np.ndarray
    branch: str

    @property
    def energy(self) -> float:
        return 2.0 - 2.0 * self.x

    def component(self, j: int) -> float:
        return float(self.components[j - 1])

    def residual(self) -> float:
        h = laplacian(GraphSpec(self.n, self.m))
        return float(np.linalg.norm(h @ self.components - self.energy * self.components))


def _fill_bounded(n: int, m: int, x: float, c1: float, c2: float, c2p: float) -> np.ndarray:
    """Components for |x| <= 1 from x_m = 1 and the two linear recurrences."""
    t = cheb_table(n + 1, x, method="recurrence")
    v = np.zeros(n)
    v[m - 1] = 1.0
    v[m - 2] = -c2 / c1
    v[n - 1] = c2p / c1
    xm1, xm, xn = v[m - 2], v[m - 1], v[n - 1]
    for j in range(2, m):
        v[j - 2] = t.u(m - j) * xm1 - t.u(m - 1 - j) * xm
    x1 = v[0]
    for j in range(m + 2, n + 1):
        v[j - 2] = t.u(n + 1 - j) * xn - t.u(n - j) * x1
    return v


def _fill_outer(n: int, m: int, x: float, ratio: float) -> np.ndarray:
    """
    Components for x < -1 from x_1 = ratio, x_m = 1. Each arc obeys the free
    recurrence between its two chord ends, so x(p) on an arc of length L is
    [x_a U_{L-p-1} + x_b U_{p-1}] / U_{L-1}.
    """
    v = np.zeros(n)
    v[0], v[m - 1] = ratio, 1.0

    def arc(x_a: float, x_b: float, length: int) -> np.ndarray:
        p = np.arange(1, length)
        u = cheb_u_closed(np.arange(-1, length), x)       # u[k + 1] = U_k
        return (x_a * u[length - p] + x_b * u[p]) / u[length]

    if m > 2:
        v[1:m - 1] = arc(ratio, 1.0, m - 1)
    long = n - m + 1
    if long > 1:
        v[m:n] = arc(1.0, ratio, long)
    return v


def eigenstate_from_root(n: int, m: int, x: float) -> AnalyticEigenstate:
    build_graph(n, m)
    eq = DeterminantEq(n, m)
    scale = eq.scale(x)
    residual = abs(float(eq.value(x)))
    if residual > settings.ROOT_RESIDUAL_TOLERANCE * scale:
        raise DomainError(f"x={x} is not a root of F for G({n},{m}) (|F|={residual:.3e}, scale {scale:.3e})")

    c1, c2, c2p = eq.coefficients(x)
    if abs(c1) < 1e-10 * scale:
        raise DegenerateBasisError(f"c1={c1:.3e} vanishes at x={x} for G({n},{m})")

    if x < -1.0:
        v = _fill_outer(n, m, x, float(eq.chord_ratio(x)))
    else:
        v = _fill_bounded(n, m, x, c1, c2, c2p)
    v = v / np.linalg.norm(v)

    tn = float(eq.table(x).t(n))
    branch = CYCLE_ROOT if abs(tn - 1.0) < 1e-8 * max(1.0, abs(tn)) else THETA_ROOT
    return AnalyticEigenstate(n=n, m=m, x=x, components=v, branch=branch)


def largest_eigenstate(n: int, m: int) -> AnalyticEigenstate:
    return eigenstate_from_root(n, m, largest_root(n, m))


def cycle_root_states(n: int, m: Optional[int], root: Root) -> list[np.ndarray]:
    """
    Real standing waves of the bare cycle that stay eigenvectors with the
    chord: symmetric about the axis through (m+1)/2, plus the antisymmetric
    partner when it has a node at both chord ends.
    """
    j = np.arange(1, n + 1)
    if root.x == 1.0:
        return [np.full(n, 1.0 / math.sqrt(n))]
    if root.x == -1.0:
        return [(-1.0) ** j / math.sqrt(n)]
    theta = math.acos(root.x)
    centre = (m + 1) / 2.0 if m is not None else 0.0
    phase = (j - centre) * theta
    states = [np.cos(phase) * math.sqrt(2.0 / n)]
    if root.multiplicity == 2:
        states.append(np.sin(phase) * math.sqrt(2.0 / n))
    return states


def localized_profile(g: GraphSpec) -> np.ndarray:
    """Predicted |x'_j| = 2^{-3/4} |z0|^{-d_j} of the largest-eigenvalue state."""
    d = np.array([shortest_chord_distance(g, j) for j in range(1, g.n + 1)])
    return LOCALIZED_PEAK * np.abs(Z0) ** (-d.astype(float))


def decay_prediction(g: GraphSpec, j: int, peak: float) -> float:
    """|z0|^{-d_j} times the chord-end amplitude |x'_m|."""
    return abs(Z0) ** (-shortest_chord_distance(g, j)) * peak


# ── FULL SPECTRUM ─────────────────────────────────────────────────────────────

def solve_spectrum_chebyshev(n: int, m: int) -> Spectrum:
    roots = find_roots(n, m)
    h = laplacian(GraphSpec(n, m))
    h_norm = float(np.linalg.norm(h))
    tolerance = 1e-8 * h_norm

    energies: list[float] = []
    vectors: list[np.ndarray] = []
    fallbacks: list[tuple[int, str]] = []
    dense: Optional[Spectrum] = None

    for root in roots:
        energy = 2.0 - 2.0 * root.x
        if root.branch == CYCLE_ROOT:
            for state in cycle_root_states(n, m, root):
                energies.append(energy)
                vectors.append(state)
            continue

        reason = None
        try:
            state = eigenstate_from_root(n, m, root.x).components
            residual = float(np.linalg.norm(h @ state - energy * state))
            if residual > tolerance:
                reason = f"residual {residual:.2e}"
        except DegenerateBasisError as exc:
            reason = str(exc)

        if reason is not None:
            if dense is None:
                dense = eig_symmetric(h)
            nearest = int(np.argmin(np.abs(dense.eigenvalues - energy)))
            state = np.array(dense.eigenvectors[:, nearest])
            fallbacks.append((len(energies), reason))
            logger.warning(f"[Spectral] G({n},{m}) E={energy:.10f}: dense eigenvector substituted ({reason})")

        energies.append(energy)
        vectors.append(state)

    order = np.argsort(np.array(energies), kind="stable")
    index_map = {int(old): new for new, old in enumerate(order)}
    logger.info(f"[Spectral] G({n},{m}) solved from the determinant equation: {len(energies)} eigenvalues")
    return Spectrum(
        eigenvalues=np.array(energies)[order],
        eigenvectors=np.column_stack(vectors)[:, order],
        source="determinant-equation",
        fallbacks=tuple((index_map[i], reason) for i, reason in fallbacks),
    )


@lru_cache(maxsize=64)
def graph_spectrum(g: GraphSpec, solver: str = "dense") -> Spectrum:
    if solver == "dense":
        return eig_symmetric(laplacian(g))
    if solver == "chebyshev":
        if g.m is None:
            raise DomainError("the determinant-equation solver needs a chord")
        return solve_spectrum_chebyshev(g.n, g.m)
    raise DomainError(f"unknown solver '{solver}'")


def spectrum_difference(a: Spectrum, b: Spectrum) -> float:
    if a.size != b.size:
        raise DomainError(f"spectra differ in size: {a.size} vs {b.size}")
    return float(np.max(np.abs(a.eigenvalues - b.eigenvalues)))


# ── PERTURBATION THEORY ───────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class PerturbativeSpectrum:
    n: int
    m: int
    pair_indices: np.ndarray            # n = 1 .. floor(N/2) - λ
    zeroth: np.ndarray                  # E_n^(0) = 2 - 2cos θ_n per pair
    corrections: np.ndarray             # shape (pairs, 2): (E_n^(1), E_{-n}^(1))
    extra: dict = field(default_factory=dict)   # non-degenerate E^(0) -> E^(1)

    @property
    def parity(self) -> int:
        return 1 if self.n % 2 == 0 else 0

    @property
    def thetas(self) -> np.ndarray:
        return 2.0 * np.pi * self.pair_indices / self.n

    @property
    def eigenvalues(self) -> np.ndarray:
        values = [e0 + e1 for e0, e1 in self.extra.items()]
        values += list((self.zeroth[:, None] + self.corrections).ravel())
        return np.sort(np.array(values))

    def pair_states(self, index: int) -> tuple[np.ndarray, np.ndarray]:
        """
        (Ψ+, Ψ-) for pair n = index:
        (e^{ijθ} ± e^{-i(j-m-1)θ}) / sqrt(2N). Ψ+ has x_1 = x_m, Ψ- has x_1 = -x_m.
        """
        theta = 2.0 * np.pi * index / self.n
        j = np.arange(1, self.n + 1)
        forward = np.exp(1j * j * theta)
        backward = np.exp(-1j * (j - self.m - 1) * theta)
        norm = math.sqrt(2.0 * self.n)
        return (forward + backward) / norm, (forward - backward) / norm


def perturbative_spectrum(n: int, m: int) -> PerturbativeSpectrum:
    build_graph(n, m)
    parity = 1 if n % 2 == 0 else 0
    pairs = np.arange(1, n // 2 - parity + 1)
    thetas = 2.0 * np.pi * pairs / n
    zeroth = 2.0 - 2.0 * np.cos(thetas)
    lifted = (4.0 / n) * (1.0 - np.cos((m - 1) * thetas))
    corrections = np.column_stack([np.zeros_like(lifted), lifted])

    extra = {0.0: 0.0}
    if parity:
        extra[4.0] = (2.0 / n) * (1.0 + (-1) ** m)
    return PerturbativeSpectrum(n=n, m=m, pair_indices=pairs, zeroth=zeroth, corrections=corrections, extra=extra)


def perturbation_matrix(n: int, m: int, k: int) -> np.ndarray:
    """
    Chord term (|1> - |m>)(<1| - <m|) in the running-wave pair basis
    {e^{±ijθ_k}/sqrt(N)}. Eigenvalues are 0 and (4/N)[1 - cos(m-1)θ_k].
    """
    theta = 2.0 * np.pi * k / n
    j = np.arange(1, n + 1)
    basis = np.column_stack([np.exp(1j * j * theta), np.exp(-1j * j * theta)]) / math.sqrt(n)
    chord = np.zeros(n)
    chord[0], chord[m - 1] = 1.0, -1.0
    overlap = chord @ basis
    return np.outer(overlap.conj(), overlap)


def lifted_root_shift(n: int, m: int, k: int) -> float:
    """Δ with the lifted root at x ≈ x0 - Δ: (1/N)[1 - T_{m-1}(cos 2πk/N)]."""
    x0 = math.cos(2.0 * math.pi * k / n)
    return (1.0 - cheb_t(m - 1, x0)) / n


def perturbative_error(pert: PerturbativeSpectrum, exact: Spectrum, exclude_largest: bool = True) -> float:
    """Largest index-wise gap between sorted spectra, optionally ignoring the top eigenvalue."""
    approx = pert.eigenvalues
    truth = np.asarray(exact.eigenvalues)
    if exclude_largest:
        approx, truth = approx[:-1], truth[:-1]
    return float(np.max(np.abs(approx - truth)))
