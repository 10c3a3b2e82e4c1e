"""
Linear Algebra Service
──────────────────────
Dense numerics the rest of the package is checked against:

  - eig_symmetric      cyclic Jacobi eigensolver for real symmetric matrices
  - evolve_hermitian   exact spectral-sum propagation of a basis state
  - evolve_rk4         fourth-order Runge-Kutta for i dψ/dt = H_eff ψ
  - propagate          block propagation of many start states (RK4 or expm)

Usage:
    from chordwalk.services.linalg import eig_symmetric, evolve_hermitian
    spec = eig_symmetric(laplacian(g))
    series = evolve_hermitian(spec, start=11, times=np.linspace(0, 50, 501))
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np
from scipy.linalg import expm

from chordwalk.core.config import settings
from chordwalk.core.errors import ConvergenceError, DomainError

logger = logging.getLogger(__name__)

SOURCES = ("dense-solver", "determinant-equation", "perturbative")
PROPAGATORS = ("rk4", "expm")
EPS = np.finfo(float).eps


def _frozen(a) -> np.ndarray:
    arr = np.array(a, copy=True)
    arr.setflags(write=False)
    return arr


# ── RESULT TYPES ──────────────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray            # column k belongs to eigenvalues[k]
    source: str = "dense-solver"
    fallbacks: tuple = ()               # (index, reason) for substituted eigenvectors

    def __post_init__(self):
        if self.source not in SOURCES:
            raise DomainError(f"unknown spectrum source '{self.source}'")
        object.__setattr__(self, "eigenvalues", _frozen(np.asarray(self.eigenvalues, dtype=float)))
        object.__setattr__(self, "eigenvectors", _frozen(np.asarray(self.eigenvectors, dtype=float)))

    @property
    def size(self) -> int:
        return len(self.eigenvalues)

    @property
    def max_eigenvalue(self) -> float:
        return float(self.eigenvalues[-1])

    @property
    def spectral_range(self) -> float:
        return float(self.eigenvalues[-1] - self.eigenvalues[0])

    def residuals(self, h: np.ndarray) -> np.ndarray:
        """||H v_k - E_k v_k|| per eigenpair."""
        diff = h @ self.eigenvectors - self.eigenvectors * self.eigenvalues
        return np.linalg.norm(diff, axis=0)

    def orthogonality_error(self) -> float:
        v = self.eigenvectors
        return float(np.max(np.abs(v.T @ v - np.eye(self.size))))


@dataclass(frozen=True, eq=False)
class ComplexState:
    time: float
    amplitudes: np.ndarray

    @property
    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True, eq=False)
class EvolutionSeries:
    start: int
    times: np.ndarray
    probabilities: np.ndarray           # shape (len(times), N); row t holds π_{·,start}(t)
    meta: dict = field(default_factory=dict)

    @property
    def norms(self) -> np.ndarray:
        return self.probabilities.sum(axis=1)

    @property
    def return_probability(self) -> np.ndarray:
        return self.probabilities[:, self.start - 1]

    def node(self, k: int) -> np.ndarray:
        return self.probabilities[:, k - 1]


# ── JACOBI EIGENSOLVER ────────────────────────────────────────────────────────

def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """
    Circle-method tournament: each round is a set of disjoint (p, q) pairs and
    the n-1 rounds together visit every off-diagonal pair exactly once.
    """
    players = list(range(n + (n % 2)))
    size = len(players)
    rounds = []
    for _ in range(size - 1):
        pairs = [(players[i], players[size - 1 - i]) for i in range(size // 2)]
        pairs = [(min(a, b), max(a, b)) for a, b in pairs if a < n and b < n]
        if pairs:
            p, q = zip(*pairs)
            rounds.append((np.array(p), np.array(q)))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def _off_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def eig_symmetric(h: np.ndarray, source: str = "dense-solver") -> Spectrum:
    h = np.asarray(h, dtype=float)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {h.shape}")
    scale = float(np.linalg.norm(h))
    if np.max(np.abs(h - h.T), initial=0.0) > 1e-12 * max(scale, 1.0):
        raise DomainError("matrix is not symmetric")

    n = h.shape[0]
    a = h.copy()
    v = np.eye(n)
    target = settings.JACOBI_TOLERANCE * scale
    rounds = _round_robin(n)

    sweep = 0
    off = _off_norm(a)
    while off > target:
        if sweep >= settings.JACOBI_MAX_SWEEPS:
            raise ConvergenceError(
                f"Jacobi did not converge in {sweep} sweeps (off-diagonal {off:.3e}, target {target:.3e})"
            )
        for p, q in rounds:
            app, aqq, apq = a[p, p], a[q, q], a[p, q]
            # entries below eps·sqrt(|app·aqq|) are zeroed without a rotation
            active = (apq != 0.0) & (np.abs(apq) > EPS * np.sqrt(np.abs(app * aqq)))
            safe = np.where(active, apq, 1.0)
            with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
                theta = np.where(active, (aqq - app) / (2.0 * safe), 0.0)
                sgn = np.where(theta >= 0.0, 1.0, -1.0)
                t = np.where(active, sgn / (np.abs(theta) + np.hypot(theta, 1.0)), 0.0)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c

            col_p, col_q = a[:, p].copy(), a[:, q].copy()
            a[:, p] = c * col_p - s * col_q
            a[:, q] = s * col_p + c * col_q
            row_p, row_q = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * row_p - s[:, None] * row_q
            a[q, :] = s[:, None] * row_p + c[:, None] * row_q
            a[p, q] = 0.0
            a[q, p] = 0.0

            vec_p, vec_q = v[:, p].copy(), v[:, q].copy()
            v[:, p] = c * vec_p - s * vec_q
            v[:, q] = s * vec_p + c * vec_q
        sweep += 1
        off = _off_norm(a)
        logger.debug(f"[Jacobi] sweep {sweep}: off-diagonal norm {off:.3e}")

    order = np.argsort(np.diag(a), kind="stable")
    logger.debug(f"[Jacobi] n={n} converged after {sweep} sweeps")
    return Spectrum(eigenvalues=np.diag(a)[order], eigenvectors=v[:, order], source=source)


# ── HERMITIAN EVOLUTION ───────────────────────────────────────────────────────

def hermitian_amplitudes(spec: Spectrum, start: int, times) -> np.ndarray:
    """α_{k,j}(t) = Σ_n exp(-i t E_n) <k|n><n|j>, shape (len(times), N)."""
    if not 1 <= start <= spec.size:
        raise DomainError(f"start node {start} outside [1, {spec.size}]")
    times = np.atleast_1d(np.asarray(times, dtype=float))
    v = spec.eigenvectors
    phases = np.exp(-1j * np.outer(times, spec.eigenvalues))
    return (phases * v[start - 1, :]) @ v.T


def evolve_hermitian(spec: Spectrum, start: int, times) -> EvolutionSeries:
    times = np.atleast_1d(np.asarray(times, dtype=float))
    amplitudes = hermitian_amplitudes(spec, start, times)
    return EvolutionSeries(
        start=start,
        times=_frozen(times),
        probabilities=_frozen(np.abs(amplitudes) ** 2),
        meta={"method": "spectral-sum", "source": spec.source},
    )


# ── TIME STEPPING ─────────────────────────────────────────────────────────────

def spectral_radius_bound(h: np.ndarray) -> float:
    """Max absolute row sum; bounds every eigenvalue modulus."""
    return float(np.max(np.sum(np.abs(h), axis=1)))


def default_time_step(h: np.ndarray) -> float:
    rho = spectral_radius_bound(h)
    if rho == 0.0:
        return settings.RK4_MAX_DT
    return min(settings.RK4_MAX_DT, settings.RK4_DEFAULT_COURANT / rho)


def check_time_step(h: np.ndarray, dt: float) -> float:
    if dt <= 0.0:
        raise DomainError(f"time step must be positive, got {dt}")
    rho = spectral_radius_bound(h)
    if rho > 0.0 and dt > settings.RK4_STABILITY_LIMIT / rho:
        raise DomainError(
            f"dt={dt} exceeds stability bound {settings.RK4_STABILITY_LIMIT / rho:.4g} "
            f"(row-sum bound {rho:.4g})"
        )
    return dt


def rk4_step_matrix(h_eff: np.ndarray, dt: float) -> np.ndarray:
    """One classic RK4 step for dψ/dt = -i H ψ, applied to the identity."""
    n = h_eff.shape[0]
    f = -1j * np.asarray(h_eff, dtype=complex)
    eye = np.eye(n, dtype=complex)
    k1 = f @ eye
    k2 = f @ (eye + 0.5 * dt * k1)
    k3 = f @ (eye + 0.5 * dt * k2)
    k4 = f @ (eye + dt * k3)
    return eye + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def _sample_grid(t_max: float, dt: float, sample_every: Optional[float]) -> tuple[int, int, float]:
    """Return (samples, steps per sample, effective dt)."""
    if t_max < 0.0:
        raise DomainError(f"t_max must be non-negative, got {t_max}")
    interval = dt if sample_every is None else sample_every
    if interval <= 0.0:
        raise DomainError(f"sample interval must be positive, got {interval}")
    steps = max(1, math.ceil(interval / dt - 1e-9))
    samples = int(math.floor(t_max / interval + 1e-9))
    return samples, steps, interval / steps


def propagate(
    h_eff: np.ndarray,
    psi0: np.ndarray,
    t_max: float,
    dt: Optional[float] = None,
    sample_every: Optional[float] = None,
    method: str = "rk4",
) -> Iterator[tuple[float, np.ndarray]]:
    """
    Yield (t, ψ(t)) at t = 0, Δ, 2Δ, ... ≤ t_max, where Δ is sample_every
    (or dt). psi0 may be a vector or an (N, K) block of start states.

    "rk4" takes ceil(Δ/dt) Runge-Kutta steps per sample; "expm" applies
    exp(-i H Δ) exactly and ignores dt beyond sampling.
    """
    h_eff = np.asarray(h_eff, dtype=complex)
    if method not in PROPAGATORS:
        raise DomainError(f"unknown propagator '{method}', expected one of {PROPAGATORS}")

    if method == "rk4":
        dt = default_time_step(h_eff) if dt is None else dt
        check_time_step(h_eff, dt)
        samples, steps, step_dt = _sample_grid(t_max, dt, sample_every)
        per_sample = np.linalg.matrix_power(rk4_step_matrix(h_eff, step_dt), steps)
        interval = steps * step_dt
    else:
        interval = sample_every if sample_every is not None else (dt or settings.TRAP_SAMPLE_INTERVAL)
        samples, _, _ = _sample_grid(t_max, interval, interval)
        per_sample = expm(-1j * h_eff * interval)

    psi = np.array(psi0, dtype=complex)
    yield 0.0, psi.copy()
    for i in range(1, samples + 1):
        psi = per_sample @ psi
        yield i * interval, psi.copy()


def evolve_rk4(
    h_eff: np.ndarray,
    start: int,
    t_max: float,
    dt: Optional[float] = None,
    sample_every: Optional[float] = None,
) -> list[ComplexState]:
    h_eff = np.asarray(h_eff, dtype=complex)
    n = h_eff.shape[0]
    if not 1 <= start <= n:
        raise DomainError(f"start node {start} outside [1, {n}]")
    psi0 = np.zeros(n, dtype=complex)
    psi0[start - 1] = 1.0
    states = [
        ComplexState(time=t, amplitudes=_frozen(psi))
        for t, psi in propagate(h_eff, psi0, t_max, dt=dt, sample_every=sample_every, method="rk4")
    ]
    logger.debug(f"[RK4] start={start} t_max={t_max}: {len(states)} samples")
    return states


def series_from_states(start: int, states: list[ComplexState]) -> EvolutionSeries:
    return EvolutionSeries(
        start=start,
        times=_frozen([s.time for s in states]),
        probabilities=_frozen(np.array([s.probabilities for s in states])),
        meta={"method": "rk4"},
    )
