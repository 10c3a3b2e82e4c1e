"""
Trapping Service
────────────────
Survival of a walker on G(N, m) with absorbing trap nodes. Trap nodes get
an imaginary on-site term, H_eff = H0 - iΓ·P_trap, so amplitudes leak out
and the averaged survival

    Π_M(t) = 1/(N - M) Σ_{j∉M} Σ_{k∉M} π_{k,j}(t)

falls from 1 toward a plateau set by the cycle pair states with a node at
the trap. Start nodes are propagated in parallel chunks.

Usage:
    from chordwalk.services.trapping import TrapConfig, survival_probability
    result = survival_probability(TrapConfig(graph=build_graph(100, 11), gamma=1.0))
    result.plateau, result.predicted_plateau
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Optional

import numpy as np

from chordwalk.core.config import settings
from chordwalk.core.errors import DomainError
from chordwalk.services.graph import GraphSpec, build_graph, laplacian
from chordwalk.services.linalg import propagate
from chordwalk.services.spectral import perturbative_spectrum

logger = logging.getLogger(__name__)

SIGN_CONVENTION = "H_eff = H0 - i*Gamma*P_trap"


# ── CONFIG & RESULT ───────────────────────────────────────────────────────────

@dataclass(frozen=True)
class TrapConfig:
    graph: GraphSpec
    gamma: float = 1.0
    traps: frozenset = field(default_factory=lambda: frozenset({1}))

    def __post_init__(self):
        object.__setattr__(self, "traps", frozenset(self.traps))
        if self.gamma < 0.0:
            raise DomainError(f"trap strength must be non-negative, got {self.gamma}")
        if not self.traps:
            raise DomainError("trap set is empty")
        for node in self.traps:
            self.graph.check_node(node)
        if len(self.traps) >= self.graph.n:
            raise DomainError("every node is a trap")

    @property
    def free_nodes(self) -> list[int]:
        return [k for k in range(1, self.graph.n + 1) if k not in self.traps]


@dataclass(frozen=True, eq=False)
class TrapResult:
    config: TrapConfig
    times: np.ndarray
    survival: np.ndarray
    plateau: float
    converged: bool
    predicted_plateau: float
    gammas: np.ndarray
    zero_gamma_count: int
    max_norm_increase: float
    method: str
    sign_convention: str = SIGN_CONVENTION

    @property
    def final(self) -> float:
        return float(self.survival[-1])


def effective_hamiltonian(cfg: TrapConfig) -> np.ndarray:
    h = laplacian(cfg.graph).astype(complex)
    for node in cfg.traps:
        h[node - 1, node - 1] -= 1j * cfg.gamma
    return h


# ── PERTURBATIVE DECAY RATES ──────────────────────────────────────────────────

def perturbative_gammas(cfg: TrapConfig) -> np.ndarray:
    """
    γ = Γ|<1|Ψ>|² for every zeroth-order state: Γ/N for the uniform and
    alternating states, Γ(1 ± cos(m-1)θ_n)/N for each cycle pair.
    """
    if cfg.traps != frozenset({1}):
        raise DomainError(f"decay rates are derived for a single trap at node 1, got {sorted(cfg.traps)}")
    g = cfg.graph
    if g.m is None:
        raise DomainError("decay rates need a chord")
    pert = perturbative_spectrum(g.n, g.m)

    gammas = [cfg.gamma / g.n]
    if g.parity:
        gammas.append(cfg.gamma / g.n)
    for index in pert.pair_indices:
        plus, minus = pert.pair_states(int(index))
        gammas.append(cfg.gamma * abs(plus[0]) ** 2)
        gammas.append(cfg.gamma * abs(minus[0]) ** 2)
    return np.array(gammas)


def dark_state_count(n: int, m: int) -> int:
    """Cycle pairs whose (m-1)θ_n is a multiple of π, so one partner never feels the trap."""
    parity = 1 if n % 2 == 0 else 0
    return sum(1 for k in range(1, n // 2 - parity + 1) if (2 * k * (m - 1)) % n == 0)


def plateau_prediction(n: int, m: int, rule: str = "divisibility") -> float:
    """
    Long-time survival floor for a trap at node 1.

    rule="divisibility" gives (m - 1 - λ)/(N - 1) when N/(2(m-1)) is an
    integer and 0 otherwise. rule="count" divides the exact dark-state count
    by N - 1. The two agree whenever the ratio is integral; elsewhere the
    count can be non-zero (G(100, 21) has 9 dark pairs) while the measured
    floor sits near neither.
    """
    build_graph(n, m)
    if rule == "count":
        return dark_state_count(n, m) / (n - 1)
    if rule == "divisibility":
        parity = 1 if n % 2 == 0 else 0
        if n % (2 * (m - 1)) == 0:
            return (m - 1 - parity) / (n - 1)
        return 0.0
    raise DomainError(f"unknown plateau rule '{rule}'")


def survival_approximation(gammas, n: int, M: int, times) -> np.ndarray:
    """Π̂(t) = 1/(N - M) Σ_l exp(-2 γ_l t)."""
    gammas = np.asarray(gammas, dtype=float)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    return np.exp(-2.0 * np.outer(times, gammas)).sum(axis=1) / (n - M)


# ── TIME PROPAGATION ──────────────────────────────────────────────────────────

def estimate_plateau(values, tail_fraction: Optional[float] = None, flatness: Optional[float] = None) -> tuple[float, bool]:
    """Mean over the trailing window; converged when its spread is small next to the mean."""
    tail_fraction = settings.TRAP_TAIL_FRACTION if tail_fraction is None else tail_fraction
    flatness = settings.TRAP_FLATNESS if flatness is None else flatness
    values = np.asarray(values, dtype=float)
    tail = values[-max(1, int(math.ceil(len(values) * tail_fraction))):]
    mean = float(np.mean(tail))
    spread = float(np.std(tail))
    converged = spread < flatness * mean if mean > 0.0 else spread < 1e-12
    return mean, converged


def _propagate_chunk(h_eff, starts, free_rows, t_max, dt, sample_every, method):
    n = h_eff.shape[0]
    psi0 = np.zeros((n, len(starts)), dtype=complex)
    psi0[np.array(starts) - 1, np.arange(len(starts))] = 1.0

    survival = []
    norm_increase = 0.0
    previous = np.ones(len(starts))
    for _, psi in propagate(h_eff, psi0, t_max, dt=dt, sample_every=sample_every, method=method):
        weights = np.abs(psi) ** 2
        survival.append(float(weights[free_rows].sum()))
        norms = weights.sum(axis=0)
        norm_increase = max(norm_increase, float(np.max(norms - previous)))
        previous = norms
    return np.array(survival), norm_increase


def survival_probability(
    cfg: TrapConfig,
    t_max: Optional[float] = None,
    dt: Optional[float] = None,
    method: Optional[str] = None,
    sample_every: Optional[float] = None,
) -> TrapResult:
    g = cfg.graph
    t_max = 10.0 * g.n if t_max is None else t_max
    method = settings.TRAP_METHOD if method is None else method
    sample_every = settings.TRAP_SAMPLE_INTERVAL if sample_every is None else sample_every
    if t_max <= 0.0:
        raise DomainError(f"t_max must be positive, got {t_max}")

    h_eff = effective_hamiltonian(cfg)
    free = cfg.free_nodes
    free_rows = np.array(free) - 1
    workers = max(1, min(settings.MAX_WORKERS, len(free)))
    chunks = [list(c) for c in np.array_split(np.array(free), workers) if len(c)]

    logger.info(
        f"[Trap] {g.label()} Γ={cfg.gamma} traps={sorted(cfg.traps)}: "
        f"{len(free)} start nodes in {len(chunks)} chunks, t_max={t_max}, method={method}"
    )
    run = partial(_propagate_chunk, h_eff, free_rows=free_rows, t_max=t_max, dt=dt, sample_every=sample_every, method=method)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(run, chunks))

    survival = sum(part[0] for part in parts) / len(free)
    max_norm_increase = max(part[1] for part in parts)
    times = np.arange(len(survival)) * sample_every

    plateau, converged = estimate_plateau(survival)
    if not converged:
        logger.warning(f"[Trap] {g.label()}: survival tail not flat by t={t_max}; plateau {plateau:.4g} is provisional")

    gammas = np.array([])
    zero_count = 0
    predicted = float("nan")
    if g.m is not None and cfg.traps == frozenset({1}):
        gammas = perturbative_gammas(cfg)
        zero_count = int(np.count_nonzero(gammas < 1e-12 * max(cfg.gamma, 1.0)))
        predicted = plateau_prediction(g.n, g.m)

    return TrapResult(
        config=cfg,
        times=times,
        survival=survival,
        plateau=plateau,
        converged=converged,
        predicted_plateau=predicted,
        gammas=gammas,
        zero_gamma_count=zero_count,
        max_norm_increase=max_norm_increase,
        method=method,
    )
