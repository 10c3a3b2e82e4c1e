from pathlib import Path
from typing import Any, List, Literal, Optional

from pydantic import BaseModel, field_validator, model_validator

from chordwalk.core.errors import DomainError
from chordwalk.services.graph import GraphSpec, build_cycle, build_graph


COMMANDS = ("spectrum", "eigenstate", "evolve", "limiting", "trap", "verify")


def _parse_int_list(v: Any) -> Any:
    if v is None:
        return []
    if isinstance(v, int):
        return [v]
    if isinstance(v, str):
        return [int(part) for part in v.split(",") if part.strip()]
    return v


# ── REQUEST ───────────────────────────────────────────────────────────────────

class RunRequest(BaseModel):
    command: Literal["spectrum", "eigenstate", "evolve", "limiting", "trap", "verify"]
    n: Optional[int] = None
    m: Optional[int] = None
    cycle: bool = False                       # set by --m none
    m_list: List[int] = []
    start: List[int] = []
    t_max: Optional[float] = None
    dt: Optional[float] = None
    points: int = 501                         # time samples for evolve
    sample_every: Optional[float] = None      # trap sampling interval
    gamma: float = 1.0
    solver: Optional[Literal["dense", "chebyshev", "both"]] = None
    format: Literal["csv", "json"] = "csv"
    out: Optional[Path] = None
    quick: bool = False

    @model_validator(mode="before")
    @classmethod
    def parse_cycle_flag(cls, data: Any) -> Any:
        if isinstance(data, dict) and isinstance(data.get("m"), str):
            raw = data["m"].strip().lower()
            if raw == "none":
                data = {**data, "m": None, "cycle": True}
        return data

    @field_validator("m_list", "start", mode="before")
    @classmethod
    def parse_int_lists(cls, v: Any) -> Any:
        return _parse_int_list(v)

    @model_validator(mode="after")
    def check_against_graph(self) -> "RunRequest":
        if self.command == "verify":
            return self
        if self.n is None:
            raise DomainError("--n is required")
        if self.cycle and self.m_list:
            raise DomainError("--m none cannot be combined with --m-list")
        if not self.cycle and self.m is None and not self.m_list:
            raise DomainError("--m is required (an integer, or 'none' for the bare cycle)")
        if self.m_list and self.out is None:
            raise DomainError("--m-list writes one file per m and needs --out")

        for m in (self.m_list or [self.m]):
            g = build_cycle(self.n) if self.cycle else build_graph(self.n, m)
            for j in self.start:
                g.check_node(j)

        if self.cycle and self.solver in ("chebyshev", "both"):
            raise DomainError("the determinant-equation solver needs a chord; use --solver dense with --m none")
        if self.cycle and self.command in ("eigenstate", "trap"):
            raise DomainError(f"{self.command} needs a chord")
        if self.t_max is not None and self.t_max <= 0:
            raise DomainError(f"--t-max must be positive, got {self.t_max}")
        if self.dt is not None and self.dt <= 0:
            raise DomainError(f"--dt must be positive, got {self.dt}")
        if self.sample_every is not None and self.sample_every <= 0:
            raise DomainError(f"--sample-every must be positive, got {self.sample_every}")
        if self.points < 2:
            raise DomainError(f"--points must be at least 2, got {self.points}")
        if self.gamma < 0:
            raise DomainError(f"--gamma must be non-negative, got {self.gamma}")
        return self

    @property
    def graph(self) -> GraphSpec:
        return build_cycle(self.n) if self.cycle else build_graph(self.n, self.m)

    @property
    def resolved_solver(self) -> str:
        if self.solver is not None:
            return self.solver
        return "dense" if self.cycle else "chebyshev"

    def starts(self, default: int = 1) -> List[int]:
        return self.start or [default]

    def for_m(self, m: int) -> "RunRequest":
        """Single-m request for one point of an --m-list sweep."""
        out = self.out.with_name(f"{self.out.stem}_m{m}{self.out.suffix}") if self.out else None
        return self.model_copy(update={"m": m, "m_list": [], "out": out})


# ── OUTPUT ────────────────────────────────────────────────────────────────────

class OutputMeta(BaseModel):
    command: str
    request: dict
    graph: Optional[str] = None
    solver: Optional[str] = None
    source: Optional[str] = None
    fallbacks: List[str] = []
    sign_convention: Optional[str] = None
    extra: dict = {}
