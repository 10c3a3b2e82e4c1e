from pydantic_settings import BaseSettings, NoDecode
from pydantic import field_validator
from typing import Annotated, List, Any


class Settings(BaseSettings):
    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: str = "%(asctime)s %(levelname)s %(name)s: %(message)s"

    # Dense eigensolver
    JACOBI_TOLERANCE: float = 1e-12          # off-diagonal Frobenius norm relative to ||H||_F
    JACOBI_MAX_SWEEPS: int = 100

    # Determinant-equation root finding
    ROOT_GRID_FACTOR: int = 20               # grid points per node on the x < -1 branch
    ROOT_XTOL: float = 1e-15
    ROOT_PAIRING_TOLERANCE: float = 1e-7
    ROOT_POLE_OFFSET: float = 1e-9           # bracket inset from each pole, relative to the gap
    ROOT_RESIDUAL_TOLERANCE: float = 1e-6

    # Degenerate eigenvalue grouping, relative to the spectral range
    DEGENERACY_TOLERANCE: float = 1e-8

    # Time propagation
    RK4_MAX_DT: float = 0.01
    RK4_DEFAULT_COURANT: float = 0.05
    RK4_STABILITY_LIMIT: float = 0.1

    # Trapping
    TRAP_METHOD: str = "expm"                # "expm" or "rk4"
    TRAP_SAMPLE_INTERVAL: float = 1.0
    TRAP_TAIL_FRACTION: float = 0.25
    TRAP_FLATNESS: float = 0.1
    TRAP_PLATEAU_M: Annotated[List[int], NoDecode] = [6, 11]   # m values checked by verify at N = 100

    # Parallelism
    MAX_WORKERS: int = 4

    # Output
    OUTPUT_PRECISION: int = 12
    SOLVER_AGREEMENT: float = 1e-6

    # verify command; accepts either a comma-separated string or a JSON array in .env
    VERIFY_SIZES: Annotated[List[int], NoDecode] = [10, 12, 15, 20, 31, 50, 100]
    VERIFY_QUICK_SIZES: Annotated[List[int], NoDecode] = [10, 12, 20]

    @field_validator("VERIFY_SIZES", "VERIFY_QUICK_SIZES", "TRAP_PLATEAU_M", mode="before")
    @classmethod
    def parse_sizes(cls, v: Any) -> List[int]:
        if isinstance(v, list):
            return v
        if isinstance(v, int):
            return [v]
        if isinstance(v, str):
            stripped = v.strip()
            if stripped.startswith("["):
                import json
                return json.loads(stripped)
            return [int(part) for part in stripped.split(",") if part.strip()]
        return v

    model_config = {
        "env_file": ".env",
        "env_prefix": "CHORDWALK_",
        "case_sensitive": True,
        "extra": "ignore",
    }


settings = Settings()
