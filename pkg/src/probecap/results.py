from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional


@dataclass
class SolverOptions:
    tol: float = 1e-12            # stopping tolerance of inner ascents
    ba_tol: float = 1e-10         # Blahut-Arimoto duality-gap tolerance
    multistarts: int = 32
    seed: int = 0
    max_iter: int = 5000
    strategy_cap: int = 4096      # largest strategy alphabet handed to Blahut-Arimoto
    pair_cap: int = 200000        # largest number of explicit StrategyPairs enumerated
    u_size: Optional[int] = None  # force |U| (Theorems 2-3)
    u_cap: Optional[int] = None   # Theorem 2 auxiliary size (default min(4, bound))
    resolution: float = 0.01      # grid oracle step
    oracle_work_cap: float = 5e7


@dataclass
class SolveResult:
    value: float
    argmax: dict
    achieved_cost: float
    trace: list
    status: str                   # converged | multistart-best | oracle
    gamma: float = 0.0
    theorem: str = ""
    info: dict = field(default_factory=dict)

    def summary(self) -> str:
        return f"C(Γ)={self.value:.6f} @ cost {self.achieved_cost:.6f}"

    def to_json(self) -> dict:
        def conv(v: Any):
            if hasattr(v, "tolist"):
                return v.tolist()
            if isinstance(v, dict):
                return {k: conv(x) for k, x in v.items()}
            if isinstance(v, (list, tuple)):
                return [conv(x) for x in v]
            if hasattr(v, "g") and hasattr(v, "f"):
                return {"g": v.g.tolist(), "f": v.f.tolist()}
            return v
        return {
            "gamma": self.gamma, "value_bits": self.value,
            "achieved_cost": self.achieved_cost, "status": self.status,
            "theorem": self.theorem, "argmax": conv(self.argmax),
            "info": conv(self.info),
        }
