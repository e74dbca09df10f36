"""Single home for every default tolerance, grid size and budget.

Reports echo :func:`Defaults.as_dict` so a verdict always travels with the
numbers that produced it.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace


@dataclass(frozen=True)
class Defaults:
    claim_tol: float = 1e-9
    quad_tol: float = 1e-10
    quad_rtol: float = 1e-13
    quad_budget: int = 1_000_000
    eval_epsilon: float = 1e-6
    grid_x: int = 33
    grid_t: int = 33
    grid_random: int = 1000
    seed: int = 0
    domain_lo: float = 0.0
    domain_hi: float = 4.0
    max_power: int = 5
    search_budget: int = 100
    search_grid_x: int = 9
    search_grid_t: int = 9
    search_grid_random: int = 64

    def as_dict(self) -> dict:
        return asdict(self)

    def with_overrides(self, **changes) -> "Defaults":
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


DEFAULTS = Defaults()
