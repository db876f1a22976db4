"""Distribution-exact simulation of the Bernstein-Vazirani subroutine.

Running the BV circuit on a boolean f and measuring yields the string w with
probability S_f(w)^2.  Squared integer Walsh coefficients are dyadic masses
summing to exactly 4^n, so one uniform integer draw from [0, 4^n) plus a
binary search over the cumulative masses reproduces the measurement law with
no floating point anywhere.  One sample costs one quantum query to f.
"""

from __future__ import annotations

import numpy as np

from .boolfn import BooleanFunction, walsh_spectrum
from .rng import flat_key, seeded_rng

__all__ = ["QueryLedger", "BvSampler", "bv_sample"]


class QueryLedger:
    """Running totals of oracle uses, split by access type."""

    __slots__ = ("quantum", "classical")

    def __init__(self) -> None:
        self.quantum = 0
        self.classical = 0

    def add_quantum(self, count: int = 1) -> None:
        if count < 0:
            raise ValueError("query count cannot be negative")
        self.quantum += count

    def add_classical(self, count: int = 1) -> None:
        if count < 0:
            raise ValueError("query count cannot be negative")
        self.classical += count

    def snapshot(self) -> dict:
        return {"quantum": self.quantum, "classical": self.classical}

    def __repr__(self) -> str:
        return f"QueryLedger(quantum={self.quantum}, classical={self.classical})"


def _normalize_key(seed_key) -> tuple[int, ...]:
    if isinstance(seed_key, (int, np.integer)):
        return (int(seed_key),)
    return flat_key(*seed_key)


class BvSampler:
    """Measurement-outcome sampler for one boolean function.

    Construction performs the Walsh transform once; each draw afterwards is a
    binary search over the support, O(log |support|).
    """

    __slots__ = ("n", "outcomes", "ledger", "draws", "_cum", "_rng")

    def __init__(self, f: BooleanFunction, seed_key, ledger: QueryLedger | None = None) -> None:
        masses = walsh_spectrum(f).squared_masses()
        support = np.flatnonzero(masses)
        self.n = f.n
        self.outcomes = support.astype(np.int64)
        self._cum = np.cumsum(masses[support], dtype=np.int64)
        self._rng = seeded_rng(*_normalize_key(seed_key))
        self.ledger = ledger
        self.draws = 0

    def draw(self, count: int = 1) -> np.ndarray:
        """Sample `count` outcomes; charges one quantum query per outcome."""
        if count < 0:
            raise ValueError("draw count cannot be negative")
        total = int(self._cum[-1])
        u = self._rng.integers(0, total, size=count, dtype=np.int64)
        idx = np.searchsorted(self._cum, u, side="right")
        self.draws += count
        if self.ledger is not None:
            self.ledger.add_quantum(count)
        return self.outcomes[idx]

    def draw_one(self) -> int:
        return int(self.draw(1)[0])


def bv_sample(f: BooleanFunction, count: int, seed_key, ledger: QueryLedger | None = None) -> np.ndarray:
    """One-shot helper: build a sampler for f and take `count` draws."""
    return BvSampler(f, seed_key, ledger).draw(count)
