"""Domain stores shared by all propagators.

Boolean variables keep two presence flags per index (value 0 / value 1);
integer variables keep an interval [lo, hi].  Propagators never mutate the
store they receive: they return a pruned copy inside a PropagationOutcome,
leaving the input untouched when the result is inconsistent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

FIXPOINT = "fixpoint"
INCONSISTENT = "inconsistent"


class BoolDomainStore:
    """Domains of 0/1 variables, backed by two boolean arrays."""

    __slots__ = ("has_zero", "has_one")

    def __init__(self, has_zero: np.ndarray, has_one: np.ndarray):
        has_zero = np.asarray(has_zero, dtype=bool)
        has_one = np.asarray(has_one, dtype=bool)
        if has_zero.shape != has_one.shape or has_zero.ndim != 1:
            raise ValueError("flag arrays must be 1-d and of equal length")
        if not np.all(has_zero | has_one):
            raise ValueError("every variable needs at least one value")
        self.has_zero = has_zero
        self.has_one = has_one

    @classmethod
    def free(cls, n: int) -> "BoolDomainStore":
        return cls(np.ones(n, dtype=bool), np.ones(n, dtype=bool))

    @classmethod
    def from_sets(cls, domains: list[set[int]]) -> "BoolDomainStore":
        hz = np.array([0 in d for d in domains])
        ho = np.array([1 in d for d in domains])
        return cls(hz, ho)

    def __len__(self) -> int:
        return len(self.has_zero)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BoolDomainStore):
            return NotImplemented
        return bool(
            np.array_equal(self.has_zero, other.has_zero)
            and np.array_equal(self.has_one, other.has_one)
        )

    def copy(self) -> "BoolDomainStore":
        return BoolDomainStore(self.has_zero.copy(), self.has_one.copy())

    def is_fixed(self, i: int) -> bool:
        return bool(self.has_zero[i]) != bool(self.has_one[i])

    def fixed_mask(self) -> np.ndarray:
        return self.has_zero ^ self.has_one

    def value(self, i: int) -> int:
        if not self.is_fixed(i):
            raise ValueError(f"variable {i} is not fixed")
        return int(self.has_one[i])

    def has(self, i: int, v: int) -> bool:
        return bool(self.has_one[i] if v else self.has_zero[i])

    def fix(self, i: int, v: int) -> None:
        if not self.has(i, v):
            raise ValueError(f"value {v} not in domain of variable {i}")
        self.has_zero[i] = v == 0
        self.has_one[i] = v == 1

    def remove(self, i: int, v: int) -> None:
        if not self.has(i, v):
            return
        if self.is_fixed(i):
            raise ValueError(f"removing {v} empties variable {i}")
        self.fix(i, 1 - v)

    def as_sets(self) -> list[set[int]]:
        return [
            ({0} if z else set()) | ({1} if o else set())
            for z, o in zip(self.has_zero, self.has_one)
        ]

    def __repr__(self) -> str:
        return f"BoolDomainStore({self.as_sets()})"


class IntDomainStore:
    """Interval domains [lo_i, hi_i] for integer variables."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi):
        lo = np.asarray(lo, dtype=np.int64)
        hi = np.asarray(hi, dtype=np.int64)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValueError("bound arrays must be 1-d and of equal length")
        if np.any(lo > hi):
            raise ValueError("empty interval in domain store")
        self.lo = lo
        self.hi = hi

    @classmethod
    def uniform(cls, n: int, lo: int, hi: int) -> "IntDomainStore":
        return cls(np.full(n, lo), np.full(n, hi))

    def __len__(self) -> int:
        return len(self.lo)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntDomainStore):
            return NotImplemented
        return bool(
            np.array_equal(self.lo, other.lo) and np.array_equal(self.hi, other.hi)
        )

    def copy(self) -> "IntDomainStore":
        return IntDomainStore(self.lo.copy(), self.hi.copy())

    def bounds(self, i: int) -> tuple[int, int]:
        return int(self.lo[i]), int(self.hi[i])

    def __repr__(self) -> str:
        return f"IntDomainStore({list(zip(self.lo.tolist(), self.hi.tolist()))})"


@dataclass(frozen=True)
class CostVarDomain:
    """Interval of the violation-cost variable."""

    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("empty cost interval")


@dataclass(frozen=True)
class PropagationOutcome:
    """Pruned domains plus a status flag.

    status is FIXPOINT or INCONSISTENT; `domains` is a pruned copy on
    fixpoint and the untouched input store on inconsistency.  `removed`
    lists (variable, value) prunings; `cost` carries the tightened cost
    interval for propagators that own one.
    """

    status: str
    domains: object
    removed: tuple = ()
    cost: CostVarDomain | None = None

    @property
    def inconsistent(self) -> bool:
        return self.status == INCONSISTENT

    @property
    def removed_count(self) -> int:
        return len(self.removed)
