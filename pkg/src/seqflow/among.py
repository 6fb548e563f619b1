"""Counting propagators used as decomposition baselines.

A single Among over 0/1 variables ("between l and u of these variables are
1") filters by counting: with c ones fixed and f variables free, it fails
when c > u or c + f < l, saturation (c = u) removes 1 from the free
variables and demand (c + f = l) removes 0.  This is domain consistent for
one window; a Sequence posted as one Among per window is the AD baseline,
strictly weaker than the flow propagator.  The soft variant contributes a
per-window violation lower bound for the AD_S baseline.
"""

from __future__ import annotations

from dataclasses import dataclass

from .domains import FIXPOINT, INCONSISTENT, BoolDomainStore, PropagationOutcome


@dataclass(frozen=True)
class AmongSpec:
    l: int
    u: int
    members: tuple[int, ...]

    def __post_init__(self):
        if not 0 <= self.l <= self.u <= len(self.members):
            raise ValueError("need 0 <= l <= u <= window size")


def among_propagate(spec: AmongSpec, domains: BoolDomainStore) -> PropagationOutcome:
    ones = 0
    free = []
    for i in spec.members:
        if domains.is_fixed(i):
            ones += domains.value(i)
        else:
            free.append(i)
    if ones > spec.u or ones + len(free) < spec.l:
        return PropagationOutcome(INCONSISTENT, domains)
    forced = None
    if ones == spec.u and free:
        forced = 0
    elif ones + len(free) == spec.l and free:
        forced = 1
    if forced is None:
        return PropagationOutcome(FIXPOINT, domains.copy())
    out = domains.copy()
    removed = []
    for i in free:
        out.fix(i, forced)
        removed.append((i, 1 - forced))
    return PropagationOutcome(FIXPOINT, out, tuple(removed))


def soft_among_min_cost(spec: AmongSpec, domains: BoolDomainStore) -> int:
    """Minimum violation max(l - sum, sum - u, 0) over completions of the
    window: free variables absorb what they can."""
    ones = 0
    free = 0
    for i in spec.members:
        if domains.is_fixed(i):
            ones += domains.value(i)
        else:
            free += 1
    return max(spec.l - (ones + free), ones - spec.u, 0)


def sequence_among_windows(n: int, k: int, l: int, u: int) -> list[AmongSpec]:
    """One Among per length-k window: the AD decomposition of a Sequence."""
    return [AmongSpec(l, u, tuple(range(j, j + k))) for j in range(n - k + 1)]
