"""Minimal backtracking CSP engine around the constraint propagators.

Variables are 0/1, integer intervals, or multi-valued; multi-valued
variables reach Boolean constraints through channel views (the 0/1 variable
Y with Y=1 iff X takes a value from a given set).  Search is depth-first
with chronological backtracking: propagate to fixpoint at every node via a
FIFO queue of woken constraints, branch on a seeded random variable order,
enumerate each domain in a per-node random order.  Domains are restored
from a trail; propagator flow caches are never trailed, they repair
themselves after backjumps.

Identical (model, seed) pairs reproduce identical traces; only elapsed
time varies.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .among import AmongSpec, among_propagate
from .domains import BoolDomainStore, CostVarDomain, IntDomainStore
from .rng import SplitMix64
from .sequence import SequencePropagator, SequenceSpec
from .slidingsum import WindowSpec, gen_sequence_propagate, propagate_bc
from .soft import SoftSequencePropagator, violation_cost

SAT = "sat"
UNSAT = "unsat"
LIMIT = "limit"


@dataclass(frozen=True)
class Var:
    kind: str  # 'b' (0/1), 'm' (multi-valued), 'i' (integer interval)
    index: int


@dataclass
class SearchStats:
    nodes: int = 0
    backtracks: int = 0
    status: str = UNSAT
    elapsed_s: float = 0.0


@dataclass
class Solution:
    bools: np.ndarray
    multis: np.ndarray
    ints: list[tuple[int, int]]

    def value(self, var: Var) -> int:
        if var.kind == "b":
            return int(self.bools[var.index])
        if var.kind == "m":
            return int(self.multis[var.index])
        return self.ints[var.index][0]


class Model:
    """Declarative problem description consumed by the Solver."""

    def __init__(self):
        self.bool_search: list[bool] = []
        self.multi_values: list[int] = []
        self.multi_search: list[bool] = []
        self.int_bounds: list[tuple[int, int]] = []
        self.int_search: list[bool] = []
        self.channels: list[tuple[int, int, frozenset]] = []
        self.constraints: list[tuple] = []

    # -- variables -----------------------------------------------------------

    def add_bool_vars(self, count: int, search: bool = True) -> list[Var]:
        start = len(self.bool_search)
        self.bool_search += [search] * count
        return [Var("b", i) for i in range(start, start + count)]

    def add_multi_vars(self, count: int, n_values: int, search: bool = True) -> list[Var]:
        if n_values < 1:
            raise ValueError("multi-valued variables need at least one value")
        start = len(self.multi_values)
        self.multi_values += [n_values] * count
        self.multi_search += [search] * count
        return [Var("m", i) for i in range(start, start + count)]

    def add_int_var(self, lo: int, hi: int, search: bool = False) -> Var:
        if lo > hi:
            raise ValueError("empty interval")
        self.int_bounds.append((lo, hi))
        self.int_search.append(search)
        return Var("i", len(self.int_bounds) - 1)

    def channel(self, mvar: Var, values) -> Var:
        """0/1 view Y of a multi-valued X with Y=1 iff X in `values`."""
        if mvar.kind != "m":
            raise ValueError("channel expects a multi-valued variable")
        view = self.add_bool_vars(1, search=False)[0]
        self.channels.append((mvar.index, view.index, frozenset(values)))
        return view

    def _bool_view_indices(self, xs: list[Var], value_set) -> tuple[int, ...]:
        kinds = {x.kind for x in xs}
        if kinds == {"b"}:
            if value_set is not None:
                raise ValueError("value_set applies to multi-valued variables only")
            return tuple(x.index for x in xs)
        if kinds == {"m"}:
            if value_set is None:
                raise ValueError("multi-valued variables need a value_set")
            return tuple(self.channel(x, value_set).index for x in xs)
        raise ValueError("mixed variable kinds in one constraint")

    # -- constraints -----------------------------------------------------------

    def add_sequence(self, xs, k, l, u, method="flow", value_set=None) -> None:
        if method not in ("flow", "among", "dual"):
            raise ValueError(f"unknown sequence method {method!r}")
        idx = self._bool_view_indices(list(xs), value_set)
        spec = SequenceSpec(len(idx), k, l, u)  # validates the parameters
        self.constraints.append(("seq", method, idx, spec))

    def add_soft_sequence(self, xs, k, l, u, t: Var, method="flow", value_set=None) -> None:
        if method not in ("flow", "among"):
            raise ValueError(f"unknown soft sequence method {method!r}")
        if t.kind != "i":
            raise ValueError("cost variable must be an integer variable")
        idx = self._bool_view_indices(list(xs), value_set)
        spec = SequenceSpec(len(idx), k, l, u)
        self.constraints.append(("soft", method, idx, spec, t.index))

    def add_sliding_sum(self, xs, windows) -> None:
        if any(x.kind != "i" for x in xs):
            raise ValueError("sliding sum runs on integer variables")
        idx = tuple(x.index for x in xs)
        wins = tuple(windows)
        for w in wins:
            if not isinstance(w, WindowSpec) or not w.covers(len(idx)):
                raise ValueError("invalid window")
        self.constraints.append(("slide", idx, wins))

    # -- direct evaluation -------------------------------------------------------

    def check_solution(self, sol: Solution) -> bool:
        """Re-validate a solution by direct arithmetic on the constraints."""
        for mi, bi, values in self.channels:
            if int(sol.bools[bi]) != int(sol.multis[mi] in values):
                return False
        for con in self.constraints:
            if con[0] == "seq":
                _, _, idx, spec = con
                xs = sol.bools[list(idx)]
                sums = np.convolve(xs, np.ones(spec.k, dtype=np.int64), "valid")
                if np.any(sums < spec.l) or np.any(sums > spec.u):
                    return False
            elif con[0] == "soft":
                _, _, idx, spec, ti = con
                viol = violation_cost(spec, sol.bools[list(idx)])
                if viol > sol.ints[ti][1]:
                    return False
            elif con[0] == "slide":
                _, idx, wins = con
                xs = [sol.ints[i][0] for i in idx]
                for w in wins:
                    total = sum(xs[w.s - 1 : w.s - 1 + w.k])
                    if not w.l <= total <= w.u:
                        return False
        return True


class _Conflict(Exception):
    pass


# ---------------------------------------------------------------------------
# constraint adapters

class _SeqFlow:
    def __init__(self, idx, spec):
        self.idx = np.array(idx, dtype=np.int64)
        self.prop = SequencePropagator(spec)
        self.watched = [("b", i) for i in idx]

    def propagate(self, s: "Solver") -> None:
        store = BoolDomainStore(s.bool_hz[self.idx], s.bool_ho[self.idx])
        out = self.prop.propagate(store)
        if out.inconsistent:
            raise _Conflict
        for i, v in out.removed:
            s.remove_bool(int(self.idx[i]), v, self)


class _SeqDual:
    def __init__(self, idx, spec):
        self.idx = np.array(idx, dtype=np.int64)
        self.windows = [
            WindowSpec(s=j + 1, k=spec.k, l=spec.l, u=spec.u)
            for j in range(spec.window_count)
        ]
        self.n = spec.n
        self.watched = [("b", i) for i in idx]

    def propagate(self, s: "Solver") -> None:
        store = BoolDomainStore(s.bool_hz[self.idx], s.bool_ho[self.idx])
        out = gen_sequence_propagate(self.n, self.windows, store)
        if out.inconsistent:
            raise _Conflict
        for i, v in out.removed:
            s.remove_bool(int(self.idx[i]), v, self)


class _Among:
    def __init__(self, idx, l, u):
        self.idx = np.array(idx, dtype=np.int64)
        self.spec = AmongSpec(l, u, tuple(range(len(idx))))
        self.watched = [("b", i) for i in idx]

    def propagate(self, s: "Solver") -> None:
        store = BoolDomainStore(s.bool_hz[self.idx], s.bool_ho[self.idx])
        out = among_propagate(self.spec, store)
        if out.inconsistent:
            raise _Conflict
        for i, v in out.removed:
            s.remove_bool(int(self.idx[i]), v, self)


class _SoftSeqFlow:
    def __init__(self, idx, spec, t_index):
        self.idx = np.array(idx, dtype=np.int64)
        self.prop = SoftSequencePropagator(spec)
        self.t = t_index
        self.watched = [("b", i) for i in idx] + [("i", t_index)]

    def propagate(self, s: "Solver") -> None:
        store = BoolDomainStore(s.bool_hz[self.idx], s.bool_ho[self.idx])
        t = CostVarDomain(int(s.int_lo[self.t]), int(s.int_hi[self.t]))
        out = self.prop.propagate(store, t)
        if out.inconsistent:
            raise _Conflict
        for i, v in out.removed:
            s.remove_bool(int(self.idx[i]), v, self)
        if out.cost.lo > t.lo:
            s.tighten_int(self.t, lo=out.cost.lo, src=self)


class _SoftAmong:
    """AD_S baseline: per-window minimum violations summed against max(T).

    Its own prunings shift the window counts, so it is not idempotent: the
    queue re-wakes it after self-removals until the counts stabilize.
    """

    idempotent = False

    def __init__(self, idx, spec, t_index):
        self.idx = np.array(idx, dtype=np.int64)
        self.spec = spec
        self.t = t_index
        self.watched = [("b", i) for i in idx] + [("i", t_index)]

    @staticmethod
    def _cost(l, u, ones, free):
        return max(l - (ones + free), ones - u, 0)

    def propagate(self, s: "Solver") -> None:
        spec = self.spec
        hz, ho = s.bool_hz[self.idx], s.bool_ho[self.idx]
        ones = (~hz).astype(np.int64)  # fixed to 1
        free = (hz & ho).astype(np.int64)
        kernel = np.ones(spec.k, dtype=np.int64)
        cnt1 = np.convolve(ones, kernel, "valid")
        cntf = np.convolve(free, kernel, "valid")
        costs = np.maximum(spec.l - (cnt1 + cntf), np.maximum(cnt1 - spec.u, 0))
        total = int(costs.sum())
        t_hi = int(s.int_hi[self.t])
        if total > t_hi:
            raise _Conflict
        if total > int(s.int_lo[self.t]):
            s.tighten_int(self.t, lo=total, src=self)
        m = spec.window_count
        for i in np.flatnonzero(hz & ho):
            j0, j1 = max(0, int(i) - spec.k + 1), min(m - 1, int(i))
            deltas = {0: 0, 1: 0}
            for j in range(j0, j1 + 1):
                c1, cf = int(cnt1[j]), int(cntf[j])
                deltas[0] += self._cost(spec.l, spec.u, c1, cf - 1) - int(costs[j])
                deltas[1] += self._cost(spec.l, spec.u, c1 + 1, cf - 1) - int(costs[j])
            bad = [w for w in (0, 1) if total + deltas[w] > t_hi]
            if len(bad) == 2:
                raise _Conflict
            for w in bad:
                s.remove_bool(int(self.idx[i]), w, self)


class _SlidingSum:
    def __init__(self, idx, windows):
        self.idx = np.array(idx, dtype=np.int64)
        self.windows = list(windows)
        self.watched = [("i", i) for i in idx]

    def propagate(self, s: "Solver") -> None:
        store = IntDomainStore(s.int_lo[self.idx], s.int_hi[self.idx])
        out = propagate_bc(len(self.idx), self.windows, store)
        if out.inconsistent:
            raise _Conflict
        for i, lo, hi in out.removed:
            s.tighten_int(int(self.idx[i]), lo=lo, hi=hi, src=self)


class _Channel:
    def __init__(self, m_index, b_index, values, n_values):
        self.m = m_index
        self.b = b_index
        mask = np.zeros(n_values, dtype=bool)
        mask[sorted(v for v in values if 0 <= v < n_values)] = True
        self.in_set = mask
        self.watched = [("m", m_index), ("b", b_index)]

    def propagate(self, s: "Solver") -> None:
        bits = s.multi_dom[self.m]
        if not (bits & self.in_set).any():
            s.remove_bool(self.b, 1, self)
        if not (bits & ~self.in_set).any():
            s.remove_bool(self.b, 0, self)
        z, o = s.bool_hz[self.b], s.bool_ho[self.b]
        if z != o:
            drop = ~self.in_set if o else self.in_set
            for v in np.flatnonzero(bits & drop):
                s.remove_multi(self.m, int(v), self)


# ---------------------------------------------------------------------------

@dataclass
class _Frame:
    var: Var
    values: list[int]
    next_value: int = 0
    mark: int = 0
    scan_from: int = 0


class Solver:
    """One depth-first search over a Model."""

    def __init__(self, model: Model, seed: int = 0,
                 node_limit: int | None = None,
                 time_limit_s: float | None = None):
        self.model = model
        self.rng = SplitMix64(seed)
        self.node_limit = node_limit
        self.time_limit_s = time_limit_s

        nb = len(model.bool_search)
        self.bool_hz = np.ones(nb, dtype=bool)
        self.bool_ho = np.ones(nb, dtype=bool)
        self.multi_dom = [np.ones(nv, dtype=bool) for nv in model.multi_values]
        self.int_lo = np.array([b[0] for b in model.int_bounds], dtype=np.int64)
        self.int_hi = np.array([b[1] for b in model.int_bounds], dtype=np.int64)

        self.trail: list[tuple] = []
        self.queue: deque = deque()
        self.inqueue: set[int] = set()
        self.watchers: dict[tuple, list] = {}
        self.constraints: list = []
        for con in model.constraints:
            if con[0] == "seq":
                _, method, idx, spec = con
                if method == "flow":
                    self._add(_SeqFlow(idx, spec))
                elif method == "dual":
                    self._add(_SeqDual(idx, spec))
                else:
                    for j in range(spec.window_count):
                        self._add(_Among(idx[j : j + spec.k], spec.l, spec.u))
            elif con[0] == "soft":
                _, method, idx, spec, ti = con
                cls = _SoftSeqFlow if method == "flow" else _SoftAmong
                self._add(cls(idx, spec, ti))
            elif con[0] == "slide":
                _, idx, wins = con
                self._add(_SlidingSum(idx, wins))
        for mi, bi, values in model.channels:
            self._add(_Channel(mi, bi, values, model.multi_values[mi]))

    def _add(self, c) -> None:
        c.cid = len(self.constraints)
        self.constraints.append(c)
        for key in c.watched:
            self.watchers.setdefault(key, []).append(c)

    # -- domain operations (all trailed, all wake watchers) --------------------

    def _wake(self, key, src) -> None:
        for c in self.watchers.get(key, ()):
            if c.cid in self.inqueue:
                continue
            if c is src and getattr(c, "idempotent", True):
                continue
            self.inqueue.add(c.cid)
            self.queue.append(c)

    def remove_bool(self, i: int, v: int, src=None) -> None:
        z, o = bool(self.bool_hz[i]), bool(self.bool_ho[i])
        if (v == 0 and not z) or (v == 1 and not o):
            return
        if z != o:
            raise _Conflict  # removing the last value
        self.trail.append(("b", i, z, o))
        if v == 0:
            self.bool_hz[i] = False
        else:
            self.bool_ho[i] = False
        self._wake(("b", i), src)

    def remove_multi(self, i: int, v: int, src=None) -> None:
        bits = self.multi_dom[i]
        if not bits[v]:
            return
        if bits.sum() == 1:
            raise _Conflict
        bits[v] = False
        self.trail.append(("m", i, v, None))
        self._wake(("m", i), src)

    def tighten_int(self, i: int, lo=None, hi=None, src=None) -> None:
        old_lo, old_hi = int(self.int_lo[i]), int(self.int_hi[i])
        new_lo = old_lo if lo is None else max(old_lo, lo)
        new_hi = old_hi if hi is None else min(old_hi, hi)
        if new_lo == old_lo and new_hi == old_hi:
            return
        if new_lo > new_hi:
            raise _Conflict
        self.trail.append(("i", i, old_lo, old_hi))
        self.int_lo[i] = new_lo
        self.int_hi[i] = new_hi
        self._wake(("i", i), src)

    def _assign(self, var: Var, v: int) -> None:
        if var.kind == "b":
            self.remove_bool(var.index, 1 - v)
        elif var.kind == "m":
            for w in np.flatnonzero(self.multi_dom[var.index]):
                if int(w) != v:
                    self.remove_multi(var.index, int(w))
        else:
            self.tighten_int(var.index, lo=v, hi=v)

    def _undo_to(self, mark: int) -> None:
        while len(self.trail) > mark:
            kind, i, a, b = self.trail.pop()
            if kind == "b":
                self.bool_hz[i] = a
                self.bool_ho[i] = b
            elif kind == "m":
                self.multi_dom[i][a] = True
            else:
                self.int_lo[i] = a
                self.int_hi[i] = b

    # -- propagation and search ------------------------------------------------

    def _propagate(self) -> bool:
        try:
            while self.queue:
                c = self.queue.popleft()
                self.inqueue.discard(c.cid)
                c.propagate(self)
        except _Conflict:
            self.queue.clear()
            self.inqueue.clear()
            return False
        return True

    def _is_fixed(self, var: Var) -> bool:
        if var.kind == "b":
            return bool(self.bool_hz[var.index]) != bool(self.bool_ho[var.index])
        if var.kind == "m":
            return int(self.multi_dom[var.index].sum()) == 1
        return self.int_lo[var.index] == self.int_hi[var.index]

    def _domain_values(self, var: Var) -> list[int]:
        if var.kind == "b":
            vals = []
            if self.bool_hz[var.index]:
                vals.append(0)
            if self.bool_ho[var.index]:
                vals.append(1)
            return vals
        if var.kind == "m":
            return [int(v) for v in np.flatnonzero(self.multi_dom[var.index])]
        return list(range(int(self.int_lo[var.index]), int(self.int_hi[var.index]) + 1))

    def _decision_vars(self) -> list[Var]:
        out = [Var("b", i) for i, s in enumerate(self.model.bool_search) if s]
        out += [Var("m", i) for i, s in enumerate(self.model.multi_search) if s]
        out += [Var("i", i) for i, s in enumerate(self.model.int_search) if s]
        return out

    def _solution(self) -> Solution:
        bools = np.where(self.bool_ho, 1, 0)
        bools[self.bool_hz & self.bool_ho] = -1
        multis = np.array(
            [int(np.flatnonzero(d)[0]) if d.sum() == 1 else -1 for d in self.multi_dom],
            dtype=np.int64,
        )
        ints = [(int(lo), int(hi)) for lo, hi in zip(self.int_lo, self.int_hi)]
        return Solution(bools, multis, ints)

    def solve(self) -> tuple[str, Solution | None, SearchStats]:
        stats = SearchStats()
        start = time.monotonic()
        order = self._decision_vars()
        self.rng.shuffle(order)

        for c in self.constraints:
            self.inqueue.add(c.cid)
            self.queue.append(c)
        if not self._propagate():
            stats.status = UNSAT
            stats.elapsed_s = time.monotonic() - start
            return UNSAT, None, stats

        def next_unfixed(from_pos: int) -> int:
            pos = from_pos
            while pos < len(order) and self._is_fixed(order[pos]):
                pos += 1
            return pos

        frames: list[_Frame] = []
        pos = next_unfixed(0)
        if pos == len(order):
            stats.status = SAT
            stats.elapsed_s = time.monotonic() - start
            return SAT, self._solution(), stats
        values = self._domain_values(order[pos])
        self.rng.shuffle(values)
        frames.append(_Frame(order[pos], values, scan_from=pos))

        while frames:
            frame = frames[-1]
            advanced = False
            while frame.next_value < len(frame.values):
                if self.node_limit is not None and stats.nodes >= self.node_limit:
                    stats.status = LIMIT
                    stats.elapsed_s = time.monotonic() - start
                    return LIMIT, None, stats
                if (
                    self.time_limit_s is not None
                    and time.monotonic() - start > self.time_limit_s
                ):
                    stats.status = LIMIT
                    stats.elapsed_s = time.monotonic() - start
                    return LIMIT, None, stats
                v = frame.values[frame.next_value]
                frame.next_value += 1
                frame.mark = len(self.trail)
                stats.nodes += 1
                try:
                    self._assign(frame.var, v)
                    ok = self._propagate()
                except _Conflict:
                    self.queue.clear()
                    self.inqueue.clear()
                    ok = False
                if ok:
                    advanced = True
                    break
                stats.backtracks += 1
                self._undo_to(frame.mark)
            if not advanced:
                frames.pop()
                if frames:
                    self._undo_to(frames[-1].mark)
                continue
            pos = next_unfixed(frame.scan_from)
            if pos == len(order):
                stats.status = SAT
                stats.elapsed_s = time.monotonic() - start
                return SAT, self._solution(), stats
            values = self._domain_values(order[pos])
            self.rng.shuffle(values)
            frames.append(_Frame(order[pos], values, scan_from=pos))

        stats.status = UNSAT
        stats.elapsed_s = time.monotonic() - start
        return UNSAT, None, stats


def solve(model: Model, seed: int = 0, node_limit=None, time_limit_s=None):
    """Run one search; returns (status, solution-or-None, SearchStats)."""
    return Solver(model, seed, node_limit, time_limit_s).solve()
