"""Brute-force ground truth used by every test suite.

Everything here works by exhaustive enumeration or exact integer linear
algebra and deliberately shares no code with the flow/graph modules it
checks.  Hard size guards refuse inputs that would silently take hours.

Window tuples are (s, k, l, u) with a 1-based start index s.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from math import prod

import numpy as np

_ENUM_GUARD = 2**20
_TU_GUARD = 8


# ---------------------------------------------------------------------------
# constraint semantics (reference arithmetic)

def window_sums(assignment, k: int) -> list[int]:
    return [sum(assignment[i : i + k]) for i in range(len(assignment) - k + 1)]


def sequence_ok(assignment, k: int, l: int, u: int) -> bool:
    return all(l <= s <= u for s in window_sums(assignment, k))


def total_violation(assignment, k: int, l: int, u: int) -> int:
    return sum(max(l - s, s - u, 0) for s in window_sums(assignment, k))


def windows_ok(assignment, windows) -> bool:
    """Arbitrary-window check; windows are (s, k, l, u), s 1-based."""
    for s, k, l, u in windows:
        total = sum(assignment[s - 1 : s - 1 + k])
        if not l <= total <= u:
            return False
    return True


# ---------------------------------------------------------------------------
# domain-consistency / bounds-consistency enumeration

def dc_by_enumeration(predicate, domains):
    """Pruned domains (value kept iff it lies on a satisfying assignment),
    or None when no assignment satisfies the predicate."""
    sizes = [len(d) for d in domains]
    if prod(sizes) > _ENUM_GUARD:
        raise ValueError("search space exceeds enumeration guard")
    ordered = [sorted(d) for d in domains]
    supported: list[set[int]] = [set() for _ in domains]
    full = sum(sizes)
    found = 0
    for assignment in itertools.product(*ordered):
        if predicate(assignment):
            for i, v in enumerate(assignment):
                if v not in supported[i]:
                    supported[i].add(v)
                    found += 1
            if found == full:
                break
    if not any(supported):
        return None if domains else []
    return supported


def bc_by_enumeration(lows, highs, windows):
    """Tightened interval bounds under the window-sum constraints, or None."""
    lows = np.asarray(lows, dtype=np.int64)
    highs = np.asarray(highs, dtype=np.int64)
    sizes = highs - lows + 1
    if np.any(sizes <= 0):
        raise ValueError("empty input interval")
    if prod(sizes.tolist()) > _ENUM_GUARD:
        raise ValueError("search space exceeds enumeration guard")
    n = len(lows)
    axes = [np.arange(lo, hi + 1, dtype=np.int64) for lo, hi in zip(lows, highs)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    ok = np.ones(len(grid), dtype=bool)
    for s, k, l, u in windows:
        sums = grid[:, s - 1 : s - 1 + k].sum(axis=1)
        ok &= (sums >= l) & (sums <= u)
    if not ok.any():
        return None
    sat = grid[ok]
    return sat.min(axis=0), sat.max(axis=0)


def min_violation_by_enumeration(n, k, l, u, domains):
    """Minimum total window violation over all completions of `domains`."""
    sizes = [len(d) for d in domains]
    if prod(sizes) > _ENUM_GUARD:
        raise ValueError("search space exceeds enumeration guard")
    best = None
    for assignment in itertools.product(*[sorted(d) for d in domains]):
        cost = total_violation(assignment, k, l, u)
        if best is None or cost < best:
            best = cost
            if best == 0:
                break
    return best


@lru_cache(maxsize=32)
def assignment_table(n: int) -> np.ndarray:
    """All 2**n Boolean assignments as a (2**n, n) uint8 matrix."""
    if n > 20:
        raise ValueError("assignment table exceeds enumeration guard")
    codes = np.arange(2**n, dtype=np.uint32)
    return ((codes[:, None] >> np.arange(n, dtype=np.uint32)) & 1).astype(np.uint8)


class SequenceDcOracle:
    """Batched form of dc_by_enumeration for one Boolean Sequence cell.

    The satisfying-assignment table is built once, so checking many domain
    stores against the same (n, k, l, u) stays cheap.
    """

    def __init__(self, n: int, k: int, l: int, u: int):
        bits = assignment_table(n)
        m = n - k + 1
        win = np.zeros((n, m), dtype=np.int16)
        for j in range(m):
            win[j : j + k, j] = 1
        sums = bits.astype(np.int16) @ win
        self.bits = bits.astype(np.int32)
        self.bitcols = [bits[:, i].astype(bool) for i in range(n)]
        self.sat = ((sums >= l) & (sums <= u)).all(axis=1)
        self.n = n

    def _rows(self, has_zero, has_one):
        rows = self.sat
        for i in range(self.n):
            if not has_zero[i]:
                rows = rows & self.bitcols[i]
            elif not has_one[i]:
                rows = rows & ~self.bitcols[i]
        return rows

    def dc(self, has_zero, has_one):
        """(kept_zero, kept_one) boolean arrays, or None if inconsistent."""
        rows = self._rows(has_zero, has_one)
        cnt = int(rows.sum())
        if cnt == 0:
            return None
        ones = rows.astype(np.int32) @ self.bits
        return ones < cnt, ones > 0


class SoftSequenceOracle:
    """Violation-aware twin of SequenceDcOracle for one (n, k, l, u) cell."""

    def __init__(self, n: int, k: int, l: int, u: int):
        bits = assignment_table(n)
        m = n - k + 1
        win = np.zeros((n, m), dtype=np.int16)
        for j in range(m):
            win[j : j + k, j] = 1
        sums = bits.astype(np.int16) @ win
        viol = np.maximum(l - sums, 0) + np.maximum(sums - u, 0)
        self.violation = viol.sum(axis=1).astype(np.int32)
        self.bits = bits.astype(np.int32)
        self.bitcols = [bits[:, i].astype(bool) for i in range(n)]
        self.n = n

    def _rows(self, has_zero, has_one):
        rows = np.ones(len(self.violation), dtype=bool)
        for i in range(self.n):
            if not has_zero[i]:
                rows = rows & self.bitcols[i]
            elif not has_one[i]:
                rows = rows & ~self.bitcols[i]
        return rows

    def min_violation(self, has_zero, has_one) -> int:
        rows = self._rows(has_zero, has_one)
        return int(self.violation[rows].min())

    def dc(self, has_zero, has_one, t_hi: int):
        """Threshold pruning: value kept iff some completion through it has
        violation <= t_hi.  Returns (kept_zero, kept_one) or None."""
        rows = self._rows(has_zero, has_one) & (self.violation <= t_hi)
        cnt = int(rows.sum())
        if cnt == 0:
            return None
        ones = rows.astype(np.int32) @ self.bits
        return ones < cnt, ones > 0


# ---------------------------------------------------------------------------
# exact integer linear algebra

def determinant(matrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    m = [[int(x) for x in row] for row in matrix]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    denom = 1
    for j in range(n - 1):
        pivot_row = next((r for r in range(j, n) if m[r][j] != 0), None)
        if pivot_row is None:
            return 0
        if pivot_row != j:
            m[j], m[pivot_row] = m[pivot_row], m[j]
            sign = -sign
        for r in range(j + 1, n):
            for c in range(j + 1, n):
                m[r][c] = (m[r][c] * m[j][j] - m[r][j] * m[j][c]) // denom
            m[r][j] = 0
        denom = m[j][j]
    return sign * m[-1][-1]


def is_totally_unimodular(matrix) -> bool:
    """Brute force over all square submatrices (dimensions capped at 8)."""
    mat = np.asarray(matrix, dtype=np.int64)
    if mat.ndim != 2:
        raise ValueError("matrix must be 2-d")
    rows, cols = mat.shape
    if rows > _TU_GUARD or cols > _TU_GUARD:
        raise ValueError("matrix too large for brute-force TU check")
    if not np.isin(mat, (-1, 0, 1)).all():
        raise ValueError("entries must be in {-1, 0, 1}")
    for size in range(2, min(rows, cols) + 1):
        for ridx in itertools.combinations(range(rows), size):
            sub_rows = mat[list(ridx)]
            for cidx in itertools.combinations(range(cols), size):
                det = determinant(sub_rows[:, list(cidx)])
                if det not in (-1, 0, 1):
                    return False
    return True


def transform_consecutive_ones(matrix, rhs):
    """Row-differencing of a consecutive-ones system into a network matrix.

    Appends a zero row and replaces each row by (row_i - row_{i-1}).  The
    input must have, per column, one contiguous block of equal +1 or -1
    entries; the output then has exactly one +1 and one -1 per column and
    the same solution set.
    """
    mat = np.asarray(matrix, dtype=np.int64)
    vec = np.asarray(rhs, dtype=np.int64)
    if mat.ndim != 2 or vec.shape != (mat.shape[0],):
        raise ValueError("matrix/rhs shapes do not agree")
    for j in range(mat.shape[1]):
        nz = np.flatnonzero(mat[:, j])
        if len(nz) == 0:
            raise ValueError(f"column {j} is all zero")
        block = mat[nz, j]
        contiguous = nz[-1] - nz[0] + 1 == len(nz)
        if not contiguous or abs(block[0]) != 1 or not (block == block[0]).all():
            raise ValueError(f"column {j} lacks the consecutive-ones property")
    padded = np.vstack([mat, np.zeros((1, mat.shape[1]), dtype=np.int64)])
    shifted = np.vstack([np.zeros((1, mat.shape[1]), dtype=np.int64), mat])
    out = padded - shifted
    out_rhs = np.concatenate([vec, [0]]) - np.concatenate([[0], vec])
    assert ((out == 1).sum(axis=0) == 1).all() and ((out == -1).sum(axis=0) == 1).all()
    return out, out_rhs


def sequence_lp_system(n: int, k: int, l: int, u: int):
    """Equality system of a uniform-window Sequence with slack/surplus columns.

    Columns are X_1..X_n then Y_1, Z_1, ..., Y_m, Z_m; rows alternate the
    lower-bound (-Y_j) and upper-bound (+Z_j) forms of each window.
    """
    m = n - k + 1
    mat = np.zeros((2 * m, n + 2 * m), dtype=np.int64)
    rhs = np.zeros(2 * m, dtype=np.int64)
    for j in range(m):
        mat[2 * j, j : j + k] = 1
        mat[2 * j, n + 2 * j] = -1
        rhs[2 * j] = l
        mat[2 * j + 1, j : j + k] = 1
        mat[2 * j + 1, n + 2 * j + 1] = 1
        rhs[2 * j + 1] = u
    return mat, rhs


def gen_sequence_matrix(n: int, windows) -> np.ndarray:
    """Inequality matrix (>= form) of a multi-window constraint: per window
    a +coverage row for the lower bound and a -coverage row for the upper."""
    rows = []
    for w in windows:
        s, k = w[0], w[1]
        cover = np.zeros(n, dtype=np.int64)
        cover[s - 1 : s - 1 + k] = 1
        rows.append(cover)
        rows.append(-cover)
    return np.array(rows, dtype=np.int64)


# ---------------------------------------------------------------------------
# brute-force flow enumeration

def iter_integral_flows(node_count: int, edges, supply=None):
    """Yield every integral flow (tuple of per-edge amounts) satisfying
    capacities and conservation.  Edges are (tail, head, lower, upper, cost)."""
    supply = supply or {}
    sizes = [up - lo + 1 for _, _, lo, up, _ in edges]
    if prod(sizes) > _ENUM_GUARD:
        raise ValueError("flow space exceeds enumeration guard")
    net = [0] * node_count
    for node, s in supply.items():
        net[node] += s
    last_touch = [-1] * node_count
    for i, (t, h, _, _, _) in enumerate(edges):
        last_touch[t] = i
        last_touch[h] = i
    for v in range(node_count):
        if last_touch[v] == -1 and net[v] != 0:
            return
    cur: list[int] = []

    def rec(i: int):
        if i == len(edges):
            yield tuple(cur)
            return
        t, h, lo, up, _ = edges[i]
        for f in range(lo, up + 1):
            net[t] -= f
            net[h] += f
            cur.append(f)
            if (last_touch[t] != i or net[t] == 0) and (
                last_touch[h] != i or net[h] == 0
            ):
                yield from rec(i + 1)
            cur.pop()
            net[t] += f
            net[h] -= f

    yield from rec(0)


def min_cost_by_flow_enumeration(node_count: int, edges, supply=None):
    """Minimum flow cost over all integral flows, or None when infeasible."""
    best = None
    costs = [e[4] for e in edges]
    for flow in iter_integral_flows(node_count, edges, supply):
        c = sum(w * f for w, f in zip(costs, flow))
        if best is None or c < best:
            best = c
    return best
