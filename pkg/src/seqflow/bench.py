"""Random-instance benchmark harness and its command line.

The hard benchmark posts one Sequence per instance on n Boolean variables,
with the lower bound drawn uniformly from the open interval (0, k-delta)
and u = l + delta.  The soft benchmark posts m soft Sequences on n
variables with domains of size `domain_size`, one disjoint singleton value
set per constraint, rejecting draws whose lower bounds sum to k or more,
and allows violation cost up to 15% of the sequence length.

Instances serialize to line-oriented text (`seq n k l u`, `win s k l u` or
`softseq n k l u v thi` headers plus one `dom i lo hi` line per variable)
so runs are diffable and replayable.  Every draw derives from (seed, bench,
cell, index), so identical configurations produce byte-identical instances
and identical solved/backtrack columns.

CLI: seqflow-bench --bench hard --n 500 --k 7 --delta 1 --prop fb ...
Exit code 0 on completion, 2 on a configuration error.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from .rng import SplitMix64, mix_seed
from .slidingsum import WindowSpec
from .solver import Model, Solver

HARD_PROPS = {"fb": "flow", "ad": "among", "dual": "dual"}
SOFT_PROPS = {"fbs": "flow", "ads": "among"}

CSV_COLUMNS = [
    "bench", "n", "k", "delta", "m", "prop", "seed",
    "solved", "total", "avg_time_ms", "avg_backtracks",
]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class BenchConfig:
    bench: str
    ns: tuple[int, ...]
    ks: tuple[int, ...]
    deltas: tuple[int, ...]
    m: int = 1
    prop: str = "fb"
    seed: int = 0
    timeout_s: float = 300.0
    per_cell: int = 20
    domain_size: int = 5

    def __post_init__(self):
        if self.bench not in ("hard", "soft"):
            raise ConfigError(f"unknown bench {self.bench!r}")
        props = HARD_PROPS if self.bench == "hard" else SOFT_PROPS
        if self.prop not in props:
            raise ConfigError(
                f"propagator {self.prop!r} does not apply to the {self.bench} bench"
            )
        if self.per_cell < 1:
            raise ConfigError("need at least one instance per cell")
        if any(n < 1 for n in self.ns) or any(k < 1 for k in self.ks):
            raise ConfigError("n and k must be positive")
        for k in self.ks:
            for d in self.deltas:
                if d >= k:
                    raise ConfigError(f"delta {d} must be smaller than k {k}")
            for n in self.ns:
                if k > n:
                    raise ConfigError(f"k {k} exceeds n {n}")
        if self.bench == "hard" and self.m != 1:
            raise ConfigError("the hard bench uses a single constraint (m=1)")
        if self.bench == "soft" and not 1 <= self.m <= self.domain_size:
            raise ConfigError("need 1 <= m <= domain_size for disjoint value sets")

    def cells(self):
        for n in self.ns:
            for k in self.ks:
                for d in self.deltas:
                    yield (n, k, d)


@dataclass(frozen=True)
class Instance:
    """Plain description of one generated problem, independent of the
    propagator used to solve it."""

    bench: str
    n: int
    domain_hi: int                       # per-variable domain is [0, domain_hi]
    constraints: tuple                   # ('seq', k, l, u) | ('softseq', k, l, u, v, thi)

    def to_text(self) -> str:
        lines = []
        for con in self.constraints:
            if con[0] == "seq":
                _, k, l, u = con
                lines.append(f"seq {self.n} {k} {l} {u}")
            elif con[0] == "win":
                _, s, k, l, u = con
                lines.append(f"win {s} {k} {l} {u}")
            else:
                _, k, l, u, v, thi = con
                lines.append(f"softseq {self.n} {k} {l} {u} {v} {thi}")
        for i in range(self.n):
            lines.append(f"dom {i} 0 {self.domain_hi}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Instance":
        cons = []
        doms: dict[int, tuple[int, int]] = {}
        for line in text.splitlines():
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "seq":
                n, k, l, u = map(int, parts[1:])
                cons.append(("seq", k, l, u))
            elif parts[0] == "win":
                s, k, l, u = map(int, parts[1:])
                cons.append(("win", s, k, l, u))
            elif parts[0] == "softseq":
                n, k, l, u, v, thi = map(int, parts[1:])
                cons.append(("softseq", k, l, u, v, thi))
            elif parts[0] == "dom":
                i, lo, hi = map(int, parts[1:])
                doms[i] = (lo, hi)
            else:
                raise ValueError(f"unknown instance line {line!r}")
        if not doms:
            raise ValueError("instance has no dom lines")
        n = max(doms) + 1
        hi = doms[0][1]
        bench = "soft" if any(c[0] == "softseq" for c in cons) else "hard"
        return cls(bench, n, hi, tuple(cons))

    def to_model(self, prop: str) -> Model:
        model = Model()
        if self.bench == "hard":
            xs = model.add_bool_vars(self.n)
            method = HARD_PROPS[prop]
            for con in self.constraints:
                if con[0] == "seq":
                    _, k, l, u = con
                    model.add_sequence(xs, k, l, u, method=method)
                elif con[0] == "win":
                    raise ValueError("window instances need integer variables")
        else:
            xs = model.add_multi_vars(self.n, self.domain_hi + 1)
            method = SOFT_PROPS[prop]
            for con in self.constraints:
                _, k, l, u, v, thi = con
                t = model.add_int_var(0, thi)
                model.add_soft_sequence(
                    xs, k, l, u, t, method=method, value_set={v}
                )
        return model


def _draw_lower(rng: SplitMix64, k: int, delta: int) -> int:
    # uniform on the open interval (0, k-delta), clamped to stay positive
    return rng.randint(1, max(1, k - delta - 1))


def generate_instance(config: BenchConfig, cell, index: int) -> Instance:
    n, k, delta = cell
    bench_code = 0 if config.bench == "hard" else 1
    rng = SplitMix64(
        mix_seed(config.seed, bench_code, n, k, delta, config.m, index)
    )
    if config.bench == "hard":
        l = _draw_lower(rng, k, delta)
        u = l + delta
        if u > k:
            raise ConfigError(f"cell n={n} k={k} delta={delta} is unreachable")
        return Instance("hard", n, 1, (("seq", k, l, u),))
    if config.m * 1 >= k:
        raise ConfigError(
            f"cell k={k} cannot host {config.m} lower bounds summing below k"
        )
    while True:
        lowers = [_draw_lower(rng, k, delta) for _ in range(config.m)]
        if sum(lowers) < k:
            break
    if any(l + delta > k for l in lowers):
        raise ConfigError(f"cell n={n} k={k} delta={delta} is unreachable")
    thi = int(0.15 * n)
    cons = tuple(
        ("softseq", k, l, l + delta, v, thi) for v, l in enumerate(lowers)
    )
    return Instance("soft", n, config.domain_size - 1, cons)


def _instance_path(dir_: Path, config: BenchConfig, cell, index: int) -> Path:
    n, k, d = cell
    name = f"{config.bench}_n{n}_k{k}_d{d}_m{config.m}_i{index}.txt"
    return dir_ / name


def _obtain_instance(config, cell, index, instances_dir) -> Instance:
    if instances_dir is None:
        return generate_instance(config, cell, index)
    path = _instance_path(Path(instances_dir), config, cell, index)
    if path.exists():
        try:
            return Instance.from_text(path.read_text())
        except OSError as exc:
            raise RuntimeError(f"cannot read instance file {path}") from exc
    inst = generate_instance(config, cell, index)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(inst.to_text())
    except OSError as exc:
        raise RuntimeError(f"cannot write instance file {path}") from exc
    return inst


@dataclass
class CellResult:
    bench: str
    n: int
    k: int
    delta: int
    m: int
    prop: str
    seed: int
    solved: int = 0
    total: int = 0
    times_ms: list[float] = field(default_factory=list)
    backtracks: list[int] = field(default_factory=list)

    @property
    def avg_time_ms(self) -> float:
        return sum(self.times_ms) / len(self.times_ms) if self.times_ms else 0.0

    @property
    def avg_backtracks(self) -> float:
        return sum(self.backtracks) / len(self.backtracks) if self.backtracks else 0.0

    def as_row(self) -> list:
        return [
            self.bench, self.n, self.k, self.delta, self.m, self.prop, self.seed,
            self.solved, self.total,
            round(self.avg_time_ms, 1), round(self.avg_backtracks, 2),
        ]


def run_bench(config: BenchConfig, instances_dir=None, log=None) -> list[CellResult]:
    """Solve per-cell instance batches; averages cover solved instances only."""
    results = []
    for cell in config.cells():
        n, k, delta = cell
        res = CellResult(config.bench, n, k, delta, config.m, config.prop, config.seed)
        for index in range(config.per_cell):
            inst = _obtain_instance(config, cell, index, instances_dir)
            model = inst.to_model(config.prop)
            search_seed = mix_seed(config.seed, 7, n, k, delta, config.m, index)
            t0 = time.monotonic()
            status, sol, stats = Solver(
                model, seed=search_seed, time_limit_s=config.timeout_s
            ).solve()
            elapsed_ms = (time.monotonic() - t0) * 1000.0
            res.total += 1
            if status == "sat":
                if not model.check_solution(sol):
                    raise AssertionError("solver returned an invalid solution")
                res.solved += 1
                res.times_ms.append(elapsed_ms)
                res.backtracks.append(stats.backtracks)
        results.append(res)
        if log:
            log(format_table([res]))
    return results


def format_table(results) -> str:
    rows = [CSV_COLUMNS] + [[str(x) for x in r.as_row()] for r in results]
    widths = [max(len(row[i]) for row in rows) for i in range(len(CSV_COLUMNS))]
    return "\n".join(
        "  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in rows
    )


def write_csv(results, path) -> None:
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for r in results:
                writer.writerow(r.as_row())
    except OSError as exc:
        raise RuntimeError(f"cannot write CSV to {path}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="seqflow-bench",
        description="Random-instance benchmarks for the sequence propagators.",
    )
    p.add_argument("--bench", choices=["hard", "soft"], default="hard")
    p.add_argument("--n", type=int, nargs="*", default=[500], help="sequence lengths")
    p.add_argument("--k", type=int, nargs="*", default=[7], help="window lengths")
    p.add_argument("--delta", type=int, nargs="*", default=[1], help="u - l gaps")
    p.add_argument("--m", type=int, default=None,
                   help="constraints per instance (soft bench; default 4)")
    p.add_argument("--prop", choices=sorted(HARD_PROPS | SOFT_PROPS), default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--timeout-secs", type=float, default=300.0)
    p.add_argument("--per-cell", type=int, default=20)
    p.add_argument("--domain-size", type=int, default=5)
    p.add_argument("--out", type=str, default=None, help="CSV output path")
    p.add_argument("--instances-dir", type=str, default=None,
                   help="dump instances here, or reuse files already present")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    prop = args.prop or ("fb" if args.bench == "hard" else "fbs")
    m = args.m if args.m is not None else (1 if args.bench == "hard" else 4)
    try:
        config = BenchConfig(
            bench=args.bench,
            ns=tuple(args.n),
            ks=tuple(args.k),
            deltas=tuple(args.delta),
            m=m,
            prop=prop,
            seed=args.seed,
            timeout_s=args.timeout_secs,
            per_cell=args.per_cell,
            domain_size=args.domain_size,
        )
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    try:
        results = run_bench(config, instances_dir=args.instances_dir)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    print(format_table(results))
    if args.out:
        write_csv(results, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
