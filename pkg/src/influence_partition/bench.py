"""Experiment driver: load a graph, run partitioners over m / dt sweeps, report.

Usage::

    influence-partition --synthetic two_block:n=300,p_in=0.05,p_out=0.002 \\
        --algorithm continuous-greedy,random --m 1,2,3 --dt 0.2,0.1,0.05 --out results/
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import baselines
from .graph import (DirectedGraph, EdgeListError, GraphValidationError, derive_lt_weights,
                    dump_edge_list, load_edge_list, write_id_map)
from .greedy import (ConfigurationError, best_of_k_roundings, continuous_greedy, evaluate,
                     steps_for, write_assignment_csv)
from .influence import DEFAULT_SAMPLES

log = logging.getLogger(__name__)

ALGORITHMS = ("continuous-greedy", "random", "label-prop", "samkcp", "mamkcp")
CSV_COLUMNS = ("dataset", "algorithm", "m", "dt", "objective", "std_error", "seconds", "seed")
_ALGO_CODE = {name: k for k, name in enumerate(ALGORITHMS)}
_EVAL_TAG = 0xE7A1


class UsageError(ValueError):
    pass


@dataclass
class ExperimentSpec:
    input: str | None = None
    undirected: bool = False
    algorithms: list[str] = field(default_factory=lambda: ["continuous-greedy"])
    m_values: list[int] = field(default_factory=lambda: [2])
    dt_values: list[str] = field(default_factory=lambda: ["0.05"])
    mc_samples: int = DEFAULT_SAMPLES
    roundings: int = 1
    seed: int = 0
    out: str | None = None
    synthetic: str | None = None
    lpa_iterations: int = 100
    jobs: int = 1

    def validate(self) -> None:
        if (self.input is None) == (self.synthetic is None):
            raise UsageError("give exactly one of --input or --synthetic")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise UsageError(f"unknown algorithm {a!r}; choose from {', '.join(ALGORITHMS)}")
        if not self.m_values or any(m < 1 for m in self.m_values):
            raise UsageError("every m must be >= 1")
        if self.mc_samples < 1:
            raise UsageError("--mc-samples must be >= 1")
        if self.roundings < 1:
            raise UsageError("--roundings must be >= 1")
        for dt in self.dt_values:
            try:
                steps_for(_parse_dt(dt))
            except ConfigurationError as exc:
                raise UsageError(str(exc)) from None

    @property
    def dataset_name(self) -> str:
        if self.synthetic:
            return "synthetic-" + self.synthetic.split(":")[0]
        return Path(self.input).stem


@dataclass
class ResultRecord:
    dataset: str
    algorithm: str
    m: int
    dt: float | None
    objective: float
    std_error: float
    seconds: float
    seed: int

    def row(self) -> list:
        return [self.dataset, self.algorithm, self.m, "" if self.dt is None else repr(self.dt),
                repr(self.objective), repr(self.std_error), f"{self.seconds:.3f}", self.seed]


def _parse_dt(text) -> Fraction | float:
    text = str(text).strip()
    return Fraction(text) if "/" in text else float(text)


def _parse_synthetic(text: str) -> tuple[str, dict[str, float]]:
    kind, _, rest = text.partition(":")
    params = {}
    for item in filter(None, rest.split(",")):
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"bad synthetic parameter {item!r}, expected key=value")
        try:
            params[key.strip()] = float(value)
        except ValueError:
            raise UsageError(f"synthetic parameter {key!r} is not a number") from None
    return kind.strip(), params


def generate_synthetic(kind: str, n: int, rng=None, **params) -> list[str]:
    """Directed edge-list lines for an Erdős–Rényi or planted two-block graph.

    ``erdos_renyi`` takes ``p``; ``two_block`` takes ``p_in`` and ``p_out`` and
    puts nodes ``0..n//2-1`` in the first block. Node declaration lines are
    included so isolated nodes survive.
    """
    if n < 1:
        raise UsageError("n must be >= 1")
    gen = np.random.default_rng(rng)
    if kind == "erdos_renyi":
        probs = {"p": params.get("p")}
    elif kind == "two_block":
        probs = {"p_in": params.get("p_in"), "p_out": params.get("p_out")}
    else:
        raise UsageError(f"unknown synthetic kind {kind!r}")
    for name, p in probs.items():
        if p is None or not 0.0 <= p <= 1.0:
            raise UsageError(f"{kind} needs {name} in [0, 1], got {p!r}")
    draw = gen.random((n, n))
    if kind == "erdos_renyi":
        adj = draw < probs["p"]
    else:
        block = np.arange(n) >= n // 2
        same = block[:, None] == block[None, :]
        adj = draw < np.where(same, probs["p_in"], probs["p_out"])
    np.fill_diagonal(adj, False)
    lines = [str(v) for v in range(n)]
    lines += [f"{u} {v}" for u, v in zip(*np.nonzero(adj))]
    return lines


def planted_blocks(n: int) -> np.ndarray:
    return (np.arange(n) >= n // 2).astype(np.int64)


def load_graph(spec: ExperimentSpec) -> DirectedGraph:
    if spec.synthetic:
        kind, params = _parse_synthetic(spec.synthetic)
        n = int(params.pop("n", 0))
        lines = generate_synthetic(kind, n, np.random.SeedSequence([spec.seed, 0x5EED]), **params)
        graph = load_edge_list(lines, directed=not spec.undirected)
    else:
        try:
            with open(spec.input) as fh:
                graph = load_edge_list(fh, directed=not spec.undirected)
        except OSError as exc:
            raise UsageError(f"cannot read {spec.input}: {exc}") from None
    if graph.node_count == 0:
        raise UsageError("the input graph is empty")
    if not graph.has_weights:
        graph = derive_lt_weights(graph)
    return graph


def _combinations(spec: ExperimentSpec):
    for algorithm in spec.algorithms:
        for m in spec.m_values:
            if algorithm == "continuous-greedy":
                for dt in spec.dt_values:
                    yield algorithm, m, dt
            else:
                yield algorithm, m, None


def _run_one(graph: DirectedGraph, spec: ExperimentSpec, algorithm: str, m: int, dt):
    k_steps = steps_for(_parse_dt(dt)) if dt is not None else 0
    opt_seed = np.random.SeedSequence([spec.seed, _ALGO_CODE[algorithm], m, k_steps])
    rng = np.random.default_rng(opt_seed)
    r = spec.mc_samples
    x1 = trace = None
    tic = time.perf_counter()
    if algorithm == "continuous-greedy":
        x1, trace = continuous_greedy(graph, m, _parse_dt(dt), r, rng)
        partition = best_of_k_roundings(x1, spec.roundings, graph, r, rng)
    elif algorithm == "random":
        partition = baselines.random_partition(graph, m, rng)
    elif algorithm == "label-prop":
        partition = baselines.label_propagation(graph, m, spec.lpa_iterations, rng, r)
    elif algorithm == "samkcp":
        partition = baselines.samkcp(graph, m, r, rng)
    else:
        partition = baselines.mamkcp(graph, m, r, rng)
    seconds = time.perf_counter() - tic
    # one evaluation stream for every combination, disjoint from all optimisation streams
    eval_seed = int(np.random.SeedSequence([spec.seed, _EVAL_TAG]).generate_state(1, np.uint64)[0])
    est = evaluate(graph, partition, r, eval_seed)
    record = ResultRecord(spec.dataset_name, algorithm, m,
                          None if dt is None else float(_parse_dt(dt)),
                          est.value, est.std_error, seconds, spec.seed)
    return record, partition, x1, trace


def _tag(algorithm: str, m: int, dt) -> str:
    tag = f"{algorithm}_m{m}"
    if dt is not None:
        tag += f"_dt{steps_for(_parse_dt(dt))}"
    return tag


def run_experiment(spec: ExperimentSpec, graph: DirectedGraph | None = None) -> list[ResultRecord]:
    """Run every (algorithm, m, dt) combination; write partitions and results if ``spec.out`` is set."""
    spec.validate()
    graph = graph if graph is not None else load_graph(spec)
    combos = list(_combinations(spec))
    if spec.jobs > 1:
        with ProcessPoolExecutor(spec.jobs) as pool:
            outputs = list(pool.map(_run_one, [graph] * len(combos), [spec] * len(combos),
                                    *zip(*combos)))
    else:
        outputs = [_run_one(graph, spec, *c) for c in combos]
    records = [o[0] for o in outputs]
    if spec.out:
        out = Path(spec.out)
        out.mkdir(parents=True, exist_ok=True)
        write_id_map(graph, out / "id_map.csv")
        if spec.synthetic:
            (out / f"{spec.dataset_name}.txt").write_text("\n".join(dump_edge_list(graph)) + "\n")
        for (algorithm, m, dt), (_, partition, x1, trace) in zip(combos, outputs):
            tag = _tag(algorithm, m, dt)
            partition.write_csv(out / f"partition_{tag}.csv", graph.labels)
            if x1 is not None:
                write_assignment_csv(x1, out / f"assignment_{tag}.csv", graph.labels)
                trace.write_log(out / f"trace_{tag}.log")
    return records


def emit_report(records: list[ResultRecord], out_dir, fmt: str = "csv",
                spec: ExperimentSpec | None = None) -> Path:
    if not records:
        raise UsageError("no records to report")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        path = out / "results.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_COLUMNS)
            for rec in records:
                w.writerow(rec.row())
    elif fmt == "json":
        path = out / "results.json"
        payload = {"spec": asdict(spec) if spec is not None else None,
                   "records": [asdict(r) for r in records]}
        path.write_text(json.dumps(payload, indent=2) + "\n")
    else:
        raise UsageError(f"unknown format {fmt!r}")
    return path


def read_json_report(path) -> tuple[dict | None, list[ResultRecord]]:
    payload = json.loads(Path(path).read_text())
    return payload["spec"], [ResultRecord(**r) for r in payload["records"]]


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _str_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="influence-partition",
        description="Partition a graph into m communities maximizing intra-community LT influence.")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", metavar="PATH", help="edge list: 'src dst [weight]' per line")
    src.add_argument("--synthetic", metavar="KIND:PARAMS",
                     help="e.g. erdos_renyi:n=100,p=0.05 or two_block:n=300,p_in=0.05,p_out=0.002")
    p.add_argument("--undirected", action="store_true", help="each line adds both directions")
    p.add_argument("--algorithm", type=_str_list, default=["continuous-greedy"],
                   help=f"comma-separated subset of {{{'|'.join(ALGORITHMS)}}}")
    p.add_argument("--m", type=_int_list, default=[2], help="community counts, e.g. 1,2,3")
    p.add_argument("--dt", type=_str_list, default=["0.05"], help="time steps 1/K, e.g. 0.2,1/20")
    p.add_argument("--mc-samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--roundings", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", metavar="DIR", default="results")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--lpa-iterations", type=int, default=100)
    p.add_argument("--jobs", type=int, default=1, help="parallel sweep combinations")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    spec = ExperimentSpec(input=args.input, undirected=args.undirected, algorithms=args.algorithm,
                          m_values=args.m, dt_values=args.dt, mc_samples=args.mc_samples,
                          roundings=args.roundings, seed=args.seed, out=args.out,
                          synthetic=args.synthetic, lpa_iterations=args.lpa_iterations,
                          jobs=args.jobs)
    try:
        records = run_experiment(spec)
        path = emit_report(records, spec.out, args.format, spec)
    except (UsageError, EdgeListError, GraphValidationError, ConfigurationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - reported as a runtime failure
        log.exception("run failed")
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3
    for rec in records:
        dt = "-" if rec.dt is None else f"{rec.dt:g}"
        print(f"{rec.algorithm:18s} m={rec.m} dt={dt:5s} objective={rec.objective:.3f} "
              f"± {rec.std_error:.3f}  ({rec.seconds:.1f}s)")
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
