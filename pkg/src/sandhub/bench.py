"""Native half of the performance methodology.

Four workloads — matrix multiplication, simulated coin flips, matrix
inversion, and list summation — run for a fixed number of iterations per
size, timed with the monotonic high-resolution clock. The same workloads run
inside the browser sandbox, which exports its timings as a CSV with the same
columns; compare_environments() then reports the sandbox/native median ratio
per (workload, size) cell.

Each workload asserts a correctness gate before any timing loop; a failed
gate aborts the workload with no output. Input generation is seeded and
deterministic. Benchmarks run strictly single-threaded: the BLAS thread cap
below is set before numpy is imported, mirroring how the native reference
numbers are meant to be collected.
"""

from __future__ import annotations

import math
import os
import random
import time
from dataclasses import dataclass

os.environ.setdefault("OPENBLAS_NUM_THREADS", "1")
os.environ.setdefault("OMP_NUM_THREADS", "1")
os.environ.setdefault("MKL_NUM_THREADS", "1")

import numpy as np
from enum import Enum
from typing import Callable, Iterable, Sequence, TextIO

DEFAULT_ITERATIONS = 100
DEFAULT_MEMORY_BUDGET_BYTES = 1 << 30

CSV_HEADER = "environment,kind,size,iteration,elapsed_ns"

# Rough per-element footprints used by the pre-allocation refusal check.
_FLOAT64 = 8
_PY_OBJECT_ESTIMATE = 64


class BenchError(Exception):
    pass


class SizeTooLargeForMemory(BenchError):
    """Refused before allocation: the workload would exceed the memory budget."""


class GateFailure(BenchError):
    """A correctness gate failed; no timings were recorded."""


class SingularMatrix(BenchError):
    pass


class EmptyRecordSet(BenchError):
    pass


class NoOverlap(BenchError):
    """The two CSVs share no (kind, size) cell."""


class ParseError(BenchError):
    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class WorkloadKind(str, Enum):
    MATMUL = "matmul"
    COIN_FLIPS = "coinflips"
    MAT_INVERSE = "matinverse"
    LIST_SUM = "listsum"


@dataclass(frozen=True)
class WorkloadSpec:
    kind: WorkloadKind
    size: int
    iterations: int = DEFAULT_ITERATIONS
    seed: int = 0
    memory_budget_bytes: int = DEFAULT_MEMORY_BUDGET_BYTES

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValueError("size must be >= 1")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")


@dataclass(frozen=True)
class BenchmarkRecord:
    environment: str
    kind: str
    size: int
    iteration: int
    elapsed_ns: int


def _check_memory(spec: WorkloadSpec, needed_bytes: int) -> None:
    if needed_bytes > spec.memory_budget_bytes:
        raise SizeTooLargeForMemory(
            f"{spec.kind.value} at size {spec.size} needs ~{needed_bytes} bytes;"
            f" budget is {spec.memory_budget_bytes}"
        )


def _record(spec: WorkloadSpec, environment: str, iteration: int, elapsed_ns: int) -> BenchmarkRecord:
    # Floor at 1 ns: the clock is monotonic but quantised.
    return BenchmarkRecord(environment, spec.kind.value, spec.size, iteration, max(1, elapsed_ns))


# -- matrix multiplication ----------------------------------------------------


def run_matmul(spec: WorkloadSpec, environment: str = "native") -> list[BenchmarkRecord]:
    """Time n x n @ n x n products of freshly generated uniform matrices.

    Generation is excluded from the timed region; only the product kernel is
    measured.
    """
    assert spec.kind is WorkloadKind.MATMUL
    _check_memory(spec, 3 * spec.size * spec.size * _FLOAT64)

    identity = np.eye(min(spec.size, 64))
    if not np.array_equal(identity @ identity, identity):
        raise GateFailure("identity product gate failed")

    rng = np.random.default_rng(spec.seed)
    records = []
    for i in range(spec.iterations):
        a = rng.random((spec.size, spec.size))
        b = rng.random((spec.size, spec.size))
        start = time.perf_counter_ns()
        a @ b
        records.append(_record(spec, environment, i, time.perf_counter_ns() - start))
    return records


# -- simulated coin flips -------------------------------------------------------


def _coin_vector(rng: random.Random, size: int) -> list[str]:
    return rng.choices(("H", "T"), k=size)


def run_coin_flips(spec: WorkloadSpec, environment: str = "native") -> list[BenchmarkRecord]:
    """Time building a vector of "H"/"T" tokens and counting the heads.

    Vector construction is part of the measured workload.
    """
    assert spec.kind is WorkloadKind.COIN_FLIPS
    _check_memory(spec, spec.size * _PY_OBJECT_ESTIMATE)

    gate_rng = random.Random(spec.seed)
    if _coin_vector(gate_rng, 0).count("H") != 0:
        raise GateFailure("empty vector gate failed")
    sample = _coin_vector(gate_rng, 1000)
    recount = sum(1 for token in sample if token == "H")
    if set(sample) - {"H", "T"} or sample.count("H") != recount:
        raise GateFailure("token count gate failed")

    rng = random.Random(spec.seed)
    records = []
    for i in range(spec.iterations):
        start = time.perf_counter_ns()
        vector = _coin_vector(rng, spec.size)
        vector.count("H")
        records.append(_record(spec, environment, i, time.perf_counter_ns() - start))
        del vector
    return records


# -- matrix inversion -----------------------------------------------------------


def _dominated_matrix(rng: np.random.Generator, size: int, dominate: bool) -> np.ndarray:
    matrix = rng.random((size, size))
    if dominate:
        # Adding n to the diagonal guarantees strict diagonal dominance, hence
        # invertibility, for entries in [0, 1).
        matrix[np.diag_indices(size)] += size
    return matrix


def run_mat_inverse(
    spec: WorkloadSpec, environment: str = "native", diagonally_dominate: bool = True
) -> list[BenchmarkRecord]:
    """Time inverting freshly generated square matrices (inversion only)."""
    assert spec.kind is WorkloadKind.MAT_INVERSE
    _check_memory(spec, 3 * spec.size * spec.size * _FLOAT64)

    gate_rng = np.random.default_rng(spec.seed)
    gate_matrix = _dominated_matrix(gate_rng, spec.size, diagonally_dominate)
    try:
        gate_inverse = np.linalg.inv(gate_matrix)
    except np.linalg.LinAlgError:
        raise SingularMatrix(f"matrix of size {spec.size} is singular") from None
    residual = np.max(np.abs(gate_matrix @ gate_inverse - np.eye(spec.size)))
    if residual >= 1e-6:
        raise GateFailure(f"inverse residual {residual:.2e} exceeds 1e-6")

    rng = np.random.default_rng(spec.seed)
    records = []
    for i in range(spec.iterations):
        matrix = _dominated_matrix(rng, spec.size, diagonally_dominate)
        try:
            start = time.perf_counter_ns()
            np.linalg.inv(matrix)
            elapsed = time.perf_counter_ns() - start
        except np.linalg.LinAlgError:
            raise SingularMatrix(f"matrix of size {spec.size} is singular") from None
        records.append(_record(spec, environment, i, elapsed))
    return records


# -- list summation ----------------------------------------------------------------


def _number_list(rng: random.Random, size: int) -> list[float]:
    return [rng.random() for _ in range(size)]


def run_list_sum(spec: WorkloadSpec, environment: str = "native") -> list[BenchmarkRecord]:
    """Time the built-in sum over freshly generated lists (summation only)."""
    assert spec.kind is WorkloadKind.LIST_SUM
    _check_memory(spec, spec.size * _PY_OBJECT_ESTIMATE)

    gate_rng = random.Random(spec.seed)
    singleton = _number_list(gate_rng, 1)
    if sum(singleton) != singleton[0]:
        raise GateFailure("singleton sum gate failed")
    gate_list = _number_list(gate_rng, spec.size)
    total = sum(gate_list)
    if not math.isclose(total, math.fsum(gate_list), rel_tol=1e-9, abs_tol=1e-9):
        raise GateFailure("sum disagrees with compensated summation")
    if spec.size >= 10**6 and not 0.49 <= total / spec.size <= 0.51:
        raise GateFailure(f"mean {total / spec.size:.4f} outside [0.49, 0.51]")

    rng = random.Random(spec.seed)
    records = []
    for i in range(spec.iterations):
        values = _number_list(rng, spec.size)
        start = time.perf_counter_ns()
        sum(values)
        records.append(_record(spec, environment, i, time.perf_counter_ns() - start))
        del values
    return records


RUNNERS: dict[WorkloadKind, Callable[..., list[BenchmarkRecord]]] = {
    WorkloadKind.MATMUL: run_matmul,
    WorkloadKind.COIN_FLIPS: run_coin_flips,
    WorkloadKind.MAT_INVERSE: run_mat_inverse,
    WorkloadKind.LIST_SUM: run_list_sum,
}

DEFAULT_SIZES: dict[WorkloadKind, tuple[int, ...]] = {
    WorkloadKind.MATMUL: (64, 128, 256),
    WorkloadKind.MAT_INVERSE: (64, 128, 256),
    WorkloadKind.COIN_FLIPS: (10_000, 100_000, 1_000_000),
    WorkloadKind.LIST_SUM: (10_000, 100_000, 1_000_000),
}


def run_sweep(
    kind: WorkloadKind,
    sizes: Sequence[int],
    iterations: int = DEFAULT_ITERATIONS,
    seed: int = 0,
    environment: str = "native",
    memory_budget_bytes: int = DEFAULT_MEMORY_BUDGET_BYTES,
) -> list[BenchmarkRecord]:
    """One workload across a size sweep; one record per (size, iteration)."""
    runner = RUNNERS[kind]
    records: list[BenchmarkRecord] = []
    for size in sizes:
        spec = WorkloadSpec(
            kind=kind,
            size=size,
            iterations=iterations,
            seed=seed,
            memory_budget_bytes=memory_budget_bytes,
        )
        records.extend(runner(spec, environment=environment))
    return records


# -- CSV and summaries ------------------------------------------------------------


def emit_csv(records: Iterable[BenchmarkRecord], out: TextIO) -> None:
    """Write records as CSV: header + one row per record, LF line endings."""
    out.write(CSV_HEADER + "\n")
    for r in records:
        out.write(f"{r.environment},{r.kind},{r.size},{r.iteration},{r.elapsed_ns}\n")


def write_csv(records: Iterable[BenchmarkRecord], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        emit_csv(records, fh)


def parse_csv(path: str) -> list[BenchmarkRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ParseError(f"expected header {CSV_HEADER!r}", 1)
    for number, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 5:
            raise ParseError(f"expected 5 fields, got {len(parts)}", number)
        environment, kind, size, iteration, elapsed = parts
        try:
            records.append(
                BenchmarkRecord(environment, kind, int(size), int(iteration), int(elapsed))
            )
        except ValueError as exc:
            raise ParseError(str(exc), number) from None
    return records


def nearest_rank(values: Sequence[int], percentile: float) -> int:
    """Nearest-rank percentile: the ceil(p/100 * N)-th smallest value."""
    ordered = sorted(values)
    rank = max(1, math.ceil(percentile / 100 * len(ordered)))
    return ordered[rank - 1]


@dataclass(frozen=True)
class SummaryStats:
    count: int
    min_ns: int
    median_ns: int
    p95_ns: int
    max_ns: int


def summarize(records: Sequence[BenchmarkRecord]) -> dict[tuple[str, int, str], SummaryStats]:
    """Per-(kind, size, environment) distribution summary."""
    if not records:
        raise EmptyRecordSet("no records to summarize")
    cells: dict[tuple[str, int, str], list[int]] = {}
    for r in records:
        cells.setdefault((r.kind, r.size, r.environment), []).append(r.elapsed_ns)
    return {
        key: SummaryStats(
            count=len(values),
            min_ns=min(values),
            median_ns=nearest_rank(values, 50),
            p95_ns=nearest_rank(values, 95),
            max_ns=max(values),
        )
        for key, values in sorted(cells.items())
    }


@dataclass(frozen=True)
class ComparisonCell:
    kind: str
    size: int
    native_median_ns: int
    sandbox_median_ns: int
    ratio: float
    sandbox_faster: bool


def compare_environments(native_csv: str, sandbox_csv: str) -> list[ComparisonCell]:
    """Median sandbox/native ratio per overlapping (kind, size) cell.

    Cells where the sandbox is faster are flagged, not dropped.
    """
    native = summarize(parse_csv(native_csv))
    sandbox = summarize(parse_csv(sandbox_csv))
    native_cells = {(kind, size): stats for (kind, size, _), stats in native.items()}
    sandbox_cells = {(kind, size): stats for (kind, size, _), stats in sandbox.items()}
    overlap = sorted(set(native_cells) & set(sandbox_cells))
    if not overlap:
        raise NoOverlap("the two files share no (kind, size) cell")
    cells = []
    for kind, size in overlap:
        native_median = native_cells[(kind, size)].median_ns
        sandbox_median = sandbox_cells[(kind, size)].median_ns
        ratio = sandbox_median / native_median
        cells.append(
            ComparisonCell(
                kind=kind,
                size=size,
                native_median_ns=native_median,
                sandbox_median_ns=sandbox_median,
                ratio=ratio,
                sandbox_faster=ratio < 1.0,
            )
        )
    return cells


def render_comparison(cells: Sequence[ComparisonCell]) -> str:
    lines = [
        "workload        size  native-median-ns  sandbox-median-ns     ratio",
    ]
    for c in cells:
        flag = "  (sandbox faster)" if c.sandbox_faster else ""
        lines.append(
            f"{c.kind:<12} {c.size:>8}  {c.native_median_ns:>16}  {c.sandbox_median_ns:>17}"
            f"  {c.ratio:>8.2f}{flag}"
        )
    return "\n".join(lines) + "\n"


def render_summary(stats: dict[tuple[str, int, str], SummaryStats]) -> str:
    lines = [
        "environment  workload        size  count    min-ns   median-ns      p95-ns      max-ns",
    ]
    for (kind, size, environment), s in stats.items():
        lines.append(
            f"{environment:<11}  {kind:<12} {size:>8}  {s.count:>5}  {s.min_ns:>8}  {s.median_ns:>10}"
            f"  {s.p95_ns:>10}  {s.max_ns:>10}"
        )
    return "\n".join(lines) + "\n"
