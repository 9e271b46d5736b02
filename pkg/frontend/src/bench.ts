/**
 * Sandbox-side timings. The four workloads mirror the native harness; the
 * records serialise to the identical CSV columns so the native CLI's compare
 * step can consume them directly. Export is a user-initiated download —
 * timings never travel to the server.
 */

export const CSV_HEADER = "environment,kind,size,iteration,elapsed_ns";

export type WorkloadKindName = "matmul" | "coinflips" | "matinverse" | "listsum";

export interface BenchmarkRecord {
  environment: string;
  kind: WorkloadKindName;
  size: number;
  iteration: number;
  elapsedNs: number;
}

export class GateFailure extends Error {}

/** Deterministic xorshift generator so runs are reproducible per seed. */
export function makeRng(seed: number): () => number {
  let state = (seed >>> 0) || 0x9e3779b9;
  return () => {
    state ^= state << 13;
    state >>>= 0;
    state ^= state >> 17;
    state ^= state << 5;
    state >>>= 0;
    return state / 0x100000000;
  };
}

function nowNs(): number {
  return Math.round(performance.now() * 1e6);
}

function randomMatrix(rng: () => number, n: number, dominate: boolean): number[][] {
  const matrix: number[][] = [];
  for (let i = 0; i < n; i++) {
    const row: number[] = [];
    for (let j = 0; j < n; j++) row.push(rng());
    if (dominate) row[i]! += n;
    matrix.push(row);
  }
  return matrix;
}

function matmul(a: number[][], b: number[][]): number[][] {
  const n = a.length;
  const out: number[][] = [];
  for (let i = 0; i < n; i++) {
    const row = new Array<number>(n).fill(0);
    for (let k = 0; k < n; k++) {
      const aik = a[i]![k]!;
      for (let j = 0; j < n; j++) row[j]! += aik * b[k]![j]!;
    }
    out.push(row);
  }
  return out;
}

/** Gauss-Jordan elimination with partial pivoting. */
function invert(matrix: number[][]): number[][] {
  const n = matrix.length;
  const work = matrix.map((row, i) => [
    ...row,
    ...Array.from({ length: n }, (_, j) => (i === j ? 1 : 0)),
  ]);
  for (let col = 0; col < n; col++) {
    let pivot = col;
    for (let row = col + 1; row < n; row++) {
      if (Math.abs(work[row]![col]!) > Math.abs(work[pivot]![col]!)) pivot = row;
    }
    if (work[pivot]![col] === 0) throw new GateFailure("singular matrix");
    [work[col], work[pivot]] = [work[pivot]!, work[col]!];
    const lead = work[col]![col]!;
    for (let j = 0; j < 2 * n; j++) work[col]![j]! /= lead;
    for (let row = 0; row < n; row++) {
      if (row === col) continue;
      const factor = work[row]![col]!;
      if (factor === 0) continue;
      for (let j = 0; j < 2 * n; j++) work[row]![j]! -= factor * work[col]![j]!;
    }
  }
  return work.map((row) => row.slice(n));
}

function identityResidual(a: number[][], inv: number[][]): number {
  const product = matmul(a, inv);
  let worst = 0;
  const n = a.length;
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < n; j++) {
      worst = Math.max(worst, Math.abs(product[i]![j]! - (i === j ? 1 : 0)));
    }
  }
  return worst;
}

export interface SweepOptions {
  kind: WorkloadKindName;
  sizes: number[];
  iterations: number;
  seed: number;
  environment?: string;
}

export function runSweep(options: SweepOptions): BenchmarkRecord[] {
  const environment = options.environment ?? "sandbox";
  const records: BenchmarkRecord[] = [];
  for (const size of options.sizes) {
    const rng = makeRng(options.seed + size);
    gate(options.kind, size, rng);
    for (let iteration = 0; iteration < options.iterations; iteration++) {
      const elapsedNs = Math.max(1, timeOne(options.kind, size, rng));
      records.push({ environment, kind: options.kind, size, iteration, elapsedNs });
    }
  }
  return records;
}

function gate(kind: WorkloadKindName, size: number, rng: () => number): void {
  if (kind === "matmul") {
    const n = Math.min(size, 16);
    const identity = Array.from({ length: n }, (_, i) =>
      Array.from({ length: n }, (_, j) => (i === j ? 1 : 0)),
    );
    const product = matmul(identity, identity);
    if (JSON.stringify(product) !== JSON.stringify(identity)) {
      throw new GateFailure("identity product gate failed");
    }
  } else if (kind === "matinverse") {
    const matrix = randomMatrix(rng, Math.min(size, 16), true);
    if (identityResidual(matrix, invert(matrix)) >= 1e-6) {
      throw new GateFailure("inverse residual gate failed");
    }
  } else if (kind === "coinflips") {
    const sample = Array.from({ length: 1000 }, () => (rng() < 0.5 ? "H" : "T"));
    const count = sample.filter((t) => t === "H").length;
    if (sample.some((t) => t !== "H" && t !== "T") || count > 1000) {
      throw new GateFailure("token gate failed");
    }
  } else {
    const values = Array.from({ length: Math.min(size, 100_000) }, () => rng());
    const total = values.reduce((acc, v) => acc + v, 0);
    if (values.length > 1000 && Math.abs(total / values.length - 0.5) > 0.05) {
      throw new GateFailure("mean gate failed");
    }
  }
}

function timeOne(kind: WorkloadKindName, size: number, rng: () => number): number {
  if (kind === "matmul") {
    const a = randomMatrix(rng, size, false);
    const b = randomMatrix(rng, size, false);
    const start = nowNs();
    matmul(a, b);
    return nowNs() - start;
  }
  if (kind === "matinverse") {
    const matrix = randomMatrix(rng, size, true);
    const start = nowNs();
    invert(matrix);
    return nowNs() - start;
  }
  if (kind === "coinflips") {
    const start = nowNs();
    const vector: string[] = new Array(size);
    for (let i = 0; i < size; i++) vector[i] = rng() < 0.5 ? "H" : "T";
    let heads = 0;
    for (const token of vector) if (token === "H") heads++;
    void heads;
    return nowNs() - start;
  }
  const values: number[] = new Array(size);
  for (let i = 0; i < size; i++) values[i] = rng();
  const start = nowNs();
  let total = 0;
  for (const v of values) total += v;
  void total;
  return nowNs() - start;
}

/** Identical column layout to the native harness's CSV, LF endings. */
export function toCsv(records: BenchmarkRecord[]): string {
  const lines = [CSV_HEADER];
  for (const r of records) {
    lines.push(`${r.environment},${r.kind},${r.size},${r.iteration},${r.elapsedNs}`);
  }
  return lines.join("\n") + "\n";
}

/** Offer the CSV as a user-initiated download (never an upload). */
export function downloadCsv(records: BenchmarkRecord[], fileName = "sandbox-timings.csv"): void {
  const blob = new Blob([toCsv(records)], { type: "text/csv" });
  const url = URL.createObjectURL(blob);
  const anchor = document.createElement("a");
  anchor.href = url;
  anchor.download = fileName;
  anchor.click();
  URL.revokeObjectURL(url);
}
