# Benchmark exact and IVF k-NN search on seeded random unit vectors; optional.
# Usage: python -m scripts.bench_search --queries 10000 --targets 100000 --dim 1024 --threads 8
# The reference workload (10k x 100k, d=1024, k=20, exact) is expected to finish within BUDGET_S
# on an 8-core desktop.
import argparse, time
import numpy as np
from src.shared.records import EmbeddingMatrix
from src.search.exact import SearchParams, knn_exact_arrays
from src.search.ivf import build_ivf, knn_ivf_arrays

BUDGET_S = 60.0


def random_unit(n, d, rng):
    x = rng.standard_normal((n, d)).astype(np.float32)
    return x / np.linalg.norm(x, axis=1, keepdims=True)


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--queries", type=int, default=10000)
    ap.add_argument("--targets", type=int, default=100000)
    ap.add_argument("--dim", type=int, default=1024)
    ap.add_argument("--k", type=int, default=20)
    ap.add_argument("--threads", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--ivf", action="store_true", help="also build and query an IVF index")
    ap.add_argument("--nprobe", type=int, default=32)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    q = random_unit(args.queries, args.dim, rng)
    t = random_unit(args.targets, args.dim, rng)
    params = SearchParams(k=args.k, nprobe=args.nprobe)

    start = time.time()
    exact_idx, _ = knn_exact_arrays(q, t, args.k, params, threads=args.threads, progress=True)
    dur = time.time() - start
    verdict = "within" if dur <= BUDGET_S else "OVER"
    print(f"exact: {args.queries}x{args.targets} d={args.dim} in {dur:.2f}s "
          f"=> {args.queries/dur:.0f} q/s ({verdict} budget {BUDGET_S:.0f}s)")

    if args.ivf:
        targets = EmbeddingMatrix.from_rows([f"t{i}" for i in range(args.targets)], t)
        start = time.time()
        index = build_ivf(targets, seed=args.seed)
        print(f"ivf build: nlist={index.nlist} in {time.time()-start:.2f}s")
        start = time.time()
        ivf_idx, _ = knn_ivf_arrays(index, q, params, threads=args.threads, progress=True)
        dur = time.time() - start
        recall = np.mean([len(set(a) & set(b)) / len(a) for a, b in zip(exact_idx, ivf_idx)])
        print(f"ivf search: nprobe={args.nprobe} in {dur:.2f}s => {args.queries/dur:.0f} q/s, recall@{args.k}={recall:.3f}")
