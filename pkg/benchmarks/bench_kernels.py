#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Times character Levenshtein and token LCS on synthetic snippet pairs shaped
like real corpora (short code lines, some multi-line), plus a full
evaluate_pair pass under whichever backend is active.

Usage:
    python benchmarks/bench_kernels.py [--pairs 2000] [--repeats 3]
"""

from __future__ import annotations

import argparse
import random
import statistics
import time

from evalkit import MetricConfig, evaluate_pair
from evalkit import _kernels
from evalkit._kernels import _pykernels

try:
    from evalkit._kernels import _ckernels
except ImportError:
    _ckernels = None

WORDS = ["mov", "eax", "ebx,", "push", "pop", "xor", "0x68732f2f", "esp,", "5",
         "int", "0x80", "byte", "[esi]", "al,", "jmp", "decode:"]


def make_pairs(n: int, seed: int = 1234) -> list[tuple[str, str]]:
    rng = random.Random(seed)
    pairs = []
    for _ in range(n):
        lines = rng.randint(1, 3)
        ref = "\n".join(
            " ".join(rng.choice(WORDS) for _ in range(rng.randint(2, 7)))
            for _ in range(lines)
        )
        if rng.random() < 0.4:
            pred = ref
        else:
            chars = list(ref)
            for _ in range(rng.randint(1, 8)):
                pos = rng.randrange(len(chars))
                chars[pos] = rng.choice("abcdex05,")
            pred = "".join(chars)
        pairs.append((pred, ref))
    return pairs


def bench(label: str, fn, pairs, repeats: int) -> float:
    timings = []
    for _ in range(repeats):
        start = time.perf_counter()
        for pred, ref in pairs:
            fn(pred, ref)
        timings.append(time.perf_counter() - start)
    best = min(timings)
    mean = statistics.mean(timings)
    rate = len(pairs) / best
    print(f"{label:<34} best {best * 1000:8.1f} ms   mean {mean * 1000:8.1f} ms   {rate:10.0f} pairs/s")
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--pairs", type=int, default=2000)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--seed", type=int, default=1234)
    args = parser.parse_args()

    pairs = make_pairs(args.pairs, args.seed)
    token_pairs = [(p.split(), r.split()) for p, r in pairs]
    print(f"active backend: {_kernels.backend()}   ({args.pairs} pairs, best of {args.repeats})\n")

    results = {}
    results["py-lev"] = bench("levenshtein  pure-python", _pykernels.levenshtein, pairs, args.repeats)
    if _ckernels is not None:
        results["c-lev"] = bench("levenshtein  compiled", _ckernels.levenshtein, pairs, args.repeats)
        print(f"{'':<34} speedup {results['py-lev'] / results['c-lev']:.1f}x")

    def py_lcs(p, r):
        ids: dict[str, int] = {}
        return _pykernels.lcs_length(
            [ids.setdefault(t, len(ids)) for t in p],
            [ids.setdefault(t, len(ids)) for t in r],
        )

    def c_lcs(p, r):
        ids: dict[str, int] = {}
        return _ckernels.lcs_length(
            [ids.setdefault(t, len(ids)) for t in p],
            [ids.setdefault(t, len(ids)) for t in r],
        )

    print()
    results["py-lcs"] = bench("token LCS    pure-python", py_lcs, token_pairs, args.repeats)
    if _ckernels is not None:
        results["c-lcs"] = bench("token LCS    compiled", c_lcs, token_pairs, args.repeats)
        print(f"{'':<34} speedup {results['py-lcs'] / results['c-lcs']:.1f}x")

    print()
    cfg = MetricConfig(bleu_smoothing="epsilon")
    sample_pairs = pairs[: max(200, args.pairs // 10)]
    bench(
        f"evaluate_pair ({_kernels.backend()} backend)",
        lambda p, r: evaluate_pair(p, r, "assembly", cfg),
        sample_pairs,
        args.repeats,
    )


if __name__ == "__main__":
    main()
