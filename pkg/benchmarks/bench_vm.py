#!/usr/bin/env python3
"""Compare the compiled and pure-Python kernels on a sweep workload.

Run:  python3 benchmarks/bench_vm.py [--length 14] [--horizon 4096] [--repeat 3]

Both kernels execute the same full enumeration of one program length on the
plain VM and on the prefix-free VM; the script reports wall time and the
speedup, and insists the results agree before trusting either number.
"""

import argparse
import time

from haltlab import _stepper_py

try:
    from haltlab import _stepper  # type: ignore[attr-defined]
except ImportError:
    _stepper = None


def sweep_with(kernel, length: int, horizon: int, prefix_free: bool) -> dict:
    stops = {}
    for value in range(2**length):
        program = format(value, f"0{length}b")
        bits = program.encode("ascii")
        pos = 0
        while bits[pos : pos + 2] == b"11":
            pos += 2
        depth = pos // 2
        if length - pos < 2:
            if not prefix_free and horizon - depth >= 1:
                stops[program] = 1 + depth
            continue
        status, steps, _ = kernel.run_stream(
            bits, pos + 2, length, prefix_free, True, max(horizon - depth, 0), 1 << 20
        )
        if status == kernel.HALTED and steps + depth <= horizon:
            stops[program] = steps + depth
    return stops


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--length", type=int, default=14)
    parser.add_argument("--horizon", type=int, default=4096)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    kernels = [("pure", _stepper_py)]
    if _stepper is not None:
        kernels.append(("compiled", _stepper))
    else:
        print("compiled kernel not available; benchmarking pure only")

    timings = {}
    results = {}
    for name, kernel in kernels:
        best = float("inf")
        for _ in range(args.repeat):
            t0 = time.perf_counter()
            plain = sweep_with(kernel, args.length, args.horizon, False)
            pf = sweep_with(kernel, args.length, args.horizon, True)
            best = min(best, time.perf_counter() - t0)
        timings[name] = best
        results[name] = (plain, pf)
        print(f"{name:>8}: {best:.3f} s  (2 x 2^{args.length} programs)")

    if len(results) == 2:
        assert results["pure"] == results["compiled"], "kernel results disagree"
        print(f"speedup: {timings['pure'] / timings['compiled']:.1f}x, results identical")


if __name__ == "__main__":
    main()
