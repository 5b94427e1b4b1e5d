"""Benchmark the compiled state engine against the pure-Python fallback.

Times batched state preparation and state-plus-jacobian evaluation for both
backends on the same random workload, then the full kernel matrix with
whichever backend is active. Run as:

    python3 benchmarks/bench_engine.py --rows 80 --features 6 --depth 6
"""

import argparse
import time

import numpy as np

from qmvk.kernels import quantum_kernel_matrix, quantum_kernel_matrix_with_gradient
from qmvk.qsim import _batched
from qmvk.qsim.ansatz import AnsatzParams
from qmvk.qsim.engine import backend_name

try:
    from qmvk.qsim import _core
except ImportError:
    _core = None


def best_of(repeats, fn):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rows", type=int, default=80)
    parser.add_argument("--features", type=int, default=6)
    parser.add_argument("--depth", type=int, default=6)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    X = rng.uniform(0.0, np.pi, (args.rows, args.features))
    params = AnsatzParams.random(args.depth, rng)
    betas, gammas = params.betas, params.gammas

    backends = [("python", _batched)]
    if _core is not None:
        backends.append(("compiled", _core))
    else:
        print("compiled backend unavailable; timing the fallback only")

    print(
        f"workload: {args.rows} rows, {args.features} qubits, "
        f"depth {args.depth}, best of {args.repeats}"
    )
    results = {}
    for name, module in backends:
        states = best_of(args.repeats, lambda: module.ansatz_states(X, betas, gammas))
        jac = best_of(
            args.repeats,
            lambda: module.ansatz_states_with_jacobian(X, betas, gammas),
        )
        results[name] = (states, jac)
        print(f"{name:>9}: states {states * 1e3:8.2f} ms, with jacobian {jac * 1e3:8.2f} ms")
    if len(results) == 2:
        py_states, py_jac = results["python"]
        c_states, c_jac = results["compiled"]
        print(
            f"  speedup: states {py_states / c_states:.1f}x, "
            f"with jacobian {py_jac / c_jac:.1f}x"
        )

    kernel = best_of(args.repeats, lambda: quantum_kernel_matrix(X, params))
    grad = best_of(args.repeats, lambda: quantum_kernel_matrix_with_gradient(X, params))
    print(
        f"kernel matrix ({backend_name()} backend): {kernel * 1e3:.2f} ms, "
        f"with gradient {grad * 1e3:.2f} ms"
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
