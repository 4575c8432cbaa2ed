"""Compare the numba kernels with their numpy twins.

Run ``python benchmarks/bench_kernels.py``. Set ``GKPGATE_DISABLE_NUMBA=1``
to see which backend the library itself would pick; the comparison below
always times both twins directly.
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from gkpgate import kernels
from gkpgate.states import GKP_TRUNC, GkpParams, make_state


def best_of(fn, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def render_case(n: int):
    st = make_state(GKP_TRUNC, GkpParams.symmetric(0.02, 2))
    coef, a, center, lo, hi = (np.ascontiguousarray(v) for v in st.pieces.absolute())
    L = float(np.abs(center).max() + 1)
    return (-L, 2 * L / n, n, coef.astype(np.complex128), a, center, lo, hi)


def sinc_case(n: int):
    rng = np.random.default_rng(0)
    samples = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    x = np.sort(rng.uniform(0, n * 0.1, n))
    return (samples, 0.0, 0.1, x)


def chirp_case(n: int):
    rng = np.random.default_rng(1)
    return (rng.standard_normal(n), rng.uniform(-5, 5, n), rng.standard_normal(n), rng.uniform(-5, 5, n), 0.3)


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--scale", type=int, default=1, help="multiply problem sizes")
    args = parser.parse_args(argv)
    print(f"library backend: {kernels.backend()} (GKPGATE_DISABLE_NUMBA selects numpy)")
    if kernels.numba is None:
        print("numba is not installed; nothing to compare")
        return
    s = args.scale
    cases = [
        ("render_pieces", render_case((1 << 20) * s), kernels.render_pieces_numba, kernels.render_pieces_numpy),
        ("sinc_resample", sinc_case(200_000 * s), kernels.sinc_resample_numba, kernels.sinc_resample_numpy),
        ("chirp_sum", chirp_case(2000 * int(math.sqrt(s))), kernels.chirp_sum_numba, kernels.chirp_sum_numpy),
    ]
    print(f"{'kernel':<16}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}{'max diff':>12}")
    for name, case, fast, slow in cases:
        fast(*case)  # compile outside the timing
        a, b = fast(*case), slow(*case)
        diff = float(np.max(np.abs(np.asarray(a) - np.asarray(b))))
        tf = best_of(lambda: fast(*case), args.repeats)
        ts = best_of(lambda: slow(*case), args.repeats)
        print(f"{name:<16}{tf:>12.4f}{ts:>12.4f}{ts / tf:>10.1f}{diff:>12.1e}")


if __name__ == "__main__":
    main()
