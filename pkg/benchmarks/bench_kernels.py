"""Compare the compiled and pure-Python acceptance sweeps.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each case sweeps every word up to a length bound through a Schreier automaton
with a Z^n or trivial register and checks that both backends agree.
"""
import argparse
import time

import numpy as np

from mautomata.automata import abelian_encoding
from mautomata.constructions import schreier_construct
from mautomata.data import path
from mautomata.formats import load_scenario
from mautomata.kernels import BACKENDS, sweep_abelian

CASES = [("z_2z.scn", 18), ("dinf.scn", 11), ("s3.scn", 11)]


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t)
    return min(times), result


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if "compiled" not in BACKENDS:
        print("compiled kernel not available; rebuild with Cython installed")
        return 1
    print(f"{'scenario':<10} {'max_len':>7} {'words':>9} {'python s':>9} {'compiled s':>10} {'speedup':>8}")
    for name, max_len in CASES:
        s = load_scenario(path(name))
        A = schreier_construct(s.oracle, s.embedding(), s.bounds.max_cosets)
        trans, deltas, terminal = abelian_encoding(A)
        t_py, a = best_of(lambda: sweep_abelian(trans, deltas, 0, terminal, max_len, backend="python"), args.repeat)
        t_c, b = best_of(lambda: sweep_abelian(trans, deltas, 0, terminal, max_len, backend="compiled"), args.repeat)
        assert np.array_equal(a, b), f"backends disagree on {name}"
        print(f"{s.name:<10} {max_len:>7} {len(a):>9} {t_py:>9.3f} {t_c:>10.4f} {t_py / t_c:>7.0f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
