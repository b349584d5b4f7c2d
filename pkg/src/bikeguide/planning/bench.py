"""Kernel benchmark: compiled extension vs pure-Python twin.

Runs the same encoded workloads through both solve() implementations,
checks they return identical plans, and reports wall times. Workloads
are the bundled maps' initial searches plus ambiguity-weighted
variants, which stress the heap and successor loops differently.

Run as: python3 -m bikeguide.planning.bench [repeats]
"""

from __future__ import annotations

import sys
import time
from fractions import Fraction

from ..ambiguity import AmbiguityCostConfig, AmbiguityIndex
from ..execution.belief import determinize
from ..world.bundled import bundled_map_names, load_bundled_map
from ..world.compile import compile_map
from .encode import encode
from . import kernel_py

try:
    from . import _kernel
except ImportError:
    _kernel = None


def _workloads():
    """(label, encoded problem) pairs covering both cost models."""
    out = []
    for name in bundled_map_names():
        spec = load_bundled_map(name)
        compiled = compile_map(spec)
        det = determinize(compiled.initial_belief_for(), compiled.problem)
        out.append((f"{name}/base", encode(det, det.initial_true)))
        index = AmbiguityIndex(spec, compiled.problem.actions)
        cost_fn = index.cost_fn(AmbiguityCostConfig(delta=Fraction(1)))
        out.append((f"{name}/delta1",
                    encode(det, det.initial_true, cost_fn=cost_fn)))
    return out


def _solve(backend, enc):
    return backend.solve(
        enc.num_fluents, enc.pre_masks, enc.add_masks, enc.del_masks,
        enc.scaled_costs, enc.start_mask, enc.goal_mask, use_hmax=True)


def _time(backend, enc, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        _solve(backend, enc)
        best = min(best, time.perf_counter() - t0)
    return best


def main(repeats: int = 5) -> int:
    if _kernel is None:
        print("compiled kernel unavailable; nothing to compare")
        return 1
    rows = []
    for label, enc in _workloads():
        got_pure = _solve(kernel_py, enc)
        got_comp = _solve(_kernel, enc)
        if got_pure != got_comp:
            print(f"MISMATCH on {label}: {got_pure!r} != {got_comp!r}")
            return 1
        t_pure = _time(kernel_py, enc, repeats)
        t_comp = _time(_kernel, enc, repeats)
        rows.append((label, t_pure, t_comp))

    width = max(len(r[0]) for r in rows)
    print(f"{'workload'.ljust(width)}  {'pure':>10}  {'compiled':>10}  speedup")
    for label, t_pure, t_comp in rows:
        ratio = t_pure / t_comp if t_comp > 0 else float("inf")
        print(f"{label.ljust(width)}  {t_pure * 1e3:8.2f}ms  "
              f"{t_comp * 1e3:8.2f}ms  {ratio:6.1f}x")
    total_pure = sum(r[1] for r in rows)
    total_comp = sum(r[2] for r in rows)
    print(f"{'total'.ljust(width)}  {total_pure * 1e3:8.2f}ms  "
          f"{total_comp * 1e3:8.2f}ms  {total_pure / total_comp:6.1f}x")
    return 0


if __name__ == "__main__":
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 5
    sys.exit(main(n))
