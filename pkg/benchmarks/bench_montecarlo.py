"""Throughput comparison: compiled simulator kernel vs numpy fallback.

Both backends must produce bit-identical counters; this script asserts
that before timing anything, so a speedup never hides a divergence.

Usage: python benchmarks/bench_montecarlo.py [n_pulses]
"""

import sys
import time

from tempokey import ChannelParams, ProtocolKind, SimConfig, run_simulation
from tempokey import _mc_fallback
from tempokey.montecarlo import USING_COMPILED_KERNEL


def _timed(label, n_pulses, backend):
    cfg = SimConfig(protocol=ProtocolKind.TS2,
                    channel=ChannelParams(length_km=20.0),
                    n_pulses=n_pulses, seed=20260822)
    t0 = time.perf_counter()
    result = run_simulation(cfg, backend=backend)
    dt = time.perf_counter() - t0
    print(f"{label:>10}: {dt:8.3f} s   {n_pulses / dt:12.0f} pulses/s")
    return result, dt


def main() -> int:
    n_pulses = int(sys.argv[1]) if len(sys.argv) > 1 else 2_000_000
    if not USING_COMPILED_KERNEL:
        print("compiled kernel not available; timing fallback only")
        _timed("fallback", n_pulses, _mc_fallback)
        return 0

    from tempokey import _mc_kernel

    res_c, dt_c = _timed("compiled", n_pulses, _mc_kernel)
    res_py, dt_py = _timed("fallback", n_pulses, _mc_fallback)
    if res_c != res_py:
        print("BACKEND MISMATCH:")
        print("  compiled:", res_c)
        print("  fallback:", res_py)
        return 1
    print(f"{'speedup':>10}: {dt_py / dt_c:8.1f} x   (identical counters)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
