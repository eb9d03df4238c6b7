"""Timing comparison of the two TU search kernels.

Runs the same workloads through the compiled extension and the
pure-Python fallback: minimal-violation search on the 9x9 ungrouped
showcase matrix and on a batch of generated instances, plus row
signing on a mid-size TU matrix.  The full 29x20 scan of the 10-state
fixture is reported for the compiled kernel only; the fallback needs
minutes for its 2^20 subsets.  Invoke as

    python3 benchmarks/bench_tu.py
"""

import pathlib
import sys
import time

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from ctrlsel import (  # noqa: E402
    InstanceGenSpec,
    build_bipartite,
    build_incidence_m,
    build_incidence_m_hat,
    build_system_digraph,
    generate_instance,
    load_instance,
    scc_decompose,
)
from ctrlsel import _tupure  # noqa: E402

try:
    from ctrlsel import _tucore
except ImportError:
    _tucore = None

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def _matrix(sys_):
    scc = scc_decompose(build_system_digraph(sys_))
    return build_incidence_m(build_bipartite(sys_), scc)


def _entries(mat):
    return tuple(tuple(int(v) for v in row) for row in mat.entries)


def _gen(seed, **kw):
    base = dict(seed=seed, n_lo=2, n_hi=4, m_lo=1, m_hi=2, a_density=0.25,
                b_density=0.4, cost_lo=1, cost_hi=9, mode="grouped",
                max_links=4)
    base.update(kw)
    return generate_instance(InstanceGenSpec(**base))


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    straddle = _entries(_matrix(load_instance(FIXTURES / "straddle3.json")))

    batch = []
    seed = 0
    while len(batch) < 60:
        seed += 1
        mat = _matrix(_gen(seed))
        if min(mat.nrows, mat.ncols) <= 12:
            batch.append(_entries(mat))

    # a TU matrix wide enough to make the signing scan visible but
    # still tractable for the fallback (about 2^14 subsets)
    seed = 0
    mid = None
    while mid is None:
        seed += 1
        sys_ = _gen(seed, n_hi=6, m_hi=3, a_density=0.35, b_density=0.5,
                    max_links=8)
        mat = _matrix(sys_)
        if 13 <= min(mat.nrows, mat.ncols) <= 14:
            mid = _entries(mat)

    cases = [
        ("violation search, 9x9 non-TU", lambda k: k.find_violation(straddle), 20),
        ("violation search, 60 instance matrices",
         lambda k: [k.find_violation(m) for m in batch], 5),
        (f"row signing, {len(mid)}x{len(mid[0])} TU",
         lambda k: k.gh_failing_subset(mid), 3),
        ("row signing, 9x9 non-TU", lambda k: k.gh_failing_subset(straddle), 20),
    ]

    kernels = [("pure", _tupure)]
    if _tucore is not None:
        kernels.append(("compiled", _tucore))
    else:
        print("compiled kernel not built; timing the fallback only", flush=True)

    width = max(len(label) for label, _, _ in cases)
    print(f"{'case':<{width}}  " + "".join(f"{name:>12}" for name, _ in kernels)
          + ("     speedup" if len(kernels) == 2 else ""), flush=True)
    for label, run, repeat in cases:
        reference = run(kernels[0][1])
        for _, mod in kernels[1:]:
            assert run(mod) == reference, f"kernels disagree on {label}"
        times = [_time(lambda m=mod: run(m), repeat) for _, mod in kernels]
        row = f"{label:<{width}}  " + "".join(f"{t * 1e3:>10.2f}ms" for t in times)
        if len(times) == 2:
            row += f"  {times[0] / times[1]:>9.1f}x"
        print(row, flush=True)

    if _tucore is not None:
        demo = load_instance(FIXTURES / "demo10.json")
        scc = scc_decompose(build_system_digraph(demo))
        mhat = _entries(build_incidence_m_hat(build_bipartite(demo), scc))
        # the kernel signs row subsets; hand it the short side, as the
        # public checker does
        flipped = tuple(zip(*mhat))
        t = _time(lambda: _tucore.gh_failing_subset(flipped), 3)
        print(f"row signing, {len(mhat)}x{len(mhat[0])} TU"
              f" (compiled only)  {t * 1e3:.2f}ms", flush=True)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
