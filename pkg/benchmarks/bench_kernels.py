"""
Compare the numba and pure-numpy paths of the hot kernels.

    python benchmarks/bench_kernels.py [--repeat N]

The numba path is skipped when numba is unavailable or disabled with
GETGRASP_DISABLE_NUMBA=1.
"""
import argparse
import time

import numpy as np

from getgrasp import _kernels, lp
from getgrasp.contact import point_contact_set
from getgrasp.wrench import grasp_matrix


def _best(fn, repeat):
    fn()  # warm-up (includes JIT compilation)
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def disturbance_lp():
    """A representative max-disturbance tableau: 3 patch contacts, m = 8."""
    r, L = 20.0, 36.0
    z = -np.sqrt(r * r - (L / 2) ** 2)
    P = np.array([[0, L / 2, z], [0, -L / 2, z], [0, 0, r]])
    cs = point_contact_set(P, -P / r, [0, 0, 1], 15.0, kinds=["patch"] * 3, torsional_radii=[3.0] * 3)
    g = grasp_matrix(cs, 0.5, 8)
    G = g.scaled()
    d = np.array([0, 0, 0, 0, 0, 1.0])
    A_eq = np.hstack([G, d[:, None]])
    A_ub = np.zeros((2, g.n + 1))
    A_ub[0, :g.n] = g.jaw == 0
    A_ub[1, :g.n] = g.jaw == 1
    c = np.zeros(g.n + 1)
    c[-1] = 1.0
    return c, A_eq, np.zeros(6), A_ub, g.jaw_caps


def winkler_inputs(n=40_000, seed=0):
    rng = np.random.default_rng(seed)
    gap = rng.uniform(0.0, 2.0, n)
    return (gap, np.full(n, 3.0), 1.0, 0.15, np.full(n, 0.0625),
            rng.uniform(-10, 10, n), rng.uniform(-10, 10, n))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args(argv)

    w_in = winkler_inputs()
    lp_in = disturbance_lp()
    paths = {"numpy": (_kernels.numpy_winkler_integrate, _kernels.numpy_pivot_loop)}
    if _kernels.HAVE_NUMBA:
        paths["numba"] = (_kernels.winkler_integrate, _kernels.pivot_loop)

    print(f"{'kernel':<22}{'path':<8}{'best (ms)':>12}")
    results = {}
    for name, (wink, piv) in paths.items():
        t_w = _best(lambda: wink(*w_in), args.repeat)
        orig = _kernels.pivot_loop
        _kernels.pivot_loop = piv
        try:
            t_lp = _best(lambda: lp.maximize(*lp_in), args.repeat)
            alpha = lp.maximize(*lp_in).objective
        finally:
            _kernels.pivot_loop = orig
        results[name] = (t_w, t_lp, alpha)
        print(f"{'winkler (40k cells)':<22}{name:<8}{1e3 * t_w:>12.3f}")
        print(f"{'disturbance LP':<22}{name:<8}{1e3 * t_lp:>12.3f}")
    if len(results) == 2:
        (nw, nl, na), (jw, jl, ja) = results["numpy"], results["numba"]
        print(f"speedup winkler {nw / jw:.1f}x, LP {nl / jl:.1f}x; LP optimum agrees: {abs(na - ja) < 1e-9}")
    else:
        print("numba unavailable: only the numpy path was timed")


if __name__ == "__main__":
    main()
