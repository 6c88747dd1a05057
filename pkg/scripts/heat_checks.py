"""Heat-kernel diagnostics: mass, free-space comparison, grid order and the
hyperbolic-versus-flat kernel comparison."""
import argparse
import math

import numpy as np

from radcurv import heat as Ht
from radcurv.funcspec import constant
from radcurv.manifold import euclidean, hyperbolic
from radcurv.model import solve_warp


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid", type=int, default=2500)
    args = ap.parse_args()
    taus = [0.05, 0.1, 0.2]
    sol = Ht.heat_kernels(euclidean(2, L=6.0), 5.0, Ht.DIRICHLET, taus, args.grid)
    for j, tau in enumerate(sol.tau):
        exact = 1 / (4 * math.pi * tau)
        print(f"tau={tau:.4f} pole {sol.at_pole(j):.6f} free {exact:.6f} rel {sol.at_pole(j) / exact - 1:+.2e} mass {sol.mass[j]:.8f}")
    M = euclidean(3, L=5.0)
    u0 = lambda t: np.exp(-(t / 0.3) ** 2)
    ref = Ht.solve_radial_heat(M, 4.0, Ht.NEUMANN, u0, 0.2, 6400).profile()
    prev = None
    for N in (200, 400, 800, 1600):
        s = Ht.solve_radial_heat(M, 4.0, Ht.NEUMANN, u0, 0.2, N)
        err = float(np.max(np.abs(s.u[-1] - ref.value(s.t))))
        rate = "" if prev is None else f" order {math.log2(prev / err):.2f}"
        print(f"N={N:<5} max error {err:.3e}{rate}")
        prev = err
    H3 = hyperbolic(3, L=5.0)
    for label, ms, side in (("flat upper", solve_warp(constant(0.0), T=5.0, n=3), "ms_upper"),
                            ("hyperbolic self", solve_warp(constant(-1.0), T=5.0, n=3), "ms_lower")):
        rep = Ht.verify_heat_kernel_comparison(H3, **{side: ms}, R0=1.0, grid_size=800)
        print(f"{label}: {rep.status}, worst slack {rep.slack:.3e}; {'; '.join(rep.notes)}")


if __name__ == "__main__":
    main()
