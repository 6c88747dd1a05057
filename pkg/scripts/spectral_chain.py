"""Ball eigenvalues on a radius ladder for hyperbolic space, the large-ball
estimate, and the two volume-growth / curvature upper bounds."""
import argparse

from radcurv import spectral as S
from radcurv.constants import c8
from radcurv.manifold import hyperbolic


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--p", type=float, default=50.0)
    ap.add_argument("--flat", type=float, default=2.0)
    ap.add_argument("--R0", type=float, default=1.0)
    ap.add_argument("--k", type=int, default=5)
    ap.add_argument("--grid", type=int, default=4000)
    args = ap.parse_args()
    M = hyperbolic(args.n, L=args.R0 * 2 ** args.k + 1)
    rungs = S.ladder(args.R0, args.k)
    print(f"{'R':>8} {'eigenvalue':>14} {'residual':>10}")
    for R in rungs:
        if args.flat == 2:
            e = S.dirichlet_eigenvalue(M, R, args.grid)
        else:
            e = S.p_laplacian_eigenvalue(M, R, args.flat, args.grid)
        print(f"{R:8.2f} {e.value:14.8f} {e.residual:10.2e}")
    R_est = min(rungs[-1], 25.0)
    if args.flat == 2:
        lim = S.lambda1_estimate(M, R_est, args.grid)
    else:
        lim = S.p_laplacian_lambda1_estimate(M, R_est, args.flat, args.grid)
    b = S.spec_upper_bound_plap(M, args.p, args.flat, rungs, alpha=1.0)
    exact = ((args.n - 1) / args.flat) ** args.flat
    print(f"large-ball estimate at R={R_est}: {lim.value:.6f} +/- {lim.residual:.1e}  (reference {exact:.6f})")
    print(f"growth bound {b.middle:.6f}, curvature bound {b.right:.6f}, alpha bound {b.right_alpha}")
    print(f"c8({args.n},{args.p}) = {c8(args.n, args.p):.6f}, ladder converged: {b.converged}")


if __name__ == "__main__":
    main()
