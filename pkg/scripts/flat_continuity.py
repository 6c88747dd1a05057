"""Relative change of the first flat-Laplacian eigenvalue of a ball as flat
moves away from 2; the change is linear in |flat - 2|."""
import argparse

from radcurv import spectral as S
from radcurv.manifold import euclidean, hyperbolic


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--space", choices=["euclidean", "hyperbolic"], default="euclidean")
    ap.add_argument("--R", type=float, default=1.0)
    ap.add_argument("--grid", type=int, default=2000)
    args = ap.parse_args()
    M = euclidean(2, L=2 * args.R) if args.space == "euclidean" else hyperbolic(2, L=2 * args.R)
    base = S.p_laplacian_eigenvalue(M, args.R, 2.0, args.grid).value
    print(f"flat=2: {base:.10f}")
    for eps in (0.1, 0.05, 0.02, 0.01, 0.005):
        row = []
        for flat in (2 - eps, 2 + eps):
            v = S.p_laplacian_eigenvalue(M, args.R, flat, args.grid).value
            row.append((v - base) / base)
        print(f"eps={eps:<6} rel change {row[0]:+.4%} / {row[1]:+.4%}   per unit eps {row[0] / eps:+.3f} / {row[1] / eps:+.3f}")


if __name__ == "__main__":
    main()
