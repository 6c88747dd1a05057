"""Run the seeded fuzz family and print per-verifier status counts and worst slacks."""
import argparse
import collections
import time

from radcurv.comparison import fuzz_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--cases", type=int, default=200)
    ap.add_argument("--inject-positive-lambda", action="store_true")
    args = ap.parse_args()
    start = time.perf_counter()
    reports = fuzz_suite(args.seed, args.cases, {"inject_positive_lambda": args.inject_positive_lambda})
    counts = collections.defaultdict(collections.Counter)
    worst = {}
    for r in reports:
        counts[r.theorem_id][r.status] += 1
        if r.slack is not None and r.status != "indeterminate":
            rel = r.slack / (1 + abs(r.rhs))
            if r.theorem_id not in worst or rel < worst[r.theorem_id][0]:
                worst[r.theorem_id] = (rel, r.case_id)
    print(f"{len(reports)} reports in {time.perf_counter() - start:.1f}s")
    for tid, c in sorted(counts.items()):
        w = worst.get(tid)
        tail = f"  min slack/(1+|rhs|) {w[0]:.3e} ({w[1]})" if w else ""
        print(f"  {tid:<16} {dict(c)}{tail}")


if __name__ == "__main__":
    main()
