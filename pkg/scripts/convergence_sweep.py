"""Empirical value frequencies of the chain witness sentences as the domain grows.

Writes one CSV block per sentence and prints a convergence verdict for each.
"""
import argparse
import sys

from mvlaws.algebra import make_godel_chain, make_mv_chain
from mvlaws.asymptotic import godel_witness_term, lukasiewicz_witness_term
from mvlaws.montecarlo import convergence_report, write_csv
from mvlaws.syntax import witness_sentences


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", type=int, default=3, help="chains with N+1 elements")
    ap.add_argument("--n", type=int, nargs="+", default=[5, 10, 20, 50])
    ap.add_argument("--samples", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", help="CSV file (default: stdout)")
    args = ap.parse_args(argv)

    jobs = [(make_mv_chain(args.N), lukasiewicz_witness_term(args.N, k)) for k in range(args.N + 1)]
    jobs += [(make_godel_chain(args.N + 1), godel_witness_term(k)) for k in range(args.N + 1)]
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        for A, t in jobs:
            s, _ = witness_sentences(t, "P")
            rep = convergence_report(s, args.n, A, samples=args.samples, seed=args.seed)
            print("\n".join(rep.lines()), file=sys.stderr)
            out.write(f"# {A.name}: {rep.sentence}\n")
            write_csv(rep.rows, out)
    finally:
        if out is not sys.stdout:
            out.close()


if __name__ == "__main__":
    main()
