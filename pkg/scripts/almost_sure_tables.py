"""Tables of almost-sure values.

* the De Morgan constants and value sets of the lattice-negation reducts;
* for every element of a few small chains, a witness sentence deciding to it.
"""
import argparse

from mvlaws.algebra import demorgan_check, demorgan_constants, get_algebra, make_godel_chain, make_mv_chain
from mvlaws.asymptotic import (almost_sure_set_demorgan, almost_sure_value, godel_witness_term,
                               lukasiewicz_witness_term)
from mvlaws.syntax import to_text, witness_sentences


def demorgan_table(names):
    print("algebra | eps | eps' | delta | delta' | almost-sure set")
    for name in names:
        A = get_algebra(name)
        c = demorgan_constants(A)
        labels = [A.labels[i] for i in c.as_tuple()]
        values = ", ".join(A.labels[i] for i in almost_sure_set_demorgan(A))
        print(f"{name} | {' | '.join(labels)} | {{{values}}}")
        for note in demorgan_check(A).notes:
            print(f"    {note}")


def witness_table(max_n):
    print("\nalgebra | element | witness sentence | decided")
    for N in range(1, max_n + 1):
        for A, term in ((make_mv_chain(N), lambda k: lukasiewicz_witness_term(N, k)),
                        (make_godel_chain(N + 1), godel_witness_term)):
            for k in range(N + 1):
                s, _ = witness_sentences(term(k), "P")
                v = almost_sure_value(s, A)
                print(f"{A.name} | {A.labels[A.elements[k]]} | {to_text(s)} | {A.labels[v]}")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--algebras", nargs="+",
                    default=["B2", "L3[and,or,not]", "L4[and,or,not]", "L5[and,or,not]", "G3[and,or,not]",
                             "G4[and,or,not]", "prod(G3,L4)[and,or,not]", "prod(L3,L4)[and,or,not]"])
    ap.add_argument("--max-N", type=int, default=3)
    args = ap.parse_args(argv)
    demorgan_table(args.algebras)
    witness_table(args.max_N)


if __name__ == "__main__":
    main()
