"""Command-line front end.

Exit codes: 0 success, 1 input error, 2 budget exceeded, 3 internal
invariant violation.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence, TextIO

from . import __version__
from .algebra import (AlgebraError, algebra_names, algebra_to_json, check_algebra, demorgan_check,
                      demorgan_constants, get_algebra)
from .asymptotic import QEError, almost_sure_set_demorgan, decide, qe_demorgan
from .config import DEFAULT_BUDGETS, BudgetExceeded, InvariantViolation
from .continuum import (ValueInterval, estimate_concentration, extension_axiom_interval,
                        term_extremum_interval, write_histogram_csv)
from .montecarlo import AtomDistribution, convergence_report, estimate_distribution, exact_mu_small, write_csv
from .profiles import parse_profile
from .semantics import StructureError, evaluate, load_structure
from .syntax import (ParseError, Vocabulary, depth, free_variables, infer_vocabulary, is_fully_modal,
                     parse_formula, parse_modal, parse_term, quantifier_depth, s5_translate, to_text)
from .translator import partition_axioms, translate

EXIT_OK, EXIT_INPUT, EXIT_BUDGET, EXIT_INVARIANT = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


@dataclass
class ExperimentConfig:
    algebra: str = "L3"
    vocab: Optional[str] = None
    profile: str = "none"
    sentences: list[str] = field(default_factory=list)
    n: list[int] = field(default_factory=lambda: [5, 10, 20, 50])
    samples: int = 2000
    seed: int = 0
    tol: float = 1e-5
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_json(cls, data: dict) -> "ExperimentConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        known = {k: v for k, v in data.items() if k in names and k != "extra"}
        extra = {k: v for k, v in data.items() if k not in names}
        if isinstance(known.get("sentences"), str):
            known["sentences"] = [known["sentences"]]
        if isinstance(known.get("n"), int):
            known["n"] = [known["n"]]
        cfg = cls(**known, extra=extra)
        if cfg.samples < 1:
            raise ValueError("samples must be >= 1")
        return cfg


def read_sentences(path: str) -> list[str]:
    """One sentence per line; blank lines and lines starting with ``#`` are skipped."""
    out = []
    for line in Path(path).read_text().splitlines():
        s = line.strip()
        if s and not s.startswith("#"):
            out.append(s)
    return out


def _sentences(args) -> list[str]:
    out = list(args.sentence or [])
    if getattr(args, "file", None):
        out += read_sentences(args.file)
    if not out:
        raise ValueError("no sentence given (use --sentence or --file)")
    return out


def _vocab(args) -> Optional[Vocabulary]:
    if getattr(args, "vocab", None):
        return Vocabulary.parse(args.vocab)
    return None


def _fmt_value(A, v: int) -> str:
    lab = A.labels[v]
    q = A.value(v)
    return lab if q is None or str(q) == lab else f"{lab} (= {q})"


# ---------------------------------------------------------------- commands


def cmd_algebra(args, out: TextIO) -> int:
    if args.action == "list":
        for name in algebra_names():
            A = get_algebra(name)
            out.write(f"{name}\t{A.size} elements\t{', '.join(sorted(A.ops))}\n")
        return EXIT_OK
    if not args.name:
        raise ValueError("algebra name or file required")
    A = get_algebra(args.name)
    if args.action == "show":
        if args.json:
            out.write(json.dumps(algebra_to_json(A), indent=2) + "\n")
        else:
            out.write(f"{A.name}: {A.size} elements, bottom {A.labels[A.bottom]}, top {A.labels[A.top]}\n")
            out.write("carrier: " + ", ".join(A.labels) + "\n")
            for name, op in sorted(A.ops.items()):
                out.write(f"{name}/{op.arity}\n")
                if op.arity == 1:
                    out.write("  " + "  ".join(f"{A.labels[a]}->{A.labels[op.table[a]]}" for a in A.elements) + "\n")
                elif op.arity == 2:
                    w = max(len(l) for l in A.labels)
                    out.write("  " + " " * w + " | " + " ".join(l.rjust(w) for l in A.labels) + "\n")
                    for a in A.elements:
                        row = " ".join(A.labels[op.table[a][b]].rjust(w) for b in A.elements)
                        out.write("  " + A.labels[a].rjust(w) + " | " + row + "\n")
        return EXIT_OK
    diags = check_algebra(A)
    for d in diags:
        out.write(d + "\n")
    if not diags:
        out.write(f"{A.name}: lattice axioms hold\n")
    if "not" in A.ops:
        rep = demorgan_check(A)
        for line in rep.lines():
            out.write(line + "\n")
        if rep.conditions_hold:
            E = demorgan_constants(A)
            out.write("eps={} eps'={} delta={} delta'={}\n".format(*(A.labels[x] for x in E.as_tuple())))
    return EXIT_INPUT if diags else EXIT_OK


def cmd_parse(args, out: TextIO) -> int:
    A = get_algebra(args.algebra) if args.algebra else None
    for s in _sentences(args):
        phi = parse_formula(s, _vocab(args), A, sentence=args.sentence_mode)
        fv = free_variables(phi)
        out.write(f"{to_text(phi)}\n  free variables: {', '.join(fv) if fv else '(none)'}; "
                  f"height {depth(phi)}; quantifier depth {quantifier_depth(phi)}; "
                  f"vocabulary {infer_vocabulary(phi)}\n")
    return EXIT_OK


def cmd_eval(args, out: TextIO) -> int:
    A = get_algebra(args.algebra) if args.algebra else None
    data = json.loads(Path(args.structure).read_text())
    M = load_structure(data, A, profile=parse_profile(args.profile))
    asg = {}
    for item in args.assign or []:
        v, _, i = item.partition("=")
        asg[v.strip()] = int(i) - 1
    for s in _sentences(args):
        phi = parse_formula(s, None, M.algebra)
        out.write(f"{_fmt_value(M.algebra, evaluate(M, phi, asg))}\n")
    return EXIT_OK


def cmd_translate(args, out: TextIO) -> int:
    A = get_algebra(args.algebra)
    profile = parse_profile(args.profile)
    for s in _sentences(args):
        phi = parse_formula(s, _vocab(args), A)
        for line in translate(phi, A).lines():
            out.write(line + "\n")
        if args.axioms:
            vocab = _vocab(args) or infer_vocabulary(phi)
            for ax in partition_axioms(vocab, A, profile):
                out.write(f"axiom: {to_text(ax)}\n")
    return EXIT_OK


def cmd_asymptotic(args, out: TextIO) -> int:
    A = get_algebra(args.algebra)
    profile = parse_profile(args.profile)
    for s in _sentences(args):
        phi = parse_formula(s, _vocab(args), A, sentence=True)
        rep = decide(phi, A, profile, _vocab(args), DEFAULT_BUDGETS, memo=not args.no_memo,
                     explain=args.explain)
        if args.json:
            out.write(json.dumps({"sentence": to_text(phi), "value": rep.label,
                                  "exact": None if rep.exact is None else str(rep.exact)}) + "\n")
            continue
        for line in rep.trace:
            out.write(str(line) + "\n")
        q = rep.exact
        out.write(rep.label if q is None or str(q) == rep.label else f"{rep.label} (= {q})")
        out.write("\n")
    return EXIT_OK


def cmd_qe(args, out: TextIO) -> int:
    A = get_algebra(args.algebra)
    for s in _sentences(args):
        phi = parse_formula(s, _vocab(args), A)
        out.write(to_text(qe_demorgan(phi, A)) + "\n")
    return EXIT_OK


def cmd_asymset(args, out: TextIO) -> int:
    A = get_algebra(args.algebra)
    E = demorgan_constants(A)
    values = almost_sure_set_demorgan(A)
    if not all(A.leq(a, b) for a, b in zip((A.bottom,) + E.as_tuple(), E.as_tuple() + (A.top,))):
        raise InvariantViolation("constants are not ordered 0 <= eps <= eps' <= delta <= delta' <= 1")
    names = ("eps", "eps'", "delta", "delta'")
    if args.json:
        out.write(json.dumps({"values": [A.labels[v] for v in values],
                              **{n: A.labels[x] for n, x in zip(names, E.as_tuple())}}) + "\n")
        return EXIT_OK
    out.write("{" + ", ".join(A.labels[v] for v in values) + "}\n")
    for n, x in zip(names, E.as_tuple()):
        out.write(f"  {n} = {A.labels[x]}\n")
    for note in demorgan_check(A).notes:
        out.write(f"  {note}\n")
    return EXIT_OK


def _distribution(args, A) -> Optional[AtomDistribution]:
    if not args.dist:
        return None
    raw = args.dist
    data = json.loads(Path(raw).read_text()) if raw.endswith(".json") else json.loads(raw)
    return AtomDistribution.from_labels(A, data)


def cmd_montecarlo(args, out: TextIO) -> int:
    A = get_algebra(args.algebra)
    profile = parse_profile(args.profile)
    p = _distribution(args, A)
    for s in _sentences(args):
        phi = parse_formula(s, _vocab(args), A, sentence=True)
        vocab = _vocab(args)
        if args.exact:
            out.write("n,value_label,probability\n")
            for n in args.n:
                mu = exact_mu_small(phi, n, A, p, profile, vocab)
                if sum(mu.values()) != 1:
                    raise InvariantViolation("exact probabilities do not sum to 1")
                for a in A.elements:
                    out.write(f"{n},{A.labels[a]},{mu[a]}\n")
            continue
        if args.report:
            rep = convergence_report(phi, args.n, A, p, args.samples, profile, args.seed, args.threshold, vocab)
            for line in rep.lines():
                out.write(line + "\n")
            continue
        rows = [estimate_distribution(phi, n, A, p, args.samples, profile, args.seed, vocab) for n in args.n]
        for r in rows:
            if sum(r.counts) != r.samples:
                raise InvariantViolation("frequencies do not sum to 1")
        write_csv(rows, out)
    return EXIT_OK


def _interval(text: Optional[str]) -> Optional[ValueInterval]:
    if not text:
        return None
    lo, _, hi = text.partition(",")
    return ValueInterval(float(Fraction(lo.strip())), float(Fraction(hi.strip())))


def cmd_continuum(args, out: TextIO) -> int:
    if args.mode == "extremum":
        t = parse_term(args.term)
        res = term_extremum_interval(t, args.tol)
        if args.json:
            out.write(json.dumps(dataclasses.asdict(res)) + "\n")
        else:
            for line in res.lines():
                out.write(line + "\n")
        return EXIT_OK
    if args.mode == "estimate":
        for s in _sentences(args):
            phi = parse_formula(s, _vocab(args), sentence=True)
            for n in args.n:
                res = estimate_concentration(phi, n, args.samples, args.bins, args.seed, _interval(args.interval))
                if args.csv:
                    write_histogram_csv(res, out)
                else:
                    line = f"n={n} median={res.median:.6f}"
                    if res.interval is not None:
                        line += f" in[{res.interval.lower},{res.interval.upper}]={res.in_interval:.4f}"
                    out.write(line + "\n")
        return EXIT_OK
    vocab = Vocabulary.parse(args.vocab or "P/1")
    g = {}
    for item in args.g or []:
        atom, _, cell = item.rpartition("=")
        g[atom.strip()] = int(cell)
    phi = extension_axiom_interval(args.k, args.N, g, vocab)
    out.write(to_text(phi) + "\n")
    for n in args.n or []:
        res = estimate_concentration(phi, n, args.samples, 20, args.seed, vocab=vocab)
        out.write(f"n={n} freq(value >= {args.threshold})={res.fraction_at_least(args.threshold):.4f}\n")
    return EXIT_OK


def cmd_s5(args, out: TextIO) -> int:
    for s in _sentences(args):
        m = parse_modal(s)
        f = s5_translate(m)
        tag = "sentence" if is_fully_modal(m) else "not fully modal: free variable w"
        out.write(f"{to_text(f)}    [{tag}]\n")
    return EXIT_OK


def cmd_run(args, out: TextIO) -> int:
    data = json.loads(Path(args.config).read_text())
    command = data.pop("command", None)
    if not command:
        raise ValueError("config needs a 'command' entry")
    return run(command, ExperimentConfig.from_json(data), out)


COMMANDS = {
    "algebra": cmd_algebra, "parse": cmd_parse, "eval": cmd_eval, "translate": cmd_translate,
    "asymptotic": cmd_asymptotic, "qe": cmd_qe, "asymset": cmd_asymset, "montecarlo": cmd_montecarlo,
    "continuum": cmd_continuum, "s5": cmd_s5, "run": cmd_run,
}


def run(command: str, config: ExperimentConfig, out: TextIO = sys.stdout) -> int:
    """Run ``command`` from a configuration object instead of argv."""
    argv = [command]
    if command in ("asymptotic", "translate", "qe", "montecarlo", "asymset", "eval", "parse"):
        argv += ["--algebra", config.algebra]
    if config.vocab and command != "asymset":
        argv += ["--vocab", config.vocab]
    if command in ("asymptotic", "translate", "montecarlo"):
        argv += ["--profile", config.profile]
    for s in config.sentences:
        argv += ["--sentence", s]
    if command == "montecarlo":
        argv += ["--n", *map(str, config.n), "--samples", str(config.samples), "--seed", str(config.seed)]
    for k, v in config.extra.items():
        flag = "--" + k.replace("_", "-")
        if v is True:
            argv.append(flag)
        elif isinstance(v, list):
            argv += [flag, *map(str, v)]
        elif v is not False and v is not None:
            argv += [flag, str(v)]
    return main(argv, out)


# ---------------------------------------------------------------- argument parsing


def _add_sentence_args(p, required_algebra=True):
    p.add_argument("--sentence", "-s", action="append", help="formula text (repeatable)")
    p.add_argument("--file", "-f", help="file with one formula per line; '#' starts a comment line")
    p.add_argument("--vocab", help="vocabulary such as 'P/1,R/2' (a '~' entry adds crisp identity)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="mvlaws", description="Almost-sure values of many-valued first-order sentences.")
    ap.add_argument("--version", action="version", version=f"mvlaws {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("algebra", help="list, show or check finite algebras")
    p.add_argument("action", choices=["list", "show", "check"])
    p.add_argument("name", nargs="?", help="B2, L<n>, G<n>, prod(X,Y), X[ops] or a .json file")
    p.add_argument("--json", action="store_true", help="show: print the algebra file format")

    p = sub.add_parser("parse", help="parse formulas and print their normal rendering")
    _add_sentence_args(p)
    p.add_argument("--algebra", help="algebra whose signature and labels are accepted")
    p.add_argument("--sentence-mode", action="store_true", help="reject free variables")

    p = sub.add_parser("eval", help="evaluate formulas in a structure file")
    _add_sentence_args(p)
    p.add_argument("--structure", required=True, help="structure JSON file (1-based cells)")
    p.add_argument("--algebra", help="override the structure file's algebra")
    p.add_argument("--profile", default="none", help="none, crisp-id, graph, graph:R, joined by '+'")
    p.add_argument("--assign", action="append", help="free variable assignment x=i (1-based, repeatable)")

    p = sub.add_parser("translate", help="emit the classical translations, one per carrier value")
    _add_sentence_args(p)
    p.add_argument("--algebra", required=True)
    p.add_argument("--profile", default="none")
    p.add_argument("--axioms", action="store_true", help="also print the partition and profile axioms")

    p = sub.add_parser("asymptotic", help="decide almost-sure values")
    _add_sentence_args(p)
    p.add_argument("--algebra", required=True)
    p.add_argument("--profile", default="none")
    p.add_argument("--explain", action="store_true", help="print the achieved-value set at each quantifier")
    p.add_argument("--no-memo", action="store_true", help="disable memoisation")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("qe", help="De Morgan quantifier elimination")
    _add_sentence_args(p)
    p.add_argument("--algebra", required=True)

    p = sub.add_parser("asymset", help="almost-sure value set of a De Morgan-like algebra")
    p.add_argument("--algebra", required=True)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("montecarlo", help="empirical or exact value distributions (CSV)")
    _add_sentence_args(p)
    p.add_argument("--algebra", required=True)
    p.add_argument("--profile", default="none")
    p.add_argument("--n", type=int, nargs="+", default=[5, 10, 20, 50], help="domain sizes")
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dist", help='JSON (inline or .json file): {"P": {"0": "1/4", "1": "3/4"}}')
    p.add_argument("--exact", action="store_true", help="exact enumeration instead of sampling")
    p.add_argument("--report", action="store_true", help="convergence report against the decided value")
    p.add_argument("--threshold", type=float, default=0.95, help="report: required modal frequency")
    p.add_argument("--csv", action="store_true", help="CSV output (the default for sampling)")

    p = sub.add_parser("continuum", help="[0,1]-valued Lukasiewicz logic")
    p.add_argument("mode", choices=["estimate", "extremum", "ext-axiom"])
    _add_sentence_args(p)
    p.add_argument("--term", help="extremum: term over v1..vk")
    p.add_argument("--tol", type=float, default=1e-5, help="extremum: target accuracy")
    p.add_argument("--n", type=int, nargs="+", help="domain sizes")
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--bins", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--interval", help="estimate: report the mass of [lo,hi], e.g. 0.5,0.51")
    p.add_argument("--k", type=int, default=1, help="ext-axiom: number of old elements")
    p.add_argument("--N", type=int, default=4, help="ext-axiom: grid resolution")
    p.add_argument("--g", action="append", help="ext-axiom: ATOM=j puts ATOM in [j/N,(j+1)/N]")
    p.add_argument("--threshold", type=float, default=0.9)
    p.add_argument("--csv", action="store_true", help="estimate: histogram CSV")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("s5", help="translate S5 modal formulas into one-variable first-order formulas")
    _add_sentence_args(p)

    p = sub.add_parser("run", help="run a command described by a JSON experiment config")
    p.add_argument("config")
    return ap


def main(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.command == "continuum":
        if args.mode == "extremum" and not args.term:
            print("error: continuum extremum needs --term", file=sys.stderr)
            return EXIT_INPUT
        if args.mode == "estimate" and not args.n:
            args.n = [200]
    try:
        return COMMANDS[args.command](args, out)
    except BudgetExceeded as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except InvariantViolation as e:
        print(f"invariant violated: {e}", file=sys.stderr)
        return EXIT_INVARIANT
    except (AlgebraError, ParseError, StructureError, QEError, ValueError, KeyError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
