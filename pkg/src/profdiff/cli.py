"""Command-line driver.

Exit codes: 0 success or all laws pass, 1 a law (or iso search) failed,
2 usage or validation error.
"""

import argparse
import os
import sys
from fractions import Fraction

from . import analytic as an
from . import catsym as cs
from . import formats as fm
from . import laws
from . import structmaps as sm
from .fincat import CategoryError, builtin
from .freesmc import Bang
from .prof import NatTrans, ProfunctorError, SearchBudgetExceeded, compose, iso_check, sum as psum

BOUND_ENV = "PROFDIFF_ARITY_BOUND"


class UsageError(Exception):
    pass


def default_bound(species=False):
    value = os.environ.get(BOUND_ENV)
    if value is not None:
        try:
            return int(value)
        except ValueError:
            raise UsageError(f"{BOUND_ENV} must be an integer, got {value!r}") from None
    return 4 if species else 3


def _emit(text, args):
    if args.out:
        fm.write_text(text, args.out)
    else:
        sys.stdout.write(text)


def _category(ref):
    if os.path.exists(ref):
        C = fm.read_file(ref)
        if not hasattr(C, "objects"):
            raise UsageError(f"{ref} is not a category document")
        return C
    return builtin(ref)


def _load(path, kind):
    doc = fm.load_document(open(path, encoding="utf-8").read())
    if doc["kind"] != kind:
        raise UsageError(f"{path}: expected a {kind} document, found {doc['kind']}")
    return fm.PARSERS[kind](doc)


def _species(ref, bound):
    if os.path.exists(ref):
        return _load(ref, "species")
    if ref == "E":
        return an.E(bound)
    if ref == "X":
        return an.X_species()
    if ref.startswith("E") and ref[1:].isdigit():
        return an.E_n(int(ref[1:]))
    raise UsageError(f"no species file or built-in named {ref!r} (built-ins: E, En, X)")


def _symseq(path):
    P = _load(path, "profunctor")
    if not isinstance(P.dom, Bang):
        raise UsageError(f"{path}: a Kleisli map needs a domain of the form !A")
    return cs.SymSeq(P.dom.base, P.cod, P)


def _bound(args, species=False):
    return args.arity_bound if args.arity_bound is not None else default_bound(species)


# -- subcommands ---------------------------------------------------------------------------

def cmd_cat(args):
    C = _category(args.source)
    if args.action == "build":
        _emit(fm.serialize(C), args)
    else:
        lines = [f"category {C.name or ''}: {len(C.objects())} objects, {len(C.morphisms())} morphisms"]
        for f in C.morphisms():
            s, t = C.src(f), C.tgt(f)
            lines.append(f"  {C.morphism_labels[f]}: {C.object_labels[s]} -> {C.object_labels[t]}")
        _emit("\n".join(lines) + "\n", args)
    return 0


def cmd_prof(args):
    if args.action == "show":
        P = _load(args.files[0], "profunctor")
        lines = [f"profunctor {P.name or ''}: {len(P.cells)} nonempty cells, {P.size()} elements"]
        for (b, a), xs in sorted(P.cells.items(), key=repr):
            lines.append(f"  ({P.cod.encode_object(b)}, {P.dom.encode_object(a)}): {len(xs)}")
        _emit("\n".join(lines) + "\n", args)
        return 0
    if len(args.files) != 2:
        raise UsageError(f"prof {args.action} takes two profunctor files")
    F, G = (_load(p, "profunctor") for p in args.files)
    if args.action == "compose":
        _emit(fm.serialize(compose(F, G)), args)
        return 0
    if args.action == "sum":
        _emit(fm.serialize(psum(F, G)), args)
        return 0
    witness = None
    if F.cells == G.cells:
        # same carrier: offer the identity, which iso_check re-verifies
        witness = NatTrans(F, G, {k: {x: x for x in v} for k, v in F.cells.items()}, name="id")
    try:
        t = iso_check(F, G, witness=witness, node_limit=args.node_limit)
    except SearchBudgetExceeded as exc:
        print(f"search budget exceeded: {exc}", file=sys.stderr)
        return 1
    if t is None:
        print("no natural isomorphism")
        return 1
    lines = ["natural isomorphism found:"]
    for (b, a), m in sorted(t.components.items(), key=repr):
        pairs = ", ".join(f"{F.index(b, a, x)}->{G.index(b, a, y)}" for x, y in m.items())
        lines.append(f"  ({F.cod.encode_object(b)}, {F.dom.encode_object(a)}): {pairs}")
    _emit("\n".join(lines) + "\n", args)
    return 0


def cmd_struct(args):
    cats = [_category(c) for c in args.category or []]
    P = sm.build(args.name, cats, _bound(args))
    _emit(fm.serialize(P), args)
    return 0


def cmd_catsym(args):
    bound = _bound(args)
    if args.action == "id":
        if not args.category:
            raise UsageError("catsym id needs --category")
        S = cs.kleisli_id(_category(args.category[0]), bound)
    elif args.action == "derive":
        S = cs.derivative(_symseq(args.files[0]))
    else:
        if len(args.files) != 2:
            raise UsageError("catsym compose takes two files, G then F")
        G, F = (_symseq(p) for p in args.files)
        S = cs.kleisli_compose(G, F, args.arity_bound)
    _emit(fm.serialize(S.body), args)
    return 0


def cmd_analytic(args):
    S = _symseq(args.kleisli)
    X = _load(args.presheaf, "presheaf")
    _emit(fm.serialize(an.eval_analytic(S, X)), args)
    return 0


def cmd_species(args):
    bound = _bound(args, species=True)
    F = _species(args.files[0], bound)
    if args.action == "egf":
        coeffs = an.egf_coeffs(F, bound)
        _emit(", ".join(str(Fraction(c)) for c in coeffs) + "\n", args)
        return 0
    if args.action == "derive":
        out = an.sp_derivative(F)
    else:
        if len(args.files) != 2:
            raise UsageError(f"species {args.action} takes two species")
        G = _species(args.files[1], bound)
        out = (an.sp_substitute(F, G, bound) if args.action == "compose"
               else an.sp_product(F, G, min(bound, F.arity + G.arity)))
    _emit(fm.serialize(out), args)
    return 0


def cmd_laws(args):
    bound = _bound(args)
    if args.config:
        doc = fm.yaml.safe_load(open(args.config, encoding="utf-8"))
        try:
            config = [(c["law"], tuple(c["categories"]), int(c.get("bound", bound)))
                      for c in doc["cases"]]
        except (KeyError, TypeError, ValueError):
            raise UsageError("config needs cases: [{law, categories, bound}]") from None
        report = laws.run_suite(config, suite=os.path.basename(args.config))
    elif args.suite == "mutation":
        seed = args.seed if args.seed is not None else 0
        name, report = laws.mutation_trial(seed, bound)
        print(f"corrupted map: {name}", file=sys.stderr)
    elif args.suite in laws.SUITES:
        report = laws.run_suite(laws.SUITES[args.suite](bound), suite=args.suite)
    else:
        raise UsageError(f"unknown suite {args.suite!r}")
    print(report.table())
    if args.out:
        fm.write_text(fm.dump_document(report.as_dict()), args.out)
    return 0 if report.ok else 1


# -- parser ----------------------------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--arity-bound", type=int, default=None,
                        help=f"truncation bound (default 3, 4 for species; env {BOUND_ENV})")
    common.add_argument("--out", help="write the result to this file")
    common.add_argument("--seed", type=int, help="seed for randomized runs")

    parser = argparse.ArgumentParser(prog="profdiff", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cat", parents=[common], help="finite categories")
    p.add_argument("action", choices=["build", "show"])
    p.add_argument("source", help="category file or built-in name")
    p.set_defaults(func=cmd_cat)

    p = sub.add_parser("prof", parents=[common], help="profunctors")
    p.add_argument("action", choices=["compose", "sum", "iso-check", "show"])
    p.add_argument("files", nargs="+")
    p.add_argument("--node-limit", type=int, default=200_000)
    p.set_defaults(func=cmd_prof)

    p = sub.add_parser("struct", parents=[common], help="structural maps")
    p.add_argument("name", choices=sm.NAMES)
    p.add_argument("--category", action="append", help="base category (repeat for two)")
    p.set_defaults(func=cmd_struct)

    p = sub.add_parser("catsym", parents=[common], help="Kleisli maps !A -> B")
    p.add_argument("action", choices=["compose", "derive", "id"])
    p.add_argument("files", nargs="*")
    p.add_argument("--category", action="append")
    p.set_defaults(func=cmd_catsym)

    p = sub.add_parser("analytic", parents=[common], help="analytic functors")
    p.add_argument("action", choices=["eval"])
    p.add_argument("kleisli", help="Kleisli map file")
    p.add_argument("presheaf", help="presheaf file")
    p.set_defaults(func=cmd_analytic)

    p = sub.add_parser("species", parents=[common], help="species")
    p.add_argument("action", choices=["egf", "derive", "compose", "product"])
    p.add_argument("files", nargs="+", help="species files or built-ins E, En, X")
    p.set_defaults(func=cmd_species)

    p = sub.add_parser("laws", parents=[common], help="law suites")
    p.add_argument("action", choices=["run"])
    p.add_argument("--suite", default="default", help="default, empty or mutation")
    p.add_argument("--config", help="YAML file listing cases")
    p.set_defaults(func=cmd_laws)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, fm.FormatError, CategoryError, ProfunctorError, ValueError,
            OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
