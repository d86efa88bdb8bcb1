"""Instance checks of the pseudocomonad, Seely, derivative and bialgebra laws.

Each law compares two realized composites.  Both sides are evaluated into a
closed cell formula (a hom-set of !A or a product of them) by composing the
hom elements that make up a coend representative; that evaluation is the
proof chain read elementwise.  The pairing of elements with equal values is
the witness, and it is re-checked for well-definedness on coend classes,
naturality and bijectivity on the safe window before a case may pass.
"""

import random
import time
from dataclasses import dataclass, field

from . import structmaps as sm
from .fincat import Functor, Product, builtin, one
from .freesmc import PermMor, depth, concat_mor, concat_mors, flatten, flatten_mor, reorder, split_mor
from .prof import (NatTrans, associator, bang_prof, check_bijective, check_naturality,
                   check_well_defined, compose, direct_sum, hom_prof, identity_nat, inverse,
                   iso_check, left_unitor, natural_map, right_unitor, sum as psum, tensor,
                   vcompose, whisker_left, whisker_right, zero as zero_prof, audit, companion)

LAWS = ("first_constraint", "second_constraint", "strength", "comonad", "seely",
        "derivative_rules", "bialgebra")


@dataclass
class Check:
    name: str
    verdict: str
    cells: int = 0
    untested: int = 0
    elements: int = 0
    counterexample: str = None
    witness: object = field(default=None, repr=False, compare=False)

    def as_dict(self):
        out = {"name": self.name, "verdict": self.verdict, "cells": self.cells,
               "untested": self.untested, "elements": self.elements}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


@dataclass
class LawCase:
    law: str
    categories: tuple
    bound: int
    checks: list = field(default_factory=list)
    uses: set = field(default_factory=set)
    seconds: float = 0.0

    @property
    def key(self):
        return (self.law, self.categories, self.bound)

    @property
    def verdict(self):
        verdicts = [c.verdict for c in self.checks]
        if not verdicts or any(v == "fail" for v in verdicts):
            return "fail"
        if all(v == "vacuous" for v in verdicts):
            return "vacuous"
        return "pass"

    @property
    def untested(self):
        return sum(c.untested for c in self.checks)

    def as_dict(self):
        return {"law": self.law, "categories": list(self.categories), "bound": self.bound,
                "verdict": self.verdict, "untested": self.untested,
                "checks": [c.as_dict() for c in self.checks]}


@dataclass
class Report:
    suite: str
    cases: list = field(default_factory=list)

    @property
    def ok(self):
        return all(c.verdict != "fail" for c in self.cases)

    def failures(self):
        return [c for c in self.cases if c.verdict == "fail"]

    def as_dict(self):
        """Serializable form; timings stay out so reruns are byte-identical."""
        cases = sorted(self.cases, key=lambda c: repr(c.key))
        bounds = sorted({c.bound for c in cases})
        return {"format_version": 1, "kind": "report", "suite": self.suite,
                "bounds": bounds, "ok": self.ok,
                "summary": {v: sum(1 for c in cases if c.verdict == v)
                            for v in ("pass", "vacuous", "fail")},
                "cases": [c.as_dict() for c in cases]}

    def table(self):
        rows = [f"{'law':<18} {'categories':<18} {'n':>2} {'verdict':<8} {'untested':>8} {'secs':>7}"]
        for c in sorted(self.cases, key=lambda c: repr(c.key)):
            rows.append(f"{c.law:<18} {','.join(c.categories):<18} {c.bound:>2} "
                        f"{c.verdict:<8} {c.untested:>8} {c.seconds:>7.2f}")
        return "\n".join(rows)


# -- comparison machinery ---------------------------------------------------------------

class Window:
    def __init__(self, description, pred=None):
        self.description = description
        self.pred = pred

    def __call__(self, b, a):
        return True if self.pred is None else self.pred(b, a)

    def cells(self, *profs):
        keys = set()
        for P in profs:
            keys |= set(P.cells)
        return {k for k in keys if self(*k)}


FULL = Window("full")


def safe_window(law, bound, check=None):
    """Output cells where every coend index stays inside the bound.

    Most composites here never produce a middle index longer than their
    outputs, so the full window is safe.  Two comparisons pass through a
    middle object whose length is the sum of two output lengths.
    """
    n = bound
    if law == "seely" and check == "s2inv_s2":
        return Window(f"|alpha|+|beta| <= {n}", lambda b, a: len(a[0]) + len(a[1]) <= n)
    if law == "seely" and check in ("seely2_composite",):
        return Window(f"|alpha|+|beta| <= {n}", lambda b, a: len(a[0]) + len(a[1]) <= n)
    if law == "bialgebra" and check == "bialgebra_square":
        return Window(f"|alpha1|+|alpha2| <= {n}", lambda b, a: len(a[0]) + len(a[1]) <= n)
    return FULL


def compare(name, lhs, rhs, key_l, key_r, window=FULL):
    """Pair elements of lhs and rhs with equal formula values and verify the pairing."""
    keys = set(lhs.cells) | set(rhs.cells)
    tested = sorted((k for k in keys if window(*k)), key=repr)
    untested = len(keys) - len(tested)
    if not tested:
        return Check(name, "vacuous", 0, untested, 0, witness=NatTrans(lhs, rhs, {}))

    def fail(msg):
        return Check(name, "fail", len(tested), untested, 0, counterexample=msg)

    for side, P, key in (("lhs", lhs, key_l), ("rhs", rhs, key_r)):
        ce = check_well_defined(P, key, window)
        if ce is not None:
            return fail(f"{side} evaluation depends on the representative at {ce.cell!r}")
    comps = {}
    for k in tested:
        index = {}
        for y in rhs.cell(*k):
            v = key_r(*k, y)
            if v in index:
                return fail(f"rhs evaluation not injective at {k!r}")
            index[v] = y
        m = {}
        for x in lhs.cell(*k):
            v = key_l(*k, x)
            if v not in index:
                return fail(f"lhs element without partner at {k!r}")
            m[x] = index[v]
        comps[k] = m
    t = NatTrans(lhs, rhs, comps, name=name)
    ce = check_bijective(t, window) or check_naturality(t, window)
    if ce is not None:
        return fail(f"{ce.kind} at {ce.cell!r}: {ce.detail}")
    size = sum(len(m) for m in comps.values())
    return Check(name, "pass", len(tested), untested, size, witness=t)


def audited(name, maps):
    """Functoriality audit of the structural maps a law is built from.

    Maps touching !!!A are audited on generators only (identities, closure,
    interchange); their exhaustive audit runs in the test suite at a smaller
    bound, since the composition check over !!!A dominates the whole case.
    """
    for P in maps:
        ce = audit(P, deep=max(depth(P.dom), depth(P.cod)) <= 2)
        if ce is not None:
            return Check(f"audit:{name}", "fail", len(P.cells), 0, 0,
                         counterexample=f"{P.name}: {ce.kind} at {ce.cell!r} ({ce.detail})")
    return Check(f"audit:{name}", "pass", sum(len(P.cells) for P in maps), 0,
                 sum(P.size() for P in maps))


def _nat_check(name, t, window=FULL, iso=True):
    ce = (check_bijective(t, window) if iso else None) or check_naturality(t, window)
    if ce is not None:
        return Check(name, "fail", len(t.components), 0, 0,
                     counterexample=f"{ce.kind} at {ce.cell!r}: {ce.detail}")
    verdict = "pass" if t.components else "vacuous"
    return Check(name, verdict, len(t.components), 0,
                 sum(len(m) for m in t.components.values()), witness=t)


def _hom_key(b, a, f):
    return f


def _singleton(A, f):
    return PermMor((A.src(f),), (A.tgt(f),), (0,), (f,))


# -- first constraint -------------------------------------------------------------------------

def check_first_constraint(A, bound, case=None):
    """η': A[a', a] => (d ∘ d̄)(a', a), f |-> [<a>, <f>, id], plus the triangle identities."""
    case = case or LawCase("first_constraint", (A.name,), bound)
    BA = sm.bang(A, bound)
    d, db = sm.dereliction(A, bound), sm.codereliction(A, bound)
    case.uses |= {"dereliction", "codereliction"}
    case.checks.append(audited("d,d̄", [d, db]))
    one_A = hom_prof(A)
    dd = compose(d, db)

    def eta(a2, a, f):
        return dd.class_of(a2, a, (a,), _singleton(A, f), BA.identity((a,)))

    eta_p = natural_map(one_A, dd, eta, name="η'")
    case.checks.append(_nat_check("eta_prime", eta_p))
    case.checks.append(compare("d∘d̄ ≅ 1", dd, one_A,
                               lambda b, a, r: BA.compose(r[2], r[1]).arrows[0], _hom_key))
    case.checks.extend(_triangles(A, BA, d, db, eta_p, dd))
    return case


def _triangles(A, BA, d, db, eta, dd):
    """Unit η: 1 => d∘d̄ and counit ε: d̄∘d => 1 satisfy both zig-zag identities."""
    one_BA = hom_prof(BA)
    bd = compose(db, d)
    eps = natural_map(bd, one_BA, lambda b, a, r: BA.compose(r[2], r[1]), name="ε")
    out = [_nat_check("counit", eps, iso=False)]
    # d̄ => d̄∘1 => d̄∘(d∘d̄) => (d̄∘d)∘d̄ => 1∘d̄ => d̄
    db_1 = compose(db, hom_prof(A))
    db_dd = compose(db, dd)
    bd_db = compose(bd, db)
    one_db = compose(one_BA, db)
    steps = [inverse(right_unitor(db_1)),
             whisker_left(db, eta, db_1, db_dd),
             inverse(associator(bd_db, db_dd)),
             whisker_right(eps, db, bd_db, one_db),
             left_unitor(one_db)]
    out.append(_zigzag("triangle d̄", steps, db))
    # d => 1∘d => (d∘d̄)∘d => d∘(d̄∘d) => d∘1 => d
    one_d = compose(hom_prof(A), d)
    dd_d = compose(dd, d)
    d_bd = compose(d, bd)
    d_1 = compose(d, one_BA)
    steps = [inverse(left_unitor(one_d)),
             whisker_right(eta, d, one_d, dd_d),
             associator(dd_d, d_bd),
             whisker_left(d, eps, d_bd, d_1),
             right_unitor(d_1)]
    out.append(_zigzag("triangle d", steps, d))
    return out


def _zigzag(name, steps, P):
    t = steps[0]
    try:
        for s in steps[1:]:
            t = vcompose(s, t)
    except KeyError as exc:
        return Check(name, "fail", 0, 0, 0, counterexample=f"composite leaves window: {exc!r}")
    ident = identity_nat(P).components
    if t.components != ident:
        bad = next(k for k in ident if t.components.get(k) != ident[k])
        return Check(name, "fail", len(ident), 0, 0,
                     counterexample=f"zig-zag is not the identity at {bad!r}")
    verdict = "pass" if ident else "vacuous"
    return Check(name, verdict, len(ident), 0, P.size(), witness=t)


# -- second constraint --------------------------------------------------------------------------

def check_second_constraint(A, bound, case=None):
    """p ∘ d̄ ∘ ρ  vs  c̄_{!A} ∘ (d̄_{!A} ⊗ p) ∘ (d̄ ⊗ w̄), both evaluated in !A[⊔phi', <a>]."""
    case = case or LawCase("second_constraint", (A.name,), bound)
    n = bound
    BA, BBA = sm.bang(A, n), sm.bang2(A, n)
    p, db, wb = sm.promotion(A, n), sm.codereliction(A, n), sm.coweakening(A, n)
    db2, cb2 = sm.codereliction(BA, n), sm.cocontraction(BA, n)
    case.uses |= {"promotion", "codereliction", "coweakening", "cocontraction"}
    case.checks.append(audited("p,d̄,w̄,d̄!,c̄!", [p, db, wb, db2, cb2]))
    rho = sm.unitor_right(A)
    top = compose(p, compose(db, rho))
    bottom = compose(cb2, compose(tensor(db2, p), tensor(db, wb)))

    def key_top(phi, ax, r):
        _, mp, (_, md, f) = r
        return BA.compose(_singleton(A, f), BA.compose(md, mp))

    def key_bottom(phi, ax, r):
        _, mc, (_, (y1, y2), (x1, x2)) = r
        step = concat_mor(flatten_mor(y1), y2)
        return BA.compose(concat_mor(x1, x2), BA.compose(step, flatten_mor(mc)))

    w = safe_window("second_constraint", n)
    case.checks.append(compare("mu_prime", bottom, top, key_bottom, key_top, w))
    return case


# -- strength -----------------------------------------------------------------------------------

def _proj(G, i):
    return PermMor(tuple(x[i] for x in G.dom), tuple(x[i] for x in G.cod), G.sigma,
                   tuple(f[i] for f in G.arrows))


def check_strength(A, B, bound, case=None):
    """mon2 ∘ (d̄_A ⊗ 1) vs d̄_{A×B} ∘ (1 ⊗ d_B), evaluated in !A[!π1γ, <a>] x !B[!π2γ, β]."""
    case = case or LawCase("strength", (A.name, B.name), bound)
    n = bound
    BA, BB = sm.bang(A, n), sm.bang(B, n)
    AB = Product(A, B)
    m2, dbA, dB, dbAB = sm.mon2(A, B, n), sm.codereliction(A, n), sm.dereliction(B, n), \
        sm.codereliction(AB, n)
    case.uses |= {"mon2", "codereliction", "dereliction"}
    case.checks.append(audited("mon2,d̄,d", [m2, dbA, dB, dbAB]))
    lhs = compose(m2, tensor(dbA, hom_prof(BB)))
    rhs = compose(dbAB, tensor(hom_prof(A), dB))

    def key_l(g, ab, r):
        _, (u, v), (x, h) = r
        return (BA.compose(x, u), BB.compose(h, v))

    def key_r(g, ab, r):
        _, m, (f, y) = r
        return (BA.compose(_singleton(A, f), _proj(m, 0)), BB.compose(y, _proj(m, 1)))

    case.checks.append(compare("sigma_prime", lhs, rhs, key_l, key_r,
                               safe_window("strength", n)))
    return case


# -- comonad laws ---------------------------------------------------------------------------------

def _as_bang_mor(doms, cod, e):
    """Read an element (sigma, xs) of a banged hom-profunctor as a morphism."""
    sigma, xs = e
    return PermMor(tuple(doms), tuple(cod), sigma, tuple(xs))


def check_comonad_laws(A, bound, case=None):
    case = case or LawCase("comonad", (A.name,), bound)
    n = bound
    BA, BBA = sm.bang(A, n), sm.bang2(A, n)
    B3 = sm.bang(BBA, n)
    p, pp = sm.promotion(A, n), sm.promotion(BA, n)
    d, dd = sm.dereliction(A, n), sm.dereliction(BA, n)
    case.uses |= {"promotion", "dereliction"}
    case.checks.append(audited("p,p!,d,d!", [p, pp, d, dd]))
    bp = bang_prof(p, BBA, B3)
    bd = bang_prof(d, BBA, BA)

    # coassociativity in !A[⊔⊔Psi, alpha]
    lhs = compose(pp, p)
    rhs = compose(bp, p)

    def k_lhs(psi, alpha, r):
        _, m1, m2 = r
        return BA.compose(m2, flatten_mor(m1))

    def k_rhs(psi, alpha, r):
        phi, e, m2 = r
        G = _as_bang_mor([flatten(x) for x in psi], phi, e)
        return BA.compose(m2, flatten_mor(G))

    w = safe_window("comonad", n)
    case.checks.append(compare("coassociativity", lhs, rhs, k_lhs, k_rhs, w))

    one_BA = hom_prof(BA)
    left = compose(dd, p)
    case.checks.append(compare("d_{!A}∘p ≅ 1", left, one_BA,
                               lambda b, a, r: BA.compose(r[2], flatten_mor(r[1])), _hom_key, w))
    right = compose(bd, p)

    def k_right(alpha2, alpha, r):
        phi, e, m = r
        G = _as_bang_mor([(x,) for x in alpha2], phi, e)
        return BA.compose(m, flatten_mor(G))

    case.checks.append(compare("!d∘p ≅ 1", right, one_BA, k_right, _hom_key, w))
    return case


# -- Seely -------------------------------------------------------------------------------------------

def check_seely(A, B, bound, case=None):
    case = case or LawCase("seely", (A.name, B.name), bound)
    n = bound
    BA, BB, S, P = sm._seely_parts(A, B, n)
    s2, s2i = sm.seely2(A, B, n), sm.seely2_inv(A, B, n)
    s0, s0i = sm.seely0(n), sm.seely0_inv(n)
    case.uses |= {"seely2", "seely2_inv", "seely0", "seely0_inv", "mon0", "mon2",
                  "promotion", "dereliction", "weakening", "contraction"}
    case.checks.append(audited("s2,s2•,s0,s0•", [s2, s2i, s0, s0i]))

    comp = lambda b, a, r: S.compose(r[2], r[1])  # noqa: E731
    case.checks.append(compare("s2∘s2• ≅ 1", compose(s2, s2i), hom_prof(S), comp, _hom_key,
                               safe_window("seely", n, "s2_s2inv")))

    def k_inv(b, a, r):
        m = S.compose(r[2], r[1])
        parts = split_mor(S, m, (len(b[0]), len(b[1])), (len(a[0]), len(a[1])))
        if parts is None:
            return ("mixes summands", m)
        return (_untag(parts[0]), _untag(parts[1]))

    case.checks.append(compare("s2•∘s2 ≅ 1", compose(s2i, s2), hom_prof(P), k_inv, _hom_key,
                               safe_window("seely", n, "s2inv_s2")))

    I, Z = one(), sm.empty_category()
    BZ = sm.bang(Z, n)
    const = lambda b, a, r: "*"  # noqa: E731
    case.checks.append(_exact("s0∘s0• = 1", compose(s0, s0i), hom_prof(BZ), const, const))
    case.checks.append(_exact("s0•∘s0 = 1", compose(s0i, s0), hom_prof(I), const, const))

    # the direct formulas against their defining composites
    wdw = safe_window("seely", n, "seely2_composite")
    case.checks.append(compare("seely2 = composite", sm.seely2_composite(A, B, n), s2,
                               _seely2_key(A, B, S), lambda b, a, m: m, wdw))
    case.checks.append(compare("seely2_inv = composite", sm.seely2_inv_composite(A, B, n), s2i,
                               _seely2_inv_key(S), lambda b, a, m: m, FULL))
    case.checks.append(compare("seely0 = !(I→0)∘mon0", sm.seely0_composite(n), s0,
                               const, const, FULL))
    case.checks.append(_mon0_check(n))
    return case


def _untag(f):
    return PermMor(tuple(x[1] for x in f.dom), tuple(x[1] for x in f.cod), f.sigma,
                   tuple(a[1] for a in f.arrows))


def _tag(i, f):
    return PermMor(tuple((i, x) for x in f.dom), tuple((i, x) for x in f.cod), f.sigma,
                   tuple((i, a) for a in f.arrows))


def _exact(name, lhs, rhs, key_l, key_r):
    c = compare(name, lhs, rhs, key_l, key_r)
    if c.verdict == "pass" and lhs.cardinalities() != rhs.cardinalities():
        c.verdict, c.counterexample = "fail", "cardinalities differ"
    return c


def _mon0_check(n):
    ok = sm.mon0_unit_law(n)
    return Check("mon0 unit law", "pass" if ok else "fail", 1, 0, 0,
                 counterexample=None if ok else "mon2∘(mon0⊗1) is not the relabelling")


def _seely2_key(A, B, S):
    """Evaluate (!ψ)∘mon2∘(p⊗p) into !(A⊕B)[gamma, ι1 alpha ⊔ ι2 beta]."""
    bases = (A, B)

    def key(gamma, ab, r):
        delta, (sigma, xs), (_, (u, v), (pa, pb)) = r
        pieces = ([d[0] for d in delta], [d[1] for d in delta])
        offsets, pos = ([], []), 0
        for side in (0, 1):
            for d in pieces[side]:
                offsets[side].append(pos)
                pos += len(d)
        # entry i of gamma reaches one entry of delta_sigma(i) through ψ
        sig, arrows = [], []
        for i, (side, rep) in enumerate(xs):
            _, q, (_, h, dw) = rep
            m = dw[side]  # the dereliction factor; the other side is weakening
            C = bases[side]
            sig.append(offsets[side][sigma[i]] + m.sigma[0])
            arrows.append((side, C.compose(m.arrows[0], C.compose(h, q[1]))))
        mid = tuple((0, x) for d in pieces[0] for x in d) + tuple((1, x) for d in pieces[1] for x in d)
        into = PermMor(tuple(gamma), mid, tuple(sig), tuple(arrows))
        fa = S.compose(_tag(0, pa), _tag(0, flatten_mor(u)))
        fb = S.compose(_tag(1, pb), _tag(1, flatten_mor(v)))
        return S.compose(concat_mor(fa, fb), into)

    return key


def _seely2_inv_key(S):
    """Evaluate (!π1 ⊗ !π2) ∘ c into !(A⊕B)[ι1 alpha ⊔ ι2 beta, gamma]."""

    def key(ab, gamma, r):
        pair, (e1, e2), m = r
        g1 = _proj_elem(ab[0], pair[0], e1, 0)
        g2 = _proj_elem(ab[1], pair[1], e2, 1)
        return S.compose(m, concat_mor(g1, g2))

    return key


def _proj_elem(alpha, gamma, e, i):
    """(sigma, xs) in !π_i(alpha, gamma): xs[k] in (A⊕B)[ι alpha_k, gamma_sigma(k)]."""
    sigma, xs = e
    return PermMor(tuple((i, a) for a in alpha), tuple(gamma), sigma, tuple(xs))


# -- derivative rules ---------------------------------------------------------------------------

def check_derivative_rules(A, bound, case=None):
    case = case or LawCase("derivative_rules", (A.name,), bound)
    n = bound
    I = one()
    BA, BBA = sm.bang(A, n), sm.bang2(A, n)
    db, w, wb, c, cb, p = (sm.codereliction(A, n), sm.weakening(A, n), sm.coweakening(A, n),
                           sm.contraction(A, n), sm.cocontraction(A, n), sm.promotion(A, n))
    case.uses |= {"codereliction", "weakening", "coweakening", "contraction", "cocontraction",
                  "promotion", "mon2"}
    case.checks.append(audited("d̄,w,w̄,c,c̄,p", [db, w, wb, c, cb, p]))

    # constant rule
    const = compose(w, db)
    if const.cells:
        case.checks.append(Check("w∘d̄ ≅ 0", "fail", len(const.cells), 0, 0,
                                 counterexample="w∘d̄ has elements"))
    else:
        case.checks.append(Check("w∘d̄ ≅ 0", "pass", len(A.objects()), 0, 0))

    # product rule
    lhs = compose(c, db)
    i0 = I.identity(0)
    r_inv = companion(Functor(A, Product(A, I), lambda a: (a, 0), lambda f: (f, i0)))
    l_inv = companion(Functor(A, Product(I, A), lambda a: (0, a), lambda f: (i0, f)))
    first = compose(tensor(db, wb), r_inv)
    second = compose(tensor(wb, db), l_inv)
    rhs = psum(first, second)

    def k_lhs(pair, a, r):
        _, m1, m2 = r
        return (0 if len(pair[0]) == 1 else 1, BA.compose(m2, m1))

    def k_rhs(pair, a, e):
        tag, (_, (y1, y2), g) = e
        f = g[tag]
        if tag == 0:
            return (0, concat_mor(BA.compose(_singleton(A, f), y1), y2))
        return (1, concat_mor(y1, BA.compose(_singleton(A, f), y2)))

    case.checks.append(compare("product rule", lhs, rhs, k_lhs, k_rhs,
                               safe_window("derivative_rules", n)))

    # chain rule, in !A[⊔Phi, <a> ⊔ alpha]
    top = compose(p, compose(cb, tensor(db, hom_prof(BA))))
    P3 = Product(BA, Product(BA, BA))
    P3b = Product(Product(BA, BA), BA)
    assoc = companion(Functor(P3, P3b, lambda x: ((x[0], x[1][0]), x[1][1]),
                              lambda f: ((f[0], f[1][0]), f[1][1])))
    cb2 = sm.cocontraction(BA, n)
    db2 = sm.codereliction(BA, n)
    bottom = compose(cb2, compose(tensor(compose(db2, cb), p),
                                  compose(assoc, tensor(db, c))))

    def k_top(phi, a_alpha, r):
        _, mp, (_, mc, (x, h)) = r
        return BA.compose(concat_mor(x, h), BA.compose(mc, mp))

    def k_bottom(phi, a_alpha, r):
        _, m, (_, (y1, y2), (_, s, (x, k))) = r
        _, v, u = y1
        (f1, f2), f3 = s
        step1 = concat_mor(BA.compose(u, flatten_mor(v)), y2)
        step2 = concat_mors([f1, f2, f3])
        return BA.compose(concat_mor(x, k), BA.compose(step2, BA.compose(step1, flatten_mor(m))))

    case.checks.append(compare("chain rule", bottom, top, k_bottom, k_top,
                               safe_window("derivative_rules", n)))

    # monoidal rule over A x A
    m2 = sm.mon2(A, A, n)
    dAA = sm.codereliction(Product(A, A), n)
    lhs = compose(m2, tensor(db, db))

    def k_mon_l(g, ab, r):
        _, (u, v), (x, y) = r
        return (BA.compose(x, u), BA.compose(y, v))

    def k_mon_r(g, ab, m):
        return (_proj(m, 0), _proj(m, 1))

    case.checks.append(compare("monoidal rule", lhs, dAA, k_mon_l, k_mon_r,
                               safe_window("derivative_rules", n)))
    return case


# -- bialgebra ----------------------------------------------------------------------------------

def check_bialgebra(A, bound, case=None):
    case = case or LawCase("bialgebra", (A.name,), bound)
    n = bound
    I = one()
    BA = sm.bang(A, n)
    c, w, cb, wb = sm.contraction(A, n), sm.weakening(A, n), sm.cocontraction(A, n), \
        sm.coweakening(A, n)
    case.uses |= {"contraction", "weakening", "cocontraction", "coweakening"}
    case.checks.append(audited("c,w,c̄,w̄", [c, w, cb, wb]))

    # c ∘ c̄ vs (c̄ ⊗ c̄) ∘ (1 ⊗ r ⊗ 1) ∘ (c ⊗ c), in !A[beta1 ⊔ beta2, alpha1 ⊔ alpha2]
    lhs = compose(c, cb)
    P2 = Product(BA, BA)
    P4 = Product(P2, P2)
    swap = companion(Functor(P4, P4, lambda x: ((x[0][0], x[1][0]), (x[0][1], x[1][1])),
                             lambda f: ((f[0][0], f[1][0]), (f[0][1], f[1][1]))))
    rhs = compose(tensor(cb, cb), compose(swap, tensor(c, c)))

    def k_lhs(b, a, r):
        _, m1, m2 = r
        return BA.compose(m2, m1)

    def k_rhs(b, a, r):
        us, (y1, y2), (vs, s, (z1, z2)) = r
        (g1, g2), (g3, g4) = s
        (v1, v2), (v3, v4) = vs
        step = concat_mors([g1, g2, g3, g4])
        shuffle = reorder(A, [v1, v3, v2, v4], [0, 2, 1, 3])
        return BA.compose(concat_mor(z1, z2),
                          BA.compose(shuffle, BA.compose(step, concat_mor(y1, y2))))

    case.checks.append(compare("bialgebra_square", lhs, rhs, k_lhs, k_rhs,
                               safe_window("bialgebra", n, "bialgebra_square")))

    # w ∘ c̄ vs w ⊗ w (then I ⊗ I -> I), in !A[ε, alpha1 ⊔ alpha2]
    i0 = I.identity(0)
    unit2 = companion(Functor(Product(I, I), I, lambda x: 0, lambda f: i0))
    case.checks.append(compare("w∘c̄ ≅ w⊗w", compose(w, cb), compose(unit2, tensor(w, w)),
                               lambda b, a, r: BA.compose(r[2], r[1]),
                               lambda b, a, r: concat_mor(*r[2])))
    # c ∘ w̄ vs (w̄ ⊗ w̄) after I -> I ⊗ I, in !A[alpha1 ⊔ alpha2, ε]
    diag = companion(Functor(I, Product(I, I), lambda x: (0, 0), lambda f: (i0, i0)))
    case.checks.append(compare("c∘w̄ ≅ w̄⊗w̄", compose(c, wb), compose(tensor(wb, wb), diag),
                               lambda b, a, r: BA.compose(r[2], r[1]),
                               lambda b, a, r: concat_mor(*r[1])))
    # w ∘ w̄ vs 1_I
    case.checks.append(_exact("w∘w̄ ≅ 1", compose(w, wb), hom_prof(I),
                              lambda b, a, r: "*", lambda b, a, f: "*"))
    case.checks.extend(_convolution_checks(A, n))
    return case


def convolution_sum(F, G):
    """f + g = ∇ ∘ (f ⊕ g) ∘ Δ."""
    X, Y = F.dom, F.cod
    return compose(sm.codiagonal_prof(Y), compose(direct_sum(F, G), sm.diagonal_prof(X)))


def _convolution_checks(A, n):
    db = sm.codereliction(A, n)
    BA = db.cod
    zero = zero_prof(A, BA)
    parts = (db, db)

    def k_conv(b, a, r):
        (i, y), h, (_, z, k) = r
        P = parts[i]
        return (i, P.left(h, a, P.right(k, y, z)))

    out = []
    conv0 = convolution_sum(db, zero)
    c = compare("f + 0 ≅ f", conv0, db, lambda b, a, r: k_conv(b, a, r)[1], lambda b, a, x: x)
    if c.verdict != "fail" and conv0.cardinalities() != db.cardinalities():
        c.verdict, c.counterexample = "fail", "zero is not a strict unit"
    out.append(c)
    out.append(compare("f + g ≅ f ⊔ g", convolution_sum(db, db), psum(db, db), k_conv,
                       lambda b, a, x: x))
    both = psum(db, db)
    for i in (0, 1):
        t = natural_map(db, both, lambda b, a, x, i=i: (i, x), name=f"ι{i + 1}")
        ce = check_naturality(t)
        injective = all(len(set(m.values())) == len(m) for m in t.components.values())
        out.append(Check(f"coprojection {i + 1}", "pass" if ce is None and injective else "fail",
                         len(t.components), 0, db.size(),
                         counterexample=None if ce is None and injective else "not injective"))
    return out


# -- suites -----------------------------------------------------------------------------------

RUNNERS = {
    "first_constraint": check_first_constraint,
    "second_constraint": check_second_constraint,
    "strength": check_strength,
    "comonad": check_comonad_laws,
    "seely": check_seely,
    "derivative_rules": check_derivative_rules,
    "bialgebra": check_bialgebra,
}

FAMILY = ("0", "1", "discrete2", "arrow", "BZ2")


def default_config(bound=3):
    """Test family x all laws, at the bounds where each law is exercised."""
    small = min(bound, 2)
    cfg = [("first_constraint", (c,), bound) for c in FAMILY]
    cfg += [("second_constraint", (c,), bound) for c in ("1", "discrete2")]
    cfg += [("second_constraint", (c,), small) for c in ("0", "arrow", "BZ2")]
    trio = ("1", "discrete2", "arrow")
    cfg += [("strength", (a, b), small) for a in trio for b in trio]
    cfg += [("strength", ("1", "1"), bound), ("strength", ("1", "0"), bound)]
    cfg += [("comonad", (c,), bound) for c in FAMILY]
    cfg += [("seely", pair, bound) for pair in (("1", "1"), ("1", "discrete2"))]
    cfg += [("derivative_rules", ("1",), bound), ("derivative_rules", ("discrete2",), small)]
    cfg += [("bialgebra", (c,), small) for c in FAMILY]
    return cfg


SUITES = {"default": default_config, "empty": lambda bound=3: []}


def run_case(law, cats, bound):
    case = LawCase(law, tuple(cats), bound)
    start = time.perf_counter()
    try:
        RUNNERS[law](*[builtin(c) for c in cats], bound, case=case)
    except Exception as exc:  # a structural failure is a failed case, not a crash
        case.checks.append(Check("construction", "fail", counterexample=f"{type(exc).__name__}: {exc}"))
    case.seconds = time.perf_counter() - start
    return case


def run_suite(config, suite="custom", only_uses=None, stop_on_fail=False):
    """Run (law, categories, bound) triples; ``only_uses`` keeps cases built from that map."""
    report = Report(suite)
    for law, cats, bound in config:
        if law not in RUNNERS:
            raise ValueError(f"unknown law {law!r}")
        if only_uses is not None and only_uses not in USES[law]:
            continue
        report.cases.append(run_case(law, cats, bound))
        if stop_on_fail and report.cases[-1].verdict == "fail":
            break
    return report


USES = {
    "first_constraint": {"dereliction", "codereliction"},
    "second_constraint": {"promotion", "codereliction", "coweakening", "cocontraction"},
    "strength": {"mon2", "codereliction", "dereliction"},
    "comonad": {"promotion", "dereliction"},
    "seely": {"seely2", "seely2_inv", "seely0", "seely0_inv", "mon0", "mon2", "promotion",
              "dereliction", "weakening", "contraction"},
    "derivative_rules": {"codereliction", "weakening", "coweakening", "contraction",
                         "cocontraction", "promotion", "mon2"},
    "bialgebra": {"contraction", "weakening", "cocontraction", "coweakening"},
}

# maps whose windows contain a cell with two or more elements, so an action entry can be
# redirected to a wrong value; weakening, coweakening, mon0 and the s⁰ maps only have
# singleton cells, where every action is forced
MUTABLE = ("promotion", "dereliction", "codereliction", "contraction", "cocontraction",
           "mon2", "seely2", "seely2_inv")


def mutation_trial(seed, bound=3):
    """Corrupt one action entry of one structural map and rerun the default suite
    on the cases that construct it, stopping at the first failed case.
    Returns (map name, report)."""
    rng = random.Random(seed)
    name = rng.choice(MUTABLE)
    with sm.inject_fault(name, rng.randrange(2 ** 31)):
        report = run_suite(default_config(bound), suite=f"mutation-{seed}", only_uses=name,
                           stop_on_fail=True)
    return name, report
