"""Structural maps of the exponential pseudocomonad on Prof.

Every map is a :class:`~profdiff.prof.Profunctor` whose cells are stored as
``cell(cod_object, dom_object)``.  The displayed formulas put the !A-side
first; transcribed into the stored order they read:

    promotion       p(phi, alpha)            = !A[⊔phi, alpha]
    dereliction     d(a, alpha)              = !A[<a>, alpha]
    codereliction   d̄(alpha, a)              = !A[alpha, <a>]
    weakening       w(*, alpha)              = !A[ε, alpha]
    coweakening     w̄(alpha, *)              = !A[alpha, ε]
    contraction     c((a1, a2), alpha)       = !A[a1 ⊔ a2, alpha]
    cocontraction   c̄(alpha, (a1, a2))       = !A[alpha, a1 ⊔ a2]
    mon2            m(gamma, (alpha, beta))  = !A[!π1 gamma, alpha] x !B[!π2 gamma, beta]
    mon0            m0(nu, *)                = {*}
    seely2          s(gamma, (alpha, beta))  = !(A⊕B)[gamma, ι1 alpha ⊔ ι2 beta]
    seely2_inv      s•((alpha, beta), gamma) = !(A⊕B)[ι1 alpha ⊔ ι2 beta, gamma]
    seely0          s0(ε, *)                 = {*}
    seely0_inv      w over the empty category

Dereliction is the conjoint of the unit a |-> <a> and codereliction its
companion, so d̄ ⊣ d.  The !A-sides are windows of sequences of length at
most ``bound``; !!A-sides also bound the flattened length.
"""

import random
from contextlib import contextmanager

from .fincat import FinCat, Functor, Product, Sum, one, zero as empty_category
from .freesmc import Bang, PermMor, concat_mor, flatten, flatten_mor
from .prof import (Profunctor, ProfunctorError, bang_prof, companion, compose, conjoint,
                   matching_pairs, out_generators, sum as psum, tensor, zero as zero_prof)

NAMES = ("promotion", "dereliction", "codereliction", "contraction", "weakening",
         "cocontraction", "coweakening", "mon2", "mon0", "seely2", "seely0",
         "seely2_inv", "seely0_inv")

_BANGS = {}


def bang(A, bound, limits=None):
    """Shared !A window so hom memoization is reused across maps."""
    B = Bang(A, bound, limits)
    return _BANGS.setdefault(B, B)


def bang2(A, bound):
    return bang(bang(A, bound), bound)


# -- fault injection ---------------------------------------------------------------

_FAULT = []


@contextmanager
def inject_fault(name, seed):
    """Corrupt one action entry of every ``name`` map built inside the block."""
    if name not in NAMES:
        raise ValueError(f"unknown structural map {name!r}")
    _FAULT.append((name, seed))
    try:
        yield
    finally:
        _FAULT.pop()


def _finish(P, name, **meta):
    P.name = name
    P.meta = meta
    for fname, seed in _FAULT:
        if fname == name:
            _corrupt(P, random.Random(seed))
    return P


def _corrupt(P, rng):
    """Redirect one generator action on one element to a different element."""
    cells = list(P.cells)
    rng.shuffle(cells)
    outs = out_generators(P.dom)
    for b, a in cells:
        xs = P.cells[(b, a)]
        options = []
        for g in P.cod.generators_into(b):
            tgt = P.cell(P.cod.src(g), a)
            if len(tgt) >= 2:
                options.append(("L", g, tgt))
        for f in outs.get(a, ()):
            tgt = P.cell(b, P.dom.tgt(f))
            if len(tgt) >= 2:
                options.append(("R", f, tgt))
        if not options:
            continue
        side, mor, tgt = options[rng.randrange(len(options))]
        x = xs[rng.randrange(len(xs))]
        if side == "L":
            old, key = P._left, (mor, a, x)
            honest = old(mor, a, x)
        else:
            old, key = P._right, (mor, b, x)
            honest = old(mor, b, x)
        wrong = rng.choice([y for y in tgt if y != honest])

        def bad(m, o, e, _old=old, _key=key, _wrong=wrong):
            if (m, o, e) == _key:
                return _wrong
            return _old(m, o, e)

        if side == "L":
            P._left = bad
        else:
            P._right = bad
        P.fault = (side, mor, (b, a), x)
        return P
    return P  # every target cell is a singleton, so every action is forced


# -- unit-side maps --------------------------------------------------------------------

def _unit(A, BA):
    return Functor(A, BA, lambda a: (a,), lambda f: PermMor((A.src(f),), (A.tgt(f),), (0,), (f,)))


def dereliction(A, bound):
    BA = bang(A, bound)
    return _finish(conjoint(_unit(A, BA)), "dereliction", A=A, bound=bound)


def codereliction(A, bound):
    BA = bang(A, bound)
    return _finish(companion(_unit(A, BA)), "codereliction", A=A, bound=bound)


def promotion(A, bound):
    BA, BBA = bang(A, bound), bang2(A, bound)
    P = Profunctor.from_formula(
        BA, BBA,
        lambda phi, alpha: BA.hom(flatten(phi), alpha),
        lambda G, alpha, m: BA.compose(m, flatten_mor(G)),
        lambda f, phi, m: BA.compose(f, m),
        pairs=matching_pairs(BBA, BA, lambda phi: BA.key(flatten(phi)), BA.key))
    return _finish(P, "promotion", A=A, bound=bound)


def weakening(A, bound, verify=None):
    P = _finish(_weakening(A, bound), "weakening", A=A, bound=bound)
    _assert_direct("weakening", A, bound, verify)
    return P


def _weakening(A, bound):
    BA, I = bang(A, bound), one()
    P = Profunctor.from_formula(
        BA, I,
        lambda s, alpha: BA.hom((), alpha),
        lambda g, alpha, m: m,
        lambda f, s, m: BA.compose(f, m),
        pairs=[(0, ())])
    return P


def coweakening(A, bound, verify=None):
    P = _finish(_coweakening(A, bound), "coweakening", A=A, bound=bound)
    _assert_direct("coweakening", A, bound, verify)
    return P


def _coweakening(A, bound):
    BA, I = bang(A, bound), one()
    P = Profunctor.from_formula(
        I, BA,
        lambda alpha, s: BA.hom(alpha, ()),
        lambda g, s, m: BA.compose(m, g),
        lambda f, alpha, m: m,
        pairs=[((), 0)])
    return P


def contraction(A, bound, verify=None):
    P = _finish(_contraction(A, bound), "contraction", A=A, bound=bound)
    _assert_direct("contraction", A, bound, verify)
    return P


def _contraction(A, bound):
    BA = bang(A, bound)
    P2 = Product(BA, BA)
    P = Profunctor.from_formula(
        BA, P2,
        lambda pair, alpha: BA.hom(pair[0] + pair[1], alpha),
        lambda g, alpha, m: BA.compose(m, concat_mor(g[0], g[1])),
        lambda f, pair, m: BA.compose(f, m),
        pairs=matching_pairs(P2, BA, lambda p: BA.key(p[0] + p[1]), BA.key))
    return P


def cocontraction(A, bound, verify=None):
    P = _finish(_cocontraction(A, bound), "cocontraction", A=A, bound=bound)
    _assert_direct("cocontraction", A, bound, verify)
    return P


def _cocontraction(A, bound):
    BA = bang(A, bound)
    P2 = Product(BA, BA)
    P = Profunctor.from_formula(
        P2, BA,
        lambda alpha, pair: BA.hom(alpha, pair[0] + pair[1]),
        lambda g, pair, m: BA.compose(m, g),
        lambda f, alpha, m: BA.compose(concat_mor(f[0], f[1]), m),
        pairs=matching_pairs(BA, P2, BA.key, lambda p: BA.key(p[0] + p[1])))
    return P


# -- monoidal structure ------------------------------------------------------------------

def _proj_seq(i):
    return lambda gamma: tuple(x[i] for x in gamma)


def _proj_mor(i):
    return lambda G: PermMor(tuple(x[i] for x in G.dom), tuple(x[i] for x in G.cod),
                             G.sigma, tuple(a[i] for a in G.arrows))


def mon2(A, B, bound):
    BA, BB = bang(A, bound), bang(B, bound)
    AB = Product(A, B)
    BAB = bang(AB, bound)
    dom = Product(BA, BB)
    p1, p2 = _proj_seq(0), _proj_seq(1)
    m1, m2 = _proj_mor(0), _proj_mor(1)
    P = Profunctor.from_formula(
        dom, BAB,
        lambda gamma, ab: tuple((u, v) for u in BA.hom(p1(gamma), ab[0])
                                for v in BB.hom(p2(gamma), ab[1])),
        lambda G, ab, m: (BA.compose(m[0], m1(G)), BB.compose(m[1], m2(G))),
        lambda f, gamma, m: (BA.compose(f[0], m[0]), BB.compose(f[1], m[1])),
        pairs=matching_pairs(BAB, dom, lambda g: (BA.key(p1(g)), BB.key(p2(g))),
                             lambda ab: (BA.key(ab[0]), BB.key(ab[1]))))
    return _finish(P, "mon2", A=A, B=B, bound=bound)


_MON0_CHECKED = set()


def mon0(bound):
    I = one()
    BI = bang(I, bound)
    P = Profunctor.from_formula(
        I, BI, lambda nu, s: ((),), lambda g, s, m: m, lambda f, nu, m: m,
        pairs=[(nu, 0) for nu in BI.objects()])
    P = _finish(P, "mon0", bound=bound)
    if not _FAULT and bound <= 3 and bound not in _MON0_CHECKED:
        if not mon0_unit_law(bound, P):
            raise ProfunctorError("mon0 fails the lax unit law")
        _MON0_CHECKED.add(bound)
    return P


def mon0_unit_law(bound, m0=None, A=None):
    """mon2_{1,A} ∘ (mon0 ⊗ 1_{!A}) ≅ the relabelling !A ≅ !(1 x A)."""
    from .prof import hom_prof, iso_check
    I = one()
    A = A if A is not None else I
    m0 = m0 if m0 is not None else mon0(bound)
    BA = bang(A, bound)
    lhs = compose(mon2(I, A, bound), tensor(m0, hom_prof(BA)))
    BIA = bang(Product(I, A), bound)
    relabel = Functor(Product(I, BA), BIA,
                      lambda p: tuple((0, a) for a in p[1]),
                      lambda f: PermMor(tuple((0, a) for a in f[1].dom),
                                        tuple((0, a) for a in f[1].cod),
                                        f[1].sigma, tuple((0, a) for a in f[1].arrows)))
    rhs = companion(relabel)
    return iso_check(lhs, rhs) is not None


# -- Seely maps ---------------------------------------------------------------------------

def _inj_seq(i):
    return lambda alpha: tuple((i, a) for a in alpha)


def _inj_mor(i):
    return lambda f: PermMor(tuple((i, a) for a in f.dom), tuple((i, a) for a in f.cod),
                             f.sigma, tuple((i, a) for a in f.arrows))


def _seely_parts(A, B, bound):
    BA, BB = bang(A, bound), bang(B, bound)
    S = bang(Sum(A, B), bound)
    return BA, BB, S, Product(BA, BB)


def seely2(A, B, bound):
    BA, BB, S, dom = _seely_parts(A, B, bound)
    i1, i2, j1, j2 = _inj_seq(0), _inj_seq(1), _inj_mor(0), _inj_mor(1)
    P = Profunctor.from_formula(
        dom, S,
        lambda gamma, ab: S.hom(gamma, i1(ab[0]) + i2(ab[1])),
        lambda g, ab, m: S.compose(m, g),
        lambda f, gamma, m: S.compose(concat_mor(j1(f[0]), j2(f[1])), m),
        pairs=matching_pairs(S, dom, S.key, lambda ab: S.key(i1(ab[0]) + i2(ab[1]))))
    return _finish(P, "seely2", A=A, B=B, bound=bound)


def seely2_inv(A, B, bound):
    BA, BB, S, cod = _seely_parts(A, B, bound)
    i1, i2, j1, j2 = _inj_seq(0), _inj_seq(1), _inj_mor(0), _inj_mor(1)
    P = Profunctor.from_formula(
        S, cod,
        lambda ab, gamma: S.hom(i1(ab[0]) + i2(ab[1]), gamma),
        lambda g, gamma, m: S.compose(m, concat_mor(j1(g[0]), j2(g[1]))),
        lambda f, ab, m: S.compose(f, m),
        pairs=matching_pairs(cod, S, lambda ab: S.key(i1(ab[0]) + i2(ab[1])), S.key))
    return _finish(P, "seely2_inv", A=A, B=B, bound=bound)


def seely0(bound):
    Z, I = empty_category(), one()
    BZ = bang(Z, bound)
    P = Profunctor.from_formula(I, BZ, lambda e, s: ((),), lambda g, s, m: m,
                                lambda f, e, m: m, pairs=[((), 0)])
    return _finish(P, "seely0", bound=bound)


def seely0_inv(bound):
    Z, I = empty_category(), one()
    BZ = bang(Z, bound)
    P = Profunctor.from_formula(BZ, I, lambda s, e: ((),), lambda g, e, m: m,
                                lambda f, s, m: m, pairs=[(0, ())])
    return _finish(P, "seely0_inv", bound=bound)


# -- defining composites ------------------------------------------------------------------

def injection_prof(A, B, i):
    """Companion of ι_i: A -> A ⊕ B (or B -> A ⊕ B)."""
    S = Sum(A, B)
    src = (A, B)[i]
    return companion(Functor(src, S, lambda x: (i, x), lambda f: (i, f)))


def projection_prof(A, B, i):
    """π_i = conjoint of ι_i: A ⊕ B -> A."""
    S = Sum(A, B)
    src = (A, B)[i]
    return conjoint(Functor(src, S, lambda x: (i, x), lambda f: (i, f)))


def codiagonal_prof(A):
    """∇: A ⊕ A -> A, companion of the folding functor."""
    return companion(Functor(Sum(A, A), A, lambda x: x[1], lambda f: f[1]))


def diagonal_prof(A):
    """Δ: A -> A ⊕ A, conjoint of the folding functor."""
    return conjoint(Functor(Sum(A, A), A, lambda x: x[1], lambda f: f[1]))


def unitor_right(A):
    """A ⊗ I -> A."""
    return companion(Functor(Product(A, one()), A, lambda p: p[0], lambda f: f[0]))


def unitor_left(A):
    """I ⊗ A -> A."""
    return companion(Functor(Product(one(), A), A, lambda p: p[1], lambda f: f[1]))


def seely_pairing(A, B, bound):
    """ψ = <ρ(d ⊗ w), λ(w ⊗ d)>: !A ⊗ !B -> A ⊕ B, the pairing into A & B."""
    first = compose(injection_prof(A, B, 0),
                    compose(unitor_right(A), tensor(dereliction(A, bound), weakening(B, bound))))
    second = compose(injection_prof(A, B, 1),
                     compose(unitor_left(B), tensor(weakening(A, bound), dereliction(B, bound))))
    return psum(first, second)


def seely2_composite(A, B, bound):
    """(!ψ) ∘ mon2_{!A,!B} ∘ (p_A ⊗ p_B) on the window |alpha| + |beta| <= bound."""
    BA, BB, S, dom = _seely_parts(A, B, bound)
    pp = tensor(promotion(A, bound), promotion(B, bound),
                keep=lambda b, a: len(a[0]) + len(a[1]) <= bound)
    m = mon2(BA, BB, bound)
    psi = seely_pairing(A, B, bound)
    bpsi = bang_prof(psi, m.cod, S)
    return compose(bpsi, compose(m, pp))


def seely2_inv_composite(A, B, bound):
    """(!π1 ⊗ !π2) ∘ c_{A⊕B}."""
    BA, BB, S, cod = _seely_parts(A, B, bound)
    c = contraction(Sum(A, B), bound)
    pr = tensor(bang_prof(projection_prof(A, B, 0), S, BA),
                bang_prof(projection_prof(A, B, 1), S, BB))
    return compose(pr, c)


def seely0_composite(bound):
    """!(I -> 0) ∘ mon0."""
    Z, I = empty_category(), one()
    return compose(bang_prof(zero_prof(I, Z), bang(I, bound), bang(Z, bound)), mon0(bound))


def cocontraction_composite(A, bound):
    """!∇ ∘ s²_{A,A}."""
    S, BA = bang(Sum(A, A), bound), bang(A, bound)
    return compose(bang_prof(codiagonal_prof(A), S, BA), seely2(A, A, bound))


def contraction_composite(A, bound):
    """s²•_{A,A} ∘ !Δ."""
    S, BA = bang(Sum(A, A), bound), bang(A, bound)
    return compose(seely2_inv(A, A, bound), bang_prof(diagonal_prof(A), BA, S))


def coweakening_composite(A, bound):
    """!(0 -> A) ∘ s⁰."""
    Z = empty_category()
    return compose(bang_prof(zero_prof(Z, A), bang(Z, bound), bang(A, bound)), seely0(bound))


def weakening_composite(A, bound):
    """w_0 ∘ !(A -> 0)."""
    Z = empty_category()
    return compose(seely0_inv(bound), bang_prof(zero_prof(A, Z), bang(A, bound), bang(Z, bound)))


def agreement(direct, composite, window=None):
    """Cells (within window) where cardinalities of the two realizations differ."""
    keys = set(direct.cells) | set(composite.cells)
    bad = []
    for k in sorted(keys, key=repr):
        if window is not None and not window(*k):
            continue
        if len(direct.cell(*k)) != len(composite.cell(*k)):
            bad.append(k)
    return bad


DEFINING_COMPOSITES = {
    "cocontraction": (lambda A, n: _cocontraction(A, n), cocontraction_composite),
    "contraction": (lambda A, n: _contraction(A, n), contraction_composite),
    "coweakening": (lambda A, n: _coweakening(A, n), coweakening_composite),
    "weakening": (lambda A, n: _weakening(A, n), weakening_composite),
}

_VERIFIED = set()


def _assert_direct(name, A, bound, verify):
    """Constructor-time agreement check, once per (map, category, bound).

    By default only plain finite categories are checked; bases such as !A
    are covered by the shipped tests instead.
    """
    if verify is None:
        verify = isinstance(A, FinCat)
    key = (name, A, bound)
    if not verify or _FAULT or key in _VERIFIED:
        return
    _VERIFIED.add(key)
    try:
        verify_direct(name, A, bound)
    except ProfunctorError:
        _VERIFIED.discard(key)
        raise


def verify_direct(name, A, bound):
    """Assert a direct cell formula against its defining composite."""
    direct, comp = DEFINING_COMPOSITES[name]
    bad = agreement(direct(A, bound), comp(A, bound))
    if bad:
        raise ProfunctorError(f"{name}: direct formula disagrees with its composite at {bad[0]!r}")
    return True


def build(name, cats, bound):
    """Constructor dispatch by map name; ``cats`` lists the base categories."""
    if name in ("mon0", "seely0", "seely0_inv"):
        return globals()[name](bound)
    if name in ("mon2", "seely2", "seely2_inv"):
        if len(cats) != 2:
            raise ValueError(f"{name} takes two categories")
        return globals()[name](cats[0], cats[1], bound)
    if name not in NAMES:
        raise ValueError(f"unknown structural map {name!r}")
    if len(cats) != 1:
        raise ValueError(f"{name} takes one category")
    return globals()[name](cats[0], bound)
