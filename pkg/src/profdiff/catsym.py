"""Categorical symmetric sequences: Kleisli maps ``!A -> B`` in Prof."""

from .fincat import Functor, Product, Sum
from .freesmc import ArityBound, Bang, PermMor, concat_mor, flatten, flatten_mor
from .prof import (Profunctor, ProfunctorError, bang_prof, companion, compose, conjoint,
                   matching_pairs, op, sum as psum)
from .structmaps import bang, dereliction


class InsufficientBound(ProfunctorError):
    def __init__(self, required, available):
        super().__init__(f"arity bound {available} too small; composite needs {required}")
        self.required = required
        self.available = available


class SymSeq:
    """A Kleisli map A -> B given by its body, a profunctor !A -> B."""

    def __init__(self, dom, cod, body, arity=None):
        if not isinstance(body.dom, Bang) or body.dom.base != dom:
            raise ProfunctorError("body must have domain !A over the declared A")
        self.dom, self.cod, self.body = dom, cod, body
        seen = max((len(alpha) for (_, alpha) in body.cells), default=0)
        if arity is None:
            arity = seen
        elif seen > arity:
            raise ProfunctorError(f"declared arity {arity} but a cell of arity {seen} is nonempty")
        if arity > body.dom.n_max:
            raise ProfunctorError("arity exceeds the body's bound")
        self.arity = arity

    @property
    def bound(self):
        return self.body.dom.n_max

    def __repr__(self):
        return f"<SymSeq arity {self.arity}, bound {self.bound}>"


def kleisli_id(A, bound):
    """The identity Kleisli map, dereliction."""
    d = dereliction(A, bound)
    return SymSeq(A, A, d, arity=1 if d.cells else 0)


def required_bound(G, F):
    ag = G.arity if isinstance(G, SymSeq) else int(G)
    af = F.arity if isinstance(F, SymSeq) else int(F)
    return ArityBound(ag * max(1, af))


def promotion_window(A, inner, outer_len, bound):
    """p_A: !A -> !!A over the window |phi| <= outer_len, |⊔phi| <= bound,
    entries drawn from the window ``inner`` of !A."""
    BA = bang(A, bound)
    BBA = Bang(inner, bound, limits=(outer_len,) + (bound,) * (Bang(inner, 0).depth - 1))
    return Profunctor.from_formula(
        BA, BBA,
        lambda phi, alpha: BA.hom(flatten(phi), alpha),
        lambda G, alpha, m: BA.compose(m, flatten_mor(G)),
        lambda f, phi, m: BA.compose(f, m),
        pairs=matching_pairs(BBA, BA, lambda phi: BA.key(flatten(phi)), BA.key),
        name="promotion")


def kleisli_compose(G, F, bound=None):
    """G ∘ !F ∘ p_A, realized as two binary coends."""
    if G.dom != F.cod:
        raise ProfunctorError("Kleisli maps are not composable")
    need = required_bound(G, F)
    if bound is None:
        bound = max(need, F.bound)
    if bound < need:
        raise InsufficientBound(need, bound)
    p = promotion_window(F.dom, F.body.dom, G.arity, bound)
    bf = bang_prof(F.body, p.cod, G.body.dom)
    body = compose(G.body, compose(bf, p))
    return SymSeq(F.dom, G.cod, body)


def derivative(F):
    """dF(b, (a, alpha)) = F(b, alpha ⊔ <a>), a Kleisli map A -> A^op x B."""
    A, B = F.dom, F.cod
    n = max(F.bound - 1, 0)
    BA = bang(A, n)
    cod = Product(op(A), B)
    body = F.body

    def cell(ab, alpha):
        return body.cell(ab[1], alpha + (ab[0],))

    def left(g, alpha, x):
        h, k = g
        a_new = A.tgt(h)
        a_old = A.src(h)
        x = body.left(k, alpha + (a_old,), x)
        ext = concat_mor(BA.identity(alpha), PermMor((a_old,), (a_new,), (0,), (h,)))
        return body.right(ext, B.src(k), x)

    def right(f, ab, x):
        a = ab[0]
        ext = concat_mor(f, PermMor((a,), (a,), (0,), (A.identity(a),)))
        return body.right(ext, ab[1], x)

    pairs = ((ab, alpha) for ab in cod.objects() for alpha in BA.objects())
    dF = Profunctor.from_formula(BA, cod, cell, left, right, pairs=pairs, name=f"d{F.body.name}")
    return SymSeq(A, cod, dF, arity=max(F.arity - 1, 0))


# -- cartesian structure ---------------------------------------------------------------

def with_(A, B):
    """A & B, realized as the sum A ⊕ B."""
    return Sum(A, B)


def _injection(A, B, i):
    return Functor((A, B)[i], Sum(A, B), lambda x: (i, x), lambda f: (i, f))


def projections(A, B, bound):
    """π_i: A & B -> A (resp. B), the conjoint of ι_i after dereliction."""
    d = dereliction(Sum(A, B), bound)
    out = []
    for i in (0, 1):
        body = compose(conjoint(_injection(A, B, i)), d)
        out.append(SymSeq(Sum(A, B), (A, B)[i], body))
    return tuple(out)


def pairing(F, G):
    """<F, G>: X -> A & B with body ι1∘F + ι2∘G."""
    if F.dom != G.dom or F.bound != G.bound:
        raise ProfunctorError("pairing needs Kleisli maps with a common domain and bound")
    A, B = F.cod, G.cod
    left = compose(companion(_injection(A, B, 0)), F.body)
    right = compose(companion(_injection(A, B, 1)), G.body)
    return SymSeq(F.dom, Sum(A, B), psum(left, right))


def linear(K, bound):
    """The Kleisli map J(K) = K∘d for a profunctor K: A -> B."""
    return SymSeq(K.dom, K.cod, compose(K, dereliction(K.dom, bound)))


def exponential_object(A, B, bound):
    """A ⇒ B = (!A)^op x B, over the window of !A."""
    return Product(op(bang(A, bound)), B)
