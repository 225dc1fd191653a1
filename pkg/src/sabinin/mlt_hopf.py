"""The multiplication Hopf algebra of the truncated free algebra.

Operators are noncommutative polynomials in symbols L_w, R_w (w a nonempty
magma word); they act on truncated free-algebra elements by composing left
and right multiplications, rightmost symbol first.  The coproduct is induced
by the word coproduct, the antipode comes from the standard recursive
formula, and pi_plus projects onto the operators with f(1) = eps(f) 1.
Sequences whose subscripts outweigh the truncation act as zero and are
normalized away, so symbolic and extensional comparisons agree.
"""

from __future__ import annotations

import itertools

from .free_algebra import (
    FreeElement,
    WordBasis,
    coradical_filtration,
    is_primitive,
    primitive_basis,
    word_coproduct,
)
from .linalg import Subspace, kernel
from .scalars import Ring, check_same_ring
from .words import MagmaWord, words_of_degree

# a symbol is ('L' | 'R', MagmaWord); an operator term is a tuple of symbols


def symbol_degree(sym) -> int:
    return sym[1].degree


def term_degree(term) -> int:
    return sum(symbol_degree(s) for s in term)


def _symbol_key(sym):
    return (sym[0], sym[1].sort_key())


def term_key(term):
    return (len(term), tuple(_symbol_key(s) for s in term))


class MltElement:
    """A combination of composition products of L/R multiplication symbols."""

    __slots__ = ("ring", "trunc", "terms")

    def __init__(self, ring: Ring, trunc: int, terms=None):
        self.ring = ring
        self.trunc = trunc
        self.terms = {}
        if terms:
            for t, c in terms.items() if isinstance(terms, dict) else terms:
                if term_degree(t) <= trunc and c != ring.zero:
                    self._bump(t, c)

    def _bump(self, t, c):
        cur = self.terms.get(t)
        if cur is None:
            self.terms[t] = c
        else:
            s = self.ring.add(cur, c)
            if s == self.ring.zero:
                del self.terms[t]
            else:
                self.terms[t] = s

    @classmethod
    def unit(cls, ring, trunc) -> "MltElement":
        return cls(ring, trunc, {(): ring.one})

    def retruncate(self, trunc: int) -> "MltElement":
        return MltElement(self.ring, trunc, self.terms)

    @classmethod
    def symbol(cls, ring, trunc, kind: str, w: MagmaWord) -> "MltElement":
        if w.is_unit:
            return cls.unit(ring, trunc)
        return cls(ring, trunc, {((kind, w),): ring.one})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        out = MltElement(self.ring, self.trunc, dict(self.terms))
        for t, c in other.terms.items():
            out._bump(t, c)
        return out

    def __sub__(self, other):
        out = MltElement(self.ring, self.trunc, dict(self.terms))
        for t, c in other.terms.items():
            out._bump(t, self.ring.neg(c))
        return out

    def __neg__(self):
        return self.scale(self.ring.neg(self.ring.one))

    def scale(self, c):
        if c == self.ring.zero:
            return MltElement(self.ring, self.trunc)
        return MltElement(
            self.ring, self.trunc, {t: self.ring.mul(c, v) for t, v in self.terms.items()}
        )

    def __mul__(self, other: "MltElement") -> "MltElement":
        out = MltElement(self.ring, self.trunc)
        for t1, c1 in self.terms.items():
            d1 = term_degree(t1)
            for t2, c2 in other.terms.items():
                if d1 + term_degree(t2) <= self.trunc:
                    out._bump(t1 + t2, self.ring.mul(c1, c2))
        return out

    def __eq__(self, other):
        if not isinstance(other, MltElement):
            return NotImplemented
        return (
            self.ring == other.ring
            and self.trunc == other.trunc
            and self.terms == other.terms
        )

    def counit(self):
        return self.terms.get((), self.ring.zero)

    def act(self, z: FreeElement) -> FreeElement:
        """Apply to an element, rightmost symbol first, so the left symbol
        is the outermost multiplication."""
        check_same_ring(self.ring, z.ring)
        if z.trunc != self.trunc:
            raise ValueError("operator and element truncations differ")
        out = FreeElement.zero(self.ring, self.trunc)
        for term, c in self.terms.items():
            cur = z
            for kind, w in reversed(term):
                we = FreeElement.from_word(self.ring, self.trunc, w)
                cur = we * cur if kind == "L" else cur * we
                if cur.is_zero():
                    break
            out = out + cur.scale(c)
        return out

    def coproduct(self):
        """List of (left term, right term, coefficient)."""
        out: dict = {}
        for term, c in self.terms.items():
            pairs = [((), (), c)]
            for kind, w in term:
                nxt = []
                for (l, r, coeff) in pairs:
                    for (w1, w2), mult in word_coproduct(w).items():
                        lterm = l if w1.is_unit else l + ((kind, w1),)
                        rterm = r if w2.is_unit else r + ((kind, w2),)
                        if (
                            term_degree(lterm) <= self.trunc
                            and term_degree(rterm) <= self.trunc
                        ):
                            nxt.append(
                                (lterm, rterm, self.ring.mul(coeff, self.ring.of(mult)))
                            )
                pairs = nxt
            for l, r, coeff in pairs:
                key = (l, r)
                cur = out.get(key)
                if cur is None:
                    out[key] = coeff
                else:
                    s = self.ring.add(cur, coeff)
                    if s == self.ring.zero:
                        del out[key]
                    else:
                        out[key] = s
        return [(l, r, c) for (l, r), c in out.items()]

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda tc: term_key(tc[0]))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for t, c in self.sorted_terms():
            if not t:
                parts.append(f"{self.ring.to_str(c)}*1")
            else:
                body = " ".join(f"{k}[{w!r}]" for k, w in t)
                parts.append(f"{self.ring.to_str(c)}*{body}")
        return " + ".join(parts)


def L_of(e: FreeElement, trunc: int | None = None) -> MltElement:
    """The left-multiplication operator by an element, linearly in the
    subscript; the unit word contributes the identity operator."""
    trunc = e.trunc if trunc is None else trunc
    out = MltElement(e.ring, trunc)
    for w, c in e.terms.items():
        out._bump(() if w.is_unit else (("L", w),), c)
    return out


def R_of(e: FreeElement, trunc: int | None = None) -> MltElement:
    trunc = e.trunc if trunc is None else trunc
    out = MltElement(e.ring, trunc)
    for w, c in e.terms.items():
        out._bump(() if w.is_unit else (("R", w),), c)
    return out


_ANTIPODE_CACHE: dict = {}


def _antipode_symbol(ring: Ring, trunc: int, kind: str, w: MagmaWord) -> MltElement:
    key = (ring, trunc, kind, w)
    got = _ANTIPODE_CACHE.get(key)
    if got is not None:
        return got
    # S(M_w) = -M_w - sum of S(M_{w1}) M_{w2} over proper splittings
    out = -MltElement.symbol(ring, trunc, kind, w)
    for (w1, w2), mult in word_coproduct(w).items():
        if w1.is_unit or w2.is_unit:
            continue
        term = _antipode_symbol(ring, trunc, kind, w1) * MltElement.symbol(
            ring, trunc, kind, w2
        )
        out = out + term.scale(ring.of(-mult))
    _ANTIPODE_CACHE[key] = out
    return out


def antipode(f: MltElement) -> MltElement:
    """The Hopf antipode: anti-homomorphic extension of the symbol-wise
    recursion.  On L_g for group-like g it inverts the operator, so it acts
    as division by g."""
    ring = f.ring
    out = MltElement(ring, f.trunc)
    for term, c in f.terms.items():
        acc = MltElement.unit(ring, f.trunc)
        for sym in term:  # reversal: S(ab) = S(b)S(a)
            acc = _antipode_symbol(ring, f.trunc, sym[0], sym[1]) * acc
        out = out + acc.scale(c)
    return out


def convolution_check(f: MltElement) -> bool:
    """mu (S (x) id) Delta f = eps(f) 1, as operators."""
    ring = f.ring
    total = MltElement(ring, f.trunc)
    for l, r, c in f.coproduct():
        total = total + (
            antipode(MltElement(ring, f.trunc, {l: ring.one}))
            * MltElement(ring, f.trunc, {r: ring.one})
        ).scale(c)
    return total == MltElement.unit(ring, f.trunc).scale(f.counit())


def pi_plus_left(f: MltElement) -> MltElement:
    """sum S(L_{f_(1)(1)}) f_(2), with f_(1) evaluated at 1."""
    ring = f.ring
    one = FreeElement.unit(ring, f.trunc)
    out = MltElement(ring, f.trunc)
    for l, r, c in f.coproduct():
        v = MltElement(ring, f.trunc, {l: ring.one}).act(one)
        piece = antipode(L_of(v, f.trunc)) * MltElement(ring, f.trunc, {r: ring.one})
        out = out + piece.scale(c)
    return out


def pi_plus_right(f: MltElement) -> MltElement:
    ring = f.ring
    one = FreeElement.unit(ring, f.trunc)
    out = MltElement(ring, f.trunc)
    for l, r, c in f.coproduct():
        v = MltElement(ring, f.trunc, {l: ring.one}).act(one)
        piece = antipode(R_of(v, f.trunc)) * MltElement(ring, f.trunc, {r: ring.one})
        out = out + piece.scale(c)
    return out


def mlt_plus_membership(f: MltElement) -> bool:
    """f lies in Mlt_+ iff pi_plus fixes it."""
    return pi_plus_left(f) == f


def decompose_L_factor(f: MltElement):
    """The coalgebra splitting f = sum L_{f_(1)(1)} pi_plus(f_(2));
    returns the list of (subscript element, Mlt_+ part) pieces."""
    ring = f.ring
    one = FreeElement.unit(ring, f.trunc)
    pieces = []
    for l, r, c in f.coproduct():
        v = MltElement(ring, f.trunc, {l: ring.one}).act(one).scale(c)
        g = pi_plus_left(MltElement(ring, f.trunc, {r: ring.one}))
        if not v.is_zero() and not g.is_zero():
            pieces.append((v, g))
    return pieces


def reassemble_L_factor(pieces, ring, trunc) -> MltElement:
    out = MltElement(ring, trunc)
    for v, g in pieces:
        out = out + L_of(v, trunc) * g
    return out


def equal_extensionally(f: MltElement, g: MltElement, n_gens: int) -> bool:
    """Same action on every basis word of degree <= trunc."""
    for d in range(0, f.trunc + 1):
        for w in words_of_degree(n_gens, d):
            z = FreeElement.from_word(f.ring, f.trunc, w)
            if f.act(z) != g.act(z):
                return False
    return True


# -- spanning and primitive structure -------------------------------------------


def mlt_terms_of_degree(n_gens: int, degree: int):
    """All operator terms (symbol sequences) of the exact total degree."""
    symbols = []
    for d in range(1, degree + 1):
        for w in words_of_degree(n_gens, d):
            symbols.append(("L", w))
            symbols.append(("R", w))
    out = []

    def rec(prefix, remaining):
        if remaining == 0:
            out.append(tuple(prefix))
            return
        for sym in symbols:
            d = symbol_degree(sym)
            if d <= remaining:
                rec(prefix + [sym], remaining - d)

    rec([], degree)
    return sorted(out, key=term_key)


def mlt_primitive_basis(ring: Ring, n_gens: int, trunc: int):
    """Primitive operators per total degree, by exact kernel computation."""
    out = {}
    for degree in range(1, trunc + 1):
        terms = mlt_terms_of_degree(n_gens, degree)
        index = {t: i for i, t in enumerate(terms)}
        cols: dict = {}
        rows = []
        for t in terms:
            f = MltElement(ring, trunc, {t: ring.one})
            reduced = {}
            for l, r, c in f.coproduct():
                if l and r:
                    reduced[(l, r)] = c
            rows.append(reduced)
            for p in reduced:
                cols.setdefault(p, len(cols))
        mat = [[ring.zero] * len(terms) for _ in range(len(cols))]
        for i, reduced in enumerate(rows):
            for p, c in reduced.items():
                mat[cols[p]][i] = c
        ker = kernel(mat, len(terms), ring)
        elems = []
        for v in ker:
            elems.append(
                MltElement(
                    ring, trunc, {t: c for t, c in zip(terms, v) if c != ring.zero}
                )
            )
        out[degree] = elems
    return out


def pmlt_split_report(ring: Ring, n_gens: int, trunc: int) -> dict:
    """Verify PMlt = L_Prim (+) PMlt_+ degree by degree: every primitive
    operator splits as L_{f(1)} + pi_plus(f), f(1) is a primitive element,
    pi_plus kills L_prim, and the dimensions add up."""
    prims = mlt_primitive_basis(ring, n_gens, trunc)
    free_prims = primitive_basis(ring, n_gens, trunc)
    one = FreeElement.unit(ring, trunc)
    report = {"degrees": {}, "ok": True}
    for degree, fs in prims.items():
        basis = WordBasis(n_gens, trunc)
        l_parts = Subspace(ring, basis.dim)
        plus_count = 0
        split_ok = True
        kills_ok = True
        plus_span: dict = {}
        for f in fs:
            v = f.act(one)
            if not is_primitive(v):
                split_ok = False
            pf = pi_plus_left(f)
            if L_of(v, f.trunc) + pf != f:
                split_ok = False
            if not v.is_zero():
                l_parts.add(basis.vector(v))
                if not pi_plus_left(L_of(v, f.trunc)).is_zero():
                    kills_ok = False
            if not pf.is_zero():
                plus_count += 1
        # dimension split: rank of pi_plus images
        term_index: dict = {}
        vectors = []
        for f in fs:
            pf = pi_plus_left(f)
            row = {}
            for t, c in pf.terms.items():
                row[t] = c
                term_index.setdefault(t, len(term_index))
            vectors.append(row)
        plus_space = Subspace(ring, len(term_index)) if term_index else None
        plus_dim = 0
        if plus_space is not None:
            for row in vectors:
                vec = [ring.zero] * len(term_index)
                for t, c in row.items():
                    vec[term_index[t]] = c
                plus_space.add(tuple(vec))
            plus_dim = plus_space.dim
        expected_l = len(free_prims.get(degree, []))
        ok = split_ok and kills_ok and (len(fs) == expected_l + plus_dim)
        report["degrees"][degree] = {
            "dim_pmlt": len(fs),
            "dim_l_prim": expected_l,
            "dim_pmlt_plus": plus_dim,
            "split_identity": split_ok,
            "pi_plus_kills_L_prim": kills_ok,
            "ok": ok,
        }
        report["ok"] = report["ok"] and ok
    return report


def pmlt_plus_basis(ring: Ring, n_gens: int, trunc: int):
    """Independent pi_plus images of the primitive operators."""
    prims = mlt_primitive_basis(ring, n_gens, trunc)
    out = []
    term_index: dict = {}
    span = None
    rows = []
    for degree in sorted(prims):
        for f in prims[degree]:
            pf = pi_plus_left(f)
            if pf.is_zero():
                continue
            for t in pf.terms:
                term_index.setdefault(t, len(term_index))
            rows.append(pf)
    span = Subspace(ring, len(term_index)) if term_index else None
    for pf in rows:
        vec = [ring.zero] * len(term_index)
        for t, c in pf.terms.items():
            vec[term_index[t]] = c
        if span.add(tuple(vec)):
            out.append(pf)
    return out


def sab_generation_check(m: int, n_gens: int, trunc: int, ring: Ring) -> dict:
    """Spans of f_1 ... f_j (x) over PMlt_+ operators, j >= m, against the
    primitive elements of degree m+1..trunc (the corresponding filtration
    piece of the free Sabinin algebra at this truncation)."""
    if trunc < m + 1:
        return {"status": "inconclusive", "reason": "truncation below m+1"}
    basis = WordBasis(n_gens, trunc)
    ops = pmlt_plus_basis(ring, n_gens, trunc)
    current = [FreeElement.generator(ring, trunc, i) for i in range(n_gens)]
    span = Subspace(ring, basis.dim)
    for j in range(1, trunc):
        nxt = []
        for f in ops:
            for z in current:
                w = f.act(z)
                if not w.is_zero():
                    nxt.append(w)
        current = nxt
        if j >= m:
            for w in current:
                span.add(basis.vector(w))
        if not current:
            break
    target = Subspace(ring, basis.dim)
    free_prims = primitive_basis(ring, n_gens, trunc)
    for degree in range(m + 1, trunc + 1):
        for p in free_prims.get(degree, []):
            target.add(basis.vector(p))
    contains = all(span.contains(v) for v in target.basis())
    inside = all(target.contains(v) for v in span.basis())
    return {
        "status": "pass" if (contains and inside) else "fail",
        "span_dim": span.dim,
        "target_dim": target.dim,
        "spans_target": contains,
        "inside_target": inside,
    }


def coradical_preservation_samples(ring: Ring, n_gens: int, trunc: int,
                                   samples: int, seed: int = 0,
                                   op_degree: int | None = None) -> dict:
    """act(f, z) stays in the coradical level of z for sampled primitive
    f in PMlt_+ and z from the filtration levels.

    Operators are drawn from subscript degree <= op_degree (default 3, kept
    below the truncation to bound the primitive-basis computation) and act
    at the full truncation.
    """
    import random

    rng = random.Random(seed)
    basis, levels = coradical_filtration(ring, n_gens, trunc)
    if op_degree is None:
        op_degree = min(trunc - 1, 3)
    ops = [f.retruncate(trunc) for f in pmlt_plus_basis(ring, n_gens, op_degree)]
    reps = []
    for i, level in enumerate(levels):
        if i == 0:
            continue
        for v in level.basis():
            reps.append((i, basis.element(ring, v)))
    checked = 0
    failures = []
    while checked < samples and ops and reps:
        f = rng.choice(ops)
        i, z = rng.choice(reps)
        w = f.act(z)
        checked += 1
        if not w.is_zero() and not levels[i].contains(basis.vector(w)):
            failures.append((repr(f), i))
    return {"checked": checked, "failures": failures, "ok": not failures}
