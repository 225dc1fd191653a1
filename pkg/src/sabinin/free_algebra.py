"""The degree-truncated free unital non-associative algebra and its Hopf
structure.

Elements are sparse combinations of magma words with exact coefficients and
an explicit truncation bound; all products silently discard words above the
bound, but operations never mix different bounds or rings.  Generators are
primitive, the coproduct is multiplicative, and the unit is group-like, which
pins the whole (cocommutative, coassociative, non-associative) Hopf algebra.
"""

from __future__ import annotations

import json

from .linalg import Subspace, kernel
from .scalars import Ring, check_same_ring, ring_from_tag, ring_tag
from .words import MagmaWord, parse_word, words_of_degree, words_up_to_degree


class TruncationMismatchError(ValueError):
    """Operands carry different truncation bounds."""


def _check_compatible(a: "FreeElement", b: "FreeElement"):
    check_same_ring(a.ring, b.ring)
    if a.trunc != b.trunc:
        raise TruncationMismatchError(f"truncations {a.trunc} != {b.trunc}")


class FreeElement:
    """A finite combination of magma words of degree <= trunc."""

    __slots__ = ("ring", "trunc", "terms")

    def __init__(self, ring: Ring, trunc: int, terms=None):
        self.ring = ring
        self.trunc = trunc
        self.terms = {}
        if terms:
            for w, c in terms.items() if isinstance(terms, dict) else terms:
                if w.degree <= trunc and c != ring.zero:
                    self._bump(w, c)

    def _bump(self, w: MagmaWord, c):
        cur = self.terms.get(w)
        if cur is None:
            self.terms[w] = c
        else:
            s = self.ring.add(cur, c)
            if s == self.ring.zero:
                del self.terms[w]
            else:
                self.terms[w] = s

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, ring: Ring, trunc: int) -> "FreeElement":
        return cls(ring, trunc)

    @classmethod
    def unit(cls, ring: Ring, trunc: int) -> "FreeElement":
        return cls(ring, trunc, {MagmaWord.unit(): ring.one})

    @classmethod
    def generator(cls, ring: Ring, trunc: int, index: int) -> "FreeElement":
        return cls(ring, trunc, {MagmaWord.generator(index): ring.one})

    @classmethod
    def from_word(cls, ring: Ring, trunc: int, w: MagmaWord, coeff=None) -> "FreeElement":
        return cls(ring, trunc, {w: ring.one if coeff is None else coeff})

    # -- basic structure ---------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, w: MagmaWord):
        return self.terms.get(w, self.ring.zero)

    def counit(self):
        return self.terms.get(MagmaWord.unit(), self.ring.zero)

    def augmentation(self) -> "FreeElement":
        """The part with zero constant term."""
        t = dict(self.terms)
        t.pop(MagmaWord.unit(), None)
        return FreeElement(self.ring, self.trunc, t)

    def homogeneous(self, degree: int) -> "FreeElement":
        return FreeElement(
            self.ring,
            self.trunc,
            {w: c for w, c in self.terms.items() if w.degree == degree},
        )

    def max_degree(self) -> int:
        return max((w.degree for w in self.terms), default=0)

    def support_generators(self):
        gens = set()
        for w in self.terms:
            gens.update(w.leaves())
        return gens

    def retruncate(self, trunc: int) -> "FreeElement":
        """Explicit re-truncation; the only sanctioned way to change bounds."""
        return FreeElement(self.ring, trunc, self.terms)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "FreeElement") -> "FreeElement":
        _check_compatible(self, other)
        out = FreeElement(self.ring, self.trunc, dict(self.terms))
        for w, c in other.terms.items():
            out._bump(w, c)
        return out

    def __sub__(self, other: "FreeElement") -> "FreeElement":
        _check_compatible(self, other)
        out = FreeElement(self.ring, self.trunc, dict(self.terms))
        for w, c in other.terms.items():
            out._bump(w, self.ring.neg(c))
        return out

    def __neg__(self) -> "FreeElement":
        return FreeElement(
            self.ring, self.trunc, {w: self.ring.neg(c) for w, c in self.terms.items()}
        )

    def scale(self, c) -> "FreeElement":
        if c == self.ring.zero:
            return FreeElement(self.ring, self.trunc)
        return FreeElement(
            self.ring, self.trunc, {w: self.ring.mul(c, v) for w, v in self.terms.items()}
        )

    def __mul__(self, other: "FreeElement") -> "FreeElement":
        """Bilinear extension of word pairing, discarding degree > trunc."""
        _check_compatible(self, other)
        ring = self.ring
        d = self.trunc
        out = FreeElement(ring, d)
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                if w1.degree + w2.degree <= d:
                    out._bump(MagmaWord.pair(w1, w2), ring.mul(c1, c2))
        return out

    def __eq__(self, other):
        if not isinstance(other, FreeElement):
            return NotImplemented
        return (
            self.ring == other.ring
            and self.trunc == other.trunc
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash(
            (self.ring, self.trunc, frozenset((w, c) for w, c in self.terms.items()))
        )

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda wc: wc[0].sort_key())

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for w, c in self.sorted_terms():
            parts.append(f"{self.ring.to_str(c)}*{w!r}")
        return " + ".join(parts)

    # -- wire format -------------------------------------------------------

    def to_json(self) -> str:
        return json.dumps(
            {
                "trunc": self.trunc,
                "ring": ring_tag(self.ring),
                "terms": [[repr(w), self.ring.to_str(c)] for w, c in self.sorted_terms()],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "FreeElement":
        data = json.loads(text)
        ring = ring_from_tag(data["ring"])
        terms = {}
        for wstr, cstr in data["terms"]:
            terms[parse_word(wstr)] = ring.of(cstr)
        return cls(ring, data["trunc"], terms)


class TensorElement:
    """Combination of word pairs; the unit word stands for the tensor 1."""

    __slots__ = ("ring", "trunc", "terms")

    def __init__(self, ring: Ring, trunc: int, terms=None):
        self.ring = ring
        self.trunc = trunc
        self.terms = {}
        if terms:
            for pair, c in terms.items() if isinstance(terms, dict) else terms:
                if pair[0].degree + pair[1].degree <= trunc and c != ring.zero:
                    self._bump(pair, c)

    def _bump(self, pair, c):
        cur = self.terms.get(pair)
        if cur is None:
            self.terms[pair] = c
        else:
            s = self.ring.add(cur, c)
            if s == self.ring.zero:
                del self.terms[pair]
            else:
                self.terms[pair] = s

    def __add__(self, other: "TensorElement") -> "TensorElement":
        out = TensorElement(self.ring, self.trunc, dict(self.terms))
        for p, c in other.terms.items():
            out._bump(p, c)
        return out

    def __sub__(self, other: "TensorElement") -> "TensorElement":
        out = TensorElement(self.ring, self.trunc, dict(self.terms))
        for p, c in other.terms.items():
            out._bump(p, self.ring.neg(c))
        return out

    def __mul__(self, other: "TensorElement") -> "TensorElement":
        """Componentwise product with truncation by total degree."""
        ring = self.ring
        d = self.trunc
        out = TensorElement(ring, d)
        for (a, b), c1 in self.terms.items():
            for (u, v), c2 in other.terms.items():
                if a.degree + u.degree + b.degree + v.degree <= d:
                    out._bump(
                        (MagmaWord.pair(a, u), MagmaWord.pair(b, v)), ring.mul(c1, c2)
                    )
        return out

    def flip(self) -> "TensorElement":
        return TensorElement(
            self.ring, self.trunc, {(b, a): c for (a, b), c in self.terms.items()}
        )

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, TensorElement):
            return NotImplemented
        return (
            self.ring == other.ring
            and self.trunc == other.trunc
            and self.terms == other.terms
        )

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for (a, b), c in sorted(
            self.terms.items(), key=lambda pc: (pc[0][0].sort_key(), pc[0][1].sort_key())
        ):
            parts.append(f"{self.ring.to_str(c)}*({a!r}(x){b!r})")
        return " + ".join(parts)


# -- coproduct ---------------------------------------------------------------

_WORD_COPRODUCT: dict = {}


def word_coproduct(w: MagmaWord):
    """Delta(w) as a list of (left, right, integer multiplicity).

    Delta is multiplicative with primitive generators; for a homogeneous word
    every tensor component has the same total degree, so this table does not
    depend on any truncation.
    """
    out = _WORD_COPRODUCT.get(w)
    if out is not None:
        return out
    if w.is_unit:
        out = {(w, w): 1}
    elif w.is_generator:
        unit = MagmaWord.unit()
        out = {(w, unit): 1, (unit, w): 1}
    else:
        out = {}
        for (a, b), m1 in word_coproduct(w.left).items():
            for (u, v), m2 in word_coproduct(w.right).items():
                key = (MagmaWord.pair(a, u), MagmaWord.pair(b, v))
                out[key] = out.get(key, 0) + m1 * m2
    _WORD_COPRODUCT[w] = out
    return out


def coproduct(e: FreeElement) -> TensorElement:
    ring = e.ring
    out = TensorElement(ring, e.trunc)
    for w, c in e.terms.items():
        for pair, mult in word_coproduct(w).items():
            out._bump(pair, ring.mul(c, ring.of(mult)))
    return out


def tensor_of(a: FreeElement, b: FreeElement) -> TensorElement:
    _check_compatible(a, b)
    ring = a.ring
    out = TensorElement(ring, a.trunc)
    for w1, c1 in a.terms.items():
        for w2, c2 in b.terms.items():
            if w1.degree + w2.degree <= a.trunc:
                out._bump((w1, w2), ring.mul(c1, c2))
    return out


def is_primitive(e: FreeElement) -> bool:
    if e.counit() != e.ring.zero:
        return False
    unit = FreeElement.unit(e.ring, e.trunc)
    return coproduct(e) == tensor_of(e, unit) + tensor_of(unit, e)


def is_grouplike(e: FreeElement) -> bool:
    if e.counit() != e.ring.one:
        return False
    return coproduct(e) == tensor_of(e, e)


# -- loop divisions in 1 + augmentation --------------------------------------


def loop_left_divide(a: FreeElement, b: FreeElement) -> FreeElement:
    """The unique w with a*w = b, for a with constant term 1.

    Solved degree by degree: w_n = b_n - sum_{j>=1} (abar_j * w_{n-j})_n.
    """
    _check_compatible(a, b)
    ring = a.ring
    if a.counit() != ring.one:
        raise ValueError("left division needs constant term 1")
    d = a.trunc
    abar = a.augmentation()
    w = FreeElement(ring, d)
    for n in range(0, d + 1):
        correction = (abar * w).homogeneous(n)
        w = w + b.homogeneous(n) - correction
    return w


def loop_right_divide(b: FreeElement, a: FreeElement) -> FreeElement:
    """The unique w with w*a = b, for a with constant term 1."""
    _check_compatible(a, b)
    ring = a.ring
    if a.counit() != ring.one:
        raise ValueError("right division needs constant term 1")
    d = a.trunc
    abar = a.augmentation()
    w = FreeElement(ring, d)
    for n in range(0, d + 1):
        correction = (w * abar).homogeneous(n)
        w = w + b.homogeneous(n) - correction
    return w


# -- vectorization and the coradical filtration ------------------------------


class WordBasis:
    """Index of all words of degree <= trunc over a fixed generator count."""

    def __init__(self, n_gens: int, trunc: int):
        self.n_gens = n_gens
        self.trunc = trunc
        self.words = words_up_to_degree(n_gens, trunc)
        self.index = {w: i for i, w in enumerate(self.words)}

    @property
    def dim(self) -> int:
        return len(self.words)

    def vector(self, e: FreeElement):
        v = [e.ring.zero] * self.dim
        for w, c in e.terms.items():
            v[self.index[w]] = c
        return tuple(v)

    def element(self, ring: Ring, vec) -> FreeElement:
        return FreeElement(
            ring, self.trunc, {w: c for w, c in zip(self.words, vec) if c != ring.zero}
        )


def primitive_basis(ring: Ring, n_gens: int, trunc: int):
    """Primitive elements per degree 1..trunc, by exact kernel computation."""
    out = {}
    for deg in range(1, trunc + 1):
        words = words_of_degree(n_gens, deg)
        cols = {}
        rows = []
        for w in words:
            reduced = {
                pair: m
                for pair, m in word_coproduct(w).items()
                if not pair[0].is_unit and not pair[1].is_unit
            }
            rows.append(reduced)
            for pair in reduced:
                cols.setdefault(pair, len(cols))
        mat = []
        for reduced in rows:
            row = [ring.zero] * len(cols)
            for pair, m in reduced.items():
                row[cols[pair]] = ring.of(m)
            mat.append(row)
        # kernel of the transposed action: combinations of words with zero
        # reduced coproduct
        transposed = [
            [mat[i][j] for i in range(len(words))] for j in range(len(cols))
        ]
        ker = kernel(transposed, len(words), ring)
        elems = []
        for v in ker:
            elems.append(
                FreeElement(
                    ring, trunc, {w: c for w, c in zip(words, v) if c != ring.zero}
                )
            )
        out[deg] = elems
    return out


def coradical_filtration(ring: Ring, n_gens: int, trunc: int):
    """Subspaces F_0 <= F_1 <= ... spanned by products of at most i
    primitives, vectorized over the word basis."""
    basis = WordBasis(n_gens, trunc)
    prims = primitive_basis(ring, n_gens, trunc)
    prim_elems = [p for deg in sorted(prims) for p in prims[deg]]

    levels = []
    f0 = Subspace(ring, basis.dim)
    f0.add(basis.vector(FreeElement.unit(ring, trunc)))
    levels.append(f0)

    f1 = f0.copy()
    f1.add_all(basis.vector(p) for p in prim_elems)
    levels.append(f1)

    # representatives of products of exactly j primitives, per j
    reps = {1: list(prim_elems)}
    j = 1
    while True:
        j += 1
        new_reps = []
        for a in range(1, j):
            b = j - a
            if a > b:
                break
            for u in reps.get(a, ()):
                for v in reps.get(b, ()):
                    p = u * v
                    if not p.is_zero():
                        new_reps.append(p)
                    if a != b:
                        q = v * u
                        if not q.is_zero():
                            new_reps.append(q)
        reps[j] = new_reps
        nxt = levels[-1].copy()
        nxt.add_all(basis.vector(p) for p in new_reps)
        levels.append(nxt)
        if nxt.dim == basis.dim or j >= trunc:
            break
    return basis, levels


def coradical_degree(e: FreeElement, n_gens: int | None = None) -> int:
    """Least i with e in the span of products of <= i primitive elements.

    Defined for scalars and for elements with zero constant term.
    """
    ring = e.ring
    if e.counit() != ring.zero and e.augmentation().terms:
        raise ValueError("coradical degree needs counit 0 or a scalar")
    if e.is_zero() or not e.augmentation().terms:
        return 0
    if n_gens is None:
        n_gens = max(e.support_generators()) + 1
    basis, levels = coradical_filtration(ring, n_gens, e.trunc)
    v = basis.vector(e)
    for i, level in enumerate(levels):
        if level.contains(v):
            return i
    raise ValueError(
        f"coradical degree undecided at truncation {e.trunc}; raise the bound"
    )


# -- finite-dimensional algebras and evaluation ------------------------------


class StructureConstants:
    """A finite-dimensional algebra given by its multiplication table."""

    def __init__(self, ring: Ring, dim: int, table, unit=None):
        self.ring = ring
        self.dim = dim
        self.table = [
            [tuple(ring.of(c) for c in table[i][j]) for j in range(dim)]
            for i in range(dim)
        ]
        self.unit = None if unit is None else tuple(ring.of(c) for c in unit)
        if self.unit is not None:
            for i in range(dim):
                e = self.basis_vector(i)
                if self.multiply(self.unit, e) != e or self.multiply(e, self.unit) != e:
                    raise ValueError(f"declared unit fails on basis vector {i}")
        self._associative = None

    def basis_vector(self, i: int):
        return tuple(
            self.ring.one if j == i else self.ring.zero for j in range(self.dim)
        )

    def zero_vector(self):
        return tuple(self.ring.zero for _ in range(self.dim))

    def add(self, u, v):
        return tuple(self.ring.add(a, b) for a, b in zip(u, v))

    def scale(self, c, v):
        return tuple(self.ring.mul(c, a) for a in v)

    def multiply(self, u, v):
        ring = self.ring
        out = [ring.zero] * self.dim
        for i, ci in enumerate(u):
            if ci == ring.zero:
                continue
            for j, cj in enumerate(v):
                if cj == ring.zero:
                    continue
                f = ring.mul(ci, cj)
                for m, c in enumerate(self.table[i][j]):
                    if c != ring.zero:
                        out[m] = ring.add(out[m], ring.mul(f, c))
        return tuple(out)

    def is_associative(self) -> bool:
        if self._associative is None:
            self._associative = all(
                self.multiply(self.multiply(a, b), c)
                == self.multiply(a, self.multiply(b, c))
                for a in map(self.basis_vector, range(self.dim))
                for b in map(self.basis_vector, range(self.dim))
                for c in map(self.basis_vector, range(self.dim))
            )
        return self._associative

    def is_commutative(self) -> bool:
        return all(
            self.multiply(self.basis_vector(i), self.basis_vector(j))
            == self.multiply(self.basis_vector(j), self.basis_vector(i))
            for i in range(self.dim)
            for j in range(i)
        )


def evaluate(e: FreeElement, algebra: StructureConstants, assignment) -> tuple:
    """Image of e under the algebra map sending generators per assignment.

    `assignment` maps generator indices to coordinate vectors of the algebra.
    Words evaluate by structural recursion; the unit word needs a declared
    unit on the algebra.
    """
    check_same_ring(e.ring, algebra.ring)
    ring = algebra.ring
    cache: dict = {}

    def eval_word(w: MagmaWord):
        v = cache.get(w)
        if v is not None:
            return v
        if w.is_unit:
            if algebra.unit is None:
                raise ValueError("unit word needs a unital algebra")
            v = algebra.unit
        elif w.is_generator:
            if w.gen not in assignment:
                raise KeyError(f"generator x{w.gen + 1} has no assignment")
            v = tuple(assignment[w.gen])
        else:
            v = algebra.multiply(eval_word(w.left), eval_word(w.right))
        cache[w] = v
        return v

    out = algebra.zero_vector()
    for w, c in e.terms.items():
        out = algebra.add(out, algebra.scale(c, eval_word(w)))
    return out
