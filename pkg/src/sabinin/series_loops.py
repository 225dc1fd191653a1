"""Power-series loops: substitution series B(A) and non-associative series
C(A).

B(A) holds series x + a_1 x^2 + a_2 x^3 + ... with coefficients in an
associative unital algebra; composition substitutes one series into the
other, with x commuting and associating with coefficients.  The same
substitution run on symbolic coefficients flattens B(A) to a PolyLoop
(coordinate (m, s) = component s of a_m, weight m), which the formal-loop
engine then certifies.  C(A) is the multiplicative loop of series over one
non-associative variable.
"""

from __future__ import annotations

from .free_algebra import StructureConstants
from .poly_loop import PolyLoop, PolyMap, _padd, _pmul, _pscale
from .scalars import Ring, check_same_ring
from .words import MagmaWord


class BSeries:
    """x + a_1 x^2 + ... + a_d x^{d+1} over an associative unital algebra."""

    def __init__(self, algebra: StructureConstants, depth: int, coeffs=None):
        if algebra.unit is None or not algebra.is_associative():
            raise ValueError("B(A) needs an associative unital algebra")
        self.algebra = algebra
        self.depth = depth
        self.coeffs = {}
        if coeffs:
            for m, v in coeffs.items():
                if not 1 <= m <= depth:
                    raise ValueError(f"coefficient degree {m} out of range")
                v = tuple(algebra.ring.of(c) for c in v)
                if any(c != algebra.ring.zero for c in v):
                    self.coeffs[m] = v

    @classmethod
    def identity(cls, algebra, depth) -> "BSeries":
        return cls(algebra, depth)

    def coeff(self, m: int):
        return self.coeffs.get(m, self.algebra.zero_vector())

    def _check(self, other: "BSeries"):
        if self.algebra is not other.algebra and self.algebra.table != other.algebra.table:
            raise ValueError("series live over different algebras")
        if self.depth != other.depth:
            raise ValueError("series have different depths")

    def __eq__(self, other):
        return isinstance(other, BSeries) and self.coeffs == other.coeffs

    def __repr__(self):
        parts = ["x"]
        for m in sorted(self.coeffs):
            parts.append(f"{list(self.coeffs[m])}*x^{m + 1}")
        return " + ".join(parts)

    def _full(self):
        """Coefficients of x^1..x^{d+1}: the leading 1 is the algebra unit."""
        full = {1: self.algebra.unit}
        for m, v in self.coeffs.items():
            full[m + 1] = v
        return full

    def compose(self, other: "BSeries") -> "BSeries":
        """Substitution of `other` into self: (a o b)(x) = a(b(x))."""
        self._check(other)
        A = self.algebra
        d = self.depth
        bf = other._full()
        out: dict = {}

        def series_mul(u: dict, v: dict) -> dict:
            prod: dict = {}
            for i, ui in u.items():
                for j, vj in v.items():
                    if i + j > d + 1:
                        continue
                    w = A.multiply(ui, vj)
                    if i + j in prod:
                        prod[i + j] = A.add(prod[i + j], w)
                    else:
                        prod[i + j] = w
            return prod

        power = dict(bf)  # b(x)^1
        acc = dict(power)  # a_0 = 1 times b(x)
        for m in range(1, d + 1):
            power = series_mul(power, bf)
            am = self.coeffs.get(m)
            if am is None:
                continue
            for deg, v in power.items():
                w = A.multiply(am, v)
                if deg in acc:
                    acc[deg] = A.add(acc[deg], w)
                else:
                    acc[deg] = w
        coeffs = {deg - 1: v for deg, v in acc.items() if deg >= 2}
        return BSeries(A, d, coeffs)

    def left_divide(self, target: "BSeries") -> "BSeries":
        """The unique c with self o c = target, degree by degree."""
        self._check(target)
        A = self.algebra
        c = BSeries(A, self.depth)
        for n in range(1, self.depth + 1):
            got = self.compose(c).coeff(n)
            want = target.coeff(n)
            delta = tuple(A.ring.sub(a, b) for a, b in zip(want, got))
            if any(x != A.ring.zero for x in delta):
                c.coeffs[n] = delta
        if self.compose(c) != target:
            raise AssertionError("left division round trip failed")
        return c

    def right_divide(self, target: "BSeries") -> "BSeries":
        """The unique c with c o self = target."""
        self._check(target)
        A = self.algebra
        c = BSeries(A, self.depth)
        for n in range(1, self.depth + 1):
            got = c.compose(self).coeff(n)
            want = target.coeff(n)
            delta = tuple(A.ring.sub(a, b) for a, b in zip(want, got))
            if any(x != A.ring.zero for x in delta):
                c.coeffs[n] = delta
        if c.compose(self) != target:
            raise AssertionError("right division round trip failed")
        return c


def b_commutator(a: BSeries, b: BSeries) -> BSeries:
    """(b o a) \\ (a o b)."""
    return b.compose(a).left_divide(a.compose(b))


def b_associator(a: BSeries, b: BSeries, c: BSeries) -> BSeries:
    """[a o (b o c)] \\ [(a o b) o c]."""
    left = a.compose(b.compose(c))
    right = a.compose(b).compose(c)
    return left.left_divide(right)


def b_loop(algebra: StructureConstants, depth: int) -> PolyLoop:
    """Flatten the composition loop to coordinates: coordinate (m, s) is
    component s of the degree-m coefficient, of weight m."""
    if algebra.unit is None or not algebra.is_associative():
        raise ValueError("B(A) needs an associative unital algebra")
    ring = algebra.ring
    ka = algebra.dim
    dim = depth * ka
    weights = tuple(1 + (c // ka) for c in range(dim))

    def var(slot, m, s):
        # degree-m coefficient, component s
        return ((slot, (m - 1) * ka + s),)

    # symbolic series: degree -> vector of polynomials over the variables
    def symbolic_full(slot):
        full = {1: [{(): c} if c != ring.zero else {} for c in algebra.unit]}
        for m in range(1, depth + 1):
            full[m + 1] = [{var(slot, m, s): ring.one} for s in range(ka)]
        return full

    def poly_vec_mul(u, v):
        """A-product of two polynomial coefficient vectors."""
        out = [{} for _ in range(ka)]
        for s in range(ka):
            if not u[s]:
                continue
            for t in range(ka):
                if not v[t]:
                    continue
                prod = _pmul(ring, u[s], v[t], weights, depth)
                if not prod:
                    continue
                for m, c in enumerate(algebra.table[s][t]):
                    if c != ring.zero:
                        out[m] = _padd(ring, out[m], _pscale(ring, c, prod))
        return out

    af = symbolic_full(0)
    bf = symbolic_full(1)

    def series_mul(u, v):
        prod = {}
        for i, ui in u.items():
            for j, vj in v.items():
                if i + j > depth + 1:
                    continue
                w = poly_vec_mul(ui, vj)
                if i + j in prod:
                    prod[i + j] = [_padd(ring, a, b) for a, b in zip(prod[i + j], w)]
                else:
                    prod[i + j] = w
        return prod

    power = dict(bf)
    acc = {deg: [dict(p) for p in vec] for deg, vec in bf.items()}
    for m in range(1, depth + 1):
        power = series_mul(power, bf)
        am = af.get(m + 1)
        for deg, vec in power.items():
            w = poly_vec_mul(am, vec)
            if deg in acc:
                acc[deg] = [_padd(ring, a, b) for a, b in zip(acc[deg], w)]
            else:
                acc[deg] = w

    F = PolyMap(ring, dim, weights, depth, 2)
    for deg in range(2, depth + 2):
        vec = acc.get(deg, [{} for _ in range(ka)])
        for s in range(ka):
            F.comps[(deg - 2) * ka + s] = vec[s]
    return PolyLoop(ring, dim, depth, weights, F)


def graded_commutator_report(algebra: StructureConstants, i: int, j: int,
                             ai, bj) -> dict:
    """Leading graded component of the loop commutator of x + a_i x^{i+1}
    and x + b_j x^{j+1}, compared with the displayed bilinear bracket
    i*(a_i b_j) - j*(b_j a_i) and with the substitution-derived value
    (i+1)*(a_i b_j) - (j+1)*(b_j a_i)."""
    A = algebra
    ring = A.ring
    depth = i + j
    a = BSeries(A, depth, {i: ai})
    b = BSeries(A, depth, {j: bj})
    comm = b_commutator(a, b)
    leading = comm.coeff(i + j)
    lower_vanish = all(
        all(c == ring.zero for c in comm.coeff(m)) for m in range(1, i + j)
    )
    ab = A.multiply(tuple(ring.of(c) for c in ai), tuple(ring.of(c) for c in bj))
    ba = A.multiply(tuple(ring.of(c) for c in bj), tuple(ring.of(c) for c in ai))
    displayed = tuple(
        ring.sub(ring.mul(ring.of(i), x), ring.mul(ring.of(j), y))
        for x, y in zip(ab, ba)
    )
    corrected = tuple(
        ring.sub(ring.mul(ring.of(i + 1), x), ring.mul(ring.of(j + 1), y))
        for x, y in zip(ab, ba)
    )
    return {
        "leading": leading,
        "lower_terms_vanish": lower_vanish,
        "displayed_formula": displayed,
        "matches_displayed": leading == displayed,
        "corrected_formula": corrected,
        "matches_corrected": leading == corrected,
        "difference_vs_displayed": tuple(
            ring.sub(x, y) for x, y in zip(leading, displayed)
        ),
    }


def graded_associator_report(algebra: StructureConstants, i: int, j: int, k: int,
                             ai, bj, ck) -> dict:
    """Leading graded component of the loop associator against the displayed
    trilinear operation (i(i+1)/2) * a_i (b_j c_k - c_k b_j)."""
    A = algebra
    ring = A.ring
    depth = i + j + k
    a = BSeries(A, depth, {i: ai})
    b = BSeries(A, depth, {j: bj})
    c = BSeries(A, depth, {k: ck})
    asr = b_associator(a, b, c)
    leading = asr.coeff(i + j + k)
    lower_vanish = all(
        all(x == ring.zero for x in asr.coeff(m)) for m in range(1, i + j + k)
    )
    bc = A.multiply(tuple(ring.of(x) for x in bj), tuple(ring.of(x) for x in ck))
    cb = A.multiply(tuple(ring.of(x) for x in ck), tuple(ring.of(x) for x in bj))
    comm = tuple(ring.sub(x, y) for x, y in zip(bc, cb))
    factor = ring.of(i * (i + 1) // 2)
    displayed = tuple(
        ring.mul(factor, x)
        for x in A.multiply(tuple(ring.of(x) for x in ai), comm)
    )
    return {
        "leading": leading,
        "lower_terms_vanish": lower_vanish,
        "displayed_formula": displayed,
        "matches_displayed": leading == displayed,
        "difference_vs_displayed": tuple(
            ring.sub(x, y) for x, y in zip(leading, displayed)
        ),
    }


class CSeries:
    """1 + sum a_w w over non-associative monomials w in one variable."""

    def __init__(self, algebra: StructureConstants, depth: int, terms=None):
        if algebra.unit is None:
            raise ValueError("C(A) needs a unital algebra")
        self.algebra = algebra
        self.depth = depth
        self.terms = {MagmaWord.unit(): algebra.unit}
        if terms:
            for w, v in terms.items():
                if w.degree > depth:
                    continue
                v = tuple(algebra.ring.of(c) for c in v)
                if w.is_unit:
                    if v != algebra.unit:
                        raise ValueError("constant term must be 1")
                    continue
                if any(c != algebra.ring.zero for c in v):
                    self.terms[w] = v

    @classmethod
    def one(cls, algebra, depth) -> "CSeries":
        return cls(algebra, depth)

    def coeff(self, w: MagmaWord):
        return self.terms.get(w, self.algebra.zero_vector())

    def __eq__(self, other):
        return isinstance(other, CSeries) and self.terms == other.terms

    def __mul__(self, other: "CSeries") -> "CSeries":
        if self.depth != other.depth:
            raise ValueError("series have different depths")
        if self.algebra is not other.algebra and self.algebra.table != other.algebra.table:
            raise ValueError("series live over different algebras")
        A = self.algebra
        out: dict = {}
        for w1, v1 in self.terms.items():
            for w2, v2 in other.terms.items():
                if w1.degree + w2.degree > self.depth:
                    continue
                w = MagmaWord.pair(w1, w2)
                v = A.multiply(v1, v2)
                if w in out:
                    out[w] = A.add(out[w], v)
                else:
                    out[w] = v
        out.pop(MagmaWord.unit(), None)
        return CSeries(A, self.depth, out)

    def __repr__(self):
        parts = ["1"]
        for w in sorted(self.terms, key=MagmaWord.sort_key):
            if w.is_unit:
                continue
            parts.append(f"{list(self.terms[w])}*{w!r}")
        return " + ".join(parts)
