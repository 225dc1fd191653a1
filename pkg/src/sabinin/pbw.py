"""PBW bases for universal envelopes of nilpotent tables, the N-weight,
straightening, the truncated envelope U/U-bar^{n+1}, and the embedding
certificate.

A PBW monomial is a non-decreasing tuple of basis indices read as the
left-normed product ((a_1 a_2)...)a_d.  Straightening uses the two
rewriting identities that the defining equation of the primitive operations
yields:

    (wy)z - (wz)y = - sum w_(1) <w_(2); y, z>          (single right factor)
    u(v z)  = (uv)z - sum u_(1) v_(1) p(u_(2); v_(2); z)   (longer factors)

with sequence-Sweedler sums over order-preserving subsequence splits.  Every
correction strictly shortens the monomial and never lowers the N-weight,
which is asserted at each step.
"""

from __future__ import annotations

import itertools
import math

from .brackets import p_from_table
from .free_algebra import StructureConstants
from .linalg import Subspace
from .sabinin_ops import SabininTable
from .scalars import Ring

INF = float("inf")


class PBWContext:
    """Straightening context for the universal envelope of a nilpotent
    table, with a basis order along which N is non-decreasing."""

    def __init__(self, table: SabininTable, order: str = "forward"):
        self.table = table
        self.ring = table.ring
        self.nil_class = table.nilpotency_class()
        if self.nil_class is None:
            raise ValueError("the table is not nilpotent within its bound")
        self.weights = table.coordinate_weights()
        if order == "forward":
            self.order = list(range(table.dim))
            seq = [self.weights[b] for b in self.order]
            if any(seq[i] > seq[i + 1] for i in range(len(seq) - 1)):
                raise ValueError("N is not non-decreasing along the basis order")
        elif order == "reverse":
            # the opposite order, used for cross-checks; N-monotonicity is
            # deliberately not required here
            self.order = list(range(table.dim - 1, -1, -1))
        else:
            raise ValueError("order must be 'forward' or 'reverse'")
        self.rank = {b: i for i, b in enumerate(self.order)}
        self._memo: dict = {}

    def le(self, a: int, b: int) -> bool:
        return self.rank[a] <= self.rank[b]

    def n_weight_mono(self, mono) -> float:
        return sum(self.weights[b] for b in mono) if mono else 0

    def n_weight(self, expr: dict) -> float:
        """N of a combination: min over monomials, N(0) = infinity."""
        if not expr:
            return INF
        return min(self.n_weight_mono(m) for m in expr)

    def bracket_value(self, prefix, y: int, z: int):
        """MS bracket on basis indices; weight above the class is zero
        without consulting the table (arity never exceeds the bound then)."""
        w = sum(self.weights[i] for i in prefix) + self.weights[y] + self.weights[z]
        if w > self.nil_class:
            return self.table.zero_vec()
        return self.table.ms_value(prefix, y, z)

    def _add(self, acc: dict, mono, coeff):
        cur = acc.get(mono)
        if cur is None:
            acc[mono] = coeff
        else:
            s = self.ring.add(cur, coeff)
            if s == self.ring.zero:
                del acc[mono]
            else:
                acc[mono] = s

    def _add_scaled(self, acc: dict, expr: dict, coeff):
        for m, c in expr.items():
            self._add(acc, m, self.ring.mul(coeff, c))

    def mul_mono_basis(self, u: tuple, b: int) -> dict:
        """Straighten the product (PBW monomial) * (single basis element)."""
        key = (u, (b,))
        got = self._memo.get(key)
        if got is not None:
            return got
        ring = self.ring
        if not u:
            out = {(b,): ring.one}
        elif self.le(u[-1], b):
            out = {u + (b,): ring.one}
        else:
            head, an = u[:-1], u[-1]
            out: dict = {}
            # (a_{A'} b) a_n
            for mono, c in self.mul_mono_basis(head, b).items():
                self._add_scaled(out, self.mul_mono_basis(mono, an), c)
            # - sum over subsequence splits of A': a_{A'(1)} <A'(2); a_n, b>
            n = len(head)
            for mask in range(1 << n):
                kept = tuple(head[i] for i in range(n) if mask >> i & 1)
                left = tuple(head[i] for i in range(n) if not mask >> i & 1)
                vec = self.bracket_value(kept, an, b)
                for coord, a in enumerate(vec):
                    if a != ring.zero:
                        self._add_scaled(
                            out,
                            self.mul_mono_basis(left, coord),
                            ring.neg(a),
                        )
        base_n = self.n_weight_mono(u) + self.weights[b]
        for mono in out:
            if len(mono) > len(u) + 1 or self.n_weight_mono(mono) < base_n:
                raise AssertionError(
                    "straightening produced a longer or lighter term"
                )
        self._memo[key] = out
        return out

    def mul_mono(self, u: tuple, v: tuple) -> dict:
        """Straighten a product of two PBW monomials."""
        if not v:
            return {u: self.ring.one}
        if not u:
            return {v: self.ring.one}
        if len(v) == 1:
            return self.mul_mono_basis(u, v[0])
        key = (u, v)
        got = self._memo.get(key)
        if got is not None:
            return got
        ring = self.ring
        head, bm = v[:-1], v[-1]
        out: dict = {}
        # (a_A a_B') a_m
        for mono, c in self.mul_mono(u, head).items():
            self._add_scaled(out, self.mul_mono_basis(mono, bm), c)
        # - sum over splits with both p-arguments nonempty
        nu, nv = len(u), len(head)
        for umask in range(1 << nu):
            u2 = tuple(u[i] for i in range(nu) if umask >> i & 1)
            if not u2:
                continue
            u1 = tuple(u[i] for i in range(nu) if not umask >> i & 1)
            for vmask in range(1 << nv):
                v2 = tuple(head[i] for i in range(nv) if vmask >> i & 1)
                if not v2:
                    continue
                v1 = tuple(head[i] for i in range(nv) if not vmask >> i & 1)
                if sum(self.weights[i] for i in u2 + v2) + self.weights[bm] > self.nil_class:
                    continue  # p of weight above the class vanishes
                pvec = p_from_table(self.table, u2, v2, bm)
                if all(c == ring.zero for c in pvec):
                    continue
                cofactor = self.mul_mono(u1, v1)
                for coord, a in enumerate(pvec):
                    if a == ring.zero:
                        continue
                    for mono, c in cofactor.items():
                        self._add_scaled(
                            out,
                            self.mul_mono_basis(mono, coord),
                            ring.neg(ring.mul(c, a)),
                        )
        base_n = self.n_weight_mono(u) + self.n_weight_mono(v)
        for mono in out:
            if self.n_weight_mono(mono) < base_n:
                raise AssertionError("straightening lowered the N-weight")
        self._memo[key] = out
        return out

    def mul(self, e1: dict, e2: dict) -> dict:
        ring = self.ring
        out: dict = {}
        for m1, c1 in e1.items():
            for m2, c2 in e2.items():
                self._add_scaled(out, self.mul_mono(m1, m2), ring.mul(c1, c2))
        return out

    def monomials_up_to_length(self, max_len: int):
        out = []
        for length in range(max_len + 1):
            for mono in itertools.combinations_with_replacement(self.order, length):
                out.append(mono)
        return sorted(out, key=lambda m: (len(m), [self.rank[b] for b in m]))


def rewrite_to_pbw(table: SabininTable, expression, order: str = "forward") -> dict:
    """Straighten a product expression: a nested pair tree whose leaves are
    PBW monomials (tuples of basis indices)."""
    ctx = PBWContext(table, order)

    def rec(node) -> dict:
        if isinstance(node, tuple) and (not node or isinstance(node[0], int)):
            return {tuple(node): ctx.ring.one}
        left, right = node
        return ctx.mul(rec(left), rec(right))

    return rec(expression)


class TruncatedEnvelope:
    """U(s)/U-bar^{n+1} as explicit structure constants on the PBW
    monomials of N-weight at most n."""

    def __init__(self, table: SabininTable, order: str = "forward"):
        self.ctx = PBWContext(table, order)
        self.ring = table.ring
        n = self.ctx.nil_class
        self.nil_class = n
        self.basis = [
            m
            for m in self.ctx.monomials_up_to_length(n)
            if self.ctx.n_weight_mono(m) <= n
        ]
        self.index = {m: i for i, m in enumerate(self.basis)}
        self.dim = len(self.basis)

    def project(self, expr: dict):
        """Quotient by the span of N-weight > n monomials."""
        vec = [self.ring.zero] * self.dim
        for m, c in expr.items():
            i = self.index.get(m)
            if i is not None:
                vec[i] = self.ring.add(vec[i], c)
        return tuple(vec)

    def multiply(self, u, v):
        ring = self.ring
        out = [ring.zero] * self.dim
        for i, ci in enumerate(u):
            if ci == ring.zero:
                continue
            for j, cj in enumerate(v):
                if cj == ring.zero:
                    continue
                prod = self.project(self.ctx.mul_mono(self.basis[i], self.basis[j]))
                f = ring.mul(ci, cj)
                for t, a in enumerate(prod):
                    if a != ring.zero:
                        out[t] = ring.add(out[t], ring.mul(f, a))
        return tuple(out)

    def structure_constants(self) -> StructureConstants:
        table = [
            [
                list(self.project(self.ctx.mul_mono(self.basis[i], self.basis[j])))
                for j in range(self.dim)
            ]
            for i in range(self.dim)
        ]
        unit = [self.ring.zero] * self.dim
        unit[self.index[()]] = self.ring.one
        return StructureConstants(self.ring, self.dim, table, unit=tuple(unit))

    def embed(self, s_coords):
        """The composition s -> U -> U/U-bar^{n+1} on coordinates."""
        vec = [self.ring.zero] * self.dim
        for i, c in enumerate(s_coords):
            if c != self.ring.zero:
                vec[self.index[(i,)]] = c
        return tuple(vec)

    def exp(self, s_coords):
        """exp of an s-element inside the quotient, with left-normed powers."""
        ring = self.ring
        ring.require_char_exceeds(self.nil_class, "envelope exp")
        one = [ring.zero] * self.dim
        one[self.index[()]] = ring.one
        out = tuple(one)
        v = self.embed(s_coords)
        power = v
        out = tuple(ring.add(a, b) for a, b in zip(out, v))
        for j in range(2, self.nil_class + 1):
            power = self.multiply(power, v)
            c = ring.inv_int(math.factorial(j))
            out = tuple(ring.add(a, ring.mul(c, b)) for a, b in zip(out, power))
        return out


def augmentation_power_span(ctx: PBWContext, n_plus_1: int) -> tuple:
    """Span of all bracketings of products of n+1 single basis elements,
    inside the space of monomials of length <= n+1.

    Returns (subspace, mono_list).  This is the independent description of
    U-bar^{n+1} at the materialized cap, cross-checked against the N-weight
    description.
    """
    ring = ctx.ring
    monos = ctx.monomials_up_to_length(n_plus_1)
    index = {m: i for i, m in enumerate(monos)}

    def vec_of(expr: dict):
        v = [ring.zero] * len(monos)
        for m, c in expr.items():
            v[index[m]] = c
        return tuple(v)

    def tree_shapes(k: int):
        if k == 1:
            yield "leaf"
            return
        for i in range(1, k):
            for l in tree_shapes(i):
                for r in tree_shapes(k - i):
                    yield (l, r)

    span = Subspace(ring, len(monos))
    for shape in tree_shapes(n_plus_1):
        for leaves in itertools.product(range(ctx.table.dim), repeat=n_plus_1):
            it = iter(leaves)

            def build(s):
                if s == "leaf":
                    return {(next(it),): ring.one}
                return ctx.mul(build(s[0]), build(s[1]))

            span.add(vec_of(build(shape)))
    return span, monos


def ado_certificate(table: SabininTable, order: str = "forward") -> dict:
    """Injectivity of s -> U(s)/U-bar^{n+1} plus the cross-check that the
    two spanning descriptions of U-bar^{n+1} agree at the cap."""
    env = TruncatedEnvelope(table, order)
    ctx = env.ctx
    ring = table.ring
    n = ctx.nil_class

    embedding = [env.embed(tuple(
        ring.one if j == i else ring.zero for j in range(table.dim)
    )) for i in range(table.dim)]
    emb_span = Subspace(ring, env.dim, embedding)
    injective = emb_span.dim == table.dim

    span_b, monos = augmentation_power_span(ctx, n + 1)
    span_a = Subspace(ring, len(monos))
    for i, m in enumerate(monos):
        if ctx.n_weight_mono(m) > n:
            vec = [ring.zero] * len(monos)
            vec[i] = ring.one
            span_a.add(tuple(vec))
    agree = span_a.rows == span_b.rows
    oracle_dim = len(monos) - span_b.dim

    # corollary: U-bar^{n+1} meets s trivially
    joint = span_b.copy()
    grew = 0
    for i in range(table.dim):
        vec = [ring.zero] * len(monos)
        vec[monos.index((i,))] = ring.one
        if joint.add(tuple(vec)):
            grew += 1
    corollary = grew == table.dim
    return {
        "class": n,
        "quotient_dim": env.dim,
        "oracle_quotient_dim": oracle_dim,
        "dims_agree": env.dim == oracle_dim,
        "embedding_rank": emb_span.dim,
        "injective": injective,
        "spanning_sets_agree": agree,
        "s_meets_power_trivially": corollary,
        "embedding_matrix": [list(v) for v in embedding],
    }
