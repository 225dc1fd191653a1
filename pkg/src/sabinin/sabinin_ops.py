"""Primitive operations, Mikheev-Sabinin brackets, the multioperator, and
finite Sabinin-algebra tables with their lower filtration.

The defining identity for the primitive operations is

    (uv)z - u(vz) = sum  u_(1) v_(1) . p(u_(2); v_(2); z)

over the sequence-Sweedler splittings of the argument sequences (entries are
primitive, so the coproduct of a left-normed product is the unshuffle), with
p vanishing whenever either sequence is empty.  The sum's only occurrence of
the full split is the unknown, so the identity solves for it recursively.
"""

from __future__ import annotations

import itertools
import json
import math

from .free_algebra import (
    FreeElement,
    StructureConstants,
    coproduct,
    evaluate,
    is_primitive,
)
from .linalg import Subspace
from .scalars import QQ, Ring, ring_from_tag, ring_tag
from .words import MagmaWord


def as_elements(entries, ring: Ring, trunc: int):
    """Normalize generator indices to primitive FreeElements."""
    out = []
    for e in entries:
        if isinstance(e, int):
            out.append(FreeElement.generator(ring, trunc, e))
        else:
            if e.trunc != trunc:
                e = e.retruncate(trunc)
            out.append(e)
    return out


def left_normed(entries, ring: Ring, trunc: int) -> FreeElement:
    out = FreeElement.unit(ring, trunc)
    for e in entries:
        out = out * e
    return out


def _subseq_products(entries, ring, trunc):
    """Left-normed product of every subsequence, keyed by bitmask."""
    n = len(entries)
    prods = {0: FreeElement.unit(ring, trunc)}
    for mask in range(1, 1 << n):
        high = 1 << (mask.bit_length() - 1)
        prods[mask] = prods[mask ^ high] * entries[high.bit_length() - 1]
    return prods


def shu_p(useq, vseq, z, trunc: int | None = None, ring: Ring = QQ,
          validate: bool = False) -> FreeElement:
    """The primitive operation p(useq; vseq; z); zero if either sequence is
    empty.  Entries may be generator indices or primitive elements."""
    if trunc is None:
        trunc = len(useq) + len(vseq) + 1
    zs = as_elements([z], ring, trunc)[0]
    us = as_elements(useq, ring, trunc)
    vs = as_elements(vseq, ring, trunc)
    if validate:
        for e in us + vs + [zs]:
            if not is_primitive(e):
                raise ValueError("shu_p arguments must be primitive")
    if not us or not vs:
        return FreeElement.zero(ring, trunc)

    uprod = _subseq_products(us, ring, trunc)
    vprod = _subseq_products(vs, ring, trunc)
    ufull = (1 << len(us)) - 1
    vfull = (1 << len(vs)) - 1
    memo: dict = {}

    def rec(umask: int, vmask: int) -> FreeElement:
        """p of the subsequences selected by the masks."""
        if umask == 0 or vmask == 0:
            return FreeElement.zero(ring, trunc)
        got = memo.get((umask, vmask))
        if got is not None:
            return got
        u = uprod[umask]
        v = vprod[vmask]
        target = (u * v) * zs - u * (v * zs)
        # subtract the proper split terms: the (1)-parts multiply outside,
        # the (2)-parts stay inside p
        usubs = _submasks(umask)
        vsubs = _submasks(vmask)
        for u1 in usubs:
            for v1 in vsubs:
                if u1 == 0 and v1 == 0:
                    continue  # the unknown itself
                u2 = umask ^ u1
                v2 = vmask ^ v1
                if u2 == 0 or v2 == 0:
                    continue  # p of an empty sequence vanishes
                target = target - (uprod[u1] * vprod[v1]) * rec(u2, v2)
        memo[(umask, vmask)] = target
        return target

    return rec(ufull, vfull)


def _submasks(mask: int):
    subs = []
    s = mask
    while True:
        subs.append(s)
        if s == 0:
            break
        s = (s - 1) & mask
    return subs


def shu_p_by_coproduct_oracle(useq, vseq, z, ring: Ring = QQ) -> FreeElement:
    """Independent brute-force solver of the defining identity.

    Requires distinct generator entries.  The Sweedler splittings are read
    off the genuine coproducts of the left-normed products, with components
    identified back to subsequences through their leaf sets, and the
    resulting triangular system is solved by recursion.
    """
    n, m = len(useq), len(vseq)
    trunc = n + m + 1
    assert len(set(useq) | set(vseq) | {z}) == n + m + 1, "need distinct generators"
    us = as_elements(useq, ring, trunc)
    vs = as_elements(vseq, ring, trunc)
    zs = as_elements([z], ring, trunc)[0]
    memo: dict = {}

    def solve(uidx: tuple, vidx: tuple) -> FreeElement:
        if not uidx or not vidx:
            return FreeElement.zero(ring, trunc)
        if (uidx, vidx) in memo:
            return memo[(uidx, vidx)]
        u = left_normed([us[i] for i in uidx], ring, trunc)
        v = left_normed([vs[j] for j in vidx], ring, trunc)
        target = (u * v) * zs - u * (v * zs)
        du = coproduct(u)
        dv = coproduct(v)
        for (u1, u2), cu in du.terms.items():
            iu2 = _leaves_to_subseq(u2, uidx, useq)
            if iu2 is None:
                raise AssertionError("coproduct component is not a subsequence")
            for (v1, v2), cv in dv.terms.items():
                iv2 = _leaves_to_subseq(v2, vidx, vseq)
                if iv2 is None:
                    raise AssertionError("coproduct component is not a subsequence")
                if iu2 == uidx and iv2 == vidx:
                    continue
                if not iu2 or not iv2:
                    continue
                coeff = ring.mul(cu, cv)
                lhs = FreeElement.from_word(ring, trunc, u1, coeff) * (
                    FreeElement.from_word(ring, trunc, v1)
                )
                target = target - lhs * solve(iu2, iv2)
        memo[(uidx, vidx)] = target
        return target

    return solve(tuple(range(n)), tuple(range(m)))


def _leaves_to_subseq(w: MagmaWord, idx: tuple, gens) -> tuple | None:
    """Map a coproduct component back to the index subsequence it is the
    left-normed product of (entries are distinct generators)."""
    if w.is_unit:
        return ()
    leaves = w.leaves()
    pos = []
    for g in leaves:
        found = [i for i in idx if gens[i] == g]
        if len(found) != 1:
            return None
        pos.append(found[0])
    return tuple(pos)


def ms_bracket(xs, y, z, trunc: int | None = None, ring: Ring = QQ) -> FreeElement:
    """<x1,...,xn; y, z> = -p(xs; y; z) + p(xs; z; y); for n = 0 the binary
    bracket -yz + zy."""
    n = len(xs)
    if trunc is None:
        trunc = n + 2
    if n == 0:
        ye, ze = as_elements([y, z], ring, trunc)
        return -(ye * ze) + ze * ye
    return -shu_p(xs, [y], z, trunc, ring) + shu_p(xs, [z], y, trunc, ring)


def multioperator(xs, ys, trunc: int | None = None, ring: Ring = QQ) -> FreeElement:
    """Phi(x1..xm; y1..yn): the double symmetrization of p over both groups,
    divided by m! n!."""
    m, n = len(xs), len(ys)
    if m < 1 or n < 2:
        raise ValueError("multioperator needs m >= 1, n >= 2")
    if trunc is None:
        trunc = m + n
    ring.require_char_exceeds(max(m, n), "multioperator symmetrization")
    xe = as_elements(xs, ring, trunc)
    ye = as_elements(ys, ring, trunc)
    total = FreeElement.zero(ring, trunc)
    for sigma in itertools.permutations(range(m)):
        for tau in itertools.permutations(range(n)):
            total = total + shu_p(
                [xe[i] for i in sigma],
                [ye[j] for j in tau[:-1]],
                ye[tau[-1]],
                trunc,
                ring,
            )
    c = ring.mul(ring.inv_int(math.factorial(m)), ring.inv_int(math.factorial(n)))
    return total.scale(c)


# -- tables -------------------------------------------------------------------


class WeightBoundError(ValueError):
    """A bracket beyond the stored arity bound was requested."""


class SabininTable:
    """Finite-basis Sabinin algebra: coordinate tables for the MS brackets
    and the multioperator up to an arity bound W.

    ms entries are stored with y < z only (antisymmetry is structural); phi
    entries are keyed by the two sorted index multisets.
    """

    def __init__(self, ring: Ring, dim: int, weight_bound: int):
        if weight_bound < 2:
            raise ValueError("weight bound must be >= 2")
        self.ring = ring
        self.dim = dim
        self.weight_bound = weight_bound
        self.ms: dict = {}
        self.phi: dict = {}
        self._filtration = None

    def zero_vec(self):
        return tuple(self.ring.zero for _ in range(self.dim))

    def _nonzero(self, vec) -> bool:
        return any(c != self.ring.zero for c in vec)

    def set_ms(self, prefix, y: int, z: int, vec):
        if len(prefix) + 2 > self.weight_bound:
            raise WeightBoundError(f"arity {len(prefix) + 2} exceeds bound")
        vec = tuple(self.ring.of(c) for c in vec)
        if y == z:
            if self._nonzero(vec):
                raise ValueError("<...; y, y> must vanish")
            return
        if y > z:
            y, z = z, y
            vec = tuple(self.ring.neg(c) for c in vec)
        key = (tuple(prefix), y, z)
        if self._nonzero(vec):
            self.ms[key] = vec
        else:
            self.ms.pop(key, None)
        self._filtration = None

    def set_phi(self, xs, ys, vec):
        if len(xs) < 1 or len(ys) < 2:
            raise ValueError("phi needs m >= 1, n >= 2")
        if len(xs) + len(ys) > self.weight_bound:
            raise WeightBoundError(f"arity {len(xs) + len(ys)} exceeds bound")
        vec = tuple(self.ring.of(c) for c in vec)
        key = (tuple(sorted(xs)), tuple(sorted(ys)))
        if self._nonzero(vec):
            self.phi[key] = vec
        else:
            self.phi.pop(key, None)
        self._filtration = None

    def ms_value(self, prefix, y: int, z: int):
        if len(prefix) + 2 > self.weight_bound:
            raise WeightBoundError(
                f"arity {len(prefix) + 2} exceeds stored bound {self.weight_bound}"
            )
        if y == z:
            return self.zero_vec()
        if y > z:
            v = self.ms.get((tuple(prefix), z, y))
            if v is None:
                return self.zero_vec()
            return tuple(self.ring.neg(c) for c in v)
        return self.ms.get((tuple(prefix), y, z), self.zero_vec())

    def phi_value(self, xs, ys):
        if len(xs) + len(ys) > self.weight_bound:
            raise WeightBoundError(
                f"arity {len(xs) + len(ys)} exceeds stored bound {self.weight_bound}"
            )
        return self.phi.get((tuple(sorted(xs)), tuple(sorted(ys))), self.zero_vec())

    def is_flat(self) -> bool:
        return not self.phi

    # multilinear application to coordinate vectors

    def ms_on_vectors(self, prefix_vecs, yv, zv):
        ring = self.ring
        out = [ring.zero] * self.dim
        vecs = list(prefix_vecs) + [yv, zv]
        supports = [[i for i, c in enumerate(v) if c != ring.zero] for v in vecs]
        for idx in itertools.product(*supports):
            val = self.ms_value(idx[:-2], idx[-2], idx[-1])
            if not self._nonzero(val):
                continue
            c = ring.one
            for v, i in zip(vecs, idx):
                c = ring.mul(c, v[i])
            for t, a in enumerate(val):
                if a != ring.zero:
                    out[t] = ring.add(out[t], ring.mul(c, a))
        return tuple(out)

    def phi_on_vectors(self, x_vecs, y_vecs):
        ring = self.ring
        out = [ring.zero] * self.dim
        vecs = list(x_vecs) + list(y_vecs)
        mcount = len(x_vecs)
        supports = [[i for i, c in enumerate(v) if c != ring.zero] for v in vecs]
        for idx in itertools.product(*supports):
            val = self.phi_value(idx[:mcount], idx[mcount:])
            if not self._nonzero(val):
                continue
            c = ring.one
            for v, i in zip(vecs, idx):
                c = ring.mul(c, v[i])
            for t, a in enumerate(val):
                if a != ring.zero:
                    out[t] = ring.add(out[t], ring.mul(c, a))
        return tuple(out)

    # -- lower filtration ---------------------------------------------------

    def lower_filtration(self):
        """The chain s_1 >= s_2 >= ..., iterated from above to a fixpoint.

        Returns (chain, nil_class, stabilized): chain[n] is s_{n+1} as a
        Subspace (chain[0] = s_1 = everything); nil_class is None when the
        chain stabilizes at a nonzero subspace within the horizon.
        """
        if self._filtration is not None:
            return self._filtration
        ring = self.ring
        full = Subspace(ring, self.dim)
        for i in range(self.dim):
            full.add(tuple(ring.one if j == i else ring.zero for j in range(self.dim)))
        horizon = self.dim + self.weight_bound + 2
        chain = [full.copy() for _ in range(horizon + 1)]  # chain[n-1] = s_n

        ms_arities = {len(prefix) + 2 for prefix in (k[0] for k in self.ms)}
        phi_arities = {len(xs) + len(ys) for xs, ys in self.phi}

        def span_for(n: int) -> Subspace:
            target = Subspace(ring, self.dim)
            for arity in range(2, self.weight_bound + 1):
                do_ms = arity in ms_arities
                do_phi = arity in phi_arities
                if not do_ms and not do_phi:
                    continue
                for comp in _min_compositions(n, arity):
                    bases = [chain[min(c, horizon) - 1].basis() for c in comp]
                    if any(not b for b in bases):
                        continue
                    for args in itertools.product(*bases):
                        if do_ms:
                            val = self.ms_on_vectors(args[:-2], args[-2], args[-1])
                            if self._nonzero(val):
                                target.add(val)
                        if do_phi:
                            # phi family: every split into (m >= 1, n' >= 2)
                            for mcount in range(1, arity - 1):
                                val = self.phi_on_vectors(args[:mcount], args[mcount:])
                                if self._nonzero(val):
                                    target.add(val)
                    if target.dim == chain[n - 1].dim:
                        break
            return target

        changed = True
        while changed:
            changed = False
            for n in range(2, horizon + 2):
                new = span_for(n)
                if new.rows != chain[n - 1].rows:
                    chain[n - 1] = new
                    changed = True

        nil_class = None
        stabilized = False
        for n in range(1, horizon + 1):
            if chain[n].dim == 0:  # s_{n+1} = 0
                nil_class = n
                break
        if nil_class is None:
            stabilized = chain[horizon - 1].rows == chain[horizon].rows
        self._filtration = (chain, nil_class, stabilized)
        return self._filtration

    def nilpotency_class(self) -> int | None:
        return self.lower_filtration()[1]

    def coordinate_weights(self):
        """N(e_i) = the deepest filtration level containing e_i; errors if
        the basis is not adapted to the filtration."""
        chain, nil_class, _ = self.lower_filtration()
        if nil_class is None:
            raise ValueError("table is not nilpotent within the bound")
        weights = []
        for i in range(self.dim):
            e = tuple(
                self.ring.one if j == i else self.ring.zero for j in range(self.dim)
            )
            n = 1
            while n < len(chain) and chain[n].contains(e):
                n += 1
            weights.append(n)
        for n in range(1, nil_class + 1):
            adapted = sum(1 for w in weights if w >= n)
            if chain[n - 1].dim != adapted:
                raise ValueError(
                    f"basis not adapted to the filtration at level {n}: "
                    f"dim {chain[n - 1].dim} vs {adapted} basis vectors"
                )
        return tuple(weights)

    def check_class_zeroes(self, n: int) -> bool:
        """All stored brackets of arity > n vanish (a class-n table claim)."""
        for (prefix, _, _) , v in self.ms.items():
            if len(prefix) + 2 > n and self._nonzero(v):
                return False
        for (xs, ys), v in self.phi.items():
            if len(xs) + len(ys) > n and self._nonzero(v):
                return False
        return True

    # -- generation ----------------------------------------------------------

    def subalgebra_generated(self, vectors) -> Subspace:
        """Closure of the span of `vectors` under all stored operations."""
        ring = self.ring
        span = Subspace(ring, self.dim, vectors)
        changed = True
        while changed:
            changed = False
            basis = span.basis()
            for arity in range(2, self.weight_bound + 1):
                for args in itertools.product(basis, repeat=arity):
                    val = self.ms_on_vectors(list(args[:-2]), args[-2], args[-1])
                    if self._nonzero(val) and span.add(val):
                        changed = True
                    for mcount in range(1, arity - 1):
                        val = self.phi_on_vectors(args[:mcount], args[mcount:])
                        if self._nonzero(val) and span.add(val):
                            changed = True
                if changed:
                    break
        return span

    # -- wire format ----------------------------------------------------------

    def to_json(self) -> str:
        chain, nil_class, _ = self.lower_filtration()
        ms_rows = [
            [list(prefix), y, z, [self.ring.to_str(c) for c in vec]]
            for (prefix, y, z), vec in sorted(self.ms.items())
        ]
        phi_rows = [
            [list(xs), list(ys), [self.ring.to_str(c) for c in vec]]
            for (xs, ys), vec in sorted(self.phi.items())
        ]
        return json.dumps(
            {
                "dim": self.dim,
                "weight_bound": self.weight_bound,
                "class": nil_class,
                "ring": ring_tag(self.ring),
                "ms": ms_rows,
                "phi": phi_rows,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "SabininTable":
        data = json.loads(text)
        ring = ring_from_tag(data.get("ring", "Q"))
        t = cls(ring, data["dim"], data["weight_bound"])
        for prefix, y, z, vec in data["ms"]:
            t.set_ms(tuple(prefix), y, z, [ring.of(c) for c in vec])
        for xs, ys, vec in data["phi"]:
            t.set_phi(tuple(xs), tuple(ys), [ring.of(c) for c in vec])
        return t


def _min_compositions(n: int, arity: int):
    """Compositions (i_1..i_arity), i_t >= 1, minimal with sum >= n: the sum
    equals n exactly, or all parts are 1 when arity > n."""
    if arity >= n:
        return [(1,) * arity]
    out = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            if remaining >= 1:
                out.append(prefix + (remaining,))
            return
        for first in range(1, remaining - slots + 2):
            rec(prefix + (first,), remaining - first, slots - 1)

    rec((), n, arity)
    return out


def ux_table(algebra: StructureConstants, weight_bound: int) -> SabininTable:
    """The Sabinin structure that any algebra carries: compute each bracket
    symbolically in the free algebra once per shape, then evaluate on basis
    assignments."""
    ring = algebra.ring
    dim = algebra.dim
    table = SabininTable(ring, dim, weight_bound)

    for l in range(0, weight_bound - 1):
        arity = l + 2
        sym = ms_bracket(list(range(l)), l, l + 1, trunc=arity, ring=ring)
        for prefix in itertools.product(range(dim), repeat=l):
            for y in range(dim):
                for z in range(y + 1, dim):
                    assignment = {t: algebra.basis_vector(prefix[t]) for t in range(l)}
                    assignment[l] = algebra.basis_vector(y)
                    assignment[l + 1] = algebra.basis_vector(z)
                    vec = evaluate(sym, algebra, assignment)
                    table.set_ms(prefix, y, z, vec)

    for m in range(1, weight_bound - 1):
        for n in range(2, weight_bound - m + 1):
            sym = multioperator(
                list(range(m)), list(range(m, m + n)), trunc=m + n, ring=ring
            )
            for xs in itertools.combinations_with_replacement(range(dim), m):
                for ys in itertools.combinations_with_replacement(range(dim), n):
                    assignment = {t: algebra.basis_vector(xs[t]) for t in range(m)}
                    for t in range(n):
                        assignment[m + t] = algebra.basis_vector(ys[t])
                    vec = evaluate(sym, algebra, assignment)
                    table.set_phi(xs, ys, vec)
    return table
