"""Finite loops as Cayley tables, loop algebras, augmentation-ideal powers,
Jennings dimension subloops, the operational commutator-associator
filtration, and the injectivity check for integrated lattice samples.

Non-associative ideal powers include every bracketing: the k-th power is
the join of the products of lower powers.  The commutator-associator
filtration here is an operational definition (the fastest descending chain
generated by commutators, associators and associator deviations with
additive argument levels); certificates say so explicitly.
"""

from __future__ import annotations

import csv
import io
import itertools

from .free_algebra import StructureConstants
from .linalg import Subspace
from .scalars import Ring


class LoopValidationError(ValueError):
    pass


class CayleyLoop:
    """A finite loop given by its multiplication table of element indices."""

    def __init__(self, table, names=None, check: bool = True):
        self.table = [list(row) for row in table]
        self.n = len(self.table)
        self.names = list(names) if names else [str(i) for i in range(self.n)]
        if check:
            self.identity = self._validate()
        else:
            self.identity = 0
        # division tables
        self._left = [[None] * self.n for _ in range(self.n)]
        self._right = [[None] * self.n for _ in range(self.n)]
        for a in range(self.n):
            for b in range(self.n):
                c = self.table[a][b]
                self._left[a][c] = b  # a * b = c  =>  a \ c = b
                self._right[b][c] = a  # a * b = c  =>  c / b = a

    def _validate(self) -> int:
        n = self.n
        for i, row in enumerate(self.table):
            if len(row) != n:
                raise LoopValidationError(f"row {i} has length {len(row)} != {n}")
            if sorted(row) != list(range(n)):
                raise LoopValidationError(f"row {i} is not a permutation")
        for j in range(n):
            col = [self.table[i][j] for i in range(n)]
            if sorted(col) != list(range(n)):
                raise LoopValidationError(f"column {j} is not a permutation")
        identity = None
        for e in range(n):
            if all(self.table[e][j] == j for j in range(n)) and all(
                self.table[i][e] == i for i in range(n)
            ):
                identity = e
                break
        if identity is None:
            raise LoopValidationError("no two-sided identity element")
        return identity

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def left_div(self, a: int, b: int) -> int:
        """a \\ b."""
        return self._left[a][b]

    def right_div(self, a: int, b: int) -> int:
        """a / b."""
        return self._right[b][a]

    def commutator(self, a: int, b: int) -> int:
        """(ba) \\ (ab)."""
        return self.left_div(self.mul(b, a), self.mul(a, b))

    def associator(self, a: int, b: int, c: int) -> int:
        """(a(bc)) \\ ((ab)c)."""
        return self.left_div(self.mul(a, self.mul(b, c)), self.mul(self.mul(a, b), c))

    def is_associative(self) -> bool:
        return all(
            self.associator(a, b, c) == self.identity
            for a in range(self.n)
            for b in range(self.n)
            for c in range(self.n)
        )

    def subloop_generated(self, elements) -> frozenset:
        """Closure under multiplication and both divisions."""
        out = {self.identity} | set(elements)
        changed = True
        while changed:
            changed = False
            new = set()
            for a in out:
                for b in out:
                    for c in (self.mul(a, b), self.left_div(a, b), self.right_div(a, b)):
                        if c not in out:
                            new.add(c)
            if new:
                out |= new
                changed = True
        return frozenset(out)

    def is_subloop(self, elements) -> bool:
        s = set(elements)
        if self.identity not in s:
            return False
        return all(
            self.mul(a, b) in s and self.left_div(a, b) in s and self.right_div(a, b) in s
            for a in s
            for b in s
        )

    def is_normal_subloop(self, elements) -> bool:
        """xH = Hx, (xy)H = x(yH), and (Hx)y = H(xy) as element sets."""
        H = frozenset(elements)
        if not self.is_subloop(H):
            return False
        for x in range(self.n):
            if {self.mul(x, h) for h in H} != {self.mul(h, x) for h in H}:
                return False
            for y in range(self.n):
                xy = self.mul(x, y)
                if {self.mul(xy, h) for h in H} != {
                    self.mul(x, self.mul(y, h)) for h in H
                }:
                    return False
                if {self.mul(self.mul(h, x), y) for h in H} != {
                    self.mul(h, xy) for h in H
                }:
                    return False
        return True

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(self.names)
        for row in self.table:
            writer.writerow(row)
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "CayleyLoop":
        rows = list(csv.reader(io.StringIO(text.strip())))
        names = rows[0]
        table = [[int(c) for c in row] for row in rows[1:]]
        return cls(table, names=names)


def loop_algebra(loop: CayleyLoop, ring: Ring) -> StructureConstants:
    """k[L]: basis = loop elements, 0/1 permutation structure constants."""
    n = loop.n
    table = [
        [
            [ring.one if m == loop.mul(i, j) else ring.zero for m in range(n)]
            for j in range(n)
        ]
        for i in range(n)
    ]
    unit = [ring.one if m == loop.identity else ring.zero for m in range(n)]
    return StructureConstants(ring, n, table, unit=tuple(unit))


def augmentation_powers(loop: CayleyLoop, ring: Ring):
    """The chain I >= I^2 >= ... of augmentation-ideal powers, with all
    bracketings: P_k = join of span(P_i . P_{k-i}).  Stops at stabilization
    or zero; returns a list of Subspaces starting with I itself."""
    algebra = loop_algebra(loop, ring)
    n = loop.n
    e = loop.identity
    first = Subspace(ring, n)
    for g in range(n):
        if g != e:
            vec = [ring.zero] * n
            vec[g] = ring.one
            vec[e] = ring.neg(ring.one)
            first.add(tuple(vec))
    powers = [first]
    while True:
        k = len(powers) + 1
        nxt = Subspace(ring, n)
        for i in range(1, k):
            j = k - i
            if j < 1 or j > len(powers):
                continue
            for u in powers[i - 1].basis():
                for v in powers[j - 1].basis():
                    w = algebra.multiply(u, v)
                    if any(c != ring.zero for c in w):
                        nxt.add(w)
        powers.append(nxt)
        if nxt.dim == 0 or nxt.rows == powers[-2].rows:
            return powers


def dimension_subloops(loop: CayleyLoop, ring: Ring):
    """D_n = {g : g - 1 in I^n}, with each D_n verified to be a subloop;
    returns (chain of frozensets, augmentation powers)."""
    powers = augmentation_powers(loop, ring)
    n = loop.n
    e = loop.identity
    chain = [frozenset(range(n))]
    for p in powers:
        members = set()
        for g in range(n):
            vec = [ring.zero] * n
            vec[g] = ring.one
            vec[e] = ring.add(vec[e], ring.neg(ring.one))
            if p.contains(tuple(vec)):
                members.add(g)
        if not loop.is_subloop(members):
            raise AssertionError("a dimension subloop failed the subloop check")
        chain.append(frozenset(members))
        if len(members) == 1:
            break
    return chain, powers


def comm_assoc_filtration(loop: CayleyLoop, deviation_depth: int = 1):
    """Operational commutator-associator filtration: gamma_k is the subloop
    generated by commutators, associators and associator deviations whose
    argument levels sum to at least k, iterated from above to a fixpoint.

    Returns (chain, nil_class or None).  The chain starts at gamma_1 = L.
    """
    n = loop.n
    full = frozenset(range(n))
    trivial = frozenset({loop.identity})

    ops = [(2, lambda a, b: loop.commutator(a, b)),
           (3, lambda a, b, c: loop.associator(a, b, c))]
    frontier = [(3, lambda a, b, c: loop.associator(a, b, c))]
    for _ in range(deviation_depth):
        nxt = []
        for arity, phi in frontier:
            for j in range(arity):
                def dev(args, phi=phi, j=j):
                    left = phi(*(args[:j] + (loop.mul(args[j], args[j + 1]),) + args[j + 2:]))
                    s = loop.mul(
                        phi(*(args[:j] + (args[j],) + args[j + 2:])),
                        phi(*(args[:j] + (args[j + 1],) + args[j + 2:])),
                    )
                    return loop.left_div(s, left)

                wrapped = (lambda d: lambda *args: d(args))(dev)
                nxt.append((arity + 1, wrapped))
        ops.extend(nxt)
        frontier = nxt

    horizon = n + 2
    chain = [full] * (horizon + 1)  # chain[k-1] = gamma_k

    def level(g: int, current) -> int:
        lv = 0
        for k in range(len(current)):
            if g in current[k]:
                lv = k + 1
            else:
                break
        return lv

    changed = True
    while changed:
        changed = False
        for k in range(2, horizon + 2):
            gens = set()
            for arity, phi in ops:
                for args in itertools.product(range(n), repeat=arity):
                    s = sum(level(a, chain) for a in args)
                    if s >= k:
                        v = phi(*args)
                        if v != loop.identity:
                            gens.add(v)
            new = loop.subloop_generated(gens) if gens else trivial
            if new != chain[k - 1]:
                chain[k - 1] = new
                changed = True

    nil_class = None
    for k in range(1, horizon + 1):
        if chain[k] == trivial:
            nil_class = k
            break
    return chain, nil_class


def loop_ado_check(poly_loop, envelope, sample_points, pair_checks: int = 40,
                   seed: int = 0) -> dict:
    """Distinctness of exp-images of lattice samples of an integrated loop
    in the truncated envelope, plus the division step: for sampled pairs
    g1 != g2 the element exp(g1 \\ g2) differs from 1."""
    import random

    ring = poly_loop.ring
    images = {}
    collisions = []
    for v in sample_points:
        img = envelope.exp(tuple(ring.of(c) for c in v))
        if img in images:
            collisions.append((images[img], v))
        images[img] = v
    one = envelope.exp(tuple(ring.zero for _ in range(poly_loop.dim)))
    rng = random.Random(seed)
    pts = list(sample_points)
    division_failures = []
    for _ in range(pair_checks):
        g1 = tuple(ring.of(c) for c in rng.choice(pts))
        g2 = tuple(ring.of(c) for c in rng.choice(pts))
        w = poly_loop.divide_left(g1, g2)
        img = envelope.exp(w)
        if (g1 == g2) != (img == one):
            division_failures.append((g1, g2))
    return {
        "samples": len(pts),
        "distinct_images": len(images),
        "injective": not collisions,
        "collisions": collisions[:3],
        "identity_maps_to_one": envelope.exp(
            tuple(ring.zero for _ in range(poly_loop.dim))
        ) == one,
        "division_step_ok": not division_failures,
        "pair_checks": pair_checks,
    }
