"""Fixtures shipped with the package: every verification in the test suite
and the command line runs against these, offline.

All of them are built here from first principles (matrix units, free
nilpotent brackets, a central-extension Cayley table) rather than imported
as opaque data, so each one is auditable.
"""

from __future__ import annotations

import itertools
from importlib import resources

from .free_algebra import StructureConstants
from .lie_envelope import LieAlgebra, SplitLie, free_nilpotent_lie
from .loop_algebra import CayleyLoop
from .sabinin_ops import SabininTable
from .scalars import QQ, PrimeField, Ring


def matrix_algebra(ring: Ring, size: int = 2) -> StructureConstants:
    """size x size matrix units E_{ab}, row-major basis."""
    def idx(a, b):
        return a * size + b

    dim = size * size
    table = [[None] * dim for _ in range(dim)]
    for a in range(size):
        for b in range(size):
            for c in range(size):
                for d in range(size):
                    out = [ring.zero] * dim
                    if b == c:
                        out[idx(a, d)] = ring.one
                    table[idx(a, b)][idx(c, d)] = tuple(out)
    unit = [ring.zero] * dim
    for a in range(size):
        unit[idx(a, a)] = ring.one
    return StructureConstants(ring, dim, table, unit=tuple(unit))


def remark_algebra(ring: Ring = QQ) -> StructureConstants:
    """Basis (a, b) with aa = 0, ab = b, ba = 0, bb = b: the non-nilpotency
    counterexample algebra.  (b, a, b) = -b and the ideal k b is not
    nilpotent since all powers of b equal b."""
    z = ring.zero
    o = ring.one
    return StructureConstants(ring, 2, [[(z, z), (z, o)], [(z, z), (z, o)]])


def scalar_algebra(ring: Ring) -> StructureConstants:
    """The ring itself as a one-dimensional unital algebra."""
    return StructureConstants(ring, 1, [[(ring.one,)]], unit=(ring.one,))


def free_nilpotent2_table(ring: Ring = QQ) -> SabininTable:
    """Free nilpotent class-2 table on 2 generators: <e1,e2> = e3."""
    t = SabininTable(ring, 3, 4)
    t.set_ms((), 0, 1, (ring.zero, ring.zero, ring.one))
    return t


def free_nilpotent3_table(ring: Ring = QQ) -> SabininTable:
    """Free nilpotent class-3 Lie algebra on 2 generators as a flat table:
    e3 = <e1,e2>, e4 = <e1,e3>, e5 = <e2,e3>."""
    z = ring.zero
    o = ring.one
    t = SabininTable(ring, 5, 4)
    t.set_ms((), 0, 1, (z, z, o, z, z))
    t.set_ms((), 0, 2, (z, z, z, o, z))
    t.set_ms((), 1, 2, (z, z, z, z, o))
    return t


def multioperator_table(ring: Ring = QQ) -> SabininTable:
    """A class-3 table with a nontrivial multioperator and a weight-3
    bracket with prefix, exercising every recovery path."""
    z = ring.zero
    o = ring.one
    t = SabininTable(ring, 5, 4)
    t.set_ms((), 0, 1, (z, z, o, z, z))
    t.set_ms((0,), 0, 1, (z, z, z, o, z))
    t.set_ms((), 0, 2, (z, z, z, z, o))
    t.set_phi((0,), (1, 1), (z, z, z, o, o))
    t.set_phi((1,), (0, 1), (z, z, z, ring.of(2), z))
    return t


def sl2_lie(ring: Ring = QQ) -> LieAlgebra:
    """Traceless 2x2 matrices, basis (e = E12, f = E21, h = E11 - E22)."""
    z = ring.zero
    o = ring.one
    two = ring.of(2)
    return LieAlgebra(
        ring,
        3,
        [
            [(z, z, z), (z, z, o), (ring.neg(two), z, z)],
            [(z, z, ring.neg(o)), (z, z, z), (z, two, z)],
            [(two, z, z), (z, ring.neg(two), z), (z, z, z)],
        ],
    )


def sl2_split_e(ring: Ring = QQ) -> SplitLie:
    """sl2 with h-part spanned by E12 and s = span(f, h)."""
    o = ring.one
    z = ring.zero
    return SplitLie(sl2_lie(ring), h_basis=[(o, z, z)], s_basis=[(z, o, z), (z, z, o)])


def sl2_split_h(ring: Ring = QQ) -> SplitLie:
    """sl2 with h-part spanned by the diagonal and s = span(e, f)."""
    o = ring.one
    z = ring.zero
    return SplitLie(sl2_lie(ring), h_basis=[(z, z, o)], s_basis=[(o, z, z), (z, o, z)])


def nilpotent_split(ring: Ring = QQ) -> SplitLie:
    """Free nilpotent class-2 Lie algebra on 3 generators split along one
    generator: h = span(x3), s = the rest."""
    lie, seqs, _ = free_nilpotent_lie(ring, 3, 2)
    z = ring.zero
    o = ring.one
    dim = lie.dim  # basis: x1, x2, x3, [x1,x2], [x1,x3], [x2,x3]
    h_index = 2

    def unit(i):
        return tuple(o if j == i else z for j in range(dim))

    s_basis = [unit(i) for i in range(dim) if i != h_index]
    return SplitLie(lie, h_basis=[unit(h_index)], s_basis=s_basis)


def loop8_table() -> list:
    """Central extension of Z/2 x Z/2 by Z/2 with the non-cocycle
    c(a, b) = a1 a2 b1: a non-associative loop of order 8.

    Element i encodes (a1, a2, eps) = (i & 1, (i >> 1) & 1, (i >> 2) & 1).
    """
    def mul(i, j):
        a1, a2, ae = i & 1, (i >> 1) & 1, (i >> 2) & 1
        b1, b2, be = j & 1, (j >> 1) & 1, (j >> 2) & 1
        c = a1 * a2 * b1
        return (a1 ^ b1) | ((a2 ^ b2) << 1) | ((ae ^ be ^ (c & 1)) << 2)

    return [[mul(i, j) for j in range(8)] for i in range(8)]


def loop8() -> CayleyLoop:
    return CayleyLoop(loop8_table())


def loop8_from_csv() -> CayleyLoop:
    """The same loop read back from the shipped CSV Cayley table."""
    text = resources.files("sabinin.data").joinpath("loop8.csv").read_text()
    return CayleyLoop.from_csv(text)


def lattice_points(radius: int, dim: int):
    """Integer points of the centered box [-radius, radius]^dim."""
    return list(itertools.product(range(-radius, radius + 1), repeat=dim))


_BUILDERS = {
    "free-nilp-2-2": lambda: free_nilpotent2_table(QQ),
    "free-nilp-3-2": lambda: free_nilpotent3_table(QQ),
    "multioperator-3": lambda: multioperator_table(QQ),
    "remark-algebra": lambda: remark_algebra(QQ),
    "m2-rational": lambda: matrix_algebra(QQ, 2),
    "loop8": loop8,
}


def fixture_names():
    return sorted(_BUILDERS)


def load_fixture(name: str):
    if name not in _BUILDERS:
        raise KeyError(
            f"unknown fixture {name!r}; available: {', '.join(fixture_names())}"
        )
    return _BUILDERS[name]()
