"""Composition trees of Mikheev-Sabinin brackets and multioperator terms.

A tree is a multilinear bracket expression: leaves are argument labels, an
MS node is <t1,...,tn; u, v> and a Phi node is Phi(s1,..,sm | t1,..,tn).
Trees are evaluated either in the free algebra (through the primitive
operations) or through a finite SabininTable, and finite spanning sets of
trees are used to re-express primitive elements as bracket combinations by
an exact linear solve with a deterministic column preference.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .free_algebra import FreeElement, WordBasis
from .linalg import solve_columns
from .sabinin_ops import SabininTable, ms_bracket, multioperator, shu_p
from .scalars import QQ, Ring


class Leaf:
    __slots__ = ("label",)

    def __init__(self, label: int):
        self.label = label

    @property
    def weight(self) -> int:
        return 1

    def key(self):
        return (1, 0, self.label)

    def __eq__(self, other):
        return isinstance(other, Leaf) and other.label == self.label

    def __hash__(self):
        return hash(("leaf", self.label))


class MSNode:
    __slots__ = ("prefix", "y", "z", "weight")

    def __init__(self, prefix, y, z):
        self.prefix = tuple(prefix)
        self.y = y
        self.z = z
        self.weight = sum(t.weight for t in self.prefix) + y.weight + z.weight

    def key(self):
        return (
            self.weight,
            1,
            len(self.prefix),
            tuple(t.key() for t in self.prefix),
            self.y.key(),
            self.z.key(),
        )

    def __eq__(self, other):
        return isinstance(other, MSNode) and other.key() == self.key()

    def __hash__(self):
        return hash(("ms", self.key()))


class PhiNode:
    __slots__ = ("xs", "ys", "weight")

    def __init__(self, xs, ys):
        self.xs = tuple(sorted(xs, key=lambda t: t.key()))
        self.ys = tuple(sorted(ys, key=lambda t: t.key()))
        self.weight = sum(t.weight for t in self.xs) + sum(t.weight for t in self.ys)

    def key(self):
        return (
            self.weight,
            2,
            len(self.xs),
            tuple(t.key() for t in self.xs),
            tuple(t.key() for t in self.ys),
        )

    def __eq__(self, other):
        return isinstance(other, PhiNode) and other.key() == self.key()

    def __hash__(self):
        return hash(("phi", self.key()))


def tree_to_str(tree, names) -> str:
    if isinstance(tree, Leaf):
        return names[tree.label]
    if isinstance(tree, MSNode):
        inner = [tree_to_str(t, names) for t in tree.prefix]
        tail = f"{tree_to_str(tree.y, names)},{tree_to_str(tree.z, names)}"
        if inner:
            return f"<{','.join(inner)};{tail}>"
        return f"<{tail}>"
    xs = ",".join(tree_to_str(t, names) for t in tree.xs)
    ys = ",".join(tree_to_str(t, names) for t in tree.ys)
    return f"Phi({xs}|{ys})"


# -- enumeration ---------------------------------------------------------------


def _multiset_splits(labels, arity):
    """Splits of the label multiset into `arity` ordered non-empty parts,
    each part a sorted tuple; deduplicated."""
    seen = set()
    for assignment in itertools.product(range(arity), repeat=len(labels)):
        if len(set(assignment)) != arity:
            continue
        parts = [[] for _ in range(arity)]
        for lab, slot in zip(labels, assignment):
            parts[slot].append(lab)
        key = tuple(tuple(sorted(p)) for p in parts)
        if key not in seen:
            seen.add(key)
            yield key


def enumerate_trees(labels, with_phi: bool):
    """All canonical bracket trees whose leaf multiset is `labels`.

    MS nodes are kept only with y-subtree strictly below z-subtree in the
    canonical order (antisymmetry); Phi groups are canonically sorted.
    """
    labels = tuple(sorted(labels))
    cache: dict = {}

    def rec(mset):
        got = cache.get(mset)
        if got is not None:
            return got
        out = []
        if len(mset) == 1:
            out = [Leaf(mset[0])]
        else:
            for arity in range(2, len(mset) + 1):
                for parts in _multiset_splits(mset, arity):
                    subtree_lists = [rec(p) for p in parts]
                    # MS: prefix = parts[:-2] ordered, then y, z
                    for combo in itertools.product(*subtree_lists):
                        y, z = combo[-2], combo[-1]
                        if y.key() < z.key():
                            out.append(MSNode(combo[:-2], y, z))
                    if with_phi and arity >= 3:
                        for mcount in range(1, arity - 1):
                            for combo in itertools.product(*subtree_lists):
                                out.append(PhiNode(combo[:mcount], combo[mcount:]))
        uniq = {}
        for t in out:
            uniq[t.key()] = t
        out = [uniq[k] for k in sorted(uniq)]
        cache[mset] = out
        return out

    return rec(labels)


# -- evaluation ----------------------------------------------------------------


def eval_tree_free(tree, gens, trunc: int, ring: Ring) -> FreeElement:
    """Evaluate in the free algebra; `gens` maps labels to primitive
    elements (or generator indices)."""
    if isinstance(tree, Leaf):
        g = gens[tree.label]
        if isinstance(g, int):
            return FreeElement.generator(ring, trunc, g)
        return g.retruncate(trunc)
    if isinstance(tree, MSNode):
        prefix = [eval_tree_free(t, gens, trunc, ring) for t in tree.prefix]
        y = eval_tree_free(tree.y, gens, trunc, ring)
        z = eval_tree_free(tree.z, gens, trunc, ring)
        return ms_bracket(prefix, y, z, trunc, ring)
    xs = [eval_tree_free(t, gens, trunc, ring) for t in tree.xs]
    ys = [eval_tree_free(t, gens, trunc, ring) for t in tree.ys]
    return multioperator(xs, ys, trunc, ring)


class CoeffOps:
    """Coefficient arithmetic for table evaluations: plain ring scalars by
    default, polynomial coordinates in the integrator."""

    def __init__(self, ring: Ring):
        self.ring = ring

    def zero(self):
        return self.ring.zero

    def add(self, a, b):
        return self.ring.add(a, b)

    def mul(self, a, b):
        return self.ring.mul(a, b)

    def scale(self, scalar, a):
        return self.ring.mul(scalar, a)

    def is_zero(self, a) -> bool:
        return a == self.ring.zero


def eval_tree_table(tree, table: SabininTable, leaf_coords, ops: CoeffOps):
    """Evaluate a tree through a table, multilinearly.

    `leaf_coords[label]` is a length-dim list of coefficient objects; the
    result has the same shape.  Coefficient objects only need the CoeffOps
    operations, so polynomial coordinates work as well as scalars.
    """
    dim = table.dim

    def rec(node):
        if isinstance(node, Leaf):
            return list(leaf_coords[node.label])
        if isinstance(node, MSNode):
            children = [rec(t) for t in node.prefix] + [rec(node.y), rec(node.z)]
            lookup = lambda idx: table.ms_value(idx[:-2], idx[-2], idx[-1])
        else:
            children = [rec(t) for t in node.xs] + [rec(t) for t in node.ys]
            mcount = len(node.xs)
            lookup = lambda idx: table.phi_value(idx[:mcount], idx[mcount:])
        supports = [
            [i for i in range(dim) if not ops.is_zero(child[i])] for child in children
        ]
        out = [ops.zero() for _ in range(dim)]
        for idx in itertools.product(*supports):
            val = lookup(idx)
            if all(a == table.ring.zero for a in val):
                continue
            coeff = None
            for child, i in zip(children, idx):
                coeff = child[i] if coeff is None else ops.mul(coeff, child[i])
            for t, a in enumerate(val):
                if a != table.ring.zero:
                    out[t] = ops.add(out[t], ops.scale(a, coeff))
        return out

    return rec(tree)


# -- bracket spans and the universal p expansion -------------------------------


def express_in_tree_span(
    target: FreeElement, trees, gens, n_gens: int, degree: int
) -> list | None:
    """Write a homogeneous element as a combination of tree values; returns
    [(coeff, tree)] or None if the element is outside the span.  Earlier
    trees in the canonical enumeration are preferred."""
    ring = target.ring
    basis = WordBasis(n_gens, degree)
    cols = []
    kept = []
    for t in trees:
        v = eval_tree_free(t, gens, degree, ring)
        vec = basis.vector(v.retruncate(degree))
        cols.append(vec)
        kept.append(t)
    coeffs = solve_columns(cols, basis.vector(target.retruncate(degree)), ring)
    if coeffs is None:
        return None
    return [(c, t) for c, t in zip(coeffs, kept) if c != ring.zero]


_P_EXPANSION_CACHE: dict = {}


def p_expansion(m: int, n: int):
    """Universal expansion of p(x1..xm; y1..yn; z) as a combination of
    MS/Phi trees, solved once in the free algebra over Q.

    The tables only store the brackets and the multioperator, so the
    straightening of envelope products recovers p through this expansion.
    """
    key = (m, n)
    got = _P_EXPANSION_CACHE.get(key)
    if got is not None:
        return got
    w = m + n + 1
    labels = tuple(range(w))  # x: 0..m-1, y: m..m+n-1, z: m+n
    target = shu_p(list(range(m)), list(range(m, m + n)), m + n, trunc=w, ring=QQ)
    trees = enumerate_trees(labels, with_phi=True)
    gens = {i: i for i in labels}
    combo = express_in_tree_span(target, trees, gens, w, w)
    if combo is None:
        raise ArithmeticError(
            f"p({m};{n};1) is not a bracket combination at weight {w}; "
            "this contradicts the primitive-operation calculus"
        )
    _P_EXPANSION_CACHE[key] = combo
    return combo


def p_from_table(table: SabininTable, useq, vseq, z: int):
    """p(useq; vseq; z) on basis indices, through the stored brackets.

    Brackets of weight above the nilpotency class vanish, which keeps the
    needed universal expansions small.
    """
    m, n = len(useq), len(vseq)
    if m == 0 or n == 0:
        return table.zero_vec()
    w = m + n + 1
    nil_class = table.nilpotency_class()
    if nil_class is not None and w > nil_class:
        return table.zero_vec()
    ring = table.ring
    combo = p_expansion(m, n)
    ops = CoeffOps(ring)
    leaf_coords = {}
    for slot, idx in enumerate(list(useq) + list(vseq) + [z]):
        leaf_coords[slot] = [
            ring.one if t == idx else ring.zero for t in range(table.dim)
        ]
    out = [ring.zero] * table.dim
    for coeff, tree in combo:
        c = ring.of(coeff)  # characteristic guard happens here over F_p
        val = eval_tree_table(tree, table, leaf_coords, ops)
        for t in range(table.dim):
            out[t] = ring.add(out[t], ring.mul(c, val[t]))
    return tuple(out)
