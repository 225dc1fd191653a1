"""Free Lie computations in the tensor algebra, right-normed rewriting,
splittings of Lie algebras, their induced operation families, and free,
nilpotent and standard Lie envelopes.

The ground truth for every rewriting identity is evaluation in the tensor
algebra (commutators of noncommutative polynomials); right-normed
combinations are a presentation layer on top of it.
"""

from __future__ import annotations

import itertools

from .linalg import Subspace, kernel, solve_columns
from .scalars import QQ, Ring

# tensor polynomials: dict[tuple of generator indices -> scalar]


def t_add(ring: Ring, a: dict, b: dict) -> dict:
    out = dict(a)
    for k, c in b.items():
        cur = out.get(k)
        if cur is None:
            out[k] = c
        else:
            s = ring.add(cur, c)
            if s == ring.zero:
                del out[k]
            else:
                out[k] = s
    return out


def t_scale(ring: Ring, c, a: dict) -> dict:
    if c == ring.zero:
        return {}
    return {k: ring.mul(c, v) for k, v in a.items()}


def t_mul(ring: Ring, a: dict, b: dict) -> dict:
    out: dict = {}
    for k1, c1 in a.items():
        for k2, c2 in b.items():
            k = k1 + k2
            c = ring.mul(c1, c2)
            cur = out.get(k)
            if cur is None:
                out[k] = c
            else:
                s = ring.add(cur, c)
                if s == ring.zero:
                    del out[k]
                else:
                    out[k] = s
    return out


def t_commutator(ring: Ring, a: dict, b: dict) -> dict:
    neg = t_scale(ring, ring.neg(ring.one), t_mul(ring, b, a))
    return t_add(ring, t_mul(ring, a, b), neg)


def rn_tensor(ring: Ring, seq) -> dict:
    """Right-normed bracket [x_{q1}, [x_{q2}, [...]]] in the tensor algebra."""
    out = {(seq[-1],): ring.one}
    for g in reversed(seq[:-1]):
        out = t_commutator(ring, {(g,): ring.one}, out)
    return out


def tree_tensor(ring: Ring, tree) -> dict:
    """A formal bracket tree: an int leaf or a pair of trees."""
    if isinstance(tree, int):
        return {(tree,): ring.one}
    left, right = tree
    return t_commutator(ring, tree_tensor(ring, left), tree_tensor(ring, right))


# -- right-normed rewriting ------------------------------------------------------


def rewrite_pair(n: int):
    """The signed permutations of eq-rewrite: alpha ascends to its peak
    alpha_s = n and strictly descends afterwards, with sign (-1)^{n-s}.

    Each permutation is determined by the set it descends through, so there
    are 2^(n-1) of them.
    """
    out = []
    rest = list(range(1, n))
    for r in range(0, n):
        for tail_set in itertools.combinations(rest, r):
            tail = sorted(tail_set, reverse=True)
            head = sorted(set(rest) - set(tail_set)) + [n]
            out.append((tuple(head + tail), (-1) ** r))
    return sorted(out)


def combo_add(ring: Ring, a: dict, b: dict, coeff=None) -> dict:
    out = dict(a)
    for k, c in b.items():
        if coeff is not None:
            c = ring.mul(coeff, c)
        cur = out.get(k)
        if cur is None:
            out[k] = c
        else:
            s = ring.add(cur, c)
            if s == ring.zero:
                del out[k]
            else:
                out[k] = s
    return out


def right_normed_rewrite(tree, ring: Ring = QQ) -> dict:
    """The unique right-normed expansion of a bracket tree, as a map from
    generator sequences to coefficients."""
    if isinstance(tree, int):
        return {(tree,): ring.one}
    left = right_normed_rewrite(tree[0], ring)
    right = right_normed_rewrite(tree[1], ring)
    out: dict = {}
    for useq, cu in left.items():
        perms = rewrite_pair(len(useq))
        for vseq, cv in right.items():
            c = ring.mul(cu, cv)
            for perm, sign in perms:
                key = tuple(useq[p - 1] for p in perm) + vseq
                coeff = c if sign == 1 else ring.neg(c)
                cur = out.get(key)
                if cur is None:
                    out[key] = coeff
                else:
                    s = ring.add(cur, coeff)
                    if s == ring.zero:
                        del out[key]
                    else:
                        out[key] = s
    return out


def combo_tensor(ring: Ring, combo: dict) -> dict:
    out: dict = {}
    for seq, c in combo.items():
        out = t_add(ring, out, t_scale(ring, c, rn_tensor(ring, seq)))
    return out


# -- Lie algebras by structure constants ------------------------------------------


class LieAlgebra:
    """A finite-dimensional Lie algebra with verified antisymmetry/Jacobi."""

    def __init__(self, ring: Ring, dim: int, table, validate: bool = True):
        self.ring = ring
        self.dim = dim
        self.table = [
            [tuple(ring.of(c) for c in table[i][j]) for j in range(dim)]
            for i in range(dim)
        ]
        if validate:
            self.validate()

    def validate(self):
        ring = self.ring
        zero = tuple(ring.zero for _ in range(self.dim))
        for i in range(self.dim):
            if self.table[i][i] != zero:
                raise ValueError(f"[e{i+1}, e{i+1}] != 0")
            for j in range(self.dim):
                neg = tuple(ring.neg(c) for c in self.table[j][i])
                if self.table[i][j] != neg:
                    raise ValueError(f"bracket not antisymmetric at ({i+1},{j+1})")
        for i, j, k in itertools.combinations(range(self.dim), 3):
            s = self.bracket(self.basis_vector(i), self.table[j][k])
            s = tuple(
                self.ring.add(a, b)
                for a, b in zip(s, self.bracket(self.basis_vector(j), self.table[k][i]))
            )
            s = tuple(
                self.ring.add(a, b)
                for a, b in zip(s, self.bracket(self.basis_vector(k), self.table[i][j]))
            )
            # [i,[j,k]] + [j,[k,i]] + [k,[i,j]] = 0
            if any(c != self.ring.zero for c in s):
                raise ValueError(f"Jacobi fails on ({i+1},{j+1},{k+1})")

    def basis_vector(self, i: int):
        return tuple(self.ring.one if j == i else self.ring.zero for j in range(self.dim))

    def bracket(self, u, v):
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

    def right_normed_bracket(self, vectors):
        out = tuple(vectors[-1])
        for v in reversed(vectors[:-1]):
            out = self.bracket(tuple(v), out)
        return out

    def lower_central_series(self):
        """gamma_1 = l, gamma_{i+1} = [l, gamma_i]; returns (chain, class)."""
        full = Subspace(self.ring, self.dim, [self.basis_vector(i) for i in range(self.dim)])
        chain = [full]
        while True:
            prev = chain[-1]
            nxt = Subspace(self.ring, self.dim)
            for i in range(self.dim):
                for v in prev.basis():
                    w = self.bracket(self.basis_vector(i), v)
                    if any(c != self.ring.zero for c in w):
                        nxt.add(w)
            chain.append(nxt)
            if nxt.dim == 0:
                return chain, len(chain) - 1
            if nxt.rows == prev.rows:
                return chain, None


class SplitLie:
    """A Lie algebra with a decomposition l = h (+) s, h a subalgebra,
    and the projection pi onto s along h."""

    def __init__(self, lie: LieAlgebra, h_basis, s_basis):
        self.lie = lie
        self.ring = lie.ring
        self.h_basis = [tuple(lie.ring.of(c) for c in v) for v in h_basis]
        self.s_basis = [tuple(lie.ring.of(c) for c in v) for v in s_basis]
        ring = lie.ring
        if len(self.h_basis) + len(self.s_basis) != lie.dim:
            raise ValueError("h and s do not complement to the whole algebra")
        span = Subspace(ring, lie.dim, self.h_basis + self.s_basis)
        if span.dim != lie.dim:
            raise ValueError("h + s does not span")
        hspan = Subspace(ring, lie.dim, self.h_basis)
        for u in self.h_basis:
            for v in self.h_basis:
                if not hspan.contains(lie.bracket(u, v)):
                    raise ValueError("h is not a subalgebra")
        # pi: solve e_i = sum h-coeffs + sum s-coeffs, keep the s part
        cols = [list(v) for v in self.h_basis + self.s_basis]
        nh = len(self.h_basis)
        self._pi_rows = []
        for i in range(lie.dim):
            sol = solve_columns(cols, lie.basis_vector(i), ring)
            if sol is None:
                raise AssertionError("basis solve failed")
            self._pi_rows.append(tuple(sol[nh:]))

    @property
    def dim_s(self) -> int:
        return len(self.s_basis)

    def pi(self, vec):
        """Coordinates of the s-component in the s-basis."""
        ring = self.ring
        out = [ring.zero] * self.dim_s
        for i, c in enumerate(vec):
            if c != ring.zero:
                for t, a in enumerate(self._pi_rows[i]):
                    if a != ring.zero:
                        out[t] = ring.add(out[t], ring.mul(c, a))
        return tuple(out)

    def s_vector(self, coords):
        """Back from s-coordinates to an ambient vector."""
        ring = self.ring
        out = [ring.zero] * self.lie.dim
        for c, v in zip(coords, self.s_basis):
            if c != ring.zero:
                for i, a in enumerate(v):
                    out[i] = ring.add(out[i], ring.mul(c, a))
        return tuple(out)


class OpFamily:
    """The multilinear operations (x_1,...,x_n) = pi[x_1,[...,[x_{n-1},x_n]]]
    on the s-part, tabulated on basis tuples up to an arity bound."""

    def __init__(self, ring: Ring, dim: int, weight_bound: int, ops=None):
        self.ring = ring
        self.dim = dim
        self.weight_bound = weight_bound
        self.ops = {}
        if ops:
            for seq, vec in ops.items():
                vec = tuple(ring.of(c) for c in vec)
                if any(c != ring.zero for c in vec):
                    self.ops[tuple(seq)] = vec

    def zero_vec(self):
        return tuple(self.ring.zero for _ in range(self.dim))

    def value(self, seq):
        seq = tuple(seq)
        if len(seq) == 1:  # the convention (x) = x
            return tuple(
                self.ring.one if t == seq[0] else self.ring.zero
                for t in range(self.dim)
            )
        if len(seq) > self.weight_bound:
            raise ValueError(f"arity {len(seq)} exceeds bound {self.weight_bound}")
        return self.ops.get(seq, self.zero_vec())

    def apply(self, vectors):
        """Multilinear extension of the tables to coordinate vectors."""
        ring = self.ring
        if len(vectors) == 1:
            return tuple(vectors[0])
        out = [ring.zero] * self.dim
        supports = [[i for i, c in enumerate(v) if c != ring.zero] for v in vectors]
        for idx in itertools.product(*supports):
            val = self.value(idx)
            if all(c == ring.zero for c in val):
                continue
            coeff = ring.one
            for v, i in zip(vectors, idx):
                coeff = ring.mul(coeff, v[i])
            for t, a in enumerate(val):
                if a != ring.zero:
                    out[t] = ring.add(out[t], ring.mul(coeff, a))
        return tuple(out)

    def family_class(self):
        """Largest arity with a nonzero operation (1 when all vanish)."""
        cls = 1
        for seq in self.ops:
            cls = max(cls, len(seq))
        return cls

    def __eq__(self, other):
        return (
            isinstance(other, OpFamily)
            and self.dim == other.dim
            and self.ops == other.ops
        )


def split_ops(split: SplitLie, weight_bound: int) -> OpFamily:
    """Tabulate pi of the right-normed brackets of s-basis vectors."""
    fam = OpFamily(split.ring, split.dim_s, weight_bound)
    for r in range(2, weight_bound + 1):
        for seq in itertools.product(range(split.dim_s), repeat=r):
            vec = split.lie.right_normed_bracket([split.s_basis[i] for i in seq])
            val = split.pi(vec)
            if any(c != split.ring.zero for c in val):
                fam.ops[seq] = val
    return fam


def shuffles(indices, t: int):
    """Order-preserving splits of `indices` into a head of size t and the
    complementary tail, both ascending."""
    idx = list(indices)
    out = []
    for head in itertools.combinations(range(len(idx)), t):
        head_set = set(head)
        tail = tuple(idx[i] for i in range(len(idx)) if i not in head_set)
        out.append((tuple(idx[i] for i in head), tail))
    return out


def ms_from_split(fam: OpFamily, weight_bound: int | None = None) -> dict:
    """Solve the shuffle recursion for the MS brackets from the operation
    family: (x..,y,z) + <x..;y,z> + sum over proper shuffles of
    (x_head, <x_tail; y, z>) = 0."""
    if weight_bound is None:
        weight_bound = fam.weight_bound
    ring = fam.ring
    ms: dict = {}

    def ms_val(prefix, y, z):
        if y == z:
            return fam.zero_vec()
        if y > z:
            v = ms_val(prefix, z, y)
            return tuple(ring.neg(c) for c in v)
        return ms.get((prefix, y, z), fam.zero_vec())

    for n in range(0, weight_bound - 1):
        for prefix in itertools.product(range(fam.dim), repeat=n):
            for y in range(fam.dim):
                for z in range(y + 1, fam.dim):
                    total = [ring.neg(c) for c in fam.value(prefix + (y, z))]
                    for t in range(1, n + 1):
                        for head, tail in shuffles(prefix, t):
                            inner = ms_val(tail, y, z)
                            if all(c == ring.zero for c in inner):
                                continue
                            basis_heads = [
                                tuple(
                                    ring.one if q == i else ring.zero
                                    for q in range(fam.dim)
                                )
                                for i in head
                            ]
                            term = fam.apply(basis_heads + [inner])
                            for q, c in enumerate(term):
                                total[q] = ring.sub(total[q], c)
                    vec = tuple(total)
                    if any(c != ring.zero for c in vec):
                        ms[(prefix, y, z)] = vec
    return ms


def check_eq_three(fam: OpFamily, n: int, m: int) -> dict:
    """Evaluate both sides of the subalgebra identity on all basis tuples;
    returns {'violations': [...], 'tuples': count}."""
    ring = fam.ring
    needed = max(n + m, n + 1, m + 1, 2)
    if needed > fam.weight_bound:
        raise ValueError(
            f"eq-three at (n={n}, m={m}) needs arity {needed} > bound"
        )
    violations = []
    count = 0
    perms = rewrite_pair(n)
    for xs in itertools.product(range(fam.dim), repeat=n):
        val_x = fam.value(xs)
        for ys in itertools.product(range(fam.dim), repeat=m):
            count += 1
            val_y = fam.value(ys)
            y_basis = [
                tuple(ring.one if q == j else ring.zero for q in range(fam.dim))
                for j in ys
            ]
            x_basis = [
                tuple(ring.one if q == i else ring.zero for q in range(fam.dim))
                for i in xs
            ]
            lhs = [ring.neg(c) for c in fam.apply([val_x, val_y])]
            for q, c in enumerate(fam.apply([val_x] + y_basis)):
                lhs[q] = ring.add(lhs[q], c)
            for q, c in enumerate(fam.apply([val_y] + x_basis)):
                lhs[q] = ring.sub(lhs[q], c)
            rhs = [ring.zero] * fam.dim
            for perm, sign in perms:
                permuted = tuple(xs[p - 1] for p in perm)
                val = fam.value(permuted + ys)
                for q, c in enumerate(val):
                    if c != ring.zero:
                        rhs[q] = (
                            ring.add(rhs[q], c) if sign == 1 else ring.sub(rhs[q], c)
                        )
            if lhs != rhs:
                residual = tuple(ring.sub(a, b) for a, b in zip(lhs, rhs))
                violations.append({"xs": xs, "ys": ys, "residual": residual})
    return {"violations": violations, "tuples": count}


# -- free nilpotent Lie algebras and envelopes -------------------------------------


def free_nilpotent_lie(ring: Ring, n_gens: int, nil_class: int):
    """The free nilpotent Lie algebra of the given class, realized inside
    the tensor algebra.

    Returns (LieAlgebra, basis_seqs, express) where basis elements are
    right-normed bracket sequences and express(seq) gives the coordinates of
    any right-normed bracket.
    """
    degree_words = {
        r: sorted(itertools.product(range(n_gens), repeat=r))
        for r in range(1, nil_class + 1)
    }
    word_index = {
        r: {w: i for i, w in enumerate(degree_words[r])} for r in degree_words
    }

    def tensor_vec(seq):
        r = len(seq)
        t = rn_tensor(ring, seq)
        vec = [ring.zero] * len(degree_words[r])
        for w, c in t.items():
            vec[word_index[r][w]] = c
        return tuple(vec)

    basis_seqs = []
    basis_vecs = {}
    express_cache = {}
    per_degree_cols = {}
    for r in range(1, nil_class + 1):
        span = Subspace(ring, len(degree_words[r]))
        chosen = []
        for seq in sorted(itertools.product(range(n_gens), repeat=r)):
            v = tensor_vec(seq)
            if span.add(v):
                chosen.append((seq, v))
        per_degree_cols[r] = chosen
        for seq, v in chosen:
            basis_vecs[seq] = v
            basis_seqs.append(seq)

    dim = len(basis_seqs)
    offset = {}
    at = 0
    for r in range(1, nil_class + 1):
        offset[r] = at
        at += len(per_degree_cols[r])

    def express(seq):
        """Coordinates (length dim) of a right-normed bracket sequence."""
        seq = tuple(seq)
        if seq in express_cache:
            return express_cache[seq]
        r = len(seq)
        out = [ring.zero] * dim
        if r > nil_class:
            return tuple(out)
        cols = [list(v) for _, v in per_degree_cols[r]]
        sol = solve_columns(cols, tensor_vec(seq), ring)
        if sol is None:
            raise AssertionError("right-normed brackets failed to span")
        for i, c in enumerate(sol):
            out[offset[r] + i] = c
        out = tuple(out)
        express_cache[seq] = out
        return out

    # bracket table via the rewriting identity in the tensor algebra
    table = [[None] * dim for _ in range(dim)]
    for a, seq_a in enumerate(basis_seqs):
        for b, seq_b in enumerate(basis_seqs):
            if len(seq_a) + len(seq_b) > nil_class:
                table[a][b] = tuple(ring.zero for _ in range(dim))
                continue
            combo = right_normed_rewrite((_seq_tree(seq_a), _seq_tree(seq_b)), ring)
            out = [ring.zero] * dim
            for seq, c in combo.items():
                for i, x in enumerate(express(seq)):
                    if x != ring.zero:
                        out[i] = ring.add(out[i], ring.mul(c, x))
            table[a][b] = tuple(out)
    lie = LieAlgebra(ring, dim, table)
    return lie, basis_seqs, express


def _seq_tree(seq):
    """Right-normed tree of a sequence."""
    if len(seq) == 1:
        return seq[0]
    return (seq[0], _seq_tree(seq[1:]))


class EnvelopeConsistencyError(ArithmeticError):
    """The operation family cannot be realized as projected brackets; an
    eq-three violation witnessed during envelope construction."""


def free_envelope(fam: OpFamily, nil_class: int) -> SplitLie:
    """The free nilpotent Lie envelope of an operation family whose
    operations of arity above the class vanish.

    pi is defined on right-normed brackets by the tables; any inconsistency
    on spanning brackets is reported as an eq-three violation.  h = ker pi
    is verified to be a subalgebra.
    """
    ring = fam.ring
    k = fam.dim
    for seq in fam.ops:
        if len(seq) > nil_class:
            raise ValueError(f"operation of arity {len(seq)} nonzero above class")
    lie, basis_seqs, express = free_nilpotent_lie(ring, k, nil_class)
    dim = lie.dim

    pi_rows = []  # pi of each envelope basis element, in s-coordinates
    for seq in basis_seqs:
        pi_rows.append(fam.value(seq) if len(seq) <= fam.weight_bound else fam.zero_vec())

    # consistency: pi must kill every linear relation among the brackets
    for r in range(2, nil_class + 1):
        for seq in itertools.product(range(k), repeat=r):
            coords = express(seq)
            want = fam.value(seq) if r <= fam.weight_bound else fam.zero_vec()
            got = [ring.zero] * k
            for i, c in enumerate(coords):
                if c != ring.zero:
                    for t, a in enumerate(pi_rows[i]):
                        if a != ring.zero:
                            got[t] = ring.add(got[t], ring.mul(c, a))
            if tuple(got) != tuple(want):
                raise EnvelopeConsistencyError(
                    f"pi is not well defined on the bracket {seq}; the family "
                    "violates the subalgebra identity"
                )

    # h = ker pi
    rows = [[pi_rows[i][t] for i in range(dim)] for t in range(k)]
    h_basis = kernel(rows, dim, ring)
    s_basis = [
        tuple(ring.one if i == j else ring.zero for i in range(dim))
        for j in range(k)  # the degree-1 generators come first
    ]
    split = SplitLie(lie, h_basis, s_basis)
    hspan = Subspace(ring, dim, h_basis)
    for u in h_basis:
        for v in h_basis:
            if not hspan.contains(lie.bracket(u, v)):
                raise EnvelopeConsistencyError("ker pi is not a subalgebra")
    return split


def largest_ideal_in_h(split: SplitLie) -> Subspace:
    """The descending fixpoint m_0 = h, m_{i+1} = {v in m_i : [l, v] in m_i}."""
    ring = split.ring
    lie = split.lie
    m = Subspace(ring, lie.dim, split.h_basis)
    while True:
        basis = m.basis()
        if not basis:
            return m
        constraints = []
        for v in basis:
            row = []
            for i in range(lie.dim):
                w = lie.bracket(lie.basis_vector(i), v)
                row.extend(m.reduce(w))
            constraints.append(row)
        # kernel over the coefficients of basis vectors
        mat = [[constraints[b][c] for b in range(len(basis))] for c in range(len(constraints[0]))]
        coeffs = kernel(mat, len(basis), ring)
        nxt = Subspace(ring, lie.dim)
        for cv in coeffs:
            vec = [ring.zero] * lie.dim
            for c, v in zip(cv, basis):
                if c != ring.zero:
                    for i, a in enumerate(v):
                        vec[i] = ring.add(vec[i], ring.mul(c, a))
            nxt.add(tuple(vec))
        if nxt.rows == m.rows:
            return m
        m = nxt


def standard_envelope(split: SplitLie) -> SplitLie:
    """Quotient by the largest ideal of l contained in h."""
    ring = split.ring
    lie = split.lie
    m = largest_ideal_in_h(split)
    if m.dim == 0:
        return split
    # complement basis: s first, then whatever h-vectors survive
    comp = []
    span = m.copy()
    for v in split.s_basis + split.h_basis:
        if span.add(v):
            comp.append(v)
    cols = [list(v) for v in m.basis()] + [list(v) for v in comp]

    def project(vec):
        sol = solve_columns(cols, vec, ring)
        if sol is None:
            raise AssertionError("quotient solve failed")
        return tuple(sol[m.dim:])

    qdim = len(comp)
    table = [
        [project(lie.bracket(comp[i], comp[j])) for j in range(qdim)]
        for i in range(qdim)
    ]
    qlie = LieAlgebra(ring, qdim, table)
    ns = len(split.s_basis)
    s_basis = [
        tuple(ring.one if i == j else ring.zero for i in range(qdim)) for j in range(ns)
    ]
    h_basis = [
        tuple(ring.one if i == j else ring.zero for i in range(qdim))
        for j in range(ns, qdim)
    ]
    out = SplitLie(qlie, h_basis, s_basis)
    check = largest_ideal_in_h(out)
    if check.dim != 0:
        raise AssertionError("standard envelope still has an ideal inside h")
    return out
