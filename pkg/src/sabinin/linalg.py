"""Exact dense linear algebra over the kernel rings.

Vectors are tuples of raw ring scalars; everything is Gaussian elimination
with exact division.  Sizes here are desk scale (a few hundred dimensions),
so dense row operations are good enough.
"""

from __future__ import annotations

from .scalars import Ring


def zero_vector(ring: Ring, n: int):
    return tuple(ring.zero for _ in range(n))


def vec_add(ring: Ring, u, v):
    return tuple(ring.add(a, b) for a, b in zip(u, v))


def vec_sub(ring: Ring, u, v):
    return tuple(ring.sub(a, b) for a, b in zip(u, v))


def vec_scale(ring: Ring, c, v):
    return tuple(ring.mul(c, a) for a in v)


def vec_is_zero(ring: Ring, v) -> bool:
    return all(a == ring.zero for a in v)


def rref(rows, ring: Ring):
    """Reduced row echelon form.

    Returns (reduced nonzero rows, pivot column indices).  Pivots prefer the
    earliest columns, which downstream solvers rely on for determinism.
    """
    rows = [list(r) for r in rows]
    if not rows:
        return [], []
    n_cols = len(rows[0])
    pivots = []
    r = 0
    for c in range(n_cols):
        pivot_row = None
        for i in range(r, len(rows)):
            if rows[i][c] != ring.zero:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        inv = ring.inv(rows[r][c])
        rows[r] = [ring.mul(inv, a) for a in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != ring.zero:
                f = rows[i][c]
                rows[i] = [ring.sub(a, ring.mul(f, b)) for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return [tuple(row) for row in rows[:r]], pivots


def rank(rows, ring: Ring) -> int:
    return len(rref(rows, ring)[0])


def kernel(rows, n_cols: int, ring: Ring):
    """Basis of {x : rows . x = 0} as a list of tuples."""
    red, pivots = rref(rows, ring)
    pivot_set = set(pivots)
    free = [c for c in range(n_cols) if c not in pivot_set]
    basis = []
    for f in free:
        v = [ring.zero] * n_cols
        v[f] = ring.one
        for row, p in zip(red, pivots):
            v[p] = ring.neg(row[f])
        basis.append(tuple(v))
    return basis


def solve_columns(columns, target, ring: Ring):
    """One exact solution c of sum_j c_j * columns[j] = target, or None.

    Free variables are set to zero, so earlier columns are preferred; with a
    fixed column enumeration this makes the expansion deterministic.
    """
    m = len(target)
    n = len(columns)
    aug = [[columns[j][i] for j in range(n)] + [target[i]] for i in range(m)]
    red, pivots = rref(aug, ring)
    coeffs = [ring.zero] * n
    for row, p in zip(red, pivots):
        if p == n:
            return None  # inconsistent
        coeffs[p] = row[n]
    return coeffs


class Subspace:
    """A subspace of ring^n kept in reduced row echelon form."""

    def __init__(self, ring: Ring, n: int, vectors=()):
        self.ring = ring
        self.n = n
        self.rows = []
        self.pivots = []
        for v in vectors:
            self.add(v)

    @property
    def dim(self) -> int:
        return len(self.rows)

    def basis(self):
        return list(self.rows)

    def reduce(self, vec):
        """Residual of vec after eliminating all pivot components."""
        ring = self.ring
        v = list(vec)
        for row, p in zip(self.rows, self.pivots):
            if v[p] != ring.zero:
                f = v[p]
                v = [ring.sub(a, ring.mul(f, b)) for a, b in zip(v, row)]
        return tuple(v)

    def contains(self, vec) -> bool:
        return vec_is_zero(self.ring, self.reduce(vec))

    def add(self, vec) -> bool:
        """Insert vec into the span; returns True if the dimension grew."""
        ring = self.ring
        v = list(self.reduce(vec))
        for c in range(self.n):
            if v[c] != ring.zero:
                inv = ring.inv(v[c])
                v = [ring.mul(inv, a) for a in v]
                for i, row in enumerate(self.rows):
                    if row[c] != ring.zero:
                        f = row[c]
                        self.rows[i] = tuple(
                            ring.sub(a, ring.mul(f, b)) for a, b in zip(row, v)
                        )
                at = 0
                while at < len(self.pivots) and self.pivots[at] < c:
                    at += 1
                self.rows.insert(at, tuple(v))
                self.pivots.insert(at, c)
                return True
        return False

    def add_all(self, vectors) -> bool:
        grew = False
        for v in vectors:
            grew = self.add(v) or grew
        return grew

    def copy(self) -> "Subspace":
        s = Subspace(self.ring, self.n)
        s.rows = list(self.rows)
        s.pivots = list(self.pivots)
        return s

    def __eq__(self, other):
        return (
            isinstance(other, Subspace)
            and self.n == other.n
            and self.ring == other.ring
            and self.rows == other.rows
        )

    def __le__(self, other):
        return all(other.contains(v) for v in self.rows)

    def __repr__(self):
        return f"Subspace(dim={self.dim} of {self.n})"
