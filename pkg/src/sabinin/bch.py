"""Exponentials, the right alternative product, the right alternative BCH
series, and the integration of nilpotent tables to polynomial loops.

exp is the geodesic exponential with left-normed powers

    exp x = 1 + x + x^2/2! + (x^2 x)/3! + ...

log inverts it degree by degree.  The right alternative product of
group-like elements is a x b = exp_a(a log b); its logarithm is the right
alternative BCH series, whose homogeneous components are primitive and are
re-expressed as Mikheev-Sabinin bracket combinations by an exact linear
solve.  A nilpotent table is integrated by specializing C(x, Phi^(x,y))
through the table, coordinate weights coming from the lower filtration.
"""

from __future__ import annotations

import itertools
import math

from .brackets import (
    CoeffOps,
    enumerate_trees,
    eval_tree_table,
    express_in_tree_span,
    tree_to_str,
)
from .free_algebra import (
    FreeElement,
    is_grouplike,
    loop_left_divide,
)
from .poly_loop import PolyLoop, PolyMap, _padd, _pmul, _pscale
from .sabinin_ops import SabininTable
from .scalars import QQ, Ring


class NotGroupLikeError(ValueError):
    """log was asked for an element with no primitive preimage."""


class FlatnessError(ArithmeticError):
    """A BCH component fell outside the bracket span; this would falsify
    the bracket expressibility of the right alternative BCH series."""


def exp_series(x: FreeElement, trunc: int | None = None) -> FreeElement:
    """Sum of left-normed powers x^n / n! up to the truncation."""
    ring = x.ring
    d = x.trunc if trunc is None else trunc
    ring.require_char_exceeds(d, "exp")
    if x.counit() != ring.zero:
        raise ValueError("exp needs counit 0")
    x = x.retruncate(d)
    out = FreeElement.unit(ring, d) + x
    power = x
    for n in range(2, d + 1):
        power = power * x
        out = out + power.scale(ring.inv_int(math.factorial(n)))
    return out


def log_series(g: FreeElement, trunc: int | None = None) -> FreeElement:
    """The unique primitive z with exp z = g, by degree-by-degree inversion;
    rejects inputs that are not group-like."""
    ring = g.ring
    d = g.trunc if trunc is None else trunc
    ring.require_char_exceeds(d, "log")
    g = g.retruncate(d)
    if g.counit() != ring.one:
        raise NotGroupLikeError("log needs constant term 1")
    if not is_grouplike(g):
        raise NotGroupLikeError("input is not group-like; no primitive logarithm")
    z = FreeElement.zero(ring, d)
    for n in range(1, d + 1):
        z = z + (g - exp_series(z, d)).homogeneous(n)
    return z


def exp_at(a: FreeElement, x: FreeElement, trunc: int | None = None) -> FreeElement:
    """exp_a x = a + x + x(a\\x)/2! + (x(a\\x))(a\\x)/3! + ..."""
    ring = a.ring
    d = a.trunc if trunc is None else trunc
    ring.require_char_exceeds(d, "exp_at")
    a = a.retruncate(d)
    x = x.retruncate(d)
    if a.counit() != ring.one:
        raise ValueError("base point needs constant term 1")
    w = loop_left_divide(a, x)
    out = a
    term = x
    out = out + term
    for n in range(2, d + 1):
        term = term * w
        out = out + term.scale(ring.inv_int(math.factorial(n)))
    return out


def right_alt_product(a: FreeElement, b: FreeElement, trunc: int | None = None) -> FreeElement:
    """a x b = exp_a(a log b) on group-like elements."""
    d = a.trunc if trunc is None else trunc
    return exp_at(a, a.retruncate(d) * log_series(b, d), d)


def right_alt_product_power_form(x: FreeElement, y: FreeElement,
                                 trunc: int | None = None) -> FreeElement:
    """exp x  x  exp y as the double series of left-normed powers
    sum x^i y^j / (i! j!); the closed form used as a cross-check."""
    ring = x.ring
    d = x.trunc if trunc is None else trunc
    ring.require_char_exceeds(d, "right alternative product")
    x = x.retruncate(d)
    y = y.retruncate(d)
    out = FreeElement.zero(ring, d)
    xpow = FreeElement.unit(ring, d)
    for i in range(0, d + 1):
        if i > 0:
            xpow = xpow * x
        term = xpow
        for j in range(0, d - i + 1):
            if j > 0:
                term = term * y
            c = ring.mul(
                ring.inv_int(math.factorial(i)), ring.inv_int(math.factorial(j))
            )
            out = out + term.scale(c)
    return out


class RbchSeries:
    """The right alternative BCH series up to a truncation: homogeneous
    primitive components plus their bracket expressions."""

    def __init__(self, trunc: int, components: dict, combos: dict):
        self.trunc = trunc
        self.components = components  # weight -> FreeElement (x = x1, y = x2)
        self.combos = combos  # weight -> [(Fraction, tree)]

    def component(self, w: int) -> FreeElement:
        return self.components[w]

    def combo_strings(self, w: int):
        return [(str(c), tree_to_str(t, ["x", "y"])) for c, t in self.combos[w]]


_RBCH_CACHE: dict = {}


def rbch_series(trunc: int) -> RbchSeries:
    """log(exp x  x  exp y) over Q with every component re-expressed in the
    span of MS bracket compositions; failure to re-express is a hard error."""
    if trunc in _RBCH_CACHE:
        return _RBCH_CACHE[trunc]
    ring = QQ
    x = FreeElement.generator(ring, trunc, 0)
    y = FreeElement.generator(ring, trunc, 1)
    g = right_alt_product(exp_series(x), exp_series(y))
    series = log_series(g)
    components = {w: series.homogeneous(w) for w in range(1, trunc + 1)}
    if components[1] != x + y:
        raise AssertionError("weight-1 part of the BCH series must be x + y")
    combos = {}
    gens = {0: 0, 1: 1}
    for w in range(2, trunc + 1):
        trees = []
        for a in range(1, w):
            labels = (0,) * a + (1,) * (w - a)
            trees.extend(enumerate_trees(labels, with_phi=False))
        trees.sort(key=lambda t: t.key())
        combo = express_in_tree_span(components[w], trees, gens, 2, w)
        if combo is None:
            raise FlatnessError(
                f"BCH component of weight {w} is outside the MS bracket span"
            )
        combos[w] = combo
    out = RbchSeries(trunc, components, combos)
    _RBCH_CACHE[trunc] = out
    return out


# -- integration ----------------------------------------------------------------


class PolyCoeffOps(CoeffOps):
    """Tree evaluation with sparse polynomial coordinates."""

    def __init__(self, ring: Ring, weights, bound: int):
        super().__init__(ring)
        self.weights = weights
        self.bound = bound

    def zero(self):
        return {}

    def add(self, a, b):
        return _padd(self.ring, a, b)

    def mul(self, a, b):
        return _pmul(self.ring, a, b, self.weights, self.bound)

    def scale(self, scalar, a):
        return _pscale(self.ring, scalar, a)

    def is_zero(self, a) -> bool:
        return not a


def _multinomial(counts) -> int:
    total = sum(counts)
    out = math.factorial(total)
    for c in counts:
        out //= math.factorial(c)
    return out


def phi_hat(table: SabininTable, bound: int, weights=None) -> PolyMap:
    """Phi^(x, y) = y + sum of all multioperator terms with diagonal
    arguments, as a polynomial map through the table."""
    ring = table.ring
    if weights is None:
        weights = table.coordinate_weights()
    P = PolyMap.selector(ring, table.dim, weights, bound, 2, 1)
    for (xs, ys), val in table.phi.items():
        m, n = len(xs), len(ys)
        if m + n > bound:
            continue
        w = sum(weights[c] for c in xs) + sum(weights[c] for c in ys)
        if w > bound:
            continue
        mult = _multinomial([xs.count(u) for u in set(xs)]) * _multinomial(
            [ys.count(u) for u in set(ys)]
        )
        mono = tuple(sorted([(0, c) for c in xs] + [(1, c) for c in ys]))
        factor = ring.of(mult)
        for coord, a in enumerate(val):
            if a != ring.zero:
                cur = P.comps[coord].get(mono, ring.zero)
                P.set_term(coord, mono, ring.add(cur, ring.mul(factor, a)))
    return P


def integrate(table: SabininTable, bound: int | None = None, weights=None) -> PolyLoop:
    """Evaluate C(x, Phi^(x,y)) through a nilpotent table, producing a
    polynomial loop with coordinate weights from the lower filtration.

    `bound` and `weights` may be supplied to fix the coordinate frame (used
    by the bracket-recovery probes); by default both come from the table.
    """
    ring = table.ring
    ring.require_char_exceeds(0 if ring.char == 0 else ring.char - 1, "integration")
    if ring.char != 0:
        raise ValueError("integration works over characteristic 0")
    nil_class = table.nilpotency_class()
    if nil_class is None:
        raise ValueError("table is not nilpotent within its bound")
    if weights is None:
        weights = table.coordinate_weights()
    if bound is None:
        bound = nil_class
    rb = rbch_series(bound)
    phat = phi_hat(table, bound, weights)
    ops = PolyCoeffOps(ring, weights, bound)
    leaf_coords = {
        0: [{((0, c),): ring.one} for c in range(table.dim)],
        1: [dict(p) for p in phat.comps],
    }
    F = PolyMap.selector(ring, table.dim, weights, bound, 2, 0) + phat
    for w in range(2, bound + 1):
        for coeff, tree in rb.combos.get(w, ()):
            c = ring.of(coeff)
            val = eval_tree_table(tree, table, leaf_coords, ops)
            term = PolyMap(ring, table.dim, weights, bound, 2, [dict(p) for p in val])
            F = F + term.scale(c)
    return PolyLoop(ring, table.dim, bound, weights, F)


# -- recovery of low brackets ----------------------------------------------------


def _features(loop: PolyLoop, weight: int):
    """Monomial coefficients of the commutator and associator at the given
    monomial weight, as a dict keyed by (op, coord, mono)."""
    out = {}
    for name, op in (("K", loop.commutator()), ("A", loop.associator())):
        for coord in range(loop.dim):
            for mono, c in op.comps[coord].items():
                if sum(loop.weights[cc] for _, cc in mono) == weight:
                    out[(name, coord, mono)] = c
    return out


def _weight_w_entries(dim: int, weights, w: int):
    """Table entries of total argument weight w and arity <= 3."""
    entries = []
    for y in range(dim):
        for z in range(y + 1, dim):
            if weights[y] + weights[z] == w:
                entries.append(("ms", ((), y, z)))
    for i in range(dim):
        for y in range(dim):
            for z in range(y + 1, dim):
                if weights[i] + weights[y] + weights[z] == w:
                    entries.append(("ms", ((i,), y, z)))
    for i in range(dim):
        for y in range(dim):
            for z in range(y, dim):
                if weights[i] + weights[y] + weights[z] == w:
                    entries.append(("phi", ((i,), (y, z))))
    return entries


def recover_low_brackets(loop: PolyLoop) -> SabininTable:
    """Solve for the table entries of argument weight <= 3 from the
    commutator and associator of the loop.

    Stage w solves a linear system built by exact probing: integrate a
    candidate table with a unit value at one entry and compare the weight-w
    monomial coefficients.  The probes calibrate every sign against the
    integration itself, so no convention is copied in.  An inconsistent
    system means the loop does not come from a table at this weight.
    """
    ring = loop.ring
    if ring.char != 0:
        raise ValueError("bracket recovery works over characteristic 0")
    dim = loop.dim
    weights = loop.weights
    bound = loop.bound
    table = SabininTable(ring, dim, 3)

    def set_entry(kind, key, vec):
        if kind == "ms":
            prefix, y, z = key
            table.set_ms(prefix, y, z, vec)
        else:
            xs, ys = key
            table.set_phi(xs, ys, vec)
        table._filtration = None

    for w in (2, 3):
        if w > bound:
            break
        entries = _weight_w_entries(dim, weights, w)
        value_coords = [c for c in range(dim) if weights[c] >= w]
        unknowns = [(kind, key, c) for kind, key in entries for c in value_coords]
        if not unknowns:
            continue
        base_loop = integrate(table, bound=bound, weights=weights)
        base = _features(base_loop, w)
        target = _features(loop, w)
        keys = sorted(set(base) | set(target), key=repr)
        columns = []
        for kind, key, c in unknowns:
            probe = SabininTable(ring, dim, 3)
            probe.ms = dict(table.ms)
            probe.phi = dict(table.phi)
            vec = [ring.one if t == c else ring.zero for t in range(dim)]
            if kind == "ms":
                prefix, y, z = key
                probe.set_ms(prefix, y, z, vec)
            else:
                xs, ys = key
                probe.set_phi(xs, ys, vec)
            probed = _features(integrate(probe, bound=bound, weights=weights), w)
            columns.append(
                tuple(
                    ring.sub(probed.get(k, ring.zero), base.get(k, ring.zero))
                    for k in keys
                )
            )
        rhs = tuple(
            ring.sub(target.get(k, ring.zero), base.get(k, ring.zero)) for k in keys
        )
        coeffs = None
        from .linalg import solve_columns

        coeffs = solve_columns(columns, rhs, ring)
        if coeffs is None:
            raise ValueError(
                f"loop is not integrable from a table at weight {w}: "
                "inconsistent linear system"
            )
        values: dict = {}
        for (kind, key, c), a in zip(unknowns, coeffs):
            if a != ring.zero:
                vec = values.setdefault((kind, key), [ring.zero] * dim)
                vec[c] = a
        for (kind, key), vec in values.items():
            set_entry(kind, key, vec)
        # exact verification of the stage
        check = _features(integrate(table, bound=bound, weights=weights), w)
        for k in keys:
            if check.get(k, ring.zero) != target.get(k, ring.zero):
                raise ValueError(
                    f"bracket recovery at weight {w} failed verification"
                )
    return table
