"""Formal loops on filtered coordinate spaces.

A PolyLoop is a product F(x,y) = x + y + H(x,y) on ring^k given by exact
sparse polynomial maps; coordinates carry weights, every monomial of H
involves both arguments and weighs at least as much as the coordinate it
feeds, and all computations truncate above the loop's weight bound.

Divisions come from the weight-raising fixed-point expansion, and the
N-sequence certificate audits, monomial by monomial, that commutators,
associators and associator deviations respect the weight filtration and
involve every argument.
"""

from __future__ import annotations

import itertools
import json

from .scalars import Ring, ring_from_tag, ring_tag

# a monomial is a sorted tuple of (slot, coord) variables, with repetition


def mono_weight(mono, weights) -> int:
    return sum(weights[c] for _, c in mono)


def mono_slots(mono):
    return {s for s, _ in mono}


def _padd(ring: Ring, a: dict, b: dict) -> dict:
    out = dict(a)
    for m, c in b.items():
        cur = out.get(m)
        if cur is None:
            out[m] = c
        else:
            s = ring.add(cur, c)
            if s == ring.zero:
                del out[m]
            else:
                out[m] = s
    return out


def _pscale(ring: Ring, c, a: dict) -> dict:
    if c == ring.zero:
        return {}
    return {m: ring.mul(c, v) for m, v in a.items()}


def _pmul(ring: Ring, a: dict, b: dict, weights, bound: int) -> dict:
    out: dict = {}
    if len(a) > len(b):
        a, b = b, a
    for m1, c1 in a.items():
        w1 = mono_weight(m1, weights)
        for m2, c2 in b.items():
            if w1 + mono_weight(m2, weights) > bound:
                continue
            m = tuple(sorted(m1 + m2))
            c = ring.mul(c1, c2)
            cur = out.get(m)
            if cur is None:
                out[m] = c
            else:
                s = ring.add(cur, c)
                if s == ring.zero:
                    del out[m]
                else:
                    out[m] = s
    return out


class PolyMap:
    """A polynomial map (ring^k)^arity -> ring^k, one sparse polynomial per
    output coordinate, truncated above the weight bound."""

    __slots__ = ("ring", "dim", "weights", "bound", "arity", "comps")

    def __init__(self, ring: Ring, dim: int, weights, bound: int, arity: int, comps=None):
        self.ring = ring
        self.dim = dim
        self.weights = tuple(weights)
        self.bound = bound
        self.arity = arity
        if comps is None:
            comps = [{} for _ in range(dim)]
        self.comps = comps

    @classmethod
    def zero(cls, ring, dim, weights, bound, arity):
        return cls(ring, dim, weights, bound, arity)

    @classmethod
    def selector(cls, ring, dim, weights, bound, arity, slot):
        comps = [{((slot, c),): ring.one} for c in range(dim)]
        return cls(ring, dim, weights, bound, arity, comps)

    def copy(self) -> "PolyMap":
        return PolyMap(
            self.ring, self.dim, self.weights, self.bound, self.arity,
            [dict(p) for p in self.comps],
        )

    def set_term(self, coord: int, mono, coeff):
        mono = tuple(sorted(mono))
        if coeff == self.ring.zero:
            self.comps[coord].pop(mono, None)
        else:
            self.comps[coord][mono] = coeff

    def __add__(self, other: "PolyMap") -> "PolyMap":
        return PolyMap(
            self.ring, self.dim, self.weights, self.bound, self.arity,
            [_padd(self.ring, a, b) for a, b in zip(self.comps, other.comps)],
        )

    def __sub__(self, other: "PolyMap") -> "PolyMap":
        return self + other.scale(self.ring.neg(self.ring.one))

    def __neg__(self) -> "PolyMap":
        return self.scale(self.ring.neg(self.ring.one))

    def scale(self, c) -> "PolyMap":
        return PolyMap(
            self.ring, self.dim, self.weights, self.bound, self.arity,
            [_pscale(self.ring, c, p) for p in self.comps],
        )

    def is_zero(self) -> bool:
        return all(not p for p in self.comps)

    def __eq__(self, other):
        return (
            isinstance(other, PolyMap)
            and self.comps == other.comps
            and self.weights == other.weights
        )

    def compose(self, args) -> "PolyMap":
        """Substitute args[slot] (all of one common arity) into each slot."""
        if len(args) != self.arity:
            raise ValueError("wrong number of substituted maps")
        ring = self.ring
        arity = args[0].arity
        out = PolyMap(ring, self.dim, self.weights, self.bound, arity)
        for coord in range(self.dim):
            acc: dict = {}
            for mono, coeff in self.comps[coord].items():
                prod = {(): coeff}
                for slot, c in mono:
                    prod = _pmul(ring, prod, args[slot].comps[c], self.weights, self.bound)
                    if not prod:
                        break
                acc = _padd(ring, acc, prod)
            out.comps[coord] = acc
        return out

    def evaluate(self, vectors):
        """Plug in one coordinate vector per slot."""
        ring = self.ring
        out = []
        for coord in range(self.dim):
            total = ring.zero
            for mono, coeff in self.comps[coord].items():
                v = coeff
                for slot, c in mono:
                    v = ring.mul(v, vectors[slot][c])
                    if v == ring.zero:
                        break
                total = ring.add(total, v)
            out.append(total)
        return tuple(out)

    def restrict_weight(self, coord_weight_floor) -> "PolyMap":
        """Zero out variables whose coordinate weight is below the floor for
        their slot; used for class lower bounds."""
        out = self.copy()
        for coord in range(self.dim):
            out.comps[coord] = {
                m: c
                for m, c in self.comps[coord].items()
                if all(self.weights[cc] >= coord_weight_floor[s] for s, cc in m)
            }
        return out

    def max_monomial_weight(self) -> int:
        w = 0
        for p in self.comps:
            for m in p:
                w = max(w, mono_weight(m, self.weights))
        return w


_SLOT_NAMES = "xyzw"


def mono_to_str(mono) -> str:
    if not mono:
        return "1"
    groups = {}
    for var in mono:
        groups[var] = groups.get(var, 0) + 1
    parts = []
    for (slot, coord), power in sorted(groups.items()):
        base = f"{_SLOT_NAMES[slot]}{coord + 1}"
        parts.append(base if power == 1 else f"{base}^{power}")
    return "*".join(parts)


def mono_from_str(text: str):
    text = text.strip()
    if text == "1":
        return ()
    out = []
    for part in text.split("*"):
        if "^" in part:
            base, power = part.split("^")
            power = int(power)
        else:
            base, power = part, 1
        slot = _SLOT_NAMES.index(base[0])
        coord = int(base[1:]) - 1
        out.extend([(slot, coord)] * power)
    return tuple(sorted(out))


class LoopValidationError(ValueError):
    pass


class PolyLoop:
    """A validated formal loop product on a weighted coordinate space."""

    def __init__(self, ring: Ring, dim: int, bound: int, weights, F: PolyMap,
                 validate: bool = True):
        self.ring = ring
        self.dim = dim
        self.bound = bound
        self.weights = tuple(weights)
        self.F = F
        self._D = None
        self._Dp = None
        self._commutator = None
        self._associator = None
        if validate:
            self.validate()

    # -- construction and validation ----------------------------------------

    @classmethod
    def from_h_terms(cls, ring, dim, bound, weights, h_terms) -> "PolyLoop":
        """Build x + y + H from H given as {(coord, mono): coeff}."""
        F = PolyMap(ring, dim, weights, bound, 2)
        for c in range(dim):
            F.set_term(c, ((0, c),), ring.one)
            F.set_term(c, ((1, c),), ring.one)
        for (coord, mono), coeff in h_terms.items():
            mono = tuple(sorted(mono))
            cur = F.comps[coord].get(mono, ring.zero)
            F.set_term(coord, mono, ring.add(cur, ring.of(coeff)))
        return cls(ring, dim, bound, weights, F)

    def validate(self):
        ring = self.ring
        for coord in range(self.dim):
            if any(w < 1 for w in self.weights):
                raise LoopValidationError("coordinate weights must be >= 1")
            for mono, coeff in self.F.comps[coord].items():
                if mono == ((0, coord),) or mono == ((1, coord),):
                    if coeff != ring.one:
                        raise LoopValidationError(
                            f"linear part of coordinate {coord + 1} is not x + y"
                        )
                    continue
                if len(mono) == 1:
                    raise LoopValidationError(
                        f"unit law broken by monomial {mono_to_str(mono)} "
                        f"in coordinate {coord + 1}"
                    )
                slots = mono_slots(mono)
                if slots != {0, 1}:
                    raise LoopValidationError(
                        f"monomial {mono_to_str(mono)} in coordinate {coord + 1} "
                        "involves only one argument"
                    )
                # filtration respect: inputs from V_i x V_j must land in
                # V_{i+j}, so the fed coordinate must weigh at least the sum
                # of the slot-minimal variable weights
                floor: dict = {}
                for s, c in mono:
                    w = self.weights[c]
                    floor[s] = min(floor.get(s, w), w)
                if self.weights[coord] < sum(floor.values()):
                    raise LoopValidationError(
                        f"monomial {mono_to_str(mono)} breaks the filtration: "
                        f"coordinate {coord + 1} of weight {self.weights[coord]} "
                        f"receives slot-weight sum {sum(floor.values())}"
                    )
        # two-sided unit, checked symbolically
        zero = PolyMap.zero(self.ring, self.dim, self.weights, self.bound, 1)
        ident = PolyMap.selector(self.ring, self.dim, self.weights, self.bound, 1, 0)
        if self.F.compose([ident, zero]) != ident or self.F.compose([zero, ident]) != ident:
            raise LoopValidationError("0 is not a two-sided unit")

    def _sel(self, arity: int, slot: int) -> PolyMap:
        return PolyMap.selector(self.ring, self.dim, self.weights, self.bound, arity, slot)

    def h_map(self) -> PolyMap:
        return self.F - self._sel(2, 0) - self._sel(2, 1)

    # -- divisions ------------------------------------------------------------

    def left_division(self) -> PolyMap:
        """D with F(x, D(x,y)) = y, by exactly `bound` fixed-point steps of
        D <- -x + y - H(x, D); H raises weight, so this provably stabilizes."""
        if self._D is None:
            H = self.h_map()
            x = self._sel(2, 0)
            y = self._sel(2, 1)
            D = y - x
            for _ in range(self.bound):
                D = y - x - H.compose([x, D])
            if self.F.compose([x, D]) != y:
                raise AssertionError("left division round trip failed")
            self._D = D
        return self._D

    def right_division(self) -> PolyMap:
        """D' with F(D'(x,y), y) = x."""
        if self._Dp is None:
            H = self.h_map()
            x = self._sel(2, 0)
            y = self._sel(2, 1)
            Dp = x - y
            for _ in range(self.bound):
                Dp = x - y - H.compose([Dp, y])
            if self.F.compose([Dp, y]) != x:
                raise AssertionError("right division round trip failed")
            self._Dp = Dp
        return self._Dp

    def divide_left(self, a, b):
        """a \\ b on coordinate vectors."""
        return self.left_division().evaluate([tuple(a), tuple(b)])

    def divide_right(self, a, b):
        """a / b on coordinate vectors."""
        return self.right_division().evaluate([tuple(a), tuple(b)])

    def multiply(self, a, b):
        return self.F.evaluate([tuple(a), tuple(b)])

    # -- derived operations ----------------------------------------------------

    def commutator(self) -> PolyMap:
        """D(F(y,x), F(x,y)): solves (yx) * K = xy."""
        if self._commutator is None:
            x = self._sel(2, 0)
            y = self._sel(2, 1)
            self._commutator = self.left_division().compose(
                [self.F.compose([y, x]), self.F.compose([x, y])]
            )
        return self._commutator

    def associator(self) -> PolyMap:
        """D(F(x, F(y,z)), F(F(x,y), z)): solves x(yz) * A = (xy)z."""
        if self._associator is None:
            x = self._sel(3, 0)
            y = self._sel(3, 1)
            z = self._sel(3, 2)
            left = self.F.compose([x, self.F.compose([y, z])])
            right = self.F.compose([self.F.compose([x, y]), z])
            self._associator = self.left_division().compose([left, right])
        return self._associator

    def deviation(self, op: PolyMap, slot: int) -> PolyMap:
        """One associator-deviation step in the given slot (0-based):
        D(s, r) with r = op(..., F(x_j, x_{j+1}), ...) and
        s = F(op(... x_j ...), op(... x_{j+1} ...))."""
        m = op.arity
        if not 0 <= slot < m:
            raise ValueError(f"slot {slot} out of range for arity {m}")
        sels = [self._sel(m + 1, t) for t in range(m + 1)]
        r_args = sels[:slot] + [self.F.compose([sels[slot], sels[slot + 1]])] + sels[slot + 2:]
        r = op.compose(r_args)
        s = self.F.compose(
            [
                op.compose(sels[:slot] + [sels[slot]] + sels[slot + 2:]),
                op.compose(sels[:slot] + [sels[slot + 1]] + sels[slot + 2:]),
            ]
        )
        return self.left_division().compose([s, r])

    def deviations(self, depth: int):
        """All iterated associator deviations with at most `depth` steps and
        arity capped by the weight bound, keyed by their slot sequence."""
        out = {}
        frontier = {(): self.associator()}
        for _ in range(depth):
            nxt = {}
            for slots, op in frontier.items():
                if op.arity + 1 > self.bound:
                    continue
                for j in range(op.arity):
                    nxt[slots + (j,)] = self.deviation(op, j)
            out.update(nxt)
            frontier = nxt
        return out

    # -- certificates -----------------------------------------------------------

    def verify_n_sequence(self, deviation_depth: int = 2):
        """Check, monomial by monomial, that the derived operations respect
        the weight filtration and involve all their arguments."""
        checks = []

        def audit(name: str, op: PolyMap, constant_free: bool = True):
            violations = []
            for coord in range(self.dim):
                for mono in op.comps[coord]:
                    if len(mono_slots(mono)) != op.arity:
                        violations.append(
                            f"{mono_to_str(mono)} -> coordinate {coord + 1}: "
                            "missing an argument"
                        )
                        continue
                    floor = {}
                    for s, c in mono:
                        w = self.weights[c]
                        floor[s] = min(floor.get(s, w), w)
                    if self.weights[coord] < sum(floor.values()):
                        violations.append(
                            f"{mono_to_str(mono)} -> coordinate {coord + 1}: "
                            f"weight {self.weights[coord]} < {sum(floor.values())}"
                        )
            checks.append(
                {
                    "check": f"{name}: monomials involve all arguments and "
                    "respect the filtration",
                    "status": "pass" if not violations else "fail",
                    "witness": violations[:5],
                }
            )

        x = self._sel(2, 0)
        y = self._sel(2, 1)
        ok_div = (
            self.F.compose([x, self.left_division()]) == y
            and self.F.compose([self.right_division(), y]) == x
        )
        checks.append(
            {
                "check": "division round trips F(x, x\\y) = y and F(x/y, y) = x",
                "status": "pass" if ok_div else "fail",
                "witness": [],
            }
        )

        audit("commutator", self.commutator())
        audit("associator", self.associator())
        for slots, op in self.deviations(deviation_depth).items():
            audit(f"deviation{list(slots)}", op)

        ok = all(c["status"] == "pass" for c in checks)
        return {"ok": ok, "deviation_depth": deviation_depth, "checks": checks}

    def class_bounds(self):
        """(lower, upper) bounds for the nilpotency class: upper from the
        vanishing filtration level, lower from nonvanishing evaluated
        commutators/associators on weighted basis vectors."""
        upper = max(self.weights) if self.dim else 1
        lower = 1
        basis = [
            tuple(self.ring.one if j == i else self.ring.zero for j in range(self.dim))
            for i in range(self.dim)
        ]
        K = self.commutator()
        A = self.associator()
        for i, j in itertools.product(range(self.dim), repeat=2):
            if any(c != self.ring.zero for c in K.evaluate([basis[i], basis[j]])):
                lower = max(lower, self.weights[i] + self.weights[j])
        for i, j, k in itertools.product(range(self.dim), repeat=3):
            s = self.weights[i] + self.weights[j] + self.weights[k]
            if s <= lower:
                continue
            if any(c != self.ring.zero for c in A.evaluate([basis[i], basis[j], basis[k]])):
                lower = max(lower, s)
        return lower, min(upper, self.bound)

    # -- wire format --------------------------------------------------------------

    def to_json(self) -> str:
        F = {}
        for coord in range(self.dim):
            rows = [
                [mono_to_str(m), self.ring.to_str(c)]
                for m, c in sorted(self.F.comps[coord].items())
            ]
            F[str(coord + 1)] = rows
        return json.dumps(
            {
                "dim": self.dim,
                "deg": self.bound,
                "ring": ring_tag(self.ring),
                "weights": list(self.weights),
                "F": F,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "PolyLoop":
        data = json.loads(text)
        ring = ring_from_tag(data.get("ring", "Q"))
        dim = data["dim"]
        bound = data["deg"]
        weights = data["weights"]
        F = PolyMap(ring, dim, weights, bound, 2)
        for coord_str, rows in data["F"].items():
            coord = int(coord_str) - 1
            for mono_str, coeff_str in rows:
                F.set_term(coord, mono_from_str(mono_str), ring.of(coeff_str))
        return cls(ring, dim, bound, weights, F)
