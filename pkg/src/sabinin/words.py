"""Magma words: fully parenthesized non-associative monomials.

A word is either the unit (degree 0), a generator ``x1, x2, ...`` (degree 1)
or an ordered pair of words.  Instances are hash-consed, so structurally equal
words are the same object and dictionary operations stay cheap.

The canonical total order is: by degree, then by generator index for leaves,
then recursively by (left, right) for pairs.  This fixes deterministic
printing and iteration everywhere in the kernel.
"""

from __future__ import annotations


class MagmaWord:
    __slots__ = ("gen", "left", "right", "degree", "_key", "__weakref__")

    _gen_cache: dict = {}
    _pair_cache: dict = {}
    _unit = None

    def __init__(self, gen, left, right, degree):
        # not for direct use: go through unit() / generator() / pair()
        self.gen = gen
        self.left = left
        self.right = right
        self.degree = degree
        self._key = None

    @classmethod
    def unit(cls) -> "MagmaWord":
        if cls._unit is None:
            cls._unit = cls(None, None, None, 0)
        return cls._unit

    @classmethod
    def generator(cls, index: int) -> "MagmaWord":
        w = cls._gen_cache.get(index)
        if w is None:
            if index < 0:
                raise ValueError("generator index must be >= 0")
            w = cls(index, None, None, 1)
            cls._gen_cache[index] = w
        return w

    @classmethod
    def pair(cls, left: "MagmaWord", right: "MagmaWord") -> "MagmaWord":
        if left.degree == 0:
            return right
        if right.degree == 0:
            return left
        w = cls._pair_cache.get((left, right))
        if w is None:
            w = cls(None, left, right, left.degree + right.degree)
            cls._pair_cache[(left, right)] = w
        return w

    @classmethod
    def left_normed(cls, factors) -> "MagmaWord":
        """((f1 f2) ... ) fn; the unit for an empty sequence."""
        out = cls.unit()
        for f in factors:
            if isinstance(f, int):
                f = cls.generator(f)
            out = cls.pair(out, f)
        return out

    @property
    def is_unit(self) -> bool:
        return self.degree == 0

    @property
    def is_generator(self) -> bool:
        return self.gen is not None

    @property
    def is_pair(self) -> bool:
        return self.left is not None

    def leaves(self):
        """Generator indices left to right."""
        if self.is_unit:
            return ()
        if self.is_generator:
            return (self.gen,)
        return self.left.leaves() + self.right.leaves()

    def sort_key(self):
        # flattened structural key; cached on first use
        k = self._key
        if k is None:
            if self.is_unit:
                k = (0,)
            elif self.is_generator:
                k = (1, 0, self.gen)
            else:
                k = (self.degree, 1) + self.left.sort_key() + self.right.sort_key()
            self._key = k
        return k

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __le__(self, other):
        return self.sort_key() <= other.sort_key()

    def __repr__(self):
        if self.is_unit:
            return "1"
        if self.is_generator:
            return f"x{self.gen + 1}"
        return f"({self.left!r} {self.right!r})"


def parse_word(text: str) -> MagmaWord:
    """Inverse of repr: "1", "x3", "(u v)" with nesting."""
    pos = 0
    s = text.strip()

    def parse() -> MagmaWord:
        nonlocal pos
        while pos < len(s) and s[pos] == " ":
            pos += 1
        if pos >= len(s):
            raise ValueError(f"unexpected end of word in {text!r}")
        if s[pos] == "(":
            pos += 1
            left = parse()
            right = parse()
            while pos < len(s) and s[pos] == " ":
                pos += 1
            if pos >= len(s) or s[pos] != ")":
                raise ValueError(f"missing ')' in {text!r}")
            pos += 1
            return MagmaWord.pair(left, right)
        if s[pos] == "1":
            pos += 1
            return MagmaWord.unit()
        if s[pos] == "x":
            pos += 1
            start = pos
            while pos < len(s) and s[pos].isdigit():
                pos += 1
            if start == pos:
                raise ValueError(f"bad generator in {text!r}")
            return MagmaWord.generator(int(s[start:pos]) - 1)
        raise ValueError(f"unexpected {s[pos]!r} in {text!r}")

    w = parse()
    if s[pos:].strip():
        raise ValueError(f"trailing input in {text!r}")
    return w


def words_of_degree(n_gens: int, degree: int):
    """All magma words of the exact degree over generators x1..x{n_gens},
    in canonical order."""
    if degree == 0:
        return [MagmaWord.unit()]
    cache = {1: [MagmaWord.generator(i) for i in range(n_gens)]}

    def build(d):
        if d not in cache:
            out = []
            for ld in range(1, d):
                for lw in build(ld):
                    for rw in build(d - ld):
                        out.append(MagmaWord.pair(lw, rw))
            cache[d] = out
        return cache[d]

    return sorted(build(degree), key=MagmaWord.sort_key)


def words_up_to_degree(n_gens: int, trunc: int):
    """Unit plus all words of degree <= trunc, canonically ordered."""
    out = []
    for d in range(trunc + 1):
        out.extend(words_of_degree(n_gens, d))
    return out
