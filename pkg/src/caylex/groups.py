"""Concrete finitely generated groups with a solved word problem.

Three families are shipped: Z^d (free abelian), F_k (free), and the
discrete Heisenberg group H3.  Elements are plain tuples in a canonical
normal form, so equality and hashing are byte-for-byte.
"""

from __future__ import annotations

import re
from typing import Optional, Sequence, Tuple

Element = Tuple[int, ...]

_LETTERS = "abcdefghijklmnopqrstuvwxyz"


class UnknownFamilyError(ValueError):
    """Group spec names a family we do not ship."""


class GroupModel:
    """Common interface: identity/multiply/inverse plus a fixed symmetric
    generating set S (identity excluded).  Immutable after construction."""

    family: str
    name: str
    generators: Tuple[Element, ...]
    inverse_gen_index: Tuple[int, ...]
    central_element: Optional[Element]
    # polynomial growth degree, None for exponential growth
    growth_degree: Optional[int]

    def identity(self) -> Element:
        raise NotImplementedError

    def multiply(self, x: Element, y: Element) -> Element:
        raise NotImplementedError

    def inverse(self, x: Element) -> Element:
        raise NotImplementedError

    def format_element(self, x: Element) -> str:
        raise NotImplementedError

    def parse_element(self, s: str) -> Element:
        raise NotImplementedError

    def word_element(self, gen_indices: Sequence[int]) -> Element:
        """Product of generators by index, left to right."""
        x = self.identity()
        for j in gen_indices:
            x = self.multiply(x, self.generators[j])
        return x

    def __repr__(self):
        return f"<GroupModel {self.name}>"


class ZdGroup(GroupModel):
    """Z^d with S = {+-e_1, ..., +-e_d}; normal form is the integer vector."""

    family = "Z^d"

    def __init__(self, d: int):
        if d < 1:
            raise ValueError(f"Z^d needs d >= 1, got {d}")
        self.d = d
        self.name = f"Z^{d}"
        gens = []
        for i in range(d):
            e = [0] * d
            e[i] = 1
            gens.append(tuple(e))
            e = [0] * d
            e[i] = -1
            gens.append(tuple(e))
        self.generators = tuple(gens)
        self.inverse_gen_index = tuple(j ^ 1 for j in range(2 * d))
        self.central_element = self.generators[0]
        self.growth_degree = d

    def identity(self):
        return (0,) * self.d

    def multiply(self, x, y):
        return tuple(a + b for a, b in zip(x, y))

    def inverse(self, x):
        return tuple(-a for a in x)

    def format_element(self, x):
        return "(" + ",".join(str(a) for a in x) + ")"

    def parse_element(self, s):
        body = s.strip()
        if not (body.startswith("(") and body.endswith(")")):
            raise ValueError(f"bad Z^{self.d} element: {s!r}")
        parts = body[1:-1].split(",")
        if len(parts) != self.d:
            raise ValueError(f"expected {self.d} coordinates in {s!r}")
        return tuple(int(p) for p in parts)


class FreeGroup(GroupModel):
    """F_k on letters a_1..a_k; normal form is the freely reduced word as a
    tuple of nonzero signed letter indices (-i encodes a_i^-1)."""

    family = "F_k"

    def __init__(self, k: int):
        if k < 1:
            raise ValueError(f"F_k needs k >= 1, got {k}")
        if k > len(_LETTERS):
            raise ValueError(f"F_k supports at most {len(_LETTERS)} letters")
        self.k = k
        self.name = f"F_{k}"
        gens = []
        for i in range(1, k + 1):
            gens.append((i,))
            gens.append((-i,))
        self.generators = tuple(gens)
        self.inverse_gen_index = tuple(j ^ 1 for j in range(2 * k))
        # F_1 = Z has its generator central; for k >= 2 the center is trivial
        self.central_element = self.generators[0] if k == 1 else None
        self.growth_degree = 1 if k == 1 else None

    def identity(self):
        return ()

    def multiply(self, x, y):
        word = list(x)
        for c in y:
            if word and word[-1] == -c:
                word.pop()
            else:
                word.append(c)
        return tuple(word)

    def inverse(self, x):
        return tuple(-c for c in reversed(x))

    def format_element(self, x):
        if not x:
            return ""
        out = []
        for c in x:
            ch = _LETTERS[abs(c) - 1]
            out.append(ch if c > 0 else ch.upper())
        return "".join(out)

    def parse_element(self, s):
        word: list[int] = []
        for ch in s.strip():
            low = ch.lower()
            i = _LETTERS.find(low) + 1
            if i == 0 or i > self.k:
                raise ValueError(f"bad F_{self.k} letter {ch!r}")
            c = i if ch.islower() else -i
            if word and word[-1] == -c:
                word.pop()
            else:
                word.append(c)
        return tuple(word)


class HeisenbergGroup(GroupModel):
    """H3(Z) in upper-triangular coordinates (x, y, z), with the group law
    (x,y,z)(x',y',z') = (x+x', y+y', z+z'+x*y') and S = {a, a^-1, b, b^-1}
    for a = (1,0,0), b = (0,1,0).  The commutator [a,b] = (0,0,1) is a
    central element of infinite order."""

    family = "H3"

    def __init__(self):
        self.name = "H3"
        self.generators = ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0))
        self.inverse_gen_index = (1, 0, 3, 2)
        self.central_element = (0, 0, 1)
        self.growth_degree = 4

    def identity(self):
        return (0, 0, 0)

    def multiply(self, u, v):
        return (u[0] + v[0], u[1] + v[1], u[2] + v[2] + u[0] * v[1])

    def inverse(self, u):
        return (-u[0], -u[1], u[0] * u[1] - u[2])

    def format_element(self, x):
        return "(" + ",".join(str(a) for a in x) + ")"

    def parse_element(self, s):
        body = s.strip()
        if not (body.startswith("(") and body.endswith(")")):
            raise ValueError(f"bad H3 element: {s!r}")
        parts = body[1:-1].split(",")
        if len(parts) != 3:
            raise ValueError(f"expected 3 coordinates in {s!r}")
        return tuple(int(p) for p in parts)


_ZD_RE = re.compile(r"^Z\^?(\d+)$", re.IGNORECASE)
_FK_RE = re.compile(r"^F_?(\d+)$", re.IGNORECASE)
_H3_RE = re.compile(r"^H_?3$", re.IGNORECASE)


def make_group(spec: str) -> GroupModel:
    """Build a GroupModel from a spec string: ``Z^d`` (or ``Zd``),
    ``F_k`` (or ``Fk``), or ``H3``."""
    s = spec.strip()
    m = _ZD_RE.match(s)
    if m:
        return ZdGroup(int(m.group(1)))
    m = _FK_RE.match(s)
    if m:
        return FreeGroup(int(m.group(1)))
    if _H3_RE.match(s):
        return HeisenbergGroup()
    raise UnknownFamilyError(f"unknown family: {spec!r}")
