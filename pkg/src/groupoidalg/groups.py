"""Finite groups given by explicit multiplication tables.

Elements are dense integer indices; names are kept for I/O and labels.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import MalformedTableError


@dataclass(eq=False)
class FiniteGroup:
    name: str
    elements: tuple[str, ...]
    mul: tuple[tuple[int, ...], ...]  # mul[a][b] = index of a*b
    identity: int = field(init=False)
    inverse: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        n = len(self.elements)
        if len(self.mul) != n or any(len(row) != n for row in self.mul):
            raise MalformedTableError(f"group {self.name}: mul table is not {n}x{n}")
        if any(v < 0 or v >= n for row in self.mul for v in row):
            raise MalformedTableError(f"group {self.name}: mul entry out of range")
        ident = None
        for e in range(n):
            if all(self.mul[e][a] == a and self.mul[a][e] == a for a in range(n)):
                ident = e
                break
        if ident is None:
            raise MalformedTableError(f"group {self.name}: no identity element")
        self.identity = ident
        inv = [None] * n
        for a in range(n):
            for b in range(n):
                if self.mul[a][b] == ident and self.mul[b][a] == ident:
                    inv[a] = b
                    break
            if inv[a] is None:
                raise MalformedTableError(
                    f"group {self.name}: element {self.elements[a]} has no inverse"
                )
        self.inverse = tuple(inv)
        # associativity, checked once at construction
        for a in range(n):
            for b in range(n):
                ab = self.mul[a][b]
                for c in range(n):
                    if self.mul[ab][c] != self.mul[a][self.mul[b][c]]:
                        raise MalformedTableError(
                            f"group {self.name}: not associative at "
                            f"({self.elements[a]},{self.elements[b]},{self.elements[c]})"
                        )

    @property
    def order(self) -> int:
        return len(self.elements)

    def op(self, a: int, b: int) -> int:
        return self.mul[a][b]

    def inv(self, a: int) -> int:
        return self.inverse[a]

    def index(self, name: str) -> int:
        try:
            return self.elements.index(name)
        except ValueError:
            raise MalformedTableError(f"group {self.name}: unknown element {name!r}") from None

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.mul[x][a]
            k += 1
        return k


def cyclic(n: int) -> FiniteGroup:
    """Cyclic group of order n; elements e, a, a^2, ..."""
    names = tuple("e" if k == 0 else ("a" if k == 1 else f"a^{k}") for k in range(n))
    mul = tuple(tuple((i + j) % n for j in range(n)) for i in range(n))
    return FiniteGroup(f"Z{n}", names, mul)


def symmetric(n: int) -> FiniteGroup:
    """Symmetric group S_n as permutations of {0,..,n-1}; p*q applies q first."""
    perms = list(itertools.permutations(range(n)))
    idx = {p: i for i, p in enumerate(perms)}
    names = tuple("".join(map(str, p)) for p in perms)
    mul = tuple(
        tuple(idx[tuple(p[q[k]] for k in range(n))] for q in perms) for p in perms
    )
    return FiniteGroup(f"S{n}", names, mul)


def dihedral(n: int) -> FiniteGroup:
    """Dihedral group of order 2n: rotations r0..r{n-1}, reflections s0..s{n-1}."""
    # element (k, f): rotation by k composed with f flips
    elems = [(k, f) for f in (0, 1) for k in range(n)]
    idx = {e: i for i, e in enumerate(elems)}
    names = tuple(f"{'s' if f else 'r'}{k}" for (k, f) in elems)

    def compose(e1, e2):
        k1, f1 = e1
        k2, f2 = e2
        k = (k1 + (k2 if f1 == 0 else -k2)) % n
        return (k, f1 ^ f2)

    mul = tuple(tuple(idx[compose(e1, e2)] for e2 in elems) for e1 in elems)
    return FiniteGroup(f"D{n}", names, mul)


BUILTIN_GROUPS = {
    "Z2": lambda: cyclic(2),
    "Z3": lambda: cyclic(3),
    "Z4": lambda: cyclic(4),
    "S3": lambda: symmetric(3),
    "D4": lambda: dihedral(4),
}


def builtin_group(name: str) -> FiniteGroup:
    try:
        return BUILTIN_GROUPS[name]()
    except KeyError:
        raise MalformedTableError(
            f"unknown builtin group {name!r}; choose from {sorted(BUILTIN_GROUPS)}"
        ) from None


def group_from_table(data: dict, name: str = "custom") -> FiniteGroup:
    """Build a group from the table-file dict: elements, mul, identity."""
    try:
        elements = tuple(str(e) for e in data["elements"])
        raw = data["mul"]
    except (KeyError, TypeError) as exc:
        raise MalformedTableError(f"group table file: missing key ({exc})") from None
    pos = {e: i for i, e in enumerate(elements)}
    if len(pos) != len(elements):
        raise MalformedTableError("group table file: duplicate element names")

    def resolve(v):
        if isinstance(v, str):
            if v not in pos:
                raise MalformedTableError(f"group table file: unknown element {v!r}")
            return pos[v]
        return int(v)

    mul = tuple(tuple(resolve(v) for v in row) for row in raw)
    g = FiniteGroup(name, elements, mul)
    if "identity" in data and resolve(data["identity"]) != g.identity:
        raise MalformedTableError("group table file: declared identity is not the identity")
    return g


def group_to_table(g: FiniteGroup) -> dict:
    return {
        "elements": list(g.elements),
        "mul": [[g.elements[v] for v in row] for row in g.mul],
        "identity": g.elements[g.identity],
    }
