"""Finite groupoid data model, axiom validation, subgroupoids and quotients.

Arrows and base points are dense integer ids. Composition follows the
"gamma after xi" convention: compose(g, xi) is defined exactly when
src(g) == tgt(xi), and then src(g∘xi) == src(xi), tgt(g∘xi) == tgt(g).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import PreconditionError, QuotientUndefinedError
from .groups import FiniteGroup

AXIOM_SOURCE_TARGET = "source-target"
AXIOM_ASSOCIATIVITY = "associativity"
AXIOM_IDENTITY = "identity"
AXIOM_INVERSE = "inverse"
AXIOM_IDENTITY_BASE = "identity-base"


@dataclass(frozen=True)
class Violation:
    kind: str  # "malformed" or "axiom" (morphism checks reuse other kinds)
    axiom: str
    witness: tuple
    message: str

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "axiom": self.axiom,
            "witness": list(self.witness),
            "message": self.message,
        }


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def axioms_cited(self) -> set[str]:
        return {v.axiom for v in self.violations}

    def add(self, kind: str, axiom: str, witness: tuple, message: str):
        self.violations.append(Violation(kind, axiom, witness, message))

    def to_dict(self) -> dict:
        return {"ok": self.ok, "violations": [v.to_dict() for v in self.violations]}


@dataclass(eq=False)
class FiniteGroupoid:
    n_base: int
    src: tuple[int, ...]
    tgt: tuple[int, ...]
    compose_table: dict[tuple[int, int], int]
    inv: tuple[int, ...]
    identity: tuple[int, ...]  # per base point
    arrow_labels: tuple[str, ...] | None = None
    base_labels: tuple[str, ...] | None = None

    @property
    def n_arrows(self) -> int:
        return len(self.src)

    def arrows(self) -> range:
        return range(self.n_arrows)

    def base(self) -> range:
        return range(self.n_base)

    def composable(self, g: int, xi: int) -> bool:
        return self.src[g] == self.tgt[xi]

    def compose(self, g: int, xi: int) -> int:
        try:
            return self.compose_table[(g, xi)]
        except KeyError:
            raise PreconditionError(
                f"arrows {self.arrow_label(g)} and {self.arrow_label(xi)} are not composable"
            ) from None

    def arrows_into(self, x: int) -> list[int]:
        """The fiber over target x (all arrows with tgt == x)."""
        return [a for a in self.arrows() if self.tgt[a] == x]

    def arrows_from(self, x: int) -> list[int]:
        """The fiber over source x (all arrows with src == x)."""
        return [a for a in self.arrows() if self.src[a] == x]

    def isotropy_fiber(self, x: int) -> list[int]:
        return [a for a in self.arrows() if self.src[a] == x and self.tgt[a] == x]

    def is_identity(self, a: int) -> bool:
        return a == self.identity[self.src[a]]

    def arrow_label(self, a: int) -> str:
        if self.arrow_labels is not None:
            return self.arrow_labels[a]
        return str(a)

    def base_label(self, x: int) -> str:
        if self.base_labels is not None:
            return self.base_labels[x]
        return str(x)


def check_structure(g: FiniteGroupoid) -> ValidationReport:
    """Malformed-table checks: totality and id ranges, before any axiom check."""
    rep = ValidationReport()
    n, nb = g.n_arrows, g.n_base
    if len(g.tgt) != n or len(g.inv) != n:
        rep.add("malformed", "tables", (), "src/tgt/inv tables have inconsistent lengths")
        return rep
    if len(g.identity) != nb:
        rep.add("malformed", "tables", (), "identity table does not cover the base")
        return rep
    for a in range(n):
        if not (0 <= g.src[a] < nb and 0 <= g.tgt[a] < nb):
            rep.add("malformed", "tables", (a,), f"arrow {a}: src/tgt out of range")
        if not (0 <= g.inv[a] < n):
            rep.add("malformed", "tables", (a,), f"arrow {a}: inv out of range")
    for x in range(nb):
        if not (0 <= g.identity[x] < n):
            rep.add("malformed", "tables", (x,), f"base point {x}: identity out of range")
    if not rep.ok:
        return rep
    for (a, b), c in g.compose_table.items():
        if not (0 <= a < n and 0 <= b < n and 0 <= c < n):
            rep.add("malformed", "tables", (a, b), "compose entry refers to unknown arrow")
        elif g.src[a] != g.tgt[b]:
            rep.add(
                "malformed",
                "tables",
                (a, b),
                f"compose entry on non-composable pair ({g.arrow_label(a)}, {g.arrow_label(b)})",
            )
    for a in range(n):
        for b in range(n):
            if g.src[a] == g.tgt[b] and (a, b) not in g.compose_table:
                rep.add(
                    "malformed",
                    "tables",
                    (a, b),
                    f"compose table missing composable pair ({g.arrow_label(a)}, {g.arrow_label(b)})",
                )
    return rep


def validate_groupoid(g: FiniteGroupoid) -> ValidationReport:
    """Check all groupoid axioms; an empty report means the instance is valid.

    Structurally malformed tables are reported as kind "malformed" and
    short-circuit the axiom checks.
    """
    rep = check_structure(g)
    if not rep.ok:
        return rep
    comp = g.compose_table
    src, tgt, inv, ident = g.src, g.tgt, g.inv, g.identity

    for x in range(g.n_base):
        e = ident[x]
        if src[e] != x or tgt[e] != x:
            rep.add(
                "axiom",
                AXIOM_IDENTITY_BASE,
                (x, e),
                f"identity arrow at base {g.base_label(x)} has endpoints "
                f"({g.base_label(src[e])},{g.base_label(tgt[e])})",
            )

    # src/tgt of products
    for (a, b), c in comp.items():
        if src[c] != src[b] or tgt[c] != tgt[a]:
            rep.add(
                "axiom",
                AXIOM_SOURCE_TARGET,
                (a, b),
                f"product {g.arrow_label(a)}∘{g.arrow_label(b)} has wrong endpoints",
            )

    # identities
    for a in range(g.n_arrows):
        if comp.get((ident[tgt[a]], a)) != a or comp.get((a, ident[src[a]])) != a:
            rep.add(
                "axiom",
                AXIOM_IDENTITY,
                (a,),
                f"identity law fails at arrow {g.arrow_label(a)}",
            )

    # inverses
    for a in range(g.n_arrows):
        ia = inv[a]
        if comp.get((a, ia)) != ident[tgt[a]] or comp.get((ia, a)) != ident[src[a]]:
            rep.add(
                "axiom",
                AXIOM_INVERSE,
                (a,),
                f"inverse law fails at arrow {g.arrow_label(a)}",
            )

    # associativity over all composable triples
    into = [g.arrows_into(x) for x in range(g.n_base)]
    for (a, b), ab in comp.items():
        for c in into[src[b]]:
            lhs = comp.get((ab, c))
            bc = comp.get((b, c))
            rhs = comp.get((a, bc)) if bc is not None else None
            if lhs != rhs or lhs is None:
                rep.add(
                    "axiom",
                    AXIOM_ASSOCIATIVITY,
                    (a, b, c),
                    f"associativity fails at ({g.arrow_label(a)}, "
                    f"{g.arrow_label(b)}, {g.arrow_label(c)})",
                )
    return rep


@dataclass(eq=False)
class SubgroupoidSelection:
    parent: FiniteGroupoid
    arrows: frozenset[int]

    def touched_base(self) -> set[int]:
        p = self.parent
        return {p.src[a] for a in self.arrows} | {p.tgt[a] for a in self.arrows}


def isotropy_subgroupoid(g: FiniteGroupoid) -> SubgroupoidSelection:
    """All arrows with equal source and target; always wide and closed."""
    return SubgroupoidSelection(g, frozenset(a for a in g.arrows() if g.src[a] == g.tgt[a]))


def subgroupoid_properties(g: FiniteGroupoid, h: SubgroupoidSelection) -> dict:
    if not h.arrows <= frozenset(g.arrows()):
        raise PreconditionError("selection is not a subset of the parent's arrows")
    arrows = h.arrows
    closed = all(g.inv[a] in arrows for a in arrows)
    if closed:
        for a in arrows:
            for b in arrows:
                if g.composable(a, b) and g.compose_table[(a, b)] not in arrows:
                    closed = False
                    break
            if not closed:
                break
    if closed:
        closed = all(g.identity[x] in arrows for x in h.touched_base())
    wide = h.touched_base() == set(g.base())
    pairs = {(g.tgt[a], g.src[a]) for a in arrows}
    transitive = len(pairs) == g.n_base * g.n_base
    return {"is_wide": wide, "is_transitive": transitive, "is_closed": closed}


@dataclass(eq=False)
class GroupoidMorphism:
    domain: FiniteGroupoid
    codomain: FiniteGroupoid
    arrow_map: tuple[int, ...]
    base_map: tuple[int, ...]


def selection_to_groupoid(sel: SubgroupoidSelection) -> tuple[FiniteGroupoid, GroupoidMorphism]:
    """Reindex a closed selection as a standalone groupoid plus its inclusion.

    The base of the result is the set of touched base points, reindexed;
    for a wide selection this is the parent's base in order.
    """
    p = sel.parent
    props = subgroupoid_properties(p, sel)
    if not props["is_closed"]:
        raise PreconditionError("selection is not closed; cannot form a subgroupoid")
    base_pts = sorted(sel.touched_base())
    base_idx = {x: i for i, x in enumerate(base_pts)}
    arrows = sorted(sel.arrows)
    arrow_idx = {a: i for i, a in enumerate(arrows)}
    comp = {
        (arrow_idx[a], arrow_idx[b]): arrow_idx[p.compose_table[(a, b)]]
        for a in arrows
        for b in arrows
        if p.composable(a, b)
    }
    sub = FiniteGroupoid(
        n_base=len(base_pts),
        src=tuple(base_idx[p.src[a]] for a in arrows),
        tgt=tuple(base_idx[p.tgt[a]] for a in arrows),
        compose_table=comp,
        inv=tuple(arrow_idx[p.inv[a]] for a in arrows),
        identity=tuple(arrow_idx[p.identity[x]] for x in base_pts),
        arrow_labels=tuple(p.arrow_label(a) for a in arrows),
        base_labels=tuple(p.base_label(x) for x in base_pts),
    )
    inclusion = GroupoidMorphism(
        domain=sub,
        codomain=p,
        arrow_map=tuple(arrows),
        base_map=tuple(base_pts),
    )
    return sub, inclusion


def quotient_by_isotropy(
    g: FiniteGroupoid, g0: SubgroupoidSelection
) -> tuple[FiniteGroupoid, GroupoidMorphism]:
    """Quotient of g by a wide, conjugation-stable isotropy selection.

    Classes are orbits of the left action gamma0 ∘ gamma; quotient
    composition is verified well defined on representatives before the
    tables are emitted. Returns the quotient and the projection morphism.
    """
    props = subgroupoid_properties(g, g0)
    if not (props["is_wide"] and props["is_closed"]):
        raise PreconditionError("quotient selection must be wide and closed")
    for a in g0.arrows:
        if g.src[a] != g.tgt[a]:
            raise PreconditionError(
                f"quotient selection contains non-isotropy arrow {g.arrow_label(a)}"
            )
    # conjugation stability: alpha_gamma maps g0 fibers into g0
    for gamma in g.arrows():
        x = g.src[gamma]
        for a in g0.arrows:
            if g.src[a] != x:
                continue
            conj = g.compose_table[(g.compose_table[(gamma, a)], g.inv[gamma])]
            if conj not in g0.arrows:
                raise PreconditionError(
                    f"selection is not conjugation-stable: witness arrows "
                    f"({g.arrow_label(gamma)}, {g.arrow_label(a)})"
                )

    class_of = [None] * g.n_arrows
    classes: list[list[int]] = []
    for gamma in g.arrows():
        if class_of[gamma] is not None:
            continue
        orbit = sorted(
            g.compose_table[(a, gamma)]
            for a in g0.arrows
            if g.src[a] == g.tgt[gamma]
        )
        cid = len(classes)
        classes.append(orbit)
        for m in orbit:
            if class_of[m] is not None and class_of[m] != cid:
                raise QuotientUndefinedError(
                    "orbit structure inconsistent", witnesses=(gamma, m)
                )
            class_of[m] = cid
    # deterministic representative: smallest arrow id; reorder classes by it
    order = sorted(range(len(classes)), key=lambda c: classes[c][0])
    rank = {c: i for i, c in enumerate(order)}
    class_of = [rank[c] for c in class_of]
    classes = [classes[c] for c in order]
    reps = [members[0] for members in classes]

    # well-definedness of composition on representatives
    comp: dict[tuple[int, int], int] = {}
    for c1, m1 in enumerate(classes):
        for c2, m2 in enumerate(classes):
            if g.src[reps[c1]] != g.tgt[reps[c2]]:
                continue
            results = {class_of[g.compose_table[(a, b)]] for a in m1 for b in m2}
            if len(results) != 1:
                raise QuotientUndefinedError(
                    f"quotient undefined: classes [{g.arrow_label(reps[c1])}] and "
                    f"[{g.arrow_label(reps[c2])}] compose ambiguously",
                    witnesses=(reps[c1], reps[c2]),
                )
            comp[(c1, c2)] = results.pop()

    quotient = FiniteGroupoid(
        n_base=g.n_base,
        src=tuple(g.src[r] for r in reps),
        tgt=tuple(g.tgt[r] for r in reps),
        compose_table=comp,
        inv=tuple(class_of[g.inv[r]] for r in reps),
        identity=tuple(class_of[g.identity[x]] for x in g.base()),
        arrow_labels=tuple(f"[{g.arrow_label(r)}]" for r in reps),
        base_labels=g.base_labels,
    )
    rho = GroupoidMorphism(
        domain=g,
        codomain=quotient,
        arrow_map=tuple(class_of),
        base_map=tuple(g.base()),
    )
    return quotient, rho


# --- builders ---------------------------------------------------------------

def pair_groupoid(n: int) -> FiniteGroupoid:
    """Pair groupoid over {0..n-1}: arrows (y,x), (z,y)∘(y,x) = (z,x)."""
    arrows = [(y, x) for y in range(n) for x in range(n)]
    idx = {a: i for i, a in enumerate(arrows)}
    comp = {
        (idx[(z, y)], idx[(y2, x)]): idx[(z, x)]
        for (z, y) in arrows
        for (y2, x) in arrows
        if y == y2
    }
    return FiniteGroupoid(
        n_base=n,
        src=tuple(x for (_, x) in arrows),
        tgt=tuple(y for (y, _) in arrows),
        compose_table=comp,
        inv=tuple(idx[(x, y)] for (y, x) in arrows),
        identity=tuple(idx[(x, x)] for x in range(n)),
        arrow_labels=tuple(f"({y},{x})" for (y, x) in arrows),
    )


def group_groupoid(G: FiniteGroup) -> FiniteGroupoid:
    """A finite group viewed as a groupoid over a one-point base."""
    n = G.order
    comp = {(a, b): G.mul[a][b] for a in range(n) for b in range(n)}
    return FiniteGroupoid(
        n_base=1,
        src=(0,) * n,
        tgt=(0,) * n,
        compose_table=comp,
        inv=G.inverse,
        identity=(G.identity,),
        arrow_labels=G.elements,
        base_labels=("*",),
    )


def relabel(
    g: FiniteGroupoid, base_perm: list[int], arrow_perm: list[int]
) -> FiniteGroupoid:
    """Isomorphic copy with base point x renamed base_perm[x] and arrow a
    renamed arrow_perm[a]. Useful as a test oracle for isomorphism search."""
    inv_b = [0] * g.n_base
    for x, y in enumerate(base_perm):
        inv_b[y] = x
    inv_a = [0] * g.n_arrows
    for a, b in enumerate(arrow_perm):
        inv_a[b] = a
    src = [0] * g.n_arrows
    tgt = [0] * g.n_arrows
    inv = [0] * g.n_arrows
    for a in g.arrows():
        src[arrow_perm[a]] = base_perm[g.src[a]]
        tgt[arrow_perm[a]] = base_perm[g.tgt[a]]
        inv[arrow_perm[a]] = arrow_perm[g.inv[a]]
    comp = {
        (arrow_perm[a], arrow_perm[b]): arrow_perm[c]
        for (a, b), c in g.compose_table.items()
    }
    ident = [0] * g.n_base
    for x in g.base():
        ident[base_perm[x]] = arrow_perm[g.identity[x]]
    labels = None
    if g.arrow_labels is not None:
        labels = tuple(g.arrow_labels[inv_a[a]] for a in g.arrows())
    blabels = None
    if g.base_labels is not None:
        blabels = tuple(g.base_labels[inv_b[x]] for x in g.base())
    return FiniteGroupoid(
        n_base=g.n_base,
        src=tuple(src),
        tgt=tuple(tgt),
        compose_table=comp,
        inv=tuple(inv),
        identity=tuple(ident),
        arrow_labels=labels,
        base_labels=blabels,
    )
