"""Morphism verification and exhaustive isomorphism search for small instances."""

from __future__ import annotations

from .errors import SizeCapError
from .groupoid import (
    FiniteGroupoid,
    GroupoidMorphism,
    ValidationReport,
)

DEFAULT_ISO_CAP = 64


def verify_morphism(m: GroupoidMorphism, require_iso: bool = False) -> ValidationReport:
    """Check the functoriality invariants of a groupoid morphism.

    With require_iso, additionally checks that both maps are bijections.
    """
    rep = ValidationReport()
    d, c = m.domain, m.codomain
    am, bm = m.arrow_map, m.base_map
    if len(am) != d.n_arrows or len(bm) != d.n_base:
        rep.add("morphism", "totality", (), "arrow_map/base_map are not total")
        return rep
    if any(not (0 <= v < c.n_arrows) for v in am) or any(
        not (0 <= v < c.n_base) for v in bm
    ):
        rep.add("morphism", "totality", (), "map values out of range")
        return rep
    for a in d.arrows():
        if c.src[am[a]] != bm[d.src[a]]:
            rep.add("morphism", "source", (a,), f"src not preserved at {d.arrow_label(a)}")
        if c.tgt[am[a]] != bm[d.tgt[a]]:
            rep.add("morphism", "target", (a,), f"tgt not preserved at {d.arrow_label(a)}")
    for x in d.base():
        if am[d.identity[x]] != c.identity[bm[x]]:
            rep.add(
                "morphism",
                "identity",
                (x,),
                f"identity at {d.base_label(x)} not preserved",
            )
    for (a, b), ab in d.compose_table.items():
        if not c.composable(am[a], am[b]):
            rep.add(
                "morphism",
                "composition",
                (a, b),
                f"image pair not composable at ({d.arrow_label(a)}, {d.arrow_label(b)})",
            )
        elif c.compose_table[(am[a], am[b])] != am[ab]:
            rep.add(
                "morphism",
                "composition",
                (a, b),
                f"composition not preserved at ({d.arrow_label(a)}, {d.arrow_label(b)})",
            )
    if require_iso:
        if len(set(bm)) != c.n_base or d.n_base != c.n_base:
            rep.add("bijectivity", "base", (), "base_map is not a bijection")
        if len(set(am)) != c.n_arrows or d.n_arrows != c.n_arrows:
            rep.add("bijectivity", "arrows", (), "arrow_map is not a bijection")
    return rep


def invert_isomorphism(m: GroupoidMorphism) -> GroupoidMorphism:
    arrow_map = [0] * m.codomain.n_arrows
    for a, b in enumerate(m.arrow_map):
        arrow_map[b] = a
    base_map = [0] * m.codomain.n_base
    for x, y in enumerate(m.base_map):
        base_map[y] = x
    return GroupoidMorphism(
        domain=m.codomain,
        codomain=m.domain,
        arrow_map=tuple(arrow_map),
        base_map=tuple(base_map),
    )


def _self_power_order(g: FiniteGroupoid, a: int) -> int:
    """Order of an isotropy arrow under repeated composition with itself."""
    e = g.identity[g.src[a]]
    k, x = 1, a
    while x != e:
        x = g.compose_table[(x, a)]
        k += 1
    return k


def _base_signature(g: FiniteGroupoid, x: int):
    iso = g.isotropy_fiber(x)
    return (
        len(g.arrows_into(x)),
        len(g.arrows_from(x)),
        len(iso),
        tuple(sorted(_self_power_order(g, a) for a in iso)),
    )


def _arrow_signature(g: FiniteGroupoid, a: int):
    if g.src[a] == g.tgt[a]:
        return (g.is_identity(a), _self_power_order(g, a))
    return (False, 0)


def _extend_arrows(g, h, base_map, cand, order):
    """Backtracking arrow assignment with forced-product propagation."""
    amap: dict[int, int] = {}
    used: set[int] = set()
    # identities are forced
    for x in g.base():
        delta = h.identity[base_map[x]]
        amap[g.identity[x]] = delta
        used.add(delta)

    def consistent(a, d):
        # inverse coherence
        ia = g.inv[a]
        if ia in amap and amap[ia] != h.inv[d]:
            return None
        forced = []
        if ia not in amap:
            if h.inv[d] in used and h.inv[d] != d:
                return None
            if ia != a:
                forced.append((ia, h.inv[d]))
        return forced

    def propagate(a, d, trail):
        """Assign a→d plus everything it forces; append to trail, or fail."""
        queue = [(a, d)]
        while queue:
            a, d = queue.pop()
            if a in amap:
                if amap[a] != d:
                    return False
                continue
            if d in used:
                return False
            if h.src[d] != base_map[g.src[a]] or h.tgt[d] != base_map[g.tgt[a]]:
                return False
            if _arrow_signature(g, a) != _arrow_signature(h, d):
                return False
            forced = consistent(a, d)
            if forced is None:
                return False
            amap[a] = d
            used.add(d)
            trail.append(a)
            queue.extend(forced)
            # products with already-assigned partners are forced
            for b in list(amap):
                if g.composable(a, b):
                    queue.append((g.compose_table[(a, b)], h.compose_table[(d, amap[b])]))
                if b != a and g.composable(b, a):
                    queue.append((g.compose_table[(b, a)], h.compose_table[(amap[b], d)]))
            if g.composable(a, a):
                queue.append((g.compose_table[(a, a)], h.compose_table[(d, d)]))
        return True

    def undo(trail, n):
        while len(trail) > n:
            a = trail.pop()
            used.discard(amap.pop(a))

    def search(i):
        while i < len(order) and order[i] in amap:
            i += 1
        if i == len(order):
            return True
        a = order[i]
        for d in cand[a]:
            if d in used:
                continue
            trail: list[int] = []
            if propagate(a, d, trail) and search(i + 1):
                return True
            undo(trail, 0)
        return False

    if search(0):
        return tuple(amap[a] for a in g.arrows())
    return None


def find_isomorphism(
    g: FiniteGroupoid, h: FiniteGroupoid, max_arrows: int = DEFAULT_ISO_CAP
) -> GroupoidMorphism | None:
    """Exhaustive isomorphism search, pruned by fiber-size and isotropy-order
    signatures. Returns a verified isomorphism or None.

    Raises SizeCapError above max_arrows; the worst case is factorial.
    """
    if max(g.n_arrows, h.n_arrows) > max_arrows:
        raise SizeCapError(
            f"instance too large for isomorphism search "
            f"({max(g.n_arrows, h.n_arrows)} arrows > cap {max_arrows})"
        )
    if g.n_base != h.n_base or g.n_arrows != h.n_arrows:
        return None
    sig_g = [_base_signature(g, x) for x in g.base()]
    sig_h = [_base_signature(h, x) for x in h.base()]
    if sorted(sig_g) != sorted(sig_h):
        return None

    base_candidates = [
        [y for y in h.base() if sig_h[y] == sig_g[x]] for x in g.base()
    ]

    def base_search(x, taken, assignment):
        if x == g.n_base:
            yield tuple(assignment)
            return
        for y in base_candidates[x]:
            if y in taken:
                continue
            assignment.append(y)
            taken.add(y)
            yield from base_search(x + 1, taken, assignment)
            taken.discard(y)
            assignment.pop()

    for base_map in base_search(0, set(), []):
        cand = {}
        feasible = True
        for a in g.arrows():
            cs = [
                d
                for d in h.arrows()
                if h.src[d] == base_map[g.src[a]]
                and h.tgt[d] == base_map[g.tgt[a]]
                and _arrow_signature(h, d) == _arrow_signature(g, a)
            ]
            if not cs:
                feasible = False
                break
            cand[a] = cs
        if not feasible:
            continue
        order = sorted(g.arrows(), key=lambda a: len(cand[a]))
        amap = _extend_arrows(g, h, base_map, cand, order)
        if amap is not None:
            m = GroupoidMorphism(domain=g, codomain=h, arrow_map=amap, base_map=base_map)
            if verify_morphism(m, require_iso=True).ok:
                return m
    return None
