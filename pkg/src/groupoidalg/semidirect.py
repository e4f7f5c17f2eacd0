"""Conjugation action, semidirect product of groupoids, and the
isomorphism criterion relating the product to its parent."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import PreconditionError
from .groupoid import (
    FiniteGroupoid,
    GroupoidMorphism,
    SubgroupoidSelection,
    isotropy_subgroupoid,
    quotient_by_isotropy,
    selection_to_groupoid,
    subgroupoid_properties,
)
from .morphism import find_isomorphism, invert_isomorphism, verify_morphism


def alpha(parent: FiniteGroupoid, g1: int, g0: int) -> int:
    """Conjugation action: g1 ∘ g0 ∘ g1⁻¹.

    g0 must be an isotropy arrow at the source of g1; the result is an
    isotropy arrow at the target of g1.
    """
    if parent.src[g0] != parent.tgt[g0]:
        raise PreconditionError(f"{parent.arrow_label(g0)} is not an isotropy arrow")
    if parent.src[g0] != parent.src[g1]:
        raise PreconditionError(
            f"{parent.arrow_label(g0)} does not sit at the source of {parent.arrow_label(g1)}"
        )
    return parent.compose(parent.compose(g1, g0), parent.inv[g1])


@dataclass(eq=False)
class SemidirectGroupoid(FiniteGroupoid):
    """Carrier of the semidirect product; arrow i is the pair pair_of[i]."""

    pair_of: tuple[tuple[int, int], ...] = ()
    pair_index: dict[tuple[int, int], int] = field(default_factory=dict)
    parent: FiniteGroupoid = None
    g0: SubgroupoidSelection = None
    g1: SubgroupoidSelection = None


def semidirect_product(
    parent: FiniteGroupoid,
    g0: SubgroupoidSelection,
    g1: SubgroupoidSelection,
) -> SemidirectGroupoid:
    """The semidirect product of the isotropy selection g0 with a wide
    transitive selection g1, materialized as an explicit groupoid.

    Arrows are pairs (gamma0, gamma1) with d(gamma0) = r(gamma1);
    multiplication twists the second factor through the conjugation action.
    """
    iso = isotropy_subgroupoid(parent)
    if g0.arrows != iso.arrows:
        raise PreconditionError(
            "g0 must be the full isotropy subgroupoid of the parent"
        )
    props = subgroupoid_properties(parent, g1)
    if not props["is_closed"]:
        raise PreconditionError("g1 is not closed under composition/inverses")
    if not props["is_wide"]:
        raise PreconditionError("g1 is not wide")
    if not props["is_transitive"]:
        raise PreconditionError("g1 is not transitive")

    g1_sorted = sorted(g1.arrows)
    pairs = [
        (a0, a1)
        for a1 in g1_sorted
        for a0 in sorted(g0.arrows)
        if parent.src[a0] == parent.tgt[a1]
    ]
    idx = {p: i for i, p in enumerate(pairs)}

    src = tuple(parent.src[a1] for (_, a1) in pairs)
    tgt = tuple(parent.tgt[a0] for (a0, _) in pairs)
    comp: dict[tuple[int, int], int] = {}
    for i, (a0, a1) in enumerate(pairs):
        for j, (b0, b1) in enumerate(pairs):
            if src[i] != tgt[j]:
                continue
            prod = (
                parent.compose(a0, alpha(parent, a1, b0)),
                parent.compose(a1, b1),
            )
            comp[(i, j)] = idx[prod]
    inv = tuple(
        idx[(alpha(parent, parent.inv[a1], parent.inv[a0]), parent.inv[a1])]
        for (a0, a1) in pairs
    )
    identity = tuple(idx[(parent.identity[x], parent.identity[x])] for x in parent.base())
    labels = tuple(
        f"({parent.arrow_label(a0)},{parent.arrow_label(a1)})" for (a0, a1) in pairs
    )
    return SemidirectGroupoid(
        n_base=parent.n_base,
        src=src,
        tgt=tgt,
        compose_table=comp,
        inv=inv,
        identity=identity,
        arrow_labels=labels,
        base_labels=parent.base_labels,
        pair_of=tuple(pairs),
        pair_index=idx,
        parent=parent,
        g0=g0,
        g1=g1,
    )


def J_map(sd: SemidirectGroupoid) -> GroupoidMorphism:
    """The comparison morphism (gamma0, gamma1) ↦ gamma0 ∘ gamma1 into the parent."""
    parent = sd.parent
    arrow_map = tuple(parent.compose(a0, a1) for (a0, a1) in sd.pair_of)
    return GroupoidMorphism(
        domain=sd,
        codomain=parent,
        arrow_map=arrow_map,
        base_map=tuple(parent.base()),
    )


@dataclass
class Prop1Result:
    j_exists: bool
    J_is_iso: bool
    i_map: GroupoidMorphism | None
    i_map_verified: bool
    sd: SemidirectGroupoid
    quotient: FiniteGroupoid
    rho: GroupoidMorphism


def prop1_equivalence(
    parent: FiniteGroupoid,
    g0: SubgroupoidSelection,
    g1: SubgroupoidSelection,
) -> Prop1Result:
    """Both directions of the decomposition criterion on one instance.

    j_exists: the quotient by g0 is isomorphic to g1 (exhaustive search).
    J_is_iso: the comparison morphism from the semidirect product is an
    isomorphism. The two booleans agree on every lawful instance; callers
    treat their equality as a checked postcondition.

    When the comparison map is invertible, the induced map from the
    quotient onto g1 (class ↦ second pair component) is built and verified.
    """
    sd = semidirect_product(parent, g0, g1)
    quotient, rho = quotient_by_isotropy(parent, g0)
    g1_groupoid, inclusion = selection_to_groupoid(g1)
    j = find_isomorphism(g1_groupoid, quotient)
    j_exists = j is not None

    J = J_map(sd)
    J_is_iso = verify_morphism(J, require_iso=True).ok

    i_map = None
    i_verified = False
    if J_is_iso:
        I = invert_isomorphism(J)  # parent -> sd
        g1_index = {a: k for k, a in enumerate(inclusion.arrow_map)}
        arrow_map = []
        for cid in quotient.arrows():
            # representative of the class, read off the projection
            rep = next(a for a in parent.arrows() if rho.arrow_map[a] == cid)
            _, a1 = sd.pair_of[I.arrow_map[rep]]
            arrow_map.append(g1_index[a1])
        i_map = GroupoidMorphism(
            domain=quotient,
            codomain=g1_groupoid,
            arrow_map=tuple(arrow_map),
            base_map=tuple(quotient.base()),
        )
        i_verified = verify_morphism(i_map, require_iso=True).ok
    return Prop1Result(
        j_exists=j_exists,
        J_is_iso=J_is_iso,
        i_map=i_map,
        i_map_verified=i_verified,
        sd=sd,
        quotient=quotient,
        rho=rho,
    )
