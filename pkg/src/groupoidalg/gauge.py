"""Finite principal bundles, gauge groupoids, their isotropy ("Lorentz")
and section-induced ("translation") subgroupoids, the decomposition of the
gauge groupoid as a semidirect product, and the explicit convolution
formula on that decomposition.

Only trivialized bundles E = X x G are supported; over a finite discrete
base every principal bundle trivializes, so nothing is lost. The continuum
measures of the motivating construction are replaced by counting measures.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    GroupoidFunction,
    HaarWeights,
    carrier_weights,
    groupoid_convolve,
)
from .errors import PreconditionError
from .groupoid import (
    FiniteGroupoid,
    SubgroupoidSelection,
    isotropy_subgroupoid,
    subgroupoid_properties,
    validate_groupoid,
)
from .groups import FiniteGroup
from .semidirect import SemidirectGroupoid, prop1_equivalence


@dataclass(eq=False)
class FinitePrincipalBundle:
    """Trivialized bundle over a finite base: total space X x G with the
    right action (x, a)·g = (x, ag)."""

    n_base: int
    group: FiniteGroup

    def __post_init__(self):
        if self.n_base < 1:
            raise PreconditionError("bundle base must be nonempty")

    def points(self):
        return [(x, a) for x in range(self.n_base) for a in range(self.group.order)]


@dataclass(frozen=True)
class Section:
    """A choice of group element per base point, representing x ↦ (x, sigma(x))."""

    sigma: tuple[int, ...]

    @classmethod
    def identity(cls, bundle: FinitePrincipalBundle) -> "Section":
        return cls((bundle.group.identity,) * bundle.n_base)

    @classmethod
    def random(cls, bundle: FinitePrincipalBundle, rng: np.random.Generator) -> "Section":
        return cls(tuple(int(rng.integers(bundle.group.order)) for _ in range(bundle.n_base)))

    @classmethod
    def from_names(cls, bundle: FinitePrincipalBundle, names: dict) -> "Section":
        sigma = []
        for x in range(bundle.n_base):
            key = str(x)
            if key not in names:
                raise PreconditionError(f"section file misses base point {key}")
            sigma.append(bundle.group.index(str(names[key])))
        return cls(tuple(sigma))


@dataclass(eq=False)
class GaugeGroupoid(FiniteGroupoid):
    """Gauge groupoid in normal form: arrow i is the triple (y, g, x)
    representing the class [(y, g), (x, e)]."""

    bundle: FinitePrincipalBundle = None
    triples: tuple[tuple[int, int, int], ...] = ()
    triple_index: dict[tuple[int, int, int], int] = field(default_factory=dict)


def gauge_groupoid(bundle: FinitePrincipalBundle) -> GaugeGroupoid:
    """Gauge groupoid of the bundle, with arrows in (y, g, x) normal form,
    composition (y,h1,x)∘(x,h2,z) = (y, h1·h2, z)."""
    G = bundle.group
    nb = bundle.n_base
    triples = [(y, g, x) for y in range(nb) for g in range(G.order) for x in range(nb)]
    idx = {t: i for i, t in enumerate(triples)}
    comp = {}
    for i, (y, h1, x) in enumerate(triples):
        for j, (x2, h2, z) in enumerate(triples):
            if x == x2:
                comp[(i, j)] = idx[(y, G.mul[h1][h2], z)]
    return GaugeGroupoid(
        n_base=nb,
        src=tuple(x for (_, _, x) in triples),
        tgt=tuple(y for (y, _, _) in triples),
        compose_table=comp,
        inv=tuple(idx[(x, G.inverse[g], y)] for (y, g, x) in triples),
        identity=tuple(idx[(x, G.identity, x)] for x in range(nb)),
        arrow_labels=tuple(f"({y},{G.elements[g]},{x})" for (y, g, x) in triples),
        bundle=bundle,
        triples=tuple(triples),
        triple_index=idx,
    )


def gauge_groupoid_raw(bundle: FinitePrincipalBundle):
    """Independent construction of the gauge groupoid straight from the
    raw-pair quotient: arrows are orbits of pairs of bundle points under
    the diagonal right action. Returns the groupoid, the orbit list, and
    the class map orbit ↦ (y, a·b⁻¹, x) into normal form.

    Kept solely as a test oracle for the normal-form construction.
    """
    G = bundle.group
    points = bundle.points()
    seen = set()
    orbits = []
    for p1 in points:
        for p2 in points:
            if (p1, p2) in seen:
                continue
            orbit = frozenset(
                ((p1[0], G.mul[p1[1]][g]), (p2[0], G.mul[p2[1]][g]))
                for g in range(G.order)
            )
            seen.update(orbit)
            orbits.append(orbit)
    idx = {o: i for i, o in enumerate(orbits)}

    def tgt_of(o):
        return next(iter(o))[0][0]

    def src_of(o):
        return next(iter(o))[1][0]

    def class_containing(p1, p2):
        for o in orbits:
            if (p1, p2) in o:
                return o
        raise AssertionError("pair not covered by any orbit")

    comp = {}
    for i, o1 in enumerate(orbits):
        for j, o2 in enumerate(orbits):
            if src_of(o1) != tgt_of(o2):
                continue
            p1, p2 = next(iter(o1))
            # find a member (p3, p4) of o2 and g with p3 = p2·g
            found = None
            for (p3, p4) in o2:
                for g in range(G.order):
                    if (p2[0], G.mul[p2[1]][g]) == p3:
                        found = class_containing(p1, (p4[0], G.mul[p4[1]][G.inverse[g]]))
                        break
                if found is not None:
                    break
            comp[(i, j)] = idx[found]
    inv = []
    ident = [None] * bundle.n_base
    for o in orbits:
        p1, p2 = next(iter(o))
        inv.append(idx[class_containing(p2, p1)])
        if p1 == p2:
            ident[p1[0]] = idx[o]
    raw = FiniteGroupoid(
        n_base=bundle.n_base,
        src=tuple(src_of(o) for o in orbits),
        tgt=tuple(tgt_of(o) for o in orbits),
        compose_table=comp,
        inv=tuple(inv),
        identity=tuple(ident),
    )

    def to_normal(o):
        (y, a), (x, b) = next(iter(o))
        return (y, G.mul[a][G.inverse[b]], x)

    class_map = [to_normal(o) for o in orbits]
    return raw, orbits, class_map


def lorentz_subgroupoid(gauge: GaugeGroupoid) -> SubgroupoidSelection:
    """The arrows (x, g, x): classes of fiber-preserving transformations;
    coincides with the isotropy subgroupoid."""
    sel = frozenset(i for i, (y, _, x) in enumerate(gauge.triples) if y == x)
    return SubgroupoidSelection(gauge, sel)


def translation_subgroupoid(gauge: GaugeGroupoid, s: Section) -> SubgroupoidSelection:
    """The arrows [s(y), s(x)] = (y, sigma(y)·sigma(x)⁻¹, x): a wide
    transitive subgroupoid isomorphic to the pair groupoid over the base."""
    G = gauge.bundle.group
    if len(s.sigma) != gauge.n_base:
        raise PreconditionError("section does not cover the base")
    sel = frozenset(
        gauge.triple_index[(y, G.mul[s.sigma[y]][G.inverse[s.sigma[x]]], x)]
        for y in range(gauge.n_base)
        for x in range(gauge.n_base)
    )
    return SubgroupoidSelection(gauge, sel)


@dataclass(eq=False)
class PoincareDecomposition:
    """Gauge groupoid decomposed along a section: carrier of the semidirect
    product plus the bookkeeping maps used by the explicit formula."""

    bundle: FinitePrincipalBundle
    section: Section
    gauge: GaugeGroupoid
    g0: SubgroupoidSelection
    g1: SubgroupoidSelection
    sd: SemidirectGroupoid
    translation: dict[tuple[int, int], int]  # (tgt, src) -> parent arrow id
    prop1: object = None


def poincare_decomposition(
    bundle: FinitePrincipalBundle, s: Section
) -> PoincareDecomposition:
    gauge = gauge_groupoid(bundle)
    g0 = lorentz_subgroupoid(gauge)
    g1 = translation_subgroupoid(gauge, s)
    result = prop1_equivalence(gauge, g0, g1)
    G = bundle.group
    translation = {
        (y, x): gauge.triple_index[(y, G.mul[s.sigma[y]][G.inverse[s.sigma[x]]], x)]
        for y in range(gauge.n_base)
        for x in range(gauge.n_base)
    }
    dec = PoincareDecomposition(
        bundle=bundle,
        section=s,
        gauge=gauge,
        g0=g0,
        g1=g1,
        sd=result.sd,
        translation=translation,
    )
    dec.prop1 = result
    return dec


def verify_poincare_decomposition(
    bundle: FinitePrincipalBundle, s: Section, tol: float = 1e-9
) -> dict:
    """Full decomposition check for one bundle and section.

    Builds the gauge groupoid and both subgroupoids, verifies the semidirect
    product decomposition in both directions, and reproduces the identity
    i(rho([s(x)g, s(y)])) = [s(x), s(y)] on every arrow.
    """
    gauge = gauge_groupoid(bundle)
    checks = {}
    checks["gauge_valid"] = validate_groupoid(gauge).ok
    g0 = lorentz_subgroupoid(gauge)
    checks["lorentz_is_isotropy"] = g0.arrows == isotropy_subgroupoid(gauge).arrows
    g1 = translation_subgroupoid(gauge, s)
    props = subgroupoid_properties(gauge, g1)
    checks["translation_wide_transitive_closed"] = all(props.values())
    result = prop1_equivalence(gauge, g0, g1)
    checks["J_is_iso"] = result.J_is_iso
    checks["j_exists"] = result.j_exists
    checks["prop1_biconditional"] = result.J_is_iso == result.j_exists
    checks["i_map_verified"] = result.i_map_verified

    # i(rho(gamma)) must be the translation arrow between gamma's endpoints
    iota_ok = result.i_map is not None
    if iota_ok:
        G = bundle.group
        # selection_to_groupoid indexes the selection's arrows in sorted order
        sorted_g1 = sorted(g1.arrows)
        for gamma in gauge.arrows():
            y, x = gauge.tgt[gamma], gauge.src[gamma]
            t = gauge.triple_index[(y, G.mul[s.sigma[y]][G.inverse[s.sigma[x]]], x)]
            expected = sorted_g1.index(t)
            got = result.i_map.arrow_map[result.rho.arrow_map[gamma]]
            if got != expected:
                iota_ok = False
                break
    checks["section_identity"] = iota_ok
    checks["measures"] = "counting (discrete stand-in for Haar/Lebesgue)"
    checks["passed"] = all(v is True for k, v in checks.items() if k != "measures")
    return checks


def poincare_convolve(
    f1: GroupoidFunction,
    f2: GroupoidFunction,
    dec: PoincareDecomposition,
    w_parent: HaarWeights | None = None,
) -> GroupoidFunction:
    """The explicit convolution formula on the decomposed gauge groupoid:
    an outer sum over base points (translations) and an inner sum over group
    elements (fiber transformations), written through the section.

    Agrees with groupoid_convolve under the product carrier weights.
    """
    sd = dec.sd
    if f1.groupoid is not sd or f2.groupoid is not sd:
        raise PreconditionError("functions must live on the decomposition carrier")
    gauge, G, s = dec.gauge, dec.bundle.group, dec.section
    if w_parent is None:
        w_parent = HaarWeights.counting(gauge)

    def iso(x: int, h: int) -> int:
        return gauge.triple_index[(x, h, x)]

    def conj_by_sigma(x: int, g: int) -> int:
        return G.mul[G.mul[s.sigma[x]][g]][G.inverse[s.sigma[x]]]

    out = np.zeros(sd.n_arrows, dtype=complex)
    for i, (a0, a1) in enumerate(sd.pair_of):
        x = gauge.tgt[a1]
        y = gauge.src[a1]
        # a0 = (x, sigma(x)·g·sigma(x)⁻¹, x) for a unique g
        h = gauge.triples[a0][1]
        g = G.mul[G.mul[G.inverse[s.sigma[x]]][h]][s.sigma[x]]
        acc = 0j
        for z in range(gauge.n_base):
            t_xz = dec.translation[(x, z)]
            t_zy = dec.translation[(z, y)]
            mu = w_parent[t_xz]
            for gp in range(G.order):
                iso_x = iso(x, conj_by_sigma(x, gp))
                dg = w_parent[iso_x]
                j = sd.pair_index[(iso_x, t_xz)]
                k = sd.pair_index[
                    (iso(z, conj_by_sigma(z, G.mul[G.inverse[gp]][g])), t_zy)
                ]
                acc += dg * mu * f1.values[j] * f2.values[k]
        out[i] = acc
    return GroupoidFunction(sd, out)


def poincare_convolve_agreement(
    f1: GroupoidFunction,
    f2: GroupoidFunction,
    dec: PoincareDecomposition,
    w_parent: HaarWeights | None = None,
) -> float:
    """Max absolute difference between the explicit formula and the generic
    convolution kernel on the same carrier."""
    if w_parent is None:
        w_parent = HaarWeights.counting(dec.gauge)
    explicit = poincare_convolve(f1, f2, dec, w_parent)
    generic = groupoid_convolve(f1, f2, carrier_weights(dec.sd, w_parent))
    return float(np.max(np.abs(explicit.values - generic.values)))
